#include "reslab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "reslab/errors.hpp"

namespace reslab::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  rows.push_back(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }

std::string CsvTable::render() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  for (const auto& c : comments) out << "# " << c << '\n';
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ResourceError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw ResourceError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

WeightSpec weight_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path + ": expected an object");
  const bool has_alpha = j.contains("alpha"), has_gen = j.contains("generator");
  if (has_alpha == has_gen) throw SchemaError(path + ": exactly one of 'alpha' or 'generator' is required");
  bool positive = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "positive") {
      if (!value.is_boolean()) throw SchemaError(path + ".positive: expected a boolean");
      positive = value.get<bool>();
    } else if (key != "alpha" && key != "generator" && key != "params") {
      throw SchemaError(path + "." + key + ": unknown field");
    }
  }
  if (has_alpha) {
    if (j.contains("params")) throw SchemaError(path + ".params: only allowed with a generator");
    const auto& a = j.at("alpha");
    if (!a.is_array()) throw SchemaError(path + ".alpha: expected an array");
    std::vector<cplx> alpha;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto& e = a[k];
      const std::string p = path + ".alpha[" + std::to_string(k) + "]";
      if (e.is_number()) {
        alpha.emplace_back(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        alpha.emplace_back(e[0].get<double>(), e[1].get<double>());
      } else {
        throw SchemaError(p + ": expected [re, im] or a number");
      }
    }
    try {
      return WeightSpec::from_alpha(std::move(alpha), positive);
    } catch (const DomainError& e) {
      throw SchemaError(path + ".alpha: " + e.what());
    }
  }
  if (!j.at("generator").is_string()) throw SchemaError(path + ".generator: expected a string");
  GeneratorParams params;
  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) throw SchemaError(path + ".params: expected an object");
    for (const auto& [key, value] : p.items()) {
      if (!value.is_number()) throw SchemaError(path + ".params." + key + ": expected a number");
      params[key] = value.get<double>();
    }
  }
  try {
    return WeightSpec::from_generator(j.at("generator").get<std::string>(), params, positive);
  } catch (const DomainError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

nlohmann::json weight_to_json(const WeightSpec& w) {
  nlohmann::json j;
  if (w.is_generator()) {
    j["generator"] = w.generator();
    j["params"] = nlohmann::json::object();
    for (const auto& [k, v] : w.params()) j["params"][k] = v;
  } else {
    j["alpha"] = nlohmann::json::array();
    for (cplx a : w.listed_alpha()) j["alpha"].push_back({a.real(), a.imag()});
  }
  if (w.positive()) j["positive"] = true;
  return j;
}

CsvTable resonance_table(const ResonanceSet& set) {
  CsvTable t;
  t.comments.push_back("reliability_radius=" + format_double(set.reliability_radius));
  t.header = {"re_z", "im_z", "multiplicity", "re_lambda", "im_lambda"};
  for (const Zero& z : set.zeros) {
    const cplx lam = 1.0 / z.z;
    t.add_row({format_double(z.z.real()), format_double(z.z.imag()), std::to_string(z.multiplicity),
               format_double(lam.real()), format_double(lam.imag())});
  }
  return t;
}

}  // namespace reslab::io
