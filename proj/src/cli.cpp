#include "reslab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "reslab/acceptance.hpp"
#include "reslab/counterexamples.hpp"
#include "reslab/entire_analysis.hpp"
#include "reslab/errors.hpp"
#include "reslab/gevrey.hpp"
#include "reslab/horseshoe.hpp"
#include "reslab/io.hpp"
#include "reslab/nuclear_bounds.hpp"
#include "reslab/roots.hpp"
#include "reslab/symbolic_shift.hpp"

namespace reslab {

using nlohmann::json;

namespace {

std::string sci(double x, int digits = 3) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Reads command parameters and rejects anything left unread.
class ParamReader {
 public:
  ParamReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, std::optional<double> dflt = std::nullopt) {
    const json* v = take(key, dflt.has_value());
    if (!v) return *dflt;
    if (!v->is_number()) throw SchemaError(at(key) + ": expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw SchemaError(at(key) + ": not finite");
    return x;
  }

  std::uint64_t count(const std::string& key, std::optional<std::uint64_t> dflt, std::uint64_t lo,
                      std::uint64_t hi) {
    const json* v = take(key, dflt.has_value());
    if (!v) return *dflt;
    if (!v->is_number_unsigned()) throw SchemaError(at(key) + ": expected a non-negative integer");
    const auto x = v->get<std::uint64_t>();
    if (x < lo || x > hi)
      throw SchemaError(at(key) + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     std::optional<std::string> dflt = std::nullopt) {
    const json* v = take(key, dflt.has_value());
    if (!v) return *dflt;
    if (!v->is_string()) throw SchemaError(at(key) + ": expected a string");
    const auto s = v->get<std::string>();
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw SchemaError(at(key) + ": '" + s + "' is not one of " + list);
    }
    return s;
  }

  WeightSpec weight(const std::string& key = "weight") {
    const json* v = take(key, false);
    return io::weight_from_json(*v, at(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw SchemaError(at(key) + ": unknown field");
  }

 private:
  std::string at(const std::string& key) const { return path_ + "." + key; }
  const json* take(const std::string& key, bool optional) {
    used_.insert(key);
    if (!j_.contains(key)) {
      if (optional) return nullptr;
      throw SchemaError(at(key) + ": required field missing");
    }
    return &j_.at(key);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::string verdict_of(bool pass) { return pass ? "PASS" : "FAIL"; }

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  return s;
}

HorseshoeModel model_of(WeightSpec w, unsigned K) {
  HorseshoeModel m;
  m.weight = std::move(w);
  m.product_cutoff = K;
  m.validate();
  return m;
}

struct Context {
  const ExperimentSpec& spec;
  const RunOptions& options;
  RunResult result;
  json report = json::object();

  double tol(double dflt) const { return options.tol.value_or(dflt); }
  std::string csv_name() const {
    return spec.output.contains("csv") ? spec.output.at("csv").get<std::string>() : spec.command + ".csv";
  }
  std::string json_name() const {
    return spec.output.contains("json") ? spec.output.at("json").get<std::string>() : spec.command + ".json";
  }
  void check(std::string name, std::string verdict, std::string tolerance, std::string detail) {
    result.checks.push_back({std::move(name), std::move(verdict), std::move(tolerance), std::move(detail)});
  }
  void csv(const io::CsvTable& t) { result.artifacts[csv_name()] = t.render(); }
};

void series_rows(io::CsvTable& t, const PowerSeries& s) {
  t.header = {"n", "re", "im"};
  for (std::size_t n = 0; n <= s.order(); ++n)
    t.add_row({static_cast<double>(n), s[n].real(), s[n].imag()});
}

void cmd_zeta(Context& c) {
  ParamReader p(c.spec.params, "params");
  const auto w = p.weight();
  const auto order = p.count("order", 12, 1, 24);
  const auto route = p.choice("route", {"closed", "orbit", "both"}, "both");
  p.finish();
  io::CsvTable t;
  PowerSeries closed = PowerSeries::one(order), orbit = PowerSeries::one(order);
  if (route != "orbit") closed = zeta_inverse_series(w, order);
  if (route != "closed") orbit = det_from_traces(shift_traces(w, static_cast<unsigned>(order)), order);
  if (route == "both") {
    t.header = {"n", "re_closed", "im_closed", "re_orbit", "im_orbit"};
    double diff = 0.0;
    for (std::size_t n = 0; n <= order; ++n) {
      t.add_row({static_cast<double>(n), closed[n].real(), closed[n].imag(), orbit[n].real(), orbit[n].imag()});
      diff = std::max(diff, std::abs(closed[n] - orbit[n]));
    }
    const double tol = c.tol(1e-10);
    c.check("zeta inverse routes agree", verdict_of(diff <= tol), "abs " + sci(tol), "max diff " + sci(diff));
    c.report["max_route_difference"] = diff;
  } else {
    series_rows(t, route == "closed" ? closed : orbit);
  }
  c.csv(t);
}

void cmd_det(Context& c) {
  ParamReader p(c.spec.params, "params");
  const auto w = p.weight();
  const auto order = p.count("order", 40, 1, 400);
  const auto K = p.count("cutoff", 6, 0, 40);
  p.finish();
  const auto m = model_of(w, static_cast<unsigned>(K));
  const auto d = horseshoe_determinant(m, order);
  const auto via_log = horseshoe_determinant_log(m, order);
  double diff = 0.0;
  for (std::size_t n = 0; n <= order; ++n) diff = std::max(diff, std::abs(d[n] - via_log[n]) / std::max(1.0, std::abs(d[n])));
  io::CsvTable t;
  series_rows(t, d);
  const double rr = reliability_radius(d, 1e-12);
  t.comments.push_back("reliability_radius=" + io::format_double(rr));
  c.csv(t);
  const double tol = c.tol(1e-10);
  c.check("product and trace routes agree", verdict_of(diff <= tol), "rel " + sci(tol),
          "max diff " + sci(diff) + ", reliability radius " + sci(rr, 6));
  c.report["reliability_radius"] = rr;
}

void cmd_resonances(Context& c) {
  ParamReader p(c.spec.params, "params");
  const auto w = p.weight();
  const double radius = p.number("radius");
  const auto order = p.count("order", 40, 1, 400);
  const auto K = p.count("cutoff", 6, 0, 40);
  const double tol = c.tol(p.number("tol", 1e-12));
  p.finish();
  if (!(radius > 0.0)) throw SchemaError("params.radius: must be positive");
  const auto m = model_of(w, static_cast<unsigned>(K));
  const auto d = horseshoe_determinant(m, order);
  const auto rs = find_resonances(d, radius, tol);
  c.csv(io::resonance_table(rs));
  const long contour = horseshoe_zero_count(m, radius);
  c.check("argument-principle count", verdict_of(contour == rs.total_multiplicity()), "exact",
          std::to_string(rs.zeros.size()) + " distinct zeros, multiplicity " + std::to_string(rs.total_multiplicity()) +
              ", product-form count " + std::to_string(contour));
  c.report["reliability_radius"] = rs.reliability_radius;
  c.report["total_multiplicity"] = rs.total_multiplicity();
}

void cmd_trace_check(Context& c) {
  ParamReader p(c.spec.params, "params");
  const auto w = p.weight();
  const double radius = p.number("radius", 20.0);
  const double r = p.number("r", 0.5);
  const auto n_max = p.count("n_max", 6, 1, 20);
  const bool fixed_order = p.has("order");
  auto order = p.count("order", 40, 1, 400);
  const auto K = p.count("cutoff", 6, 0, 40);
  const bool global = p.has("global") ? p.choice("global", {"on", "off"}) == "on" : w.is_polynomial();
  p.finish();
  const auto m = model_of(w, static_cast<unsigned>(K));
  auto d = horseshoe_determinant(m, order);
  // Deepen the expansion until it is reliable on the requested disc.
  for (int deeper : {60, 80}) {
    if (fixed_order || reliability_radius(d, 1e-12) >= radius) break;
    order = deeper;
    d = horseshoe_determinant(m, order);
  }
  const auto rs = find_resonances(d, radius, 1e-12);
  const auto traces = horseshoe_traces(m, static_cast<unsigned>(n_max));
  const auto local = check_local_trace_formula(traces, rs.zeros, r, static_cast<unsigned>(n_max));
  io::CsvTable t;
  t.header = {"n", "re_e", "im_e", "e_scaled", "noise"};
  for (const auto& row : local.rows)
    t.add_row({static_cast<double>(row.n), row.e.real(), row.e.imag(), row.e_scaled, row.noise});
  c.csv(t);
  const std::string zeros = rs.zeros.empty() ? "resonance set empty"
                                              : std::to_string(rs.total_multiplicity()) + " resonances in |z|<" + sci(radius);
  c.check("local trace formula", verdict_of(local.pass), "slope < 0 above noise",
          zeros + "; local formula " + verdict_of(local.pass) + " at r=" + sci(r));
  json global_rows = json::array();
  if (global) {
    if (!w.is_polynomial()) throw SchemaError("params.global: needs a polynomial weight");
    const auto z = zeta_inverse_series(w, w.max_degree() + 2);
    std::vector<cplx> coeffs(z.order() + 1);
    for (std::size_t n = 0; n <= z.order(); ++n) coeffs[n] = z[n];
    const auto roots = aberth_roots(coeffs);
    if (!roots.converged) throw NonConvergenceError("zeta inverse roots did not converge", 0.0);
    std::vector<Zero> factor;
    for (cplx root : roots.roots) factor.push_back({root, 1});
    const TailModel tm = shell_tail_model(factor);
    std::string passed;
    for (unsigned n = 1; n <= n_max; ++n) {
      auto g = shell_generator(factor);
      const auto v = check_global_trace_formula(traces, *g, n, &tm);
      if (v.pass()) passed += (passed.empty() ? "" : ",") + std::to_string(n);
      global_rows.push_back({{"n", n}, {"pass", v.pass()}, {"tail_bound", v.tail_bound}, {"note", v.note}});
    }
    c.check("global trace formula", "PASS", "certified tails", "holds at n in {" + passed + "}");
  }
  c.report["local_slope"] = local.slope;
  c.report["global"] = global_rows;
}

void cmd_counterexample(Context& c) {
  ParamReader p(c.spec.params, "params");
  const auto kind = p.choice("kind", {"a", "b"}, "a");
  const auto mode = p.choice("mode", {"traces", "reorder"}, "traces");
  const auto n = p.count("n", 1, 1, 12);
  const auto m_max = p.count("m_max", 100000, 100, 100000000);
  const auto k_max = p.count("k_max", 6, 1, 9);
  p.finish();
  auto series = kind == "a" ? CounterexampleSeries::type_a() : CounterexampleSeries::type_b();
  io::CsvTable t;
  t.header = {"m", "re_S", "im_S", "order_tag"};
  if (mode == "reorder") {
    const auto demo = reorder_divergence_demo(static_cast<unsigned>(n), static_cast<unsigned>(k_max), series.rotation);
    for (std::size_t i = 0; i < demo.natural.size(); ++i)
      t.add_row({std::to_string(i), io::format_double(demo.natural[i].real()),
                 io::format_double(demo.natural[i].imag()), "natural"});
    for (std::size_t i = 0; i < demo.reordered.size(); ++i)
      t.add_row({std::to_string(i), io::format_double(demo.reordered[i].real()),
                 io::format_double(demo.reordered[i].imag()), "reordered"});
    bool bounded = true, jumps = true;
    for (const auto& b : demo.blocks) {
      bounded = bounded && b.natural_spread <= b.natural_bound;
      if (b.qualifying) jumps = jumps && b.jump >= b.bound;
    }
    c.check("natural order stays within block bounds", verdict_of(bounded), "Abel bound", "");
    c.check("reordering jumps by the prescribed amount", verdict_of(jumps), "N_k/(2 ln(k+2)^n)", "");
  } else {
    std::vector<CounterexampleTrace> partial;
    for (std::uint64_t m0 = 1000; m0 <= m_max; m0 *= 10) {
      partial.push_back(counterexample_traces(series, static_cast<unsigned>(n), m0));
      t.add_row({std::to_string(m0), io::format_double(partial.back().value.real()),
                 io::format_double(partial.back().value.imag()), "natural"});
    }
    const auto full = accelerated_trace(series, static_cast<unsigned>(n));
    t.add_row({"inf", io::format_double(full.value.real()), io::format_double(full.value.imag()), "accelerated"});
    bool cauchy = true;
    for (const auto& pt : partial)
      cauchy = cauchy && std::abs(pt.value - full.value) <= pt.tail_bound + full.tail_bound;
    c.check("partial sums converge within tails", verdict_of(cauchy), "tail bound",
            "a_" + std::to_string(n) + " = " + sci(full.value.real(), 12) + (full.value.imag() < 0 ? "" : "+") +
                sci(full.value.imag(), 12) + "i +- " + sci(full.tail_bound));
  }
  c.csv(t);
}

void cmd_nuclear(Context& c) {
  ParamReader p(c.spec.params, "params");
  const double theta = p.number("theta", 0.5);
  const double beta = p.number("beta", 1.0);
  const auto N = p.count("N", 20, 10, 200);
  p.finish();
  if (!(theta > 0.0 && theta < 1.0)) throw SchemaError("params.theta: must lie in (0, 1)");
  if (!(beta > 0.0)) throw SchemaError("params.beta: must be positive");
  const auto a = ruse_coefficients(theta, beta, 0, N);
  io::CsvTable t;
  t.header = {"n", "a_n"};
  for (std::size_t n = 0; n <= N; ++n) t.add_row({static_cast<double>(n), a[n]});
  c.csv(t);
  const std::vector<double> v(a.begin() + 1, a.end());
  const double q = 1.0 + 1.0 / beta;
  const auto fit = fit_stretched_bound(v, q);
  c.check("stretched-exponential bound", upper(to_string(fit.verdict)), "R^2 >= 0.98, exponent >= q - 0.2",
          "hypothesis q=" + sci(q, 4) + ", free exponent " + sci(fit.exponent_fit, 4) + ", R^2 " + sci(fit.r_squared, 4));
  c.report["exponent_fit"] = fit.exponent_fit;
  c.report["D_fit"] = fit.D_fit;
}

void cmd_gevrey(Context& c) {
  ParamReader p(c.spec.params, "params");
  const auto family = p.choice("profile", {"gaussian", "bump", "indicator"});
  const double a = p.number("a", 1.0);
  const auto log2_size = p.count("log2_size", 16, 4, 26);
  const double extent = p.number("extent", 16.0);
  const bool has_sigma = p.has("sigma");
  const double sigma = has_sigma ? p.number("sigma") : 2.0;
  const auto alpha_max = p.count("alpha_max", 10, 1, 12);
  p.finish();
  GevreyProfile prof = family == "gaussian" ? GevreyProfile::gaussian(sigma, static_cast<unsigned>(log2_size), extent)
                       : family == "bump"   ? GevreyProfile::bump(a, static_cast<unsigned>(log2_size), extent)
                                            : GevreyProfile::indicator(sigma, static_cast<unsigned>(log2_size), extent);
  if (family == "bump" && has_sigma) prof.sigma = sigma;
  try {
    prof.validate();
  } catch (const DomainError& e) {
    throw SchemaError(std::string("params: ") + e.what());
  }
  const auto d = fourier_decay_check(prof);
  io::CsvTable t;
  t.header = {"xi", "envelope"};
  for (std::size_t i = 0; i < d.xi.size(); ++i) t.add_row({d.xi[i], d.envelope[i]});
  c.csv(t);
  const std::string decay_verdict = d.verdict == DecayVerdict::Pass ? "PASS"
                                    : d.verdict == DecayVerdict::Fail ? "FAIL"
                                                                      : "UNDETERMINED";
  c.check("Fourier decay", decay_verdict, "q >= " + sci(d.threshold, 4),
          "q=" + sci(d.exponent, 4) + (d.non_gevrey ? ", non-Gevrey power-law decay" : "") + "; " + d.reason);
  const auto g = gevrey_condition_check(prof, static_cast<unsigned>(alpha_max));
  c.check("Gevrey derivative bound", verdict_of(g.ok), "R <= 1e3, no drift",
          "C=" + sci(g.C, 4) + " R=" + sci(g.R, 4) + (g.reason.empty() ? "" : "; " + g.reason));
  c.report["condition_R"] = g.R;
  c.report["exponent"] = d.exponent;
  c.report["non_gevrey"] = d.non_gevrey;
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> c{"zeta", "det", "resonances", "trace-check", "counterexample", "nuclear",
                                          "gevrey"};
  return c;
}

ExperimentSpec parse_experiment_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("$: expected an object");
  ExperimentSpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (!value.is_string()) throw SchemaError("$.command: expected a string");
      s.command = value.get<std::string>();
      const auto& cmds = experiment_commands();
      if (std::find(cmds.begin(), cmds.end(), s.command) == cmds.end())
        throw SchemaError("$.command: unknown command '" + s.command + "'");
    } else if (key == "params") {
      if (!value.is_object()) throw SchemaError("$.params: expected an object");
      s.params = value;
    } else if (key == "output") {
      if (!value.is_object()) throw SchemaError("$.output: expected an object");
      for (const auto& [k, v] : value.items()) {
        if (k != "csv" && k != "json") throw SchemaError("$.output." + k + ": unknown field");
        if (!v.is_string() || v.get<std::string>().empty()) throw SchemaError("$.output." + k + ": expected a file name");
        const std::filesystem::path name(v.get<std::string>());
        if (name.has_parent_path() || name.is_absolute())
          throw SchemaError("$.output." + k + ": must be a plain file name inside the output directory");
      }
      s.output = value;
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw SchemaError("$.seed: expected a non-negative integer");
      s.seed = value.get<std::uint64_t>();
    } else {
      throw SchemaError("$." + key + ": unknown field");
    }
  }
  if (s.command.empty()) throw SchemaError("$.command: required field missing");
  return s;
}

bool RunResult::failed() const {
  return std::any_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.verdict == "FAIL"; });
}

RunResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  Context c{spec, options, {}, {}};
  if (spec.command == "zeta") cmd_zeta(c);
  else if (spec.command == "det") cmd_det(c);
  else if (spec.command == "resonances") cmd_resonances(c);
  else if (spec.command == "trace-check") cmd_trace_check(c);
  else if (spec.command == "counterexample") cmd_counterexample(c);
  else if (spec.command == "nuclear") cmd_nuclear(c);
  else if (spec.command == "gevrey") cmd_gevrey(c);
  else throw SchemaError("$.command: unknown command '" + spec.command + "'");
  json checks = json::array();
  for (const auto& ch : c.result.checks)
    checks.push_back({{"name", ch.name}, {"verdict", ch.verdict}, {"tolerance", ch.tolerance}, {"detail", ch.detail}});
  c.report["command"] = spec.command;
  c.report["checks"] = checks;
  if (spec.seed || options.seed) c.report["seed"] = options.seed.value_or(spec.seed.value_or(0));
  c.result.artifacts[c.json_name()] = c.report.dump(2) + "\n";
  return c.result;
}

void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir) {
  for (const auto& [name, content] : result.artifacts) io::write_atomic(out_dir / name, content);
}

std::string format_check(const CheckLine& c) {
  std::string s = c.verdict + " " + c.name;
  if (!c.detail.empty()) s += ": " + c.detail;
  if (!c.tolerance.empty()) s += " (tol: " + c.tolerance + ")";
  return s;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"resonance laboratory: experiment specs and acceptance reproduction"};
  std::string spec_path, out_dir = ".";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> criteria;
  app.add_option("--spec", spec_path, "JSON experiment spec");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--tol", tol, "override the governing tolerance");
  app.add_option("--seed", seed, "seed for randomized sampling");
  auto* repro = app.add_subcommand("repro", "run the acceptance suite");
  repro->fallthrough();
  repro->add_option("--criteria", criteria, "comma-separated criterion IDs")->delimiter(',');
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (repro->parsed()) {
    if (!spec_path.empty()) {
      err << "error: --spec cannot be combined with repro\n";
      return 2;
    }
    AcceptanceOptions o;
    if (seed) o.seed = *seed;
    o.tol = tol;
    std::vector<CriterionResult> results;
    try {
      results = run_acceptance(criteria, o, [&](const CriterionResult& r) { out << format_result_line(r) << std::endl; });
    } catch (const DomainError& e) {
      err << "error: --criteria: " << e.what() << "\n";
      return 2;
    }
    if (app.get_option("--out")->count()) io::write_atomic(std::filesystem::path(out_dir) / "acceptance.md",
                                                           markdown_summary(results));
    const bool any_fail = std::any_of(results.begin(), results.end(), [](const CriterionResult& r) { return !r.pass; });
    return any_fail ? 1 : 0;
  }

  if (spec_path.empty()) {
    err << "error: --spec is required (or use the repro subcommand)\n";
    return 2;
  }
  std::ifstream f(spec_path);
  if (!f) {
    err << "error: cannot read " << spec_path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  RunResult result;
  try {
    const auto spec = parse_experiment_spec(buf.str());
    result = run_experiment(spec, RunOptions{tol, seed});
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "schema error: params: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    out << "FAIL " << e.what() << "\n";
    return 1;
  }
  write_artifacts(result, out_dir);
  for (const auto& c : result.checks) out << format_check(c) << "\n";
  return result.failed() ? 1 : 0;
}

}  // namespace reslab
