#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "reslab/horseshoe.hpp"
#include "reslab/symbolic_shift.hpp"

namespace reslab::io {

// Round-trip formatting with 17 significant digits.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> comments;  // emitted as leading "# ..." lines
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
  std::string render() const;
};

// Writes to a sibling temporary and renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// {"alpha": [[re, im], ...]} or {"generator": name, "params": {...}}; errors name the JSON path.
WeightSpec weight_from_json(const nlohmann::json& j, const std::string& path = "weight");
nlohmann::json weight_to_json(const WeightSpec& w);

// re(z), im(z), multiplicity, re(lambda), im(lambda) with the reliability radius as a comment row.
CsvTable resonance_table(const ResonanceSet& set);

}  // namespace reslab::io
