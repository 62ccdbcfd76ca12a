#pragma once

// File formats.
//
// Vector system (JSON):
//   {"format_version": 1, "dim": 2, "vectors": [[1, 0], ...], "weights": [0.5, ...]}
// "format_version" is written on output and optional on input.
//
// Point cloud (CSV): one point per row, comma separated; blank lines and
// lines starting with '#' are skipped.
//
// Experiments (CSV):
//   seed,kind,d,m,trials,estimate,stderr,exact_reference,threshold

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "isovec/errors.hpp"
#include "isovec/linalg.hpp"
#include "isovec/montecarlo.hpp"
#include "isovec/mvee.hpp"
#include "isovec/selection.hpp"
#include "isovec/systems.hpp"

namespace isovec::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

inline json to_json(const WeightedVectorSystem& s) {
  json j;
  j["format_version"] = kFormatVersion;
  j["dim"] = s.dim();
  j["vectors"] = s.vectors();
  j["weights"] = s.weights();
  return j;
}

inline WeightedVectorSystem system_from_json(const json& j) {
  try {
    if (j.contains("format_version") && j.at("format_version").get<int>() != kFormatVersion)
      throw InvalidArgument("system file: unsupported format_version");
    return WeightedVectorSystem(j.at("dim").get<std::size_t>(), j.at("vectors").get<std::vector<Vector>>(),
                                j.at("weights").get<Vector>());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("system file: ") + e.what());
  }
}

inline json to_json(const IsotropyReport& r) {
  return {{"format_version", kFormatVersion}, {"tensor_residual", r.tensor_residual},
          {"center_residual", r.center_residual}, {"weight_sum", r.weight_sum},
          {"tolerance", r.tolerance}, {"is_isotropic", r.is_isotropic}, {"is_centered", r.is_centered}};
}

inline json to_json(const SelectionCertificate& c) {
  return {{"format_version", kFormatVersion}, {"indices", c.indices},
          {"basis", c.basis}, {"step_norms", c.step_norms}, {"det_squared", c.det_squared}};
}

inline json to_json(const MveeResult& r) {
  std::vector<Vector> shape;
  for (std::size_t i = 0; i < r.shape.rows(); ++i) shape.emplace_back(r.shape.row(i).begin(), r.shape.row(i).end());
  return {{"format_version", kFormatVersion}, {"shape", shape}, {"support_indices", r.support_indices},
          {"dual_weights", r.dual_weights}, {"iterations", r.iterations}, {"max_violation", r.max_violation}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline WeightedVectorSystem load_system(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
  return system_from_json(j);
}

inline void save_system(const std::string& path, const WeightedVectorSystem& s) {
  write_file(path, to_json(s).dump(2) + "\n");
}

inline std::vector<Vector> parse_points_csv(std::string_view text) {
  std::vector<Vector> points;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    Vector p;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      std::string_view field = rest.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw InvalidArgument("points CSV line " + std::to_string(line_no) + ": bad number '" +
                              std::string(field) + "'");
      p.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!points.empty() && p.size() != points.front().size())
      throw InvalidArgument("points CSV line " + std::to_string(line_no) + ": inconsistent column count");
    points.push_back(std::move(p));
  }
  if (points.empty()) throw InvalidArgument("points CSV: no points");
  return points;
}

inline std::vector<Vector> load_points(const std::string& path) { return parse_points_csv(read_file(path)); }

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline constexpr std::string_view kExperimentHeader =
    "seed,kind,d,m,trials,estimate,stderr,exact_reference,threshold";

inline std::string experiment_csv_row(const ExperimentRecord& r) {
  std::string row = std::to_string(r.seed) + "," + r.kind + "," + std::to_string(r.dim) + ",";
  if (r.m) row += std::to_string(*r.m);
  row += "," + std::to_string(r.trials) + "," + format_double(r.estimate) + "," + format_double(r.standard_error) + ",";
  if (r.exact_reference) row += format_double(*r.exact_reference);
  row += ",";
  if (r.threshold) row += format_double(*r.threshold);
  return row;
}

}  // namespace isovec::io
