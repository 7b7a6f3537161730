#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "affsph/families.hpp"
#include "affsph/grid.hpp"
#include "affsph/verify.hpp"
#include "json.hpp"

namespace affsph {

namespace detail {

inline nlohmann::ordered_json finite_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json vector_json(const std::vector<double>& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (double x : v) a.push_back(finite_or_null(x));
  return a;
}

inline nlohmann::ordered_json grid_json(const std::vector<int>& counts, const std::vector<std::pair<double, double>>& ranges) {
  nlohmann::ordered_json g;
  g["counts"] = counts;
  nlohmann::ordered_json r = nlohmann::ordered_json::array();
  for (const auto& [lo, hi] : ranges) r.push_back({lo, hi});
  g["ranges"] = r;
  return g;
}

}  // namespace detail

/// Shortest round-trip text for a double, '.' decimal, 17 significant digits.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// RFC-4180 quoting: fields with a comma, quote or line break are quoted.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Non-finite numbers become null. `with_wall_time = false` drops the only
/// field that varies between identical runs.
inline nlohmann::ordered_json report_json(const VerificationReport& rep, bool with_wall_time = true) {
  nlohmann::ordered_json j;
  j["family"] = rep.family;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rep.parameters) params[k] = detail::finite_or_null(v);
  j["parameters"] = params;
  j["grid"] = detail::grid_json(rep.grid_counts, rep.grid_ranges);
  j["seed"] = rep.seed;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["max_residual"] = detail::finite_or_null(c.max_residual);
    cj["tolerance"] = c.tolerance;
    cj["pass"] = c.pass;
    if (c.witness) {
      cj["witness"] = {{"point", detail::vector_json(c.witness->point)},
                       {"value", detail::finite_or_null(c.witness->value)}};
    }
    checks.push_back(cj);
  }
  j["checks"] = checks;
  nlohmann::ordered_json constants = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rep.constants) constants[k] = detail::finite_or_null(v);
  j["constants"] = constants;
  if (with_wall_time) j["wall_time_s"] = rep.wall_time_s;
  return j;
}

inline void write_report_json(std::ostream& os, const VerificationReport& rep) {
  os << report_json(rep).dump(2) << '\n';
}

/// One row per check; witness coordinates are joined with ';'.
inline void write_report_csv(std::ostream& os, const VerificationReport& rep) {
  os << "name,max_residual,tolerance,pass,witness_point,witness_value\r\n";
  for (const auto& c : rep.checks) {
    std::string point, value;
    if (c.witness) {
      for (std::size_t i = 0; i < c.witness->point.size(); ++i) {
        if (i) point += ';';
        point += format_number(c.witness->point[i]);
      }
      value = format_number(c.witness->value);
    }
    os << csv_field(c.name) << ',' << format_number(c.max_residual) << ',' << format_number(c.tolerance) << ','
       << (c.pass ? "true" : "false") << ',' << csv_field(point) << ',' << value << "\r\n";
  }
}

/// Family values on the grid, one row per point in grid order.
struct Sample {
  std::vector<std::string> coordinates;
  std::vector<std::string> components;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> values;
};

inline Sample sample_family(const Family& fam, const Grid& grid) {
  if (grid.dim() != fam.dim()) throw InvalidArgument("grid dimension does not match the family");
  Sample s;
  s.coordinates = fam.coordinate_names;
  for (int c = 0; c < fam.f.codomain_dim(); ++c) s.components.push_back("f" + std::to_string(c + 1));
  for (std::size_t k = 0; k < grid.size(); ++k) s.points.push_back(grid.point(k));
  s.values = parallel_map(grid.size(), [&](std::size_t k) { return fam.f(s.points[k]); });
  return s;
}

inline void write_sample_csv(std::ostream& os, const Sample& s) {
  std::vector<std::string> header = s.coordinates;
  header.insert(header.end(), s.components.begin(), s.components.end());
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
  os << "\r\n";
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    bool first = true;
    for (const auto* row : {&s.points[k], &s.values[k]}) {
      for (double v : *row) {
        os << (first ? "" : ",") << format_number(v);
        first = false;
      }
    }
    os << "\r\n";
  }
}

inline nlohmann::ordered_json sample_json(const std::string& family, const Grid& grid, const Sample& s) {
  nlohmann::ordered_json j;
  j["family"] = family;
  j["grid"] = detail::grid_json(grid.counts(), grid.box().ranges());
  j["coordinates"] = s.coordinates;
  j["components"] = s.components;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array(), vals = nlohmann::ordered_json::array();
  for (const auto& p : s.points) pts.push_back(detail::vector_json(p));
  for (const auto& v : s.values) vals.push_back(detail::vector_json(v));
  j["points"] = pts;
  j["values"] = vals;
  return j;
}

}  // namespace affsph
