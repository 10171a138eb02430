#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "nleig/error.hpp"
#include "nleig/grid.hpp"
#include "nleig/solver.hpp"

namespace nleig {

using Json = nlohmann::ordered_json;

/// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  for (char& c : s) {
    if (c == ',') c = '.';
  }
  return s;
}

/// Writes to a sibling temporary and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  require(!ec, ErrorCode::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorCode::Io, "write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::Io, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string profile_csv(const Profile& p) {
  std::string out = "x,value\n";
  const Grid& g = p.grid();
  for (std::size_t j = 0; j < p.size(); ++j) {
    out += format_number(g.node(j));
    out += ',';
    out += format_number(p[j]);
    out += '\n';
  }
  return out;
}

inline void write_profile_csv(const std::filesystem::path& path, const Profile& p) {
  write_file_atomic(path, profile_csv(p));
}

/// Reads an `x,value` CSV back onto `g`; the node column must match the grid.
inline Profile read_profile_csv(const std::filesystem::path& path, const Grid& g) {
  std::istringstream in(read_file(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == "x,value", ErrorCode::Io,
          path.string() + ": missing `x,value` header");
  std::vector<double> values;
  values.reserve(g.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorCode::Io, path.string() + ": malformed row '" + line + "'");
    const double x = std::stod(line.substr(0, comma));
    const double v = std::stod(line.substr(comma + 1));
    require(values.size() < g.size(), ErrorCode::GridMismatch, path.string() + ": more rows than grid nodes");
    require(std::abs(x - g.node(values.size())) <= 1e-9 * std::max(1.0, g.half_period()), ErrorCode::GridMismatch,
            path.string() + ": node column does not match the grid");
    values.push_back(v);
  }
  require(values.size() == g.size(), ErrorCode::GridMismatch, path.string() + ": fewer rows than grid nodes");
  return Profile(g, std::move(values));
}

inline Json cone_json(const ConeReport& c) {
  return Json{{"even_deviation", c.even_deviation},
              {"min_value", c.min_value},
              {"unimodality_deviation", c.unimodality_deviation}};
}

inline Json solution_json(const Solution& s) {
  Json warnings = Json::array();
  for (const auto& w : s.warnings) warnings.push_back(w);
  return Json{{"sigma", s.sigma},
              {"K", s.K},
              {"P", s.energies.P},
              {"Q", s.energies.Q},
              {"K_measured", s.energies.K},
              {"sup_U", s.energies.sup_U},
              {"residual", s.residual},
              {"el_residual", s.el_residual},
              {"iterations", s.iterations},
              {"converged", s.converged},
              {"cone", cone_json(s.cone)},
              {"warnings", warnings}};
}

/// Writes solution.json, V.csv and U.csv into `dir`.
inline void write_solution(const std::filesystem::path& dir, const Solution& s) {
  write_file_atomic(dir / "solution.json", solution_json(s).dump(2) + "\n");
  write_profile_csv(dir / "V.csv", s.V);
  write_profile_csv(dir / "U.csv", s.U);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    require(row.size() == t.columns.size(), ErrorCode::InvalidArgument, "table row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

/// Writes `path` (CSV) and a JSON sidecar next to it holding the predictor
/// constants and the same rows.
inline void emit_plot_data(const Table& table, const Json& predictors, const std::filesystem::path& path) {
  require(!table.rows.empty(), ErrorCode::EmptyResult, "no rows to write to " + path.string());
  write_file_atomic(path, table_csv(table));
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = row[i];
    rows.push_back(std::move(r));
  }
  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".json");
  write_file_atomic(sidecar, Json{{"predictors", predictors}, {"rows", rows}}.dump(2) + "\n");
}

}  // namespace nleig
