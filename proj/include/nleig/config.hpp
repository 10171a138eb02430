#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nleig/asymptotics.hpp"
#include "nleig/error.hpp"
#include "nleig/io.hpp"
#include "nleig/kernels.hpp"
#include "nleig/nonlinearity.hpp"
#include "nleig/solver.hpp"

namespace nleig {

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"solve",          "sweep-k",         "kdv",
                                                 "high-energy",    "decay",           "validate-kernel",
                                                 "uniqueness-probe"};
  return names;
}

struct GridSpec {
  double L = 25.0;
  std::size_t n = 2000;
};

struct SolverSpec {
  double tol_residual = 1e-10;
  std::size_t max_iter = 100000;
  double init_width = 0.0;  // 0: twice the kernel width
  bool enforce_symmetry = true;
  double monotonicity_slack = 1e-12;
  double cone_tolerance = 1e-9;
};

/// Everything one CLI invocation needs. Every field has a default and is
/// echoed back in meta.json.
struct RunConfig {
  std::string command = "solve";
  KernelSpec kernel;
  NonlinearitySpec nonlinearity;
  GridSpec grid;
  SolverSpec solver;
  double K = 1.0;
  std::vector<double> K_list = {0.5, 1.0, 2.0};
  std::vector<double> eps_list = {0.2, 0.1, 0.05};
  KdvGridPolicy kdv_grid;
  std::vector<double> delta_list = {0.2, 0.1, 0.05, 0.02};
  double m = 4.0;
  std::optional<double> c;
  std::array<double, 2> tail_window = {0.5, 0.8};
  std::size_t n_starts = 5;
  double start_offset_max = 0.0;
  std::uint64_t seed = 1;
  bool warm_start = false;
  bool allow_nonstandard = false;
};

namespace detail {

inline void reject_unknown_keys(const Json& obj, const std::set<std::string>& known, const std::string& where) {
  require(obj.is_object(), ErrorCode::InvalidConfig, where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    require(known.count(item.key()) > 0, ErrorCode::InvalidConfig, "unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void read_key(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, where + "." + key + ": " + e.what());
  }
}

}  // namespace detail

/// Accepts either a config document or a meta.json holding one under "config".
inline RunConfig parse_run_config(const Json& doc_in) {
  const Json& doc = doc_in.contains("config") && doc_in.contains("version") ? doc_in.at("config") : doc_in;
  detail::reject_unknown_keys(doc,
                              {"command", "kernel", "nonlinearity", "grid", "solver", "K", "K_list", "eps_list",
                               "kdv_grid", "delta_list", "m", "c", "tail_window", "n_starts", "start_offset_max", "seed",
                               "warm_start", "allow_nonstandard"},
                              "config");
  RunConfig cfg;
  detail::read_key(doc, "command", cfg.command, "config");
  if (doc.contains("kernel")) {
    const Json& k = doc.at("kernel");
    detail::reject_unknown_keys(k, {"kind", "width", "separation", "normalize"}, "kernel");
    detail::read_key(k, "kind", cfg.kernel.kind, "kernel");
    detail::read_key(k, "width", cfg.kernel.width, "kernel");
    detail::read_key(k, "separation", cfg.kernel.separation, "kernel");
    detail::read_key(k, "normalize", cfg.kernel.normalize, "kernel");
  }
  if (doc.contains("nonlinearity")) {
    const Json& n = doc.at("nonlinearity");
    detail::reject_unknown_keys(n, {"kind", "alpha", "beta", "m"}, "nonlinearity");
    detail::read_key(n, "kind", cfg.nonlinearity.kind, "nonlinearity");
    detail::read_key(n, "alpha", cfg.nonlinearity.alpha, "nonlinearity");
    detail::read_key(n, "beta", cfg.nonlinearity.beta, "nonlinearity");
    detail::read_key(n, "m", cfg.nonlinearity.m, "nonlinearity");
  }
  if (doc.contains("grid")) {
    const Json& g = doc.at("grid");
    detail::reject_unknown_keys(g, {"L", "n"}, "grid");
    detail::read_key(g, "L", cfg.grid.L, "grid");
    detail::read_key(g, "n", cfg.grid.n, "grid");
  }
  if (doc.contains("solver")) {
    const Json& s = doc.at("solver");
    detail::reject_unknown_keys(s,
                                {"tol_residual", "max_iter", "init_width", "enforce_symmetry", "monotonicity_slack",
                                 "cone_tolerance"},
                                "solver");
    detail::read_key(s, "tol_residual", cfg.solver.tol_residual, "solver");
    detail::read_key(s, "max_iter", cfg.solver.max_iter, "solver");
    detail::read_key(s, "init_width", cfg.solver.init_width, "solver");
    detail::read_key(s, "enforce_symmetry", cfg.solver.enforce_symmetry, "solver");
    detail::read_key(s, "monotonicity_slack", cfg.solver.monotonicity_slack, "solver");
    detail::read_key(s, "cone_tolerance", cfg.solver.cone_tolerance, "solver");
  }
  if (doc.contains("kdv_grid")) {
    const Json& p = doc.at("kdv_grid");
    detail::reject_unknown_keys(p, {"min_half_period", "scale", "spacing_factor", "max_points"}, "kdv_grid");
    detail::read_key(p, "min_half_period", cfg.kdv_grid.min_half_period, "kdv_grid");
    detail::read_key(p, "scale", cfg.kdv_grid.scale, "kdv_grid");
    detail::read_key(p, "spacing_factor", cfg.kdv_grid.spacing_factor, "kdv_grid");
    detail::read_key(p, "max_points", cfg.kdv_grid.max_points, "kdv_grid");
  }
  detail::read_key(doc, "K", cfg.K, "config");
  detail::read_key(doc, "K_list", cfg.K_list, "config");
  detail::read_key(doc, "eps_list", cfg.eps_list, "config");
  detail::read_key(doc, "delta_list", cfg.delta_list, "config");
  detail::read_key(doc, "m", cfg.m, "config");
  if (doc.contains("c") && !doc.at("c").is_null()) {
    double c = 0.0;
    detail::read_key(doc, "c", c, "config");
    cfg.c = c;
  }
  detail::read_key(doc, "tail_window", cfg.tail_window, "config");
  detail::read_key(doc, "n_starts", cfg.n_starts, "config");
  detail::read_key(doc, "start_offset_max", cfg.start_offset_max, "config");
  detail::read_key(doc, "seed", cfg.seed, "config");
  detail::read_key(doc, "warm_start", cfg.warm_start, "config");
  detail::read_key(doc, "allow_nonstandard", cfg.allow_nonstandard, "config");

  bool known_command = false;
  for (const auto& name : command_names()) known_command = known_command || name == cfg.command;
  require(known_command, ErrorCode::InvalidConfig, "unknown command '" + cfg.command + "'");
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

inline Json to_json(const RunConfig& cfg) {
  return Json{
      {"command", cfg.command},
      {"kernel",
       {{"kind", cfg.kernel.kind},
        {"width", cfg.kernel.width},
        {"separation", cfg.kernel.separation},
        {"normalize", cfg.kernel.normalize}}},
      {"nonlinearity",
       {{"kind", cfg.nonlinearity.kind},
        {"alpha", cfg.nonlinearity.alpha},
        {"beta", cfg.nonlinearity.beta},
        {"m", cfg.nonlinearity.m}}},
      {"grid", {{"L", cfg.grid.L}, {"n", cfg.grid.n}}},
      {"solver",
       {{"tol_residual", cfg.solver.tol_residual},
        {"max_iter", cfg.solver.max_iter},
        {"init_width", cfg.solver.init_width},
        {"enforce_symmetry", cfg.solver.enforce_symmetry},
        {"monotonicity_slack", cfg.solver.monotonicity_slack},
        {"cone_tolerance", cfg.solver.cone_tolerance}}},
      {"K", cfg.K},
      {"K_list", cfg.K_list},
      {"eps_list", cfg.eps_list},
      {"kdv_grid",
       {{"min_half_period", cfg.kdv_grid.min_half_period},
        {"scale", cfg.kdv_grid.scale},
        {"spacing_factor", cfg.kdv_grid.spacing_factor},
        {"max_points", cfg.kdv_grid.max_points}}},
      {"delta_list", cfg.delta_list},
      {"m", cfg.m},
      {"c", cfg.c ? Json(*cfg.c) : Json(nullptr)},
      {"tail_window", cfg.tail_window},
      {"n_starts", cfg.n_starts},
      {"start_offset_max", cfg.start_offset_max},
      {"seed", cfg.seed},
      {"warm_start", cfg.warm_start},
      {"allow_nonstandard", cfg.allow_nonstandard},
  };
}

inline SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.K = cfg.K;
  s.tol_residual = cfg.solver.tol_residual;
  s.max_iter = cfg.solver.max_iter;
  s.init = GaussianBumpInit{cfg.solver.init_width};
  s.enforce_symmetry = cfg.solver.enforce_symmetry;
  s.monotonicity_slack = cfg.solver.monotonicity_slack;
  s.cone_tolerance = cfg.solver.cone_tolerance;
  s.exploratory = cfg.allow_nonstandard;
  return s;
}

}  // namespace nleig
