#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "nleig/asymptotics.hpp"
#include "nleig/config.hpp"
#include "nleig/error.hpp"
#include "nleig/io.hpp"
#include "nleig/kernels.hpp"
#include "nleig/nonlinearity.hpp"
#include "nleig/solver.hpp"

namespace nleig {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitValidation = 2, kExitNonConvergence = 3 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::OddPointCount:
    case ErrorCode::NonPositiveLength:
    case ErrorCode::UnderResolved:
    case ErrorCode::Inadmissible:
    case ErrorCode::SymbolPole:
    case ErrorCode::InvalidConfig:
      return kExitValidation;
    case ErrorCode::NotConverged:
    case ErrorCode::MonotonicityViolation:
    case ErrorCode::ConeViolation:
    case ErrorCode::DomainBreach:
      return kExitNonConvergence;
    default:
      return kExitError;
  }
}

inline std::vector<SuperlinearitySample> superlinearity_samples(const Nonlinearity& nl) {
  std::vector<SuperlinearitySample> out;
  const double cap = std::isfinite(nl.sup_domain()) ? 0.9 * nl.sup_domain() : 4.0;
  for (double lambda : {1.0, 1.5, 2.0, 4.0}) {
    for (double r : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0}) {
      if (lambda * r <= cap) out.push_back({lambda, r});
    }
  }
  return out;
}

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
};

namespace detail {

struct RunContext {
  const RunConfig& cfg;
  std::filesystem::path out;
  unsigned threads = 1;
};

inline Grid config_grid(const RunConfig& cfg) { return make_grid(cfg.grid.L, cfg.grid.n); }

// Assumption gates for the kernel and nonlinearity; bypassed in exploratory mode.
inline void gate_inputs(const RunConfig& cfg, const Kernel& b, const Nonlinearity& nl) {
  if (cfg.allow_nonstandard) return;
  require(is_standard_kernel(cfg.kernel) && cfg.kernel.normalize, ErrorCode::Inadmissible,
          "kernel '" + cfg.kernel.kind + "' is not a validated kernel; pass --allow-nonstandard to explore");
  const KernelValidation v = validate_kernel(b);
  if (!v.pass) {
    std::string why;
    for (const auto& f : v.failures) why += (why.empty() ? "" : ", ") + f;
    fail(ErrorCode::Inadmissible, "kernel fails validation: " + why);
  }
  require(is_standard_nonlinearity(cfg.nonlinearity), ErrorCode::Inadmissible,
          "nonlinearity '" + cfg.nonlinearity.kind + "' is not validated; pass --allow-nonstandard to explore");
  const SuperlinearityReport s = check_superlinearity(nl, superlinearity_samples(nl));
  require(s.pass, ErrorCode::Inadmissible, "nonlinearity fails the superlinearity inequalities");
}

inline Json sweep_entry_json(const SweepEntry& e) {
  Json j = {{"K", e.K}};
  if (e.solution) {
    j["solution"] = solution_json(*e.solution);
  } else {
    j["error"] = e.error;
  }
  return j;
}

inline int cmd_solve(RunContext& ctx) {
  const Grid g = config_grid(ctx.cfg);
  const Kernel b = make_kernel(g, ctx.cfg.kernel);
  const Nonlinearity nl = make_nonlinearity(ctx.cfg.nonlinearity);
  gate_inputs(ctx.cfg, b, nl);
  try {
    write_solution(ctx.out, solve(solver_config(ctx.cfg), b, nl));
  } catch (const NotConvergedError& e) {
    write_solution(ctx.out, e.partial());
    throw;
  }
  return kExitOk;
}

inline int cmd_sweep(RunContext& ctx) {
  const Grid g = config_grid(ctx.cfg);
  const Kernel b = make_kernel(g, ctx.cfg.kernel);
  const Nonlinearity nl = make_nonlinearity(ctx.cfg.nonlinearity);
  gate_inputs(ctx.cfg, b, nl);
  const auto entries = sweep_K(ctx.cfg.K_list, solver_config(ctx.cfg), b, nl, {ctx.cfg.warm_start, ctx.threads});
  Table t{{"K", "sigma", "P", "Q", "residual", "el_residual", "iterations"}, {}};
  Json all = Json::array();
  int code = kExitOk;
  for (const auto& e : entries) {
    all.push_back(sweep_entry_json(e));
    if (e.solution) {
      const Solution& s = *e.solution;
      t.rows.push_back({e.K, s.sigma, s.energies.P, s.energies.Q, s.residual, s.el_residual,
                        static_cast<double>(s.iterations)});
    } else if (code == kExitOk) {
      code = exit_code_for(*e.error_code);
    }
  }
  emit_plot_data(t, Json{{"kernel", b.kind}, {"k_max", b.k_max_norm}, {"entries", all}}, ctx.out / "sweep.csv");
  return code;
}

inline int cmd_kdv(RunContext& ctx) {
  const Nonlinearity nl = make_nonlinearity(ctx.cfg.nonlinearity);
  {
    // Gate on the kernel at the coarsest policy grid.
    const Grid g = kdv_grid(ctx.cfg.kdv_grid, ctx.cfg.kernel.width, ctx.cfg.eps_list.front());
    const Kernel b = make_kernel(g, ctx.cfg.kernel);
    gate_inputs(ctx.cfg, b, nl);
    const AdmissibilityReport adm = kdv_admissible(b);
    require(adm.pass || ctx.cfg.allow_nonstandard, ErrorCode::Inadmissible,
            "small-eigenvalue symbol bounds: " + adm.reason);
  }
  SolverConfig base = solver_config(ctx.cfg);
  base.max_iter = std::max<std::size_t>(base.max_iter, 1000000);
  const KdvResult r = kdv_experiment(ctx.cfg.kernel, nl, ctx.cfg.eps_list, ctx.cfg.kdv_grid, base, ctx.threads);
  Table t{{"eps", "sigma", "d_ratio", "profile_err"}, {}};
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    t.rows.push_back({row.eps, row.sigma, row.d_ratio, row.profile_err});
    rows.push_back({{"eps", row.eps},
                    {"profile_err_taylor", row.profile_err_taylor},
                    {"iterations", row.iterations},
                    {"converged", row.converged},
                    {"L", row.half_period},
                    {"n", row.points}});
  }
  const Json predictors = {
      {"d0", r.constants.d0},
      {"kappa1", r.constants.kappa1},
      {"kappa2", r.constants.kappa2},
      {"amplitude", r.constants.amplitude},
      {"d0_taylor", r.taylor.d0},
      {"kappa1_taylor", r.taylor.kappa1},
      {"kappa2_taylor", r.taylor.kappa2},
      {"row_details", rows},
      {"failures", r.failures},
  };
  if (r.rows.empty()) fail(ErrorCode::EmptyResult, r.failures.empty() ? "no rows" : r.failures.front());
  emit_plot_data(t, predictors, ctx.out / "kdv.csv");
  return r.failures.empty() ? kExitOk : kExitNonConvergence;
}

inline int cmd_high_energy(RunContext& ctx) {
  const Grid g = config_grid(ctx.cfg);
  const Kernel b = make_kernel(g, ctx.cfg.kernel);
  const Nonlinearity nl = Nonlinearity::singular(ctx.cfg.m);
  gate_inputs(ctx.cfg, b, nl);
  const AdmissibilityReport adm = high_energy_admissible(b);
  require(adm.pass, ErrorCode::Inadmissible,
          "high-energy smoothness requirement (a = b*b with bounded a'') fails for kernel '" + b.kind + "': " +
              adm.reason);
  const HighEnergyResult r = high_energy_experiment(b, ctx.cfg.m, ctx.cfg.delta_list, solver_config(ctx.cfg));
  Table t{{"delta", "K", "sigma", "eps_delta", "eta", "sup_err"}, {}};
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    t.rows.push_back({row.delta, row.K, row.sigma, row.eps_delta, row.eta, row.sup_err});
    rows.push_back({{"delta", row.delta},
                    {"v_err", row.v_err},
                    {"iterations", row.iterations},
                    {"converged", row.converged}});
  }
  if (r.rows.empty()) fail(ErrorCode::EmptyResult, r.failures.empty() ? "no rows" : r.failures.front());
  emit_plot_data(t,
                 Json{{"eta0", r.eta0},
                      {"a0", r.a0},
                      {"a_pp0", r.a_pp0},
                      {"K_max", r.k_max},
                      {"m", r.m},
                      {"row_details", rows},
                      {"failures", r.failures}},
                 ctx.out / "high_energy.csv");
  return r.failures.empty() ? kExitOk : kExitNonConvergence;
}

inline int cmd_decay(RunContext& ctx) {
  const Grid g = config_grid(ctx.cfg);
  const Kernel b = make_kernel(g, ctx.cfg.kernel);
  const Nonlinearity nl = make_nonlinearity(ctx.cfg.nonlinearity);
  gate_inputs(ctx.cfg, b, nl);
  const Solution sol = solve(solver_config(ctx.cfg), b, nl);
  write_solution(ctx.out, sol);
  const DecayReport d = decay_report(sol, b, nl, ctx.cfg.c, ctx.cfg.tail_window[0], ctx.cfg.tail_window[1]);
  write_profile_csv(ctx.out / "a_c.csv", d.a_c);
  const Json j = {
      {"c", d.c},
      {"lambda_theory", d.theory.blow_up_bounded ? Json(nullptr) : Json(d.theory.lambda)},
      {"blow_up_bounded", d.theory.blow_up_bounded},
      {"lambda_max", std::isfinite(d.theory.lambda_max) ? Json(d.theory.lambda_max) : Json(nullptr)},
      {"lambda_fit", d.fit.lambda},
      {"fit_window", {d.fit.x_lo, d.fit.x_hi}},
      {"fit_r2", d.fit.r2},
      {"C_c", std::isfinite(d.C_c) ? Json(d.C_c) : Json(nullptr)},
      {"a_c_positive", d.a_c_positive},
      {"a_c_cone", cone_json(d.a_c_cone)},
      {"sigma", sol.sigma},
  };
  write_file_atomic(ctx.out / "decay.json", j.dump(2) + "\n");
  return kExitOk;
}

inline int cmd_validate_kernel(RunContext& ctx) {
  const Grid g = config_grid(ctx.cfg);
  const Kernel b = make_kernel(g, ctx.cfg.kernel);
  const KernelValidation v = validate_kernel(b);
  const AdmissibilityReport kdv = kdv_admissible(b);
  const AdmissibilityReport he = high_energy_admissible(b);
  Json failures = v.failures;
  const Json j = {
      {"kernel", b.kind},
      {"pass", v.pass},
      {"failures", failures},
      {"mass", b.mass},
      {"mass_error", v.mass_error},
      {"cone_checked", v.cone_checked},
      {"cone", cone_json(v.cone)},
      {"second_moment", b.second_moment},
      {"bhat_pp0", b.bhat_pp0},
      {"bhat_pp0_symbol", symbol_second_derivative(b)},
      {"a0", b.a0},
      {"a_pp0", b.a_pp0},
      {"k_max", b.k_max_norm},
      {"small_eigenvalue_admissible", kdv.pass},
      {"high_energy_admissible", he.pass},
      {"high_energy_reason", he.reason},
  };
  write_file_atomic(ctx.out / "validation.json", j.dump(2) + "\n");
  if (!v.pass && !ctx.cfg.allow_nonstandard) {
    std::string why;
    for (const auto& f : v.failures) why += (why.empty() ? "" : ", ") + f;
    fail(ErrorCode::Inadmissible, "kernel '" + b.kind + "' fails validation: " + why);
  }
  return kExitOk;
}

inline int cmd_uniqueness(RunContext& ctx) {
  const Grid g = config_grid(ctx.cfg);
  const Kernel b = make_kernel(g, ctx.cfg.kernel);
  const Nonlinearity nl = make_nonlinearity(ctx.cfg.nonlinearity);
  gate_inputs(ctx.cfg, b, nl);
  ProbeOptions opts;
  opts.threads = ctx.threads;
  opts.max_offset = ctx.cfg.start_offset_max;
  const UniquenessReport r = uniqueness_probe(solver_config(ctx.cfg), b, nl, ctx.cfg.n_starts, ctx.cfg.seed, opts);
  const Json j = {
      {"n_starts", r.n_starts},
      {"seed", ctx.cfg.seed},
      {"max_l2_distance", r.max_l2_distance},
      {"max_sigma_spread", r.max_sigma_spread},
      {"all_converged", r.all_converged},
      {"threshold", r.threshold},
      {"conjecture_support", r.support_label()},
      {"sigmas", r.sigmas},
      {"start_widths", r.start_widths},
      {"start_offsets", r.start_offsets},
      {"failures", r.failures},
  };
  write_file_atomic(ctx.out / "uniqueness.json", j.dump(2) + "\n");
  std::cout << "conjecture support: " << r.support_label() << "\n";
  return kExitOk;
}

}  // namespace detail

/// Runs one command, writing its artifacts and meta.json into `out`.
inline RunOutcome run(const RunConfig& cfg, const std::filesystem::path& out, unsigned threads = 1) {
  const auto start = std::chrono::steady_clock::now();
  detail::RunContext ctx{cfg, out, std::max(1u, threads)};
  RunOutcome outcome;
  try {
    std::filesystem::create_directories(out);
    if (cfg.command == "solve") outcome.exit_code = detail::cmd_solve(ctx);
    else if (cfg.command == "sweep-k") outcome.exit_code = detail::cmd_sweep(ctx);
    else if (cfg.command == "kdv") outcome.exit_code = detail::cmd_kdv(ctx);
    else if (cfg.command == "high-energy") outcome.exit_code = detail::cmd_high_energy(ctx);
    else if (cfg.command == "decay") outcome.exit_code = detail::cmd_decay(ctx);
    else if (cfg.command == "validate-kernel") outcome.exit_code = detail::cmd_validate_kernel(ctx);
    else if (cfg.command == "uniqueness-probe") outcome.exit_code = detail::cmd_uniqueness(ctx);
    else fail(ErrorCode::InvalidConfig, "unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    outcome.exit_code = exit_code_for(e.code());
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = kExitError;
    outcome.message = e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const Json meta = {
      {"version", kVersion},
      {"command", cfg.command},
      {"config", to_json(cfg)},
      {"unvalidated", cfg.allow_nonstandard},
      {"stopping_rule", kStoppingRule},
      {"threads", ctx.threads},
      {"timings", {{"total_seconds", seconds}}},
      {"exit_code", outcome.exit_code},
      {"message", outcome.message},
  };
  try {
    write_file_atomic(out / "meta.json", meta.dump(2) + "\n");
  } catch (const Error& e) {
    if (outcome.exit_code == kExitOk) {
      outcome.exit_code = kExitError;
      outcome.message = e.what();
    }
  }
  return outcome;
}

}  // namespace nleig
