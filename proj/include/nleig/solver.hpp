#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "nleig/error.hpp"
#include "nleig/functionals.hpp"
#include "nleig/grid.hpp"
#include "nleig/kernels.hpp"
#include "nleig/nonlinearity.hpp"

namespace nleig {

inline constexpr const char* kStoppingRule =
    "relative fixed-point residual |T(V) - V|_2 / |V|_2 <= tol_residual, or max_iter iterations";

/// Unit-height Gaussian exp(-x^2 / (2 w^2)); width 0 selects twice the kernel width.
struct GaussianBumpInit {
  double width = 0.0;
};

struct IterationRecord {
  std::size_t index = 0;        // 1-based step number
  double potential = 0.0;       // P(V_j) of the iterate the step started from
  double norm_functional = 0.0; // K(V_{j+1}) after renormalization
  double residual = 0.0;        // |V_{j+1} - V_j| / |V_j|
  double sigma_estimate = 0.0;  // 1 / mu(V_j)
  double max_value = 0.0;       // max V_{j+1}
  ConeReport cone;              // of V_{j+1}
};

struct SolverConfig {
  double K = 1.0;
  double tol_residual = 1e-10;
  std::size_t max_iter = 100000;
  std::variant<GaussianBumpInit, Profile> init = GaussianBumpInit{};
  bool enforce_symmetry = true;
  double monotonicity_slack = 1e-12;  // relative
  double cone_tolerance = 1e-9;       // relative to max V
  bool exploratory = false;           // turn guarantee violations into warnings
  bool require_convergence = true;    // throw NotConverged instead of returning
  std::function<void(const IterationRecord&)> observer;
};

struct Solution {
  Profile V;
  Profile U;
  double sigma = 0.0;
  double K = 0.0;
  EnergyRecord energies;
  double residual = 0.0;
  double el_residual = 0.0;
  std::size_t iterations = 0;
  ConeReport cone;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Raised by solve() when max_iter is exhausted; carries the last iterate.
class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& message, Solution partial)
      : Error(ErrorCode::NotConverged, message), partial_(std::move(partial)) {}

  const Solution& partial() const noexcept { return partial_; }

 private:
  Solution partial_;
};

/// Rescales V so that (1/2)|V|^2 = K.
inline Profile renormalize(const Profile& v, double K) {
  const double norm = l2_norm(v);
  require(norm > 0.0, ErrorCode::InvalidArgument, "cannot renormalize the zero profile");
  return v.scaled(std::sqrt(2.0 * K) / norm);
}

struct StepResult {
  Profile next;
  double mu = 0.0;
};

/// T(V) = mu(V) dP(V) with mu(V) = |V| / |dP(V)|.
inline StepResult improvement_step(const Profile& v, const Kernel& b, const Nonlinearity& nl) {
  const double nv = l2_norm(v);
  require(nv > 0.0, ErrorCode::InvalidArgument, "improvement step needs V != 0");
  const Profile g = grad_P(v, b, nl);
  const double ng = l2_norm(g);
  require(ng > 0.0, ErrorCode::ZeroGradient, "dP(V) vanishes, mu(V) is undefined");
  const double mu = nv / ng;
  return {g.scaled(mu), mu};
}

inline Profile initial_profile(const SolverConfig& cfg, const Kernel& b) {
  const Grid& g = b.grid();
  Profile v0;
  if (const auto* bump = std::get_if<GaussianBumpInit>(&cfg.init)) {
    const double w = bump->width > 0.0 ? bump->width : 2.0 * b.width;
    v0 = Profile::sample(g, [w](double x) { return std::exp(-x * x / (2.0 * w * w)); });
  } else {
    v0 = std::get<Profile>(cfg.init);
    require_same_grid(v0.grid(), g, "initial profile");
  }
  if (cfg.enforce_symmetry) v0 = symmetrize(v0);
  return renormalize(v0, cfg.K);
}

inline void check_admissible_K(const SolverConfig& cfg, const Kernel& b, const Nonlinearity& nl) {
  require(std::isfinite(cfg.K) && cfg.K > 0.0, ErrorCode::InvalidArgument, "norm constraint K must be positive");
  if (std::isfinite(nl.sup_domain())) {
    require(cfg.K < b.k_max_norm, ErrorCode::Inadmissible,
            "K = " + std::to_string(cfg.K) + " is not below K_max = " + std::to_string(b.k_max_norm) +
                " for a nonlinearity with a singularity");
  }
}

/// Fixed-point iteration V <- renormalize(symmetrize(T(V))) on the sphere
/// (1/2)|V|^2 = K.
inline Solution solve(const SolverConfig& cfg, const Kernel& b, const Nonlinearity& nl) {
  check_admissible_K(cfg, b, nl);
  require(cfg.tol_residual > 0.0, ErrorCode::InvalidArgument, "tol_residual must be positive");

  Solution sol;
  sol.K = cfg.K;
  Profile v = initial_profile(cfg, b);
  std::optional<double> previous_p;
  bool cone_warned = false;
  bool monotonicity_warned = false;

  auto check_monotone = [&](double p, std::size_t step) {
    if (!previous_p) return;
    const double drop = *previous_p - p;
    if (drop > cfg.monotonicity_slack * std::abs(*previous_p)) {
      const std::string msg = "P decreased by " + std::to_string(drop) + " at step " + std::to_string(step);
      if (!cfg.exploratory) fail(ErrorCode::MonotonicityViolation, msg);
      if (!monotonicity_warned) sol.warnings.push_back(msg);
      monotonicity_warned = true;
    }
  };

  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    const Profile u = convolve(b, v);
    const double p = potential_from_u(u, nl);
    check_monotone(p, it);

    const Profile g = convolve(b, u.map([&nl](double r) { return nl.f(r); }));
    const double ng = l2_norm(g);
    require(ng > 0.0, ErrorCode::ZeroGradient, "dP(V) vanishes at step " + std::to_string(it));
    const double mu = l2_norm(v) / ng;

    Profile next = g.scaled(mu);
    if (cfg.enforce_symmetry) next = symmetrize(next);
    next = renormalize(next, cfg.K);

    const ConeReport cone = cone_check(next);
    const double max_next = next.max();
    if (!cone.in_cone(cfg.cone_tolerance * max_next)) {
      const std::string msg = "iterate " + std::to_string(it) + " left the cone (even " +
                              std::to_string(cone.even_deviation) + ", negativity " + std::to_string(cone.negativity()) +
                              ", unimodality " + std::to_string(cone.unimodality_deviation) + ")";
      if (!cfg.exploratory) fail(ErrorCode::ConeViolation, msg);
      if (!cone_warned) sol.warnings.push_back(msg);
      cone_warned = true;
    }

    const double residual = l2_distance(next, v) / l2_norm(v);
    if (cfg.observer) {
      cfg.observer({it, p, eval_K(next), residual, 1.0 / mu, max_next, cone});
    }
    v = std::move(next);
    previous_p = p;
    sol.iterations = it;
    sol.residual = residual;
    if (residual <= cfg.tol_residual) {
      sol.converged = true;
      break;
    }
  }

  sol.U = convolve(b, v);
  sol.energies.sup_U = sol.U.max();
  sol.energies.P = potential_from_u(sol.U, nl);
  sol.energies.K = eval_K(v);
  sol.energies.Q = 0.5 * nl.alpha() * inner_product(sol.U, sol.U);
  check_monotone(sol.energies.P, sol.iterations + 1);

  const Profile g = convolve(b, sol.U.map([&nl](double r) { return nl.f(r); }));
  const double nv = l2_norm(v);
  sol.sigma = l2_norm(g) / nv;
  sol.el_residual = l2_distance(v.scaled(sol.sigma), g) / (sol.sigma * nv);
  sol.cone = cone_check(v);
  sol.V = std::move(v);

  if (!sol.converged && cfg.require_convergence) {
    throw NotConvergedError("no convergence after " + std::to_string(sol.iterations) + " iterations (residual " +
                                std::to_string(sol.residual) + ")",
                            sol);
  }
  return sol;
}

namespace detail {

// Runs fn(i) for i in [0, count) on up to `threads` workers; exceptions are
// stored per index and never cross threads.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

struct SweepEntry {
  double K = 0.0;
  std::optional<Solution> solution;
  std::optional<ErrorCode> error_code;
  std::string error;
};

struct SweepOptions {
  bool warm_start = false;
  unsigned threads = 1;
};

/// One solve per K; failures are recorded per entry. Warm starts run in
/// order, independent entries may run concurrently. Output order follows Ks.
inline std::vector<SweepEntry> sweep_K(const std::vector<double>& Ks, const SolverConfig& base, const Kernel& b,
                                       const Nonlinearity& nl, const SweepOptions& opts = {}) {
  for (std::size_t i = 1; i < Ks.size(); ++i) {
    require(Ks[i] > Ks[i - 1], ErrorCode::InvalidArgument, "K list must be strictly ascending");
  }
  std::vector<SweepEntry> out(Ks.size());
  auto run_one = [&](std::size_t i, const std::optional<Profile>& warm) {
    SolverConfig cfg = base;
    cfg.K = Ks[i];
    cfg.observer = nullptr;
    if (warm) cfg.init = *warm;
    out[i].K = Ks[i];
    try {
      out[i].solution = solve(cfg, b, nl);
    } catch (const Error& e) {
      out[i].error_code = e.code();
      out[i].error = e.what();
    }
  };
  if (opts.warm_start) {
    std::optional<Profile> warm;
    for (std::size_t i = 0; i < Ks.size(); ++i) {
      run_one(i, warm);
      if (out[i].solution) warm = out[i].solution->V;
    }
  } else {
    detail::parallel_for(Ks.size(), opts.threads, [&](std::size_t i) { run_one(i, std::nullopt); });
  }
  return out;
}

struct UniquenessReport {
  std::size_t n_starts = 0;
  double max_l2_distance = 0.0;
  double max_sigma_spread = 0.0;
  bool all_converged = true;
  bool supports_conjecture = true;
  double threshold = 1e-6;
  std::vector<double> start_widths;  // the two bump widths per start, flattened
  std::vector<double> start_offsets;
  std::vector<double> sigmas;
  std::vector<std::string> failures;

  const char* support_label() const noexcept { return supports_conjecture ? "yes" : "no"; }
};

namespace detail {

// Deterministic uniform double in [0, 1) from a standardized engine.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Solves from n_starts different initializations (by default mixtures of two
/// centred Gaussians with seeded random widths) and compares the limits.
struct ProbeOptions {
  unsigned threads = 1;
  double threshold = 1e-6;
  // When positive, the second Gaussian of each start becomes an even pair
  // centred at +-o with o drawn from [0, max_offset]. Such starts are not
  // unimodal; meant for exploratory kernels whose solution branches sit off
  // the origin.
  double max_offset = 0.0;
};

inline UniquenessReport uniqueness_probe(const SolverConfig& base, const Kernel& b, const Nonlinearity& nl,
                                         std::size_t n_starts, std::uint64_t seed, const ProbeOptions& opts = {}) {
  const unsigned threads = opts.threads;
  const double threshold = opts.threshold;
  require(n_starts >= 1, ErrorCode::InvalidArgument, "uniqueness probe needs at least one start");
  UniquenessReport rep;
  rep.n_starts = n_starts;
  rep.threshold = threshold;

  std::mt19937_64 rng(seed);
  std::vector<Profile> starts;
  const Grid& g = b.grid();
  for (std::size_t i = 0; i < n_starts; ++i) {
    const double w1 = b.width * (0.5 + 3.5 * detail::unit_uniform(rng));
    const double w2 = b.width * (0.5 + 3.5 * detail::unit_uniform(rng));
    const double t = detail::unit_uniform(rng);
    const double o = opts.max_offset > 0.0 ? opts.max_offset * detail::unit_uniform(rng) : 0.0;
    rep.start_widths.push_back(w1);
    rep.start_widths.push_back(w2);
    rep.start_offsets.push_back(o);
    starts.push_back(Profile::sample(g, [=](double x) {
      const double l = x - o;
      const double r = x + o;
      const double pair = o > 0.0 ? 0.5 * (std::exp(-l * l / (2 * w2 * w2)) + std::exp(-r * r / (2 * w2 * w2)))
                                  : std::exp(-x * x / (2 * w2 * w2));
      return t * std::exp(-x * x / (2 * w1 * w1)) + (1 - t) * pair;
    }));
  }

  std::vector<std::optional<Solution>> sols(n_starts);
  std::vector<std::string> errors(n_starts);
  detail::parallel_for(n_starts, threads, [&](std::size_t i) {
    SolverConfig cfg = base;
    cfg.init = starts[i];
    cfg.observer = nullptr;
    cfg.require_convergence = false;
    try {
      sols[i] = solve(cfg, b, nl);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < n_starts; ++i) {
    if (!sols[i]) {
      rep.all_converged = false;
      rep.failures.push_back("start " + std::to_string(i) + ": " + errors[i]);
      continue;
    }
    if (!sols[i]->converged) {
      rep.all_converged = false;
      rep.failures.push_back("start " + std::to_string(i) + ": not converged");
    }
    rep.sigmas.push_back(sols[i]->sigma);
    for (std::size_t j = 0; j < i; ++j) {
      if (!sols[j]) continue;
      rep.max_l2_distance = std::max(rep.max_l2_distance, l2_distance(sols[i]->V, sols[j]->V));
      rep.max_sigma_spread = std::max(rep.max_sigma_spread, std::abs(sols[i]->sigma - sols[j]->sigma));
    }
  }
  rep.supports_conjecture = rep.all_converged && rep.max_l2_distance <= threshold;
  return rep;
}

}  // namespace nleig
