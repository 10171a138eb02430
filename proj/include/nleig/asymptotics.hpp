#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nleig/error.hpp"
#include "nleig/grid.hpp"
#include "nleig/kernels.hpp"
#include "nleig/nonlinearity.hpp"
#include "nleig/solver.hpp"

namespace nleig {

// ---------------------------------------------------------------- decay

/// Inverse transform of bhat^2 / (1 - c bhat^2).
inline Profile modified_kernel_ac(const Kernel& b, double c) {
  require(c > 0.0 && c < 1.0, ErrorCode::SymbolPole, "modified kernel needs 0 < c < 1, got " + std::to_string(c));
  Spectrum s(b.symbol.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    const double b2 = std::norm(b.symbol[m]);
    const double den = 1.0 - c * b2;
    require(den > 0.0, ErrorCode::SymbolPole,
            "1 - c bhat^2 <= 0 at k = " + std::to_string(b.grid().frequency(m)));
    s[m] = b2 / den;
  }
  return profile_from_symbol(b.grid(), s);
}

struct DecayTheory {
  double lambda = 0.0;
  bool blow_up_bounded = false;  // M stays below sigma/alpha up to lambda_max
  double lambda_max = std::numeric_limits<double>::infinity();
};

/// Root of M(lambda) = (integral of b e^{lambda y})^2 = sigma / alpha by bisection.
/// Moments above 1e12 count as past the abscissa of convergence.
inline DecayTheory decay_rate_theory(const Kernel& b, double sigma, double alpha) {
  require(alpha > 0.0 && sigma > alpha, ErrorCode::InvalidArgument, "decay rate needs sigma > alpha > 0");
  const double target = sigma / alpha;
  constexpr double blow_up = 1e12;
  auto moment_sq = [&b](double lambda) {
    const double m = exponential_moment(b, lambda);
    return m * m;
  };
  auto diverged = [&](double v) { return !std::isfinite(v) || v > blow_up; };

  double lo = 0.0;
  double hi = 0.125;
  while (true) {
    const double v = moment_sq(hi);
    if (diverged(v) || v >= target) break;
    lo = hi;
    hi *= 2.0;
    require(hi < 1e6, ErrorCode::NonFinite, "exponential moment never reaches sigma / alpha");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = moment_sq(mid);
    if (diverged(v) || v >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  DecayTheory r;
  const double v_hi = moment_sq(hi);
  if (diverged(v_hi) && std::abs(moment_sq(lo) - target) > 1e-6 * target) {
    r.blow_up_bounded = true;
    r.lambda_max = hi;
    r.lambda = hi;
  } else {
    r.lambda = 0.5 * (lo + hi);
  }
  return r;
}

struct TailFit {
  double lambda = 0.0;
  double r2 = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log U(x) on x in [lo L, hi L]; returns the decay
/// rate -slope.
inline TailFit fit_tail_rate(const Profile& u, double lo_fraction = 0.5, double hi_fraction = 0.8) {
  require(0.0 <= lo_fraction && lo_fraction < hi_fraction && hi_fraction <= 1.0, ErrorCode::InvalidArgument,
          "tail window fractions must satisfy 0 <= lo < hi <= 1");
  const Grid& g = u.grid();
  TailFit fit;
  fit.x_lo = lo_fraction * g.half_period();
  fit.x_hi = hi_fraction * g.half_period();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t count = 0;
  for (std::size_t j = g.origin(); j < g.size(); ++j) {
    const double x = g.node(j);
    if (x < fit.x_lo || x > fit.x_hi) continue;
    if (!(u[j] > 0.0)) {
      fail(ErrorCode::NonPositiveTail, "U(" + std::to_string(x) + ") = " + std::to_string(u[j]) + " in the fit window");
    }
    const double y = std::log(u[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++count;
  }
  require(count >= 3, ErrorCode::InvalidArgument, "tail window holds fewer than 3 nodes");
  const double nn = static_cast<double>(count);
  const double cxx = sxx - sx * sx / nn;
  const double cxy = sxy - sx * sy / nn;
  const double cyy = syy - sy * sy / nn;
  const double slope = cxy / cxx;
  fit.lambda = -slope;
  fit.r2 = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  fit.points = count;
  return fit;
}

struct DecayReport {
  double c = 0.0;
  Profile a_c;
  ConeReport a_c_cone;
  DecayTheory theory;
  TailFit fit;
  double C_c = 0.0;          // max U / a_c over the grid
  bool a_c_positive = true;  // a_c > 0 at every node, so C_c is finite
};

/// Default c is the midpoint of (alpha / sigma, 1).
inline DecayReport decay_report(const Solution& sol, const Kernel& b, const Nonlinearity& nl,
                                std::optional<double> c = std::nullopt, double lo_fraction = 0.5,
                                double hi_fraction = 0.8) {
  DecayReport r;
  const double ratio = nl.alpha() / sol.sigma;
  r.c = c.value_or(0.5 * (ratio + 1.0));
  require(r.c > ratio && r.c < 1.0, ErrorCode::InvalidArgument,
          "c must lie in (alpha / sigma, 1) = (" + std::to_string(ratio) + ", 1)");
  r.a_c = modified_kernel_ac(b, r.c);
  r.a_c_cone = cone_check(r.a_c);
  r.theory = decay_rate_theory(b, sol.sigma, nl.alpha());
  r.fit = fit_tail_rate(sol.U, lo_fraction, hi_fraction);
  for (std::size_t j = 0; j < r.a_c.size(); ++j) {
    if (!(r.a_c[j] > 0.0)) {
      r.a_c_positive = false;
      continue;
    }
    r.C_c = std::max(r.C_c, sol.U[j] / r.a_c[j]);
  }
  if (!r.a_c_positive) r.C_c = std::numeric_limits<double>::infinity();
  return r;
}

// ---------------------------------------------------------------- KdV limit

/// d0 = beta^(4/3) / (3^(2/3) alpha^(1/3) |bhat''(0)|^(1/3)).
inline double kdv_predicted_d0(double alpha, double beta, double bhat_pp0) {
  require(alpha > 0.0 && beta > 0.0 && bhat_pp0 < 0.0, ErrorCode::InvalidArgument,
          "d0 needs alpha, beta > 0 and bhat''(0) < 0");
  return std::pow(beta, 4.0 / 3.0) / (std::pow(3.0, 2.0 / 3.0) * std::cbrt(alpha) * std::cbrt(-bhat_pp0));
}

struct KdvConstants {
  double d0 = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double amplitude = 0.0;  // max of the limit profile, 3 kappa1 / (2 kappa2)
};

inline KdvConstants kdv_kappas(double alpha, double beta, double bhat_pp0) {
  KdvConstants k;
  k.d0 = kdv_predicted_d0(alpha, beta, bhat_pp0);
  k.kappa1 = k.d0 / (alpha * -bhat_pp0);
  k.kappa2 = beta / (alpha * -bhat_pp0);
  k.amplitude = 1.5 * k.kappa1 / k.kappa2;
  return k;
}

/// Homoclinic of U'' = kappa1 U - kappa2 U^2.
inline double kdv_profile(double kappa1, double kappa2, double xbar) {
  require(kappa1 > 0.0 && kappa2 > 0.0, ErrorCode::InvalidArgument, "kdv profile needs kappa1, kappa2 > 0");
  const double s = 1.0 / std::cosh(0.5 * std::sqrt(kappa1) * xbar);
  return 1.5 * kappa1 / kappa2 * s * s;
}

/// Grid for the solve at K = eps^3: L = max(min_half_period, scale / eps),
/// h <= width * spacing_factor, n rounded up to a power of two.
struct KdvGridPolicy {
  double min_half_period = 25.0;
  double scale = 30.0;
  double spacing_factor = 0.125;
  std::size_t max_points = std::size_t{1} << 15;
};

inline Grid kdv_grid(const KdvGridPolicy& policy, double width, double eps) {
  const double L = std::max(policy.min_half_period, policy.scale / eps);
  const double h_max = width * policy.spacing_factor;
  std::size_t n = 8;
  while (2.0 * L / static_cast<double>(n) > h_max) n *= 2;
  require(n <= policy.max_points, ErrorCode::UnderResolved,
          "eps = " + std::to_string(eps) + " needs " + std::to_string(n) + " points, above the policy cap");
  return make_grid(L, n);
}

struct KdvRow {
  double eps = 0.0;
  double sigma = 0.0;
  double d_ratio = 0.0;
  double profile_err = 0.0;
  double profile_err_taylor = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double half_period = 0.0;
  std::size_t points = 0;
};

struct KdvResult {
  KdvConstants constants;
  KdvConstants taylor;  // same formulas with the quadratic Taylor coefficient beta / 2
  std::vector<KdvRow> rows;
  std::vector<std::string> failures;
};

/// L2 distance in xbar = eps x between eps^-2 V(xbar / eps) and the limit profile.
inline double kdv_profile_error(const Profile& v, double eps, const KdvConstants& k) {
  const Grid& g = v.grid();
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double d = v[j] / (eps * eps) - kdv_profile(k.kappa1, k.kappa2, eps * g.node(j));
    s += d * d;
  }
  return std::sqrt(eps * g.spacing() * s);
}

/// Solves at K = eps^3 for each eps (descending) on policy-sized grids.
inline KdvResult kdv_experiment(const KernelSpec& kspec, const Nonlinearity& nl, const std::vector<double>& eps_list,
                                const KdvGridPolicy& policy = {}, const SolverConfig& base = {},
                                unsigned threads = 1) {
  require(!eps_list.empty(), ErrorCode::EmptyResult, "eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    require(eps_list[i] > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
    if (i > 0) require(eps_list[i] < eps_list[i - 1], ErrorCode::InvalidArgument, "eps list must be descending");
  }

  KdvResult res;
  std::vector<std::optional<KdvRow>> rows(eps_list.size());
  std::vector<std::string> errors(eps_list.size());
  std::vector<double> bpp(eps_list.size(), 0.0);

  detail::parallel_for(eps_list.size(), threads, [&](std::size_t i) {
    const double eps = eps_list[i];
    try {
      const Grid g = kdv_grid(policy, kspec.width, eps);
      const Kernel b = make_kernel(g, kspec);
      const AdmissibilityReport adm = kdv_admissible(b);
      require(adm.pass, ErrorCode::Inadmissible, adm.reason);
      SolverConfig cfg = base;
      cfg.K = eps * eps * eps;
      cfg.observer = nullptr;
      cfg.init = GaussianBumpInit{std::max(2.0 * b.width, 1.0 / eps)};
      const Solution sol = solve(cfg, b, nl);
      KdvRow row;
      row.eps = eps;
      row.sigma = sol.sigma;
      row.d_ratio = (sol.sigma - nl.alpha()) / (eps * eps);
      row.iterations = sol.iterations;
      row.converged = sol.converged;
      row.half_period = g.half_period();
      row.points = g.size();
      const KdvConstants k = kdv_kappas(nl.alpha(), nl.beta(), b.bhat_pp0);
      const KdvConstants kt = kdv_kappas(nl.alpha(), 0.5 * nl.beta(), b.bhat_pp0);
      row.profile_err = kdv_profile_error(sol.V, eps, k);
      row.profile_err_taylor = kdv_profile_error(sol.V, eps, kt);
      bpp[i] = b.bhat_pp0;
      rows[i] = row;
    } catch (const Error& e) {
      errors[i] = "eps = " + std::to_string(eps) + ": " + e.what();
    }
  });

  // Constants are reported for the finest successfully built grid.
  double bhat_pp0 = 0.0;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (rows[i]) {
      res.rows.push_back(*rows[i]);
      bhat_pp0 = bpp[i];
    } else {
      res.failures.push_back(errors[i]);
    }
  }
  if (bhat_pp0 < 0.0) {
    res.constants = kdv_kappas(nl.alpha(), nl.beta(), bhat_pp0);
    res.taylor = kdv_kappas(nl.alpha(), 0.5 * nl.beta(), bhat_pp0);
  }
  return res;
}

// ---------------------------------------------------------------- high-energy limit

/// eta0 = sqrt(2 pi) a0^(3/2) / sqrt(|a''(0)|) * Gamma(m + 1/2) / Gamma(m + 1).
inline double eta0_predicted(double a0, double a_pp0, double m) {
  require(a0 > 0.0 && a_pp0 < 0.0 && m > 1.0, ErrorCode::InvalidArgument, "eta0 needs a0 > 0, a''(0) < 0, m > 1");
  const double gamma_ratio = std::exp(std::lgamma(m + 0.5) - std::lgamma(m + 1.0));
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(a0, 1.5) / std::sqrt(-a_pp0) * gamma_ratio;
}

struct HighEnergyRow {
  double delta = 0.0;
  double K = 0.0;
  double sigma = 0.0;
  double eps_delta = 0.0;
  double eta = 0.0;
  double sup_err = 0.0;  // |U - a / a(0)|_inf
  double v_err = 0.0;    // |V - b / a(0)|_2
  std::size_t iterations = 0;
  bool converged = false;
};

struct HighEnergyResult {
  double eta0 = 0.0;
  double a0 = 0.0;
  double a_pp0 = 0.0;
  double k_max = 0.0;
  double m = 0.0;
  std::vector<HighEnergyRow> rows;
  std::vector<std::string> failures;
};

/// Solves the singular problem at K = (1 - delta) K_max for each delta
/// (descending), warm-starting each solve from the previous profile.
inline HighEnergyResult high_energy_experiment(const Kernel& b, double m, const std::vector<double>& delta_list,
                                               const SolverConfig& base = {}) {
  const AdmissibilityReport adm = high_energy_admissible(b);
  require(adm.pass, ErrorCode::Inadmissible, "kernel '" + b.kind + "' rejected: " + adm.reason);
  require(!delta_list.empty(), ErrorCode::EmptyResult, "delta list is empty");
  for (std::size_t i = 0; i < delta_list.size(); ++i) {
    require(delta_list[i] > 0.0 && delta_list[i] < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
    if (i > 0) require(delta_list[i] < delta_list[i - 1], ErrorCode::InvalidArgument, "delta list must be descending");
  }
  const Nonlinearity nl = Nonlinearity::singular(m);

  HighEnergyResult res;
  res.a0 = b.a0;
  res.a_pp0 = b.a_pp0;
  res.k_max = b.k_max_norm;
  res.m = m;
  res.eta0 = eta0_predicted(b.a0, b.a_pp0, m);

  const Profile a_scaled = autocorrelation(b).scaled(1.0 / b.a0);
  const Profile b_scaled = b.profile.scaled(1.0 / b.a0);
  std::optional<Profile> warm;
  for (double delta : delta_list) {
    SolverConfig cfg = base;
    cfg.K = (1.0 - delta) * b.k_max_norm;
    cfg.observer = nullptr;
    if (warm) cfg.init = *warm;
    try {
      const Solution sol = solve(cfg, b, nl);
      HighEnergyRow row;
      row.delta = delta;
      row.K = cfg.K;
      row.sigma = sol.sigma;
      row.eps_delta = 1.0 - sol.U.at_origin();
      row.eta = sol.sigma * std::pow(row.eps_delta, m + 0.5);
      row.sup_err = sup_norm(sol.U - a_scaled);
      row.v_err = l2_distance(sol.V, b_scaled);
      row.iterations = sol.iterations;
      row.converged = sol.converged;
      res.rows.push_back(row);
      warm = sol.V;
    } catch (const Error& e) {
      res.failures.push_back("delta = " + std::to_string(delta) + ": " + e.what());
    }
  }
  return res;
}

}  // namespace nleig
