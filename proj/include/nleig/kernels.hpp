#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "nleig/error.hpp"
#include "nleig/grid.hpp"

namespace nleig {

/// Convolution kernel b together with the metadata the solver and the
/// asymptotic predictors need. Both the samples and the symbol are stored;
/// convolutions always go through the symbol.
struct Kernel {
  std::string kind;
  Profile profile;
  Spectrum symbol;
  double width = 1.0;          // characteristic length used for grid policies
  double mass = 1.0;           // h * sum b_j
  double second_moment = 0.0;  // integral of x^2 b
  double bhat_pp0 = 0.0;       // second derivative of the symbol at k = 0
  double a0 = 0.0;             // (b*b)(0) = integral of b^2
  double a_pp0 = 0.0;          // (b*b)''(0), spectrally; unbounded for rough kernels
  double k_max_norm = 0.0;     // 1 / (2 a0)
  bool spectral = false;       // defined through its symbol (samples may be singular)
  bool normalized = true;
  // Optional closed form of lambda -> integral of b(y) exp(lambda y); +inf past
  // the abscissa of convergence. Empty means "sum over the grid".
  std::function<double(double)> exp_moment;

  const Grid& grid() const noexcept { return profile.grid(); }
};

inline Profile convolve(const Kernel& b, const Profile& w) {
  require_same_grid(b.grid(), w.grid(), "convolve");
  return apply_symbol(b.symbol, w);
}

/// a = b * b as a profile.
inline Profile autocorrelation(const Kernel& b) {
  Spectrum sq(b.symbol.size());
  for (std::size_t m = 0; m < sq.size(); ++m) sq[m] = b.symbol[m] * b.symbol[m];
  return profile_from_symbol(b.grid(), sq);
}

namespace detail {

// Sum over the full (two-sided) spectrum of weight(k_m) * |bhat_m|^2 / (2L),
// i.e. the inverse DFT evaluated at x = 0.
template <class Weight>
double spectral_origin_sum(const Grid& g, const Spectrum& symbol, Weight&& weight) {
  const std::size_t half = g.size() / 2;
  double s = 0.0;
  for (std::size_t m = 0; m <= half; ++m) {
    const double mult = (m == 0 || m == half) ? 1.0 : 2.0;
    s += mult * weight(g.frequency(m)) * std::norm(symbol[m]);
  }
  return s / (2.0 * g.half_period());
}

inline void fill_energy_metadata(Kernel& k) {
  const Grid& g = k.grid();
  k.a0 = spectral_origin_sum(g, k.symbol, [](double) { return 1.0; });
  k.a_pp0 = -spectral_origin_sum(g, k.symbol, [](double w) { return w * w; });
  k.k_max_norm = 1.0 / (2.0 * k.a0);
}

inline Kernel finish_sampled(std::string kind, const Grid& g, std::vector<double> samples, double width,
                             bool normalize) {
  const double h = g.spacing();
  double mass = 0.0;
  for (double v : samples) mass += v;
  mass *= h;
  require(std::isfinite(mass) && mass != 0.0, ErrorCode::InvalidArgument, "kernel has zero or non-finite mass");
  if (normalize) {
    for (double& v : samples) v /= mass;
  }
  Kernel k;
  k.kind = std::move(kind);
  k.profile = Profile(g, std::move(samples));
  k.symbol = kernel_symbol(k.profile);
  k.width = width;
  k.normalized = normalize;
  double m0 = 0.0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    m0 += k.profile[j];
    m2 += x * x * k.profile[j];
  }
  k.mass = h * m0;
  k.second_moment = h * m2;
  k.bhat_pp0 = -k.second_moment;
  fill_energy_metadata(k);
  return k;
}

}  // namespace detail

/// Fourth-order central second difference of the stored symbol at k = 0,
/// using the grid frequencies k_1, k_2. Independent of the moment sum.
inline double symbol_second_derivative(const Kernel& b) {
  const Grid& g = b.grid();
  const double dk = g.frequency(1);
  const double f0 = b.symbol[0].real();
  const double f1 = b.symbol[1].real();
  const double f2 = b.symbol[2].real();
  return (-2.0 * f2 + 32.0 * f1 - 30.0 * f0) / (12.0 * dk * dk);
}

/// Unit-mass Gaussian of width s: exp(-x^2 / (2 s^2)), renormalized on the grid.
inline Kernel gaussian_kernel(const Grid& g, double s, bool normalize = true) {
  require(std::isfinite(s) && s > 0.0, ErrorCode::InvalidArgument, "gaussian width must be positive");
  require(g.spacing() <= s / 4.0 && g.half_period() >= 8.0 * s, ErrorCode::UnderResolved,
          "gaussian kernel of width " + std::to_string(s) + " needs h <= s/4 and L >= 8s (h = " +
              std::to_string(g.spacing()) + ", L = " + std::to_string(g.half_period()) + ")");
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = g.node(j);
    v[j] = std::exp(-x * x / (2.0 * s * s));
  }
  return detail::finish_sampled("gaussian", g, std::move(v), s, normalize);
}

/// Characteristic function of [-1/2, 1/2]; nodes on the jump carry 1/2.
inline Kernel indicator_kernel(const Grid& g, bool normalize = true) {
  const double h = g.spacing();
  require(h <= 0.125, ErrorCode::UnderResolved, "indicator kernel needs h <= 1/8, got h = " + std::to_string(h));
  require(g.half_period() >= 1.0, ErrorCode::UnderResolved, "indicator kernel needs L >= 1");
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double ax = std::abs(g.node(j));
    if (std::abs(ax - 0.5) <= 1e-9 * h) {
      v[j] = 0.5;
    } else {
      v[j] = ax < 0.5 ? 1.0 : 0.0;
    }
  }
  return detail::finish_sampled("indicator", g, std::move(v), 1.0, normalize);
}

/// Kernel defined by an even real symbol bhat(k) with bhat(0) = 1.
inline Kernel spectral_kernel(const Grid& g, std::string kind, const std::function<double(double)>& bhat,
                              double width) {
  const std::size_t half = g.size() / 2;
  Kernel k;
  k.kind = std::move(kind);
  k.symbol.resize(half + 1);
  for (std::size_t m = 0; m <= half; ++m) k.symbol[m] = bhat(g.frequency(m));
  k.profile = profile_from_symbol(g, k.symbol);
  k.width = width;
  k.spectral = true;
  k.normalized = true;
  k.mass = k.symbol[0].real();
  const double step = 1e-3;
  k.bhat_pp0 = (-bhat(2 * step) + 16.0 * bhat(step) - 30.0 * bhat(0.0) + 16.0 * bhat(-step) - bhat(-2 * step)) /
               (12.0 * step * step);
  k.second_moment = -k.bhat_pp0;
  detail::fill_energy_metadata(k);
  return k;
}

/// The kernel with b-hat(k) = (1 + k^2)^(-1/2), so that a = b*b = exp(-|x|)/2
/// and the eigenvalue problem reduces to sigma (U - U'') = f(U).
inline Kernel spectral_ode_kernel(const Grid& g) {
  require(std::numbers::pi / g.spacing() >= 20.0, ErrorCode::UnderResolved,
          "ode kernel needs a Nyquist frequency >= 20, got " + std::to_string(std::numbers::pi / g.spacing()));
  Kernel k = spectral_kernel(g, "ode", [](double w) { return 1.0 / std::sqrt(1.0 + w * w); }, 1.0);
  k.exp_moment = [](double lambda) {
    const double q = 1.0 - lambda * lambda;
    return q > 0.0 ? 1.0 / std::sqrt(q) : std::numeric_limits<double>::infinity();
  };
  return k;
}

/// Two separated Gaussian bumps; violates unimodality. Exploratory only.
inline Kernel two_bump_kernel(const Grid& g, double width, double separation, bool normalize = true) {
  require(width > 0.0 && separation > 0.0, ErrorCode::InvalidArgument, "two-bump kernel needs positive width and separation");
  require(g.spacing() <= width / 4.0 && g.half_period() >= separation + 8.0 * width, ErrorCode::UnderResolved,
          "two-bump kernel is not resolved by the grid");
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = g.node(j);
    const double l = (x - separation) / width;
    const double r = (x + separation) / width;
    v[j] = std::exp(-0.5 * l * l) + std::exp(-0.5 * r * r);
  }
  return detail::finish_sampled("two_bump", g, std::move(v), width, normalize);
}

/// Kernel from arbitrary samples (validation probes, exploratory runs).
inline Kernel kernel_from_samples(const Profile& samples, std::string kind, double width = 1.0,
                                  bool normalize = true) {
  std::vector<double> v(samples.values().begin(), samples.values().end());
  return detail::finish_sampled(std::move(kind), samples.grid(), std::move(v), width, normalize);
}

/// Integral of b(y) exp(lambda y): closed form when available, otherwise the
/// grid-truncated Riemann sum.
inline double exponential_moment(const Kernel& b, double lambda) {
  if (b.exp_moment) return b.exp_moment(lambda);
  const Grid& g = b.grid();
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) s += b.profile[j] * std::exp(lambda * g.node(j));
  return g.spacing() * s;
}

struct KernelValidation {
  double mass_error = 0.0;
  ConeReport cone;
  bool cone_checked = true;
  bool second_moment_finite = true;
  bool a0_finite = true;
  bool pass = true;
  std::vector<std::string> failures;
};

/// Checks unit mass, finite moments, and membership in the cone
/// (nonnegative, even, unimodal). Cone checks are skipped for spectral
/// kernels whose samples resolve a singularity only approximately.
inline KernelValidation validate_kernel(const Kernel& b, double tol = 1e-8) {
  KernelValidation r;
  r.mass_error = std::abs(b.mass - 1.0);
  if (r.mass_error > tol) r.failures.push_back("unit mass (|mass - 1| = " + std::to_string(r.mass_error) + ")");
  r.second_moment_finite = std::isfinite(b.second_moment) && b.second_moment > 0.0;
  if (!r.second_moment_finite) r.failures.push_back("finite positive second moment");
  r.a0_finite = std::isfinite(b.a0) && b.a0 > 0.0;
  if (!r.a0_finite) r.failures.push_back("square integrability");
  r.cone_checked = !b.spectral;
  if (r.cone_checked) {
    r.cone = cone_check(b.profile);
    const double scale = tol * sup_norm(b.profile);
    if (r.cone.even_deviation > scale) r.failures.push_back("evenness");
    if (r.cone.negativity() > scale) r.failures.push_back("nonnegativity");
    if (r.cone.unimodality_deviation > scale) r.failures.push_back("unimodality");
  }
  r.pass = r.failures.empty();
  return r;
}

struct AdmissibilityReport {
  bool pass = false;
  std::string reason;
  double lower = 0.0;  // smallest constant allowed by the lower symbol bound
  double upper = 0.0;  // largest constant allowed by the upper symbol bound
};

/// Small-eigenvalue requirements on the symbol: one constant C > 0 with
/// |bhat|^2 <= 1/(1 + C k^2) and |bhat|^2 >= 1 - C k^2 at every grid frequency.
inline AdmissibilityReport kdv_admissible(const Kernel& b) {
  AdmissibilityReport r;
  const Grid& g = b.grid();
  r.lower = 0.0;
  r.upper = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= g.size() / 2; ++m) {
    const double k2 = g.frequency(m) * g.frequency(m);
    const double s2 = std::norm(b.symbol[m]);
    r.lower = std::max(r.lower, (1.0 - s2) / k2);
    if (s2 > 0.0) r.upper = std::min(r.upper, (1.0 / s2 - 1.0) / k2);
  }
  const double slack = 1e-9 * std::max(1.0, r.lower);
  r.pass = b.bhat_pp0 < 0.0 && r.upper > 0.0 && r.lower <= r.upper + slack;
  if (!r.pass) {
    r.reason = "symbol bounds 1 - C k^2 <= |bhat|^2 <= 1/(1 + C k^2) admit no common C > 0";
  }
  return r;
}

/// Large-eigenvalue requirement: a = b*b must have a bounded, integrable
/// second derivative. Tested through the spectral tail of k^2 |bhat|^2.
inline AdmissibilityReport high_energy_admissible(const Kernel& b) {
  AdmissibilityReport r;
  const Grid& g = b.grid();
  const std::size_t half = g.size() / 2;
  const std::size_t tail_start = half - half / 10;
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t m = 1; m <= half; ++m) {
    const double w = g.frequency(m);
    const double c = w * w * std::norm(b.symbol[m]);
    total += c;
    if (m >= tail_start) tail += c;
  }
  r.lower = tail;
  r.upper = total;
  r.pass = !b.spectral && total > 0.0 && tail <= 1e-8 * total;
  if (!r.pass) {
    r.reason = "second derivative of a = b*b is not bounded on this grid (spectral tail of k^2 |bhat|^2 = " +
               std::to_string(total > 0.0 ? tail / total : 0.0) + " of total)";
  }
  return r;
}

/// Configuration-level description of a kernel, rebuilt per grid.
struct KernelSpec {
  std::string kind = "gaussian";  // gaussian | indicator | ode | two_bump
  double width = 1.0;
  double separation = 3.0;  // two_bump only
  bool normalize = true;
};

inline bool is_standard_kernel(const KernelSpec& spec) {
  return spec.kind == "gaussian" || spec.kind == "indicator" || spec.kind == "ode";
}

inline Kernel make_kernel(const Grid& g, const KernelSpec& spec) {
  if (spec.kind == "gaussian") return gaussian_kernel(g, spec.width, spec.normalize);
  if (spec.kind == "indicator") return indicator_kernel(g, spec.normalize);
  if (spec.kind == "ode") return spectral_ode_kernel(g);
  if (spec.kind == "two_bump") return two_bump_kernel(g, spec.width, spec.separation, spec.normalize);
  fail(ErrorCode::InvalidConfig, "unknown kernel kind '" + spec.kind + "'");
}

}  // namespace nleig
