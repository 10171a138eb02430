#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nleig/error.hpp"

namespace nleig {

/// Superlinear nonlinearity f with f(0) = 0, alpha = f'(0), beta = f''(0),
/// and its antiderivative F(r) = integral of f over [0, r]. Evaluators are
/// closed-form per family.
class Nonlinearity {
 public:
  enum class Family { Exp, Quadratic, Singular, Linear, Custom };

  struct CustomEvaluators {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> F;
  };

  static Nonlinearity exp() { return Nonlinearity(Family::Exp, "exp", 1.0, 1.0); }

  static Nonlinearity quadratic(double alpha, double beta) {
    require(alpha > 0.0 && beta > 0.0, ErrorCode::InvalidArgument, "quadratic nonlinearity needs alpha, beta > 0");
    return Nonlinearity(Family::Quadratic, "quadratic", alpha, beta);
  }

  static Nonlinearity singular(double m) {
    require(m > 1.0, ErrorCode::InvalidArgument, "singular nonlinearity needs m > 1, got " + std::to_string(m));
    Nonlinearity nl(Family::Singular, "singular", m + 1.0, (m + 1.0) * (m + 2.0));
    nl.sup_domain_ = 1.0;
    nl.m_ = m;
    return nl;
  }

  /// f(r) = alpha r. Not superlinear; used as a probe.
  static Nonlinearity linear(double alpha) { return Nonlinearity(Family::Linear, "linear", alpha, 0.0); }

  /// Arbitrary evaluators for exploratory runs; alpha and beta are declared
  /// by the caller.
  static Nonlinearity custom(std::string name, CustomEvaluators ev, double alpha, double beta,
                             double sup_domain = std::numeric_limits<double>::infinity()) {
    Nonlinearity nl(Family::Custom, std::move(name), alpha, beta);
    nl.custom_ = std::move(ev);
    nl.sup_domain_ = sup_domain;
    return nl;
  }

  Family family() const noexcept { return family_; }
  const std::string& name() const noexcept { return name_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double sup_domain() const noexcept { return sup_domain_; }
  std::optional<double> singular_exponent() const { return m_; }

  bool in_domain(double r) const noexcept { return r < sup_domain_; }

  double f(double r) const {
    switch (family_) {
      case Family::Exp: return std::expm1(r);
      case Family::Quadratic: return alpha_ * r + 0.5 * beta_ * r * r;
      case Family::Linear: return alpha_ * r;
      case Family::Singular: guard(r); return std::expm1(-(*m_ + 1.0) * std::log1p(-r));
      case Family::Custom: return custom_.f(r);
    }
    return 0.0;
  }

  double df(double r) const {
    switch (family_) {
      case Family::Exp: return std::exp(r);
      case Family::Quadratic: return alpha_ + beta_ * r;
      case Family::Linear: return alpha_;
      case Family::Singular: guard(r); return (*m_ + 1.0) * std::exp(-(*m_ + 2.0) * std::log1p(-r));
      case Family::Custom: return custom_.df(r);
    }
    return 0.0;
  }

  double F(double r) const {
    switch (family_) {
      case Family::Exp: return exp_antiderivative(r);
      case Family::Quadratic: return 0.5 * alpha_ * r * r + beta_ * r * r * r / 6.0;
      case Family::Linear: return 0.5 * alpha_ * r * r;
      case Family::Singular: guard(r); return singular_antiderivative(r);
      case Family::Custom: return custom_.F(r);
    }
    return 0.0;
  }

 private:
  Nonlinearity(Family family, std::string name, double alpha, double beta)
      : family_(family), name_(std::move(name)), alpha_(alpha), beta_(beta) {}

  void guard(double r) const {
    if (!(r < sup_domain_)) {
      fail(ErrorCode::DomainBreach, name_ + " nonlinearity evaluated at " + std::to_string(r) +
                                        " >= " + std::to_string(sup_domain_));
    }
  }

  // e^r - r - 1 without cancellation near 0.
  static double exp_antiderivative(double r) {
    if (std::abs(r) < 0.1) {
      double term = 0.5 * r * r;
      double sum = term;
      for (int k = 3; k < 30 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
        term *= r / k;
        sum += term;
      }
      return sum;
    }
    return std::expm1(r) - r;
  }

  // ((1 - s)^(-m) - 1)/m - s; series sum_k C(m+k-1, k)/m s^k (k >= 2) near 0.
  double singular_antiderivative(double s) const {
    const double m = *m_;
    if (std::abs(s) < 0.05) {
      double coeff = m * (m + 1.0) / 2.0;  // C(m+1, 2)
      double pw = s * s;
      double sum = coeff / m * pw;
      for (int k = 3; k < 60; ++k) {
        coeff *= (m + k - 1.0) / k;
        pw *= s;
        const double term = coeff / m * pw;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      }
      return sum;
    }
    return std::expm1(-m * std::log1p(-s)) / m - s;
  }

  Family family_;
  std::string name_;
  double alpha_;
  double beta_;
  double sup_domain_ = std::numeric_limits<double>::infinity();
  std::optional<double> m_;
  CustomEvaluators custom_;
};

inline Nonlinearity exp_nonlinearity() { return Nonlinearity::exp(); }
inline Nonlinearity quadratic_nonlinearity(double alpha, double beta) { return Nonlinearity::quadratic(alpha, beta); }
inline Nonlinearity singular_nonlinearity(double m) { return Nonlinearity::singular(m); }

/// f(r) = sqrt(r): concave, violates superlinearity. Exploratory probe.
inline Nonlinearity sqrt_probe_nonlinearity() {
  return Nonlinearity::custom(
      "sqrt",
      {[](double r) { return std::copysign(std::sqrt(std::abs(r)), r); },
       [](double r) { return 0.5 / std::sqrt(std::max(std::abs(r), 1e-300)); },
       [](double r) { return 2.0 / 3.0 * std::pow(std::abs(r), 1.5); }},
      std::numeric_limits<double>::infinity(), 0.0);
}

struct SuperlinearitySample {
  double lambda = 1.0;  // >= 1
  double r = 0.0;       // >= 0
};

struct SuperlinearityReport {
  bool pass = true;
  double worst_scaling_margin = std::numeric_limits<double>::infinity();  // min f(lambda r) - lambda f(r)
  double worst_energy_margin = std::numeric_limits<double>::infinity();   // min f(r) r - 2 F(r)
  std::size_t violations = 0;
};

/// Checks f(lambda r) >= lambda f(r) and f(r) r >= 2 F(r) at every sample.
inline SuperlinearityReport check_superlinearity(const Nonlinearity& nl, const std::vector<SuperlinearitySample>& samples,
                                                 double tol = 1e-12) {
  SuperlinearityReport rep;
  for (const auto& s : samples) {
    require(s.lambda >= 1.0 && s.r >= 0.0, ErrorCode::InvalidArgument, "superlinearity samples need lambda >= 1, r >= 0");
    require(nl.in_domain(s.lambda * s.r), ErrorCode::DomainBreach, "superlinearity sample outside the domain");
    const double fl = nl.f(s.lambda * s.r);
    const double lf = s.lambda * nl.f(s.r);
    const double scaling = fl - lf;
    const double energy = nl.f(s.r) * s.r - 2.0 * nl.F(s.r);
    rep.worst_scaling_margin = std::min(rep.worst_scaling_margin, scaling);
    rep.worst_energy_margin = std::min(rep.worst_energy_margin, energy);
    const double scale = tol * std::max({1.0, std::abs(fl), std::abs(lf)});
    if (scaling < -scale || energy < -scale) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

/// Configuration-level description of a nonlinearity.
struct NonlinearitySpec {
  std::string kind = "exp";  // exp | quadratic | singular | sqrt
  double alpha = 1.0;
  double beta = 1.0;
  double m = 4.0;
};

inline bool is_standard_nonlinearity(const NonlinearitySpec& spec) {
  return spec.kind == "exp" || spec.kind == "quadratic" || spec.kind == "singular";
}

inline Nonlinearity make_nonlinearity(const NonlinearitySpec& spec) {
  if (spec.kind == "exp") return Nonlinearity::exp();
  if (spec.kind == "quadratic") return Nonlinearity::quadratic(spec.alpha, spec.beta);
  if (spec.kind == "singular") return Nonlinearity::singular(spec.m);
  if (spec.kind == "sqrt") return sqrt_probe_nonlinearity();
  fail(ErrorCode::InvalidConfig, "unknown nonlinearity kind '" + spec.kind + "'");
}

}  // namespace nleig
