#pragma once

#include <string>

#include "nleig/grid.hpp"
#include "nleig/kernels.hpp"
#include "nleig/nonlinearity.hpp"

namespace nleig {

struct EnergyRecord {
  double P = 0.0;      // integral of F(b*V)
  double K = 0.0;      // (1/2) |V|^2
  double Q = 0.0;      // (alpha/2) |b*V|^2
  double sup_U = 0.0;  // max of b*V
};

inline void require_in_domain(const Profile& u, const Nonlinearity& nl) {
  const double sup = u.max();
  if (!nl.in_domain(sup)) {
    fail(ErrorCode::DomainBreach, "sup(b*V) = " + std::to_string(sup) + " reaches the edge of the " + nl.name() +
                                      " nonlinearity's domain (" + std::to_string(nl.sup_domain()) + ")");
  }
}

inline double eval_K(const Profile& v) { return 0.5 * inner_product(v, v); }

/// Riemann sum of F(U) for a precomputed U = b*V.
inline double potential_from_u(const Profile& u, const Nonlinearity& nl) {
  require_in_domain(u, nl);
  double s = 0.0;
  for (double r : u.values()) s += nl.F(r);
  return u.grid().spacing() * s;
}

inline double eval_P(const Profile& v, const Kernel& b, const Nonlinearity& nl) {
  return potential_from_u(convolve(b, v), nl);
}

inline double eval_Q(const Profile& v, const Kernel& b, double alpha) {
  const Profile u = convolve(b, v);
  return 0.5 * alpha * inner_product(u, u);
}

/// Gateaux derivative of P: b * f(b * V).
inline Profile grad_P(const Profile& v, const Kernel& b, const Nonlinearity& nl) {
  const Profile u = convolve(b, v);
  require_in_domain(u, nl);
  return convolve(b, u.map([&nl](double r) { return nl.f(r); }));
}

inline EnergyRecord energies(const Profile& v, const Kernel& b, const Nonlinearity& nl) {
  const Profile u = convolve(b, v);
  EnergyRecord e;
  e.sup_U = u.max();
  e.P = potential_from_u(u, nl);
  e.K = eval_K(v);
  e.Q = 0.5 * nl.alpha() * inner_product(u, u);
  return e;
}

}  // namespace nleig
