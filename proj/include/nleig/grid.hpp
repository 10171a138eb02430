#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nleig/error.hpp"
#include "nleig/fft.hpp"

namespace nleig {

/// Uniform 2L-periodic lattice on (-L, L]. Storage index j holds the node
/// x_j = (j - n/2) h, so x = 0 sits at index n/2 and x = -L (identified with
/// +L) at index 0.
class Grid {
 public:
  Grid() = default;

  double half_period() const noexcept { return half_period_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return 2.0 * half_period_ / static_cast<double>(n_); }
  std::size_t origin() const noexcept { return n_ / 2; }

  double node(std::size_t j) const noexcept {
    return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * spacing();
  }

  /// Storage index of the node -x_j.
  std::size_t mirror(std::size_t j) const noexcept { return (n_ - j) % n_; }

  /// Angular frequency of half-spectrum entry m (0 <= m <= n/2).
  double frequency(std::size_t m) const noexcept {
    return std::numbers::pi * static_cast<double>(m) / half_period_;
  }

  std::vector<double> nodes() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
    return x;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

  friend Grid make_grid(double half_period, std::size_t point_count);

 private:
  Grid(double half_period, std::size_t n) : half_period_(half_period), n_(n) {}

  double half_period_ = 1.0;
  std::size_t n_ = 0;
};

inline Grid make_grid(double half_period, std::size_t point_count) {
  require(std::isfinite(half_period) && half_period > 0.0, ErrorCode::NonPositiveLength,
          "half period must be positive, got " + std::to_string(half_period));
  require(point_count % 2 == 0, ErrorCode::OddPointCount,
          "point count must be even, got " + std::to_string(point_count));
  require(point_count >= 8, ErrorCode::InvalidArgument,
          "point count must be at least 8, got " + std::to_string(point_count));
  return Grid(half_period, point_count);
}

/// Real samples of a function on a Grid. Immutable once built.
class Profile {
 public:
  Profile() = default;

  Profile(const Grid& grid, std::vector<double> samples) : grid_(grid), samples_(std::move(samples)) {
    require(samples_.size() == grid_.size(), ErrorCode::InvalidArgument,
            "profile has " + std::to_string(samples_.size()) + " samples for a grid of " +
                std::to_string(grid_.size()) + " nodes");
    for (double v : samples_) require(std::isfinite(v), ErrorCode::NonFinite, "profile sample is not finite");
  }

  static Profile zeros(const Grid& grid) { return Profile(grid, std::vector<double>(grid.size(), 0.0)); }

  static Profile constant(const Grid& grid, double value) {
    return Profile(grid, std::vector<double>(grid.size(), value));
  }

  template <class Fn>
  static Profile sample(const Grid& grid, Fn&& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = fn(grid.node(j));
    return Profile(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const double> values() const noexcept { return samples_; }
  double operator[](std::size_t j) const noexcept { return samples_[j]; }

  /// Value at x = 0.
  double at_origin() const noexcept { return samples_[grid_.origin()]; }

  double max() const { return *std::max_element(samples_.begin(), samples_.end()); }
  double min() const { return *std::min_element(samples_.begin(), samples_.end()); }

  Profile scaled(double c) const {
    std::vector<double> v(samples_);
    for (double& s : v) s *= c;
    return Profile(grid_, std::move(v));
  }

  template <class Fn>
  Profile map(Fn&& fn) const {
    std::vector<double> v(samples_.size());
    std::transform(samples_.begin(), samples_.end(), v.begin(), fn);
    return Profile(grid_, std::move(v));
  }

 private:
  Grid grid_;
  std::vector<double> samples_;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  require(a == b, ErrorCode::GridMismatch, std::string(what) + ": profiles live on different grids");
}

inline Profile operator+(const Profile& a, const Profile& b) {
  require_same_grid(a.grid(), b.grid(), "operator+");
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] + b[j];
  return Profile(a.grid(), std::move(v));
}

inline Profile operator-(const Profile& a, const Profile& b) {
  require_same_grid(a.grid(), b.grid(), "operator-");
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] - b[j];
  return Profile(a.grid(), std::move(v));
}

/// Riemann sum h * sum_j w1_j w2_j.
inline double inner_product(const Profile& w1, const Profile& w2) {
  require_same_grid(w1.grid(), w2.grid(), "inner_product");
  double s = 0.0;
  for (std::size_t j = 0; j < w1.size(); ++j) s += w1[j] * w2[j];
  return w1.grid().spacing() * s;
}

inline double l2_norm(const Profile& w) { return std::sqrt(inner_product(w, w)); }

inline double l2_distance(const Profile& a, const Profile& b) { return l2_norm(a - b); }

inline double sup_norm(const Profile& w) {
  double m = 0.0;
  for (double v : w.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Even part (W_j + W_{-j}) / 2.
inline Profile symmetrize(const Profile& w) {
  const Grid& g = w.grid();
  std::vector<double> v(w.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = 0.5 * (w[j] + w[g.mirror(j)]);
  return Profile(g, std::move(v));
}

struct ConeReport {
  double even_deviation = 0.0;
  double min_value = 0.0;
  double unimodality_deviation = 0.0;

  double negativity() const noexcept { return std::max(0.0, -min_value); }

  bool in_cone(double tolerance) const noexcept {
    return even_deviation <= tolerance && negativity() <= tolerance && unimodality_deviation <= tolerance;
  }
};

/// Distance of a profile from the cone of even, nonnegative, unimodal
/// functions. Unimodality is measured on the even part, on the right half
/// (including the wrap node x = L).
inline ConeReport cone_check(const Profile& w) {
  const Grid& g = w.grid();
  const std::size_t n = g.size();
  ConeReport r;
  r.min_value = w.min();
  for (std::size_t j = 0; j < n; ++j) r.even_deviation = std::max(r.even_deviation, std::abs(w[j] - w[g.mirror(j)]));
  const Profile even = symmetrize(w);
  for (std::size_t j = g.origin(); j < n; ++j) {
    const std::size_t next = (j + 1) % n;
    r.unimodality_deviation = std::max(r.unimodality_deviation, even[next] - even[j]);
  }
  return r;
}

/// h times the DFT of a kernel profile whose origin sits at the grid
/// centre; entry m approximates the Fourier transform at k_m.
inline Spectrum kernel_symbol(const Profile& kernel) {
  const Grid& g = kernel.grid();
  const std::size_t n = g.size();
  std::vector<double> shifted(n);
  for (std::size_t j = 0; j < n; ++j) shifted[j] = kernel[(j + n / 2) % n];
  Spectrum s = forward_dft(shifted);
  for (auto& c : s) c *= g.spacing();
  return s;
}

/// Periodic convolution with a kernel given by its symbol.
inline Profile apply_symbol(const Spectrum& symbol, const Profile& w) {
  const std::size_t n = w.size();
  require(symbol.size() == n / 2 + 1, ErrorCode::GridMismatch, "symbol length does not match profile grid");
  Spectrum sw = forward_dft(w.values());
  for (std::size_t m = 0; m < sw.size(); ++m) sw[m] *= symbol[m];
  std::vector<double> out = inverse_dft(sw, n);
  for (double v : out) require(std::isfinite(v), ErrorCode::NonFinite, "convolution produced a non-finite value");
  return Profile(w.grid(), std::move(out));
}

/// Periodic convolution h * sum_i kernel_{j-i} W_i, evaluated by DFT.
inline Profile convolve(const Profile& kernel, const Profile& w) {
  require_same_grid(kernel.grid(), w.grid(), "convolve");
  return apply_symbol(kernel_symbol(kernel), w);
}

/// Inverse of kernel_symbol for an even (real) symbol: samples centred at x = 0.
inline Profile profile_from_symbol(const Grid& g, const Spectrum& symbol) {
  const std::size_t n = g.size();
  std::vector<double> raw = inverse_dft(symbol, n);
  std::vector<double> v(n);
  const double inv_h = 1.0 / g.spacing();
  for (std::size_t j = 0; j < n; ++j) v[(j + n / 2) % n] = raw[j] * inv_h;
  return Profile(g, std::move(v));
}

}  // namespace nleig
