#pragma once

// Thin RAII layer over FFTW's real-to-complex transforms. Plans are created
// with FFTW_ESTIMATE so that results are bit-reproducible between runs, and
// each thread keeps its own plan/buffer set per transform length.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "nleig/error.hpp"

namespace nleig {

using Complex = std::complex<double>;

/// Half spectrum (n/2 + 1 entries) of a real sequence of even length n.
using Spectrum = std::vector<Complex>;

namespace detail {

// The FFTW planner is not re-entrant; plan creation and destruction go
// through this lock while execution on private buffers does not.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(n_ / 2 + 1);
    if (real_ == nullptr || spec_ == nullptr) {
      release();
      fail(ErrorCode::InvalidArgument, "FFT buffer allocation failed");
    }
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    const int len = static_cast<int>(n_);
    forward_ = fftw_plan_dft_r2c_1d(len, real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(len, spec_, real_, FFTW_ESTIMATE);
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  ~RealFft() { release(); }

  std::size_t size() const noexcept { return n_; }

  /// Unnormalized forward DFT: X_m = sum_j x_j exp(-2 pi i j m / n).
  void forward(std::span<const double> in, Spectrum& out) {
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(forward_);
    out.resize(n_ / 2 + 1);
    const auto* src = reinterpret_cast<const Complex*>(spec_);
    std::copy(src, src + n_ / 2 + 1, out.begin());
  }

  /// Normalized inverse DFT (includes the 1/n factor).
  void backward(const Spectrum& in, std::span<double> out) {
    auto* dst = reinterpret_cast<Complex*>(spec_);
    std::copy(in.begin(), in.end(), dst);
    fftw_execute(backward_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = real_[j] * scale;
  }

 private:
  void release() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (backward_ != nullptr) fftw_destroy_plan(backward_);
    if (real_ != nullptr) fftw_free(real_);
    if (spec_ != nullptr) fftw_free(spec_);
    forward_ = backward_ = nullptr;
    real_ = nullptr;
    spec_ = nullptr;
  }

  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

inline RealFft& fft_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

}  // namespace detail

inline Spectrum forward_dft(std::span<const double> x) {
  Spectrum out;
  detail::fft_for(x.size()).forward(x, out);
  return out;
}

inline std::vector<double> inverse_dft(const Spectrum& spectrum, std::size_t n) {
  require(spectrum.size() == n / 2 + 1, ErrorCode::InvalidArgument, "spectrum length does not match n/2+1");
  std::vector<double> out(n);
  detail::fft_for(n).backward(spectrum, out);
  return out;
}

}  // namespace nleig
