#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace bnn {

namespace detail {
// FFTW's planner is not reentrant; execution of a finished plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/**
 * In-place complex FFT over the trailing dimensions of a row-major array.
 * Unnormalized in both directions, as FFTW.
 *
 * `rank` 1 with `howmany` rows transforms every row of length n1;
 * `rank` 2 transforms the full n0 x n1 array.
 */
class FftPlan {
 public:
  enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

  static FftPlan two_d(int n0, int n1, Direction dir) { return FftPlan(n0, n1, 2, dir); }
  static FftPlan rows(int n0, int n1, Direction dir) { return FftPlan(n0, n1, 1, dir); }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& o) noexcept : plan_(o.plan_), size_(o.size_) { o.plan_ = nullptr; }
  ~FftPlan() {
    if (plan_) {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
  }

  void execute(std::vector<std::complex<double>>& data) const {
    if (data.size() != size_) throw std::invalid_argument("FftPlan: size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_, p, p);
  }

 private:
  FftPlan(int n0, int n1, int rank, Direction dir) : size_(static_cast<std::size_t>(n0) * n1) {
    std::vector<std::complex<double>> scratch(size_);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (rank == 2) {
      plan_ = fftw_plan_dft_2d(n0, n1, p, p, static_cast<int>(dir), flags);
    } else {
      int n[] = {n1};
      plan_ = fftw_plan_many_dft(1, n, n0, p, nullptr, 1, n1, p, nullptr, 1, n1,
                                 static_cast<int>(dir), flags);
    }
    if (!plan_) throw std::runtime_error("FFTW plan creation failed");
  }

  fftw_plan plan_ = nullptr;
  std::size_t size_ = 0;
};

/// Angular wavenumber of FFT bin k on a periodic interval of length `period`;
/// the Nyquist bin maps to 0 so odd derivatives stay real-symmetric.
inline double wavenumber(int k, int n, double period) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  if (2 * k == n) return 0.0;
  const int m = k < n / 2 ? k : k - n;
  return two_pi * m / period;
}

}  // namespace bnn
