#pragma once

#include <complex>
#include <cstddef>

namespace modscat {

/// Cached FFTW plan pair for one transform length.
///
/// Plans are created once per length under a lock and then shared; executing
/// a plan on caller-provided arrays is thread-safe. Plans use FFTW_ESTIMATE so
/// that the algorithm (and hence rounding) does not vary between runs.
class FftPlan {
 public:
  static const FftPlan& get(std::size_t n);

  /// out[k] = sum_j in[j] exp(-2 pi i jk/n). In-place allowed.
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  /// Unnormalized inverse: out[j] = sum_k in[k] exp(+2 pi i jk/n).
  void inverse(const std::complex<double>* in, std::complex<double>* out) const;

  std::size_t size() const noexcept { return n_; }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan();

 private:
  explicit FftPlan(std::size_t n);

  std::size_t n_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  void* forward_inplace_ = nullptr;
  void* inverse_inplace_ = nullptr;
};

}  // namespace modscat
