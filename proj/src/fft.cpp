#include "modscat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace modscat {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(const std::complex<double>* p) {
  // FFTW's new-array execute never writes through the input pointer of an
  // out-of-place transform.
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(p));
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  std::vector<std::complex<double>> a(n), b(n);
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  forward_inplace_ = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(a.data()), FFTW_FORWARD, flags);
  inverse_inplace_ = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(a.data()), FFTW_BACKWARD, flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr || forward_inplace_ == nullptr ||
      inverse_inplace_ == nullptr) {
    throw std::runtime_error("FFTW plan creation failed");
  }
}

FftPlan::~FftPlan() {
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(forward_inplace_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_inplace_));
}

const FftPlan& FftPlan::get(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::unique_ptr<FftPlan>(new FftPlan(n))).first;
  }
  return *it->second;
}

void FftPlan::forward(const std::complex<double>* in, std::complex<double>* out) const {
  void* plan = in == out ? forward_inplace_ : forward_plan_;
  fftw_execute_dft(static_cast<fftw_plan>(plan), as_fftw(in), as_fftw(out));
}

void FftPlan::inverse(const std::complex<double>* in, std::complex<double>* out) const {
  void* plan = in == out ? inverse_inplace_ : inverse_plan_;
  fftw_execute_dft(static_cast<fftw_plan>(plan), as_fftw(in), as_fftw(out));
}

}  // namespace modscat
