#include "modscat/grid.hpp"

#include "modscat/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace modscat {

Grid1D::Grid1D(double half_length, std::size_t n) : half_length_(half_length), n_(n) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw std::invalid_argument("grid half_length must be positive and finite");
  }
  if (n < 16 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("grid size must be a power of two >= 16, got " + std::to_string(n));
  }
  dx_ = 2.0 * half_length / static_cast<double>(n);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> p(n_);
  for (std::size_t i = 0; i < n_; ++i) p[i] = point(i);
  return p;
}

double Grid1D::dk() const noexcept { return std::numbers::pi / half_length_; }

double Grid1D::wavenumber(std::size_t i) const noexcept {
  const auto m = static_cast<long long>(i) - (i < n_ / 2 ? 0LL : static_cast<long long>(n_));
  return static_cast<double>(m) * dk();
}

Grid1D make_grid(double half_length, std::size_t n) { return Grid1D(half_length, n); }

template <class T>
bool Field<T>::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](const T& v) {
    if constexpr (std::is_same_v<T, double>) {
      return std::isfinite(v);
    } else {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    }
  });
}

template struct Field<double>;
template struct Field<cplx>;

ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

RealField real_part(const ComplexField& f) {
  RealField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

RealField modulus(const ComplexField& f) {
  RealField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::abs(f[i]);
  return out;
}

ComplexField conj(const ComplexField& f) {
  ComplexField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::conj(f[i]);
  return out;
}

namespace {

template <class T>
double norm_impl(const Field<T>& f, NormKind kind, double p) {
  if (!f.all_finite()) throw std::invalid_argument("norm of a non-finite field");
  switch (kind) {
    case NormKind::Linf: {
      double m = 0.0;
      for (const auto& v : f.values) m = std::max(m, std::abs(v));
      return m;
    }
    case NormKind::L2: {
      double s = 0.0;
      for (const auto& v : f.values) s += std::norm(v);
      return std::sqrt(s * f.grid.dx());
    }
    case NormKind::Lp: {
      if (!(p >= 1.0)) throw std::invalid_argument("Lp norm needs p >= 1");
      double s = 0.0;
      for (const auto& v : f.values) s += std::pow(std::abs(v), p);
      return std::pow(s * f.grid.dx(), 1.0 / p);
    }
  }
  return 0.0;
}

}  // namespace

double norm(const ComplexField& f, NormKind kind, double p) { return norm_impl(f, kind, p); }
double norm(const RealField& f, NormKind kind, double p) { return norm_impl(f, kind, p); }

ComplexField fourier_coefficients(const ComplexField& f) {
  ComplexField out(f.grid);
  FftPlan::get(f.size()).forward(f.data(), out.data());
  return out;
}

ComplexField from_fourier_coefficients(const ComplexField& fhat) {
  ComplexField out(fhat.grid);
  FftPlan::get(fhat.size()).inverse(fhat.data(), out.data());
  out *= 1.0 / static_cast<double>(fhat.size());
  return out;
}

double l2_norm_spectral(const ComplexField& f) {
  const ComplexField fhat = fourier_coefficients(f);
  double s = 0.0;
  for (const auto& v : fhat.values) s += std::norm(v);
  return std::sqrt(s * f.grid.dx() / static_cast<double>(f.size()));
}

ComplexField spectral_deriv(const ComplexField& f, int order) {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("spectral_deriv supports orders 1..3, got " + std::to_string(order));
  }
  const Grid1D& g = f.grid;
  const std::size_t n = g.size();
  ComplexField fhat = fourier_coefficients(f);
  const cplx I(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = g.wavenumber(i);
    cplx m = 1.0;
    for (int o = 0; o < order; ++o) m *= I * xi;
    fhat[i] *= m;
  }
  if (order % 2 == 1) fhat[n / 2] = 0.0;
  return from_fourier_coefficients(fhat);
}

RealField spectral_deriv(const RealField& f, int order) {
  return real_part(spectral_deriv(to_complex(f), order));
}

void dispersion_multiplier(const Grid1D& grid, double theta, std::span<cplx> out) {
  const std::size_t n = grid.size();
  if (out.size() != n) throw std::invalid_argument("dispersion_multiplier: output size mismatch");
  const double dk = grid.dk();
  const double x = dk * dk * theta;
  const std::size_t half = n / 2;
  // exp(i m^2 x) by the recurrence z_{m+1} = z_m exp(i(2m+1)x), reseeded
  // exactly every block so rounding cannot accumulate over many modes.
  constexpr std::size_t block = 16;
  const cplx step2 = std::polar(1.0, 2.0 * x);
  for (std::size_t b = 0; b <= half; b += block) {
    const double bd = static_cast<double>(b);
    cplx z = std::polar(1.0, bd * bd * x);
    cplx r = std::polar(1.0, (2.0 * bd + 1.0) * x);
    const std::size_t end = std::min(b + block, half + 1);
    for (std::size_t m = b; m < end; ++m) {
      out[m] = z;
      if (m != 0 && m != half) out[n - m] = z;
      z *= r;
      r *= step2;
    }
  }
}

}  // namespace modscat
