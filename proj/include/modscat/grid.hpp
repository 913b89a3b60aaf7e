#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace modscat {

using cplx = std::complex<double>;

/// Periodic grid on [-L, L) with n = 2^m points (n >= 16).
class Grid1D {
 public:
  Grid1D(double half_length, std::size_t n);

  double half_length() const noexcept { return half_length_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double point(std::size_t i) const noexcept {
    return -half_length_ + static_cast<double>(i) * dx_;
  }
  std::vector<double> points() const;

  /// Angular wavenumber of DFT bin i in standard (FFTW) ordering.
  double wavenumber(std::size_t i) const noexcept;
  /// Wavenumber spacing pi / L.
  double dk() const noexcept;

  bool operator==(const Grid1D& other) const noexcept {
    return n_ == other.n_ && half_length_ == other.half_length_;
  }

 private:
  double half_length_;
  std::size_t n_;
  double dx_;
};

Grid1D make_grid(double half_length, std::size_t n);

/// Sampled function on a Grid1D. Value type; the grid is held by value.
template <class T>
struct Field {
  Grid1D grid;
  std::vector<T> values;

  explicit Field(const Grid1D& g) : grid(g), values(g.size(), T{}) {}
  Field(const Grid1D& g, std::vector<T> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
      throw std::invalid_argument("field length does not match grid size");
    }
  }

  template <class Fn>
  static Field sample(const Grid1D& g, Fn&& fn) {
    Field f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = static_cast<T>(fn(g.point(i)));
    return f;
  }

  std::size_t size() const noexcept { return values.size(); }
  T& operator[](std::size_t i) noexcept { return values[i]; }
  const T& operator[](std::size_t i) const noexcept { return values[i]; }
  T* data() noexcept { return values.data(); }
  const T* data() const noexcept { return values.data(); }
  std::span<T> span() noexcept { return values; }
  std::span<const T> span() const noexcept { return values; }

  bool all_finite() const;

  Field& operator+=(const Field& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  template <class S>
  Field& operator*=(S scale) {
    for (auto& v : values) v *= scale;
    return *this;
  }

  void check_same_grid(const Field& o) const {
    if (!(grid == o.grid)) throw std::invalid_argument("fields live on different grids");
  }
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

template <class T>
Field<T> operator+(Field<T> a, const Field<T>& b) {
  a += b;
  return a;
}
template <class T>
Field<T> operator-(Field<T> a, const Field<T>& b) {
  a -= b;
  return a;
}
template <class T, class S>
Field<T> operator*(S scale, Field<T> a) {
  a *= scale;
  return a;
}

ComplexField to_complex(const RealField& f);
RealField real_part(const ComplexField& f);
RealField modulus(const ComplexField& f);
ComplexField conj(const ComplexField& f);

enum class NormKind { L2, Linf, Lp };

/// L2: sqrt(sum |f|^2 dx); Linf: max |f|; Lp: (sum |f|^p dx)^(1/p).
double norm(const ComplexField& f, NormKind kind, double p = 2.0);
double norm(const RealField& f, NormKind kind, double p = 2.0);

inline double l2_norm(const ComplexField& f) { return norm(f, NormKind::L2); }
inline double linf_norm(const ComplexField& f) { return norm(f, NormKind::Linf); }

/// Unnormalized DFT of the samples (FFTW sign convention).
ComplexField fourier_coefficients(const ComplexField& f);
/// Inverse of fourier_coefficients (includes the 1/n factor).
ComplexField from_fourier_coefficients(const ComplexField& fhat);

/// L2 norm from the DFT coefficients: sqrt(dx/n * sum |fhat|^2).
double l2_norm_spectral(const ComplexField& f);

/// d^order f / dy^order via the multiplier (i xi)^order. order in {1,2,3}.
/// Odd orders zero the Nyquist bin.
ComplexField spectral_deriv(const ComplexField& f, int order);
RealField spectral_deriv(const RealField& f, int order);

/// out[i] = exp(i * wavenumber(i)^2 * theta), the free-propagation multiplier.
void dispersion_multiplier(const Grid1D& grid, double theta, std::span<cplx> out);

}  // namespace modscat
