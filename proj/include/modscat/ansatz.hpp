#pragma once

#include "modscat/grid.hpp"

#include <string>

namespace modscat {

/// Closed-form profile used for a(y), b(y) or the initial datum f(x).
///
///   gaussian(A, w, c) = A exp(-(y - c)^2 / (2 w^2))
///   sech(A, w)        = A sech(y / w)
///   poly(A, p)        = A (1 + y^2)^(-p/2)
///   zero              = 0
struct ProfilePreset {
  enum class Kind { Zero, Gaussian, Sech, Poly };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  double width = 1.0;   // gaussian/sech width, poly power
  double center = 0.0;  // gaussian only

  double operator()(double y) const;
  RealField sample(const Grid1D& grid) const;
  std::string to_string() const;
};

/// Parses "gaussian(0.3, 2, 0)", "sech(1, 2)", "poly(1, 6)" or "zero".
/// Throws std::invalid_argument on anything else.
ProfilePreset parse_preset(const std::string& text);

struct ScatteringData {
  RealField a;
  RealField b;
  double beta = 0.0;
  double gamma = 0.0;

  const Grid1D& grid() const noexcept { return a.grid; }
  /// a >= 0, finite, same grid, and a, b negligible (< 1e-10) on the outer 10% of the grid.
  void validate() const;
};

ScatteringData make_scattering_data(RealField a, RealField b, double beta, double gamma);

struct PhaseConvention {
  bool include_quintic_phase = false;  // adds gamma a^4 / s to phi
};

/// phi(s, y) = -beta a^2 ln s + b  (+ gamma a^4 / s if requested)
RealField phase_phi(const ScatteringData& data, double s, PhaseConvention conv = {});

/// V0(s, y) = a exp(i phi(s, y))
ComplexField build_V0(const ScatteringData& data, double s, PhaseConvention conv = {});

/// v(t, x) = t^{-1/2} e^{i x^2 / 4t} V(x / t), cubic interpolation in y; zero outside the y-domain.
ComplexField profile_to_physical(const ComplexField& V, double t, const Grid1D& x_grid);

/// V(y) = t^{1/2} e^{-i t y^2 / 4} v(t y). The chirp is removed before interpolating.
ComplexField physical_to_profile(const ComplexField& v, double t, const Grid1D& y_grid);

/// Psi(V0)(s) = s^{-2} (-gamma |V0|^4 V0 + d_y^2 V0), with a spectral second derivative.
ComplexField residual_F0_profile(const ScatteringData& data, double s);

/// Four-point cubic interpolation of a periodic sample at an arbitrary coordinate.
/// Returns 0 for coordinates outside [-L, L).
cplx interpolate_cubic(const ComplexField& f, double y);

}  // namespace modscat
