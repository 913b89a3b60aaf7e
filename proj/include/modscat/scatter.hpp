#pragma once

#include "modscat/grid.hpp"
#include "modscat/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace modscat {

/// Fitted ln(value) = m ln s + q ln(1 + ln s) + c.
struct RateFit {
  double exponent = 0.0;  // m
  int log_power = 0;      // q
  double residual_rms = 0.0;
  std::size_t samples = 0;
  bool degenerate = false;  // no usable samples (e.g. identically zero signal)
};

/// Least squares over q = 0..log_correction_max, keeping the q with the
/// smallest residual (smaller q wins ties). Needs >= 8 samples with s >= 1,
/// positive values and at least `min_decades` of s.
RateFit fit_rate(const std::vector<std::pair<double, double>>& samples, int log_correction_max,
                 double min_decades = 1.5);

/// Same, restricted to s in [s_lo, s_hi]. Samples with value <= 0 make the fit degenerate.
RateFit fit_rate_window(const std::vector<std::pair<double, double>>& samples, double s_lo, double s_hi,
                        int log_correction_max, double min_decades = 1.5);

/// G(s, y) = int_{s0}^s g, g = beta |V|^2 / s + gamma |V|^4 / s^2.
struct PhaseAccumulator {
  double s0;
  RealField G;
  double last_s;
  Couplings couplings;
};

PhaseAccumulator make_phase_accumulator(const ProfileState& start, Couplings c);

/// Adds the trapezoid of g over [state.s, next.s]; requires state.s == acc.last_s < next.s.
PhaseAccumulator accumulate_phase(const PhaseAccumulator& acc, const ProfileState& state,
                                  const ProfileState& next);

struct ExtractOptions {
  double mask_threshold = 1e-3;  // phase is reported only where a > threshold
  double fit_lo = 0.0;           // fit window in s (0: from the first snapshot)
  double fit_hi = 0.0;           // (0: up to the last snapshot)
  int log_correction_max = 2;
};

struct ExtractedData {
  RealField a;
  RealField b;                // 0 where masked
  std::vector<bool> mask;     // true where b is meaningful
  ComplexField A;             // lim V e^{iG}
  RateFit rate_modulus;       // sup_y | |V(s)| - a |
  RateFit rate_phase;         // sup_y | V(s) - A e^{-iG(s)} |
  std::vector<double> s;      // snapshot times used
  std::vector<RealField> G;   // G at every snapshot
  bool degenerate = false;    // a == 0 everywhere
};

/// Scattering data from a profile trajectory. a and A come from the last two
/// snapshots with one Richardson step against an s^-1 error model;
/// b = arg A - (G(S) - beta a^2 ln S), unwrapped outward from the peak of a.
ExtractedData extract(const std::vector<ProfileState>& trajectory, const PhaseAccumulator& acc,
                      const ExtractOptions& opt = {});

/// a exp(i(-beta a^2 ln s + b)) with the phase offset taken from A at every
/// point, masked or not.
ComplexField asymptotic_profile(const ExtractedData& x, double s, double beta);

/// Unwraps phases along the grid starting at index `start`, skipping masked points.
std::vector<double> unwrap_from(const std::vector<double>& wrapped, const std::vector<bool>& mask,
                                std::size_t start);

/// Wrapped phase difference in (-pi, pi].
double wrap_phase(double x);

}  // namespace modscat
