#pragma once

#include "modscat/grid.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace modscat {

/// Blow-up, non-finite state or a failed fixed-point iteration.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Couplings {
  double beta = 0.0;
  double gamma = 0.0;
};

struct PhysicalState {
  double t;
  ComplexField v;
};

struct ProfileState {
  double s;
  ComplexField V;
};

struct StepControl {
  enum class Scheme { Strang };

  double dt = 1e-3;
  Scheme scheme = Scheme::Strang;
  std::vector<double> snapshot_times;  // recorded at the nearest step

  /// dt in (0, 0.1], snapshot times sorted and inside [t0, t_end].
  void validate(double t0, double t_end) const;
};

/// Sorted, log-spaced times in [t0, t1] (both ends included).
std::vector<double> log_spaced(double t0, double t1, std::size_t count);

/// i v_t + v_xx = beta |v|^2 v + gamma |v|^4 v, one Strang step:
/// half nonlinear rotation, exact dispersion exp(-i xi^2 dt), half rotation.
PhysicalState step_physical(const PhysicalState& state, double dt, Couplings c);

/// i V_s + s^-2 V_yy = beta s^-1 |V|^2 V + gamma s^-2 |V|^4 V, one Strang step.
/// Dispersion is integrated exactly in s; the rotations use the weights at the step midpoint.
ProfileState step_profile(const ProfileState& state, double ds, Couplings c);

/// Fixed-step march from the initial state to t_end. The step is shrunk
/// (never grown) so that it divides the interval. Throws NumericalFailure
/// when the sup norm exceeds 1e6 or turns non-finite.
std::vector<PhysicalState> solve_forward(const PhysicalState& initial, double t_end, const StepControl& ctl,
                                         Couplings c);
std::vector<ProfileState> solve_forward(const ProfileState& initial, double s_end, const StepControl& ctl,
                                        Couplings c);

/// beta (|v0+w|^2 (v0+w) - |v0|^2 v0) + gamma (|v0+w|^4 (v0+w) - |v0|^4 v0)
ComplexField nonlinear_difference(const ComplexField& v0, const ComplexField& w, double beta, double gamma);

/// i w_t + w_xx = F(t) on the physical grid, marched from t0 to t1 with
///   w <- U(dt) w - i dt U(dt/2) F(t + dt/2).
/// Every step is recorded, together with F sampled at the recorded times.
struct SourcedRun {
  std::vector<PhysicalState> states;
  std::vector<ComplexField> sources;
  double source_integral = 0.0;  // sum over steps of dt ||F(mid)||_2
};
SourcedRun march_sourced_physical(const ComplexField& w0, double t0, double t1, double dt,
                                  const std::function<ComplexField(double)>& F);

/// Pointwise |V(s,y)| <= |V(s0,y)| + int_{s0}^s |V_yy(sigma,y)| sigma^-2 dsigma (trapezoid).
struct IntegratingFactorReport {
  double max_violation = 0.0;  // max over (s, y) of lhs - rhs, clipped at 0
  double max_lhs = 0.0;
  double min_slack = 0.0;      // min over (s, y) of rhs - lhs
  std::size_t snapshots = 0;
};
IntegratingFactorReport integrating_factor_bound_check(const std::vector<ProfileState>& trajectory);

}  // namespace modscat
