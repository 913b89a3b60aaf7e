#pragma once

#include "modscat/ansatz.hpp"
#include "modscat/series.hpp"
#include "modscat/solver.hpp"

#include <functional>
#include <vector>

namespace modscat {

struct DuhamelConfig {
  double t_min = 10.0;
  double T_max = 1000.0;
  double dt = 2e-3;
  int max_iters = 30;
  double tol = 1e-9;               // on sup_s ||w_{k+1} - w_k||_2
  std::size_t snapshots = 400;     // log-spaced in [t_min, T_max]

  void validate() const;
};

struct IterationRecord {
  int k = 0;
  double diff_sup = 0.0;            // sup_s ||w_{k+1} - w_k||_2
  double weighted_diff_sup = 0.0;   // sup_s s ||w_{k+1} - w_k||_2 / (1 + ln(1+s))^2
  double contraction_ratio = 0.0;   // weighted_diff_sup / previous one (0 for the first record)
  double bound_ratio_max = 0.0;     // max_s (||w|| + ||d_x w||) / (2K (1 + |beta| ln(1+s))^2 / s)
  bool bound_ok = true;
  double energy_ratio_max = 0.0;    // max_s ||w(s)|| / int_s^T ||S||
  bool energy_ok = true;
  double derivative_energy_ratio_max = 0.0;
  bool derivative_energy_ok = true;
};

struct IterationLog {
  double K = 0.0;  // sup_s s int_s^T (||F|| + ||d_x F||) / (1 + |beta| ln(1+s))^2
  std::vector<IterationRecord> records;
  bool converged = false;
};

/// Profile-variable solution V = V_bg + W on snapshots s[0] = t_min < ... < s.back() = T_max.
/// Physical quantities follow from ||w||_2 = ||W||_2 and ||w||_inf = t^{-1/2} ||W||_inf.
struct DuhamelTrajectory {
  std::vector<double> s;
  std::vector<ComplexField> W;
  std::vector<ComplexField> V_bg;
  std::vector<ComplexField> F_bg;  // Psi(V_bg)
  std::vector<double> energy_bound;  // int_s^T ||S|| accumulated by the march
};

struct DuhamelResult {
  DuhamelTrajectory trajectory;
  IterationLog log;
};

class ConvergenceFailure : public NumericalFailure {
 public:
  ConvergenceFailure(const std::string& what, IterationLog log)
      : NumericalFailure(what), log_(std::move(log)) {}
  const IterationLog& log() const noexcept { return log_; }
  double last_ratio() const noexcept {
    return log_.records.empty() ? 0.0 : log_.records.back().contraction_ratio;
  }

 private:
  IterationLog log_;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Fixed point of  (i d_s + s^-2 d_y^2) W = G(V_bg, W) - Psi(V_bg),  W(T_max) = 0,
/// with V_bg = V0 built from the data.
DuhamelResult duhamel_iterate(const ScatteringData& data, const DuhamelConfig& cfg,
                              const IterationObserver& observer = {});

/// Same with V_bg the evaluated high-order profile V_N and source Psi(V_N).
DuhamelResult duhamel_iterate_high_order(const AsymSeries& V_N, const DuhamelConfig& cfg,
                                         const IterationObserver& observer = {});

/// ||Psi(V_bg + W)||_2 at the interior snapshot nearest s_target, with the
/// s-derivative from a three-point difference over neighbouring snapshots.
/// The lens transform makes this equal to the L2 norm of the physical residual.
double duhamel_residual_l2(const DuhamelTrajectory& traj, double s_target, double beta, double gamma);

/// d_x in profile variables: (i y / 2 + s^-1 d_y) W.
ComplexField lens_dx(const ComplexField& W, double s);

}  // namespace modscat
