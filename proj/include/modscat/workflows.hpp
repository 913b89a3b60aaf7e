#pragma once

#include "modscat/analysis.hpp"
#include "modscat/ansatz.hpp"
#include "modscat/config.hpp"
#include "modscat/duhamel.hpp"
#include "modscat/scatter.hpp"
#include "modscat/series.hpp"
#include "modscat/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace modscat {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3, kExitVerification = 4 };

// ---------------------------------------------------------------------------
// Building blocks shared by the subcommands and the acceptance runner.

/// V(t0, y) = t0^{1/2} e^{-i t0 y^2 / 4} eps f(t0 y): the profile of v(t0, x) = eps f(x).
ComplexField initial_profile(const Grid1D& grid, const ProfilePreset& f, double eps, double t0);

struct ForwardRun {
  std::vector<ProfileState> trajectory;
  ExtractedData extracted;
  std::vector<std::pair<double, double>> residual;  // (t, ||v - v0_ext||_inf)
  RateFit residual_rate;
};

/// Profile march over log-spaced snapshots, extraction, and the decay of
/// ||v - v0_ext||_inf = t^{-1/2} ||V - a e^{i(-beta a^2 ln t + b)}||_inf.
ForwardRun run_forward(const ProfileState& initial, double s_end, double ds, std::size_t snapshots,
                       Couplings c, const ExtractOptions& opt);

/// The backward decay window t in [20, 500] spans log10(25) ~ 1.40 decades.
constexpr double kBackwardFitDecades = 1.35;

struct BackwardRun {
  DuhamelResult result;
  std::vector<std::pair<double, double>> decay;  // (t, ||w||_inf + ||w||_2)
  RateFit decay_rate;
};

/// order 0: background V0; order N > 0: N Newton steps with the given truncation.
AsymSeries build_profile_series(const ScatteringData& data, int order, int truncation);

BackwardRun run_backward(const ScatteringData& data, const DuhamelConfig& cfg, int order, int truncation,
                         double fit_lo, double fit_hi, const IterationObserver& obs = {});

struct ClosedLoop {
  ExtractedData extracted;
  double a_error = 0.0;  // ||a - a'||_inf
  double b_error = 0.0;  // masked, wrapped ||b - b'||_inf
};

/// Starts the forward march at s = t_min from V0 + W of a backward run.
ClosedLoop closed_loop(const ScatteringData& data, const BackwardRun& back, double ds, std::size_t snapshots);

/// Relative mass drift max_t | ||v(t)||^2 / ||v(t0)||^2 - 1 | of a physical march.
double mass_drift(const PhysicalState& initial, double t_end, double dt, Couplings c);

/// Smooth sourced problem used by the identity and order checks.
SourcedRun sourced_reference_run(double dt);

/// ||v_dt - v_ref||_inf / ||v_{dt/2} - v_ref||_inf with v_ref marched at dt/8.
double strang_halving_ratio(double dt);

/// mismatch(dt) / mismatch(dt/2) for sourced_reference_run.
double energy_identity_halving_ratio(double dt);

// ---------------------------------------------------------------------------
// Subcommands. Each writes its files under cfg.out_dir and returns an exit code;
// numerical failures propagate as NumericalFailure / SeriesContractError.

struct RunOptions {
  unsigned jobs = 1;
};

int cmd_forward(const RunConfig& cfg, const RunOptions& opt, std::ostream& log);
int cmd_backward(const RunConfig& cfg, const RunOptions& opt, std::ostream& log);
int cmd_expand(const RunConfig& cfg, const RunOptions& opt, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const RunOptions& opt, std::ostream& log);

}  // namespace modscat
