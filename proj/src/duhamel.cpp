#include "modscat/duhamel.hpp"

#include "modscat/fft.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace modscat {

namespace {

const cplx I(0.0, 1.0);

struct StepGrid {
  std::size_t steps;
  double h;
  std::vector<std::size_t> snap_idx;  // step indices counted back from T_max, descending s
};

StepGrid make_step_grid(const DuhamelConfig& cfg) {
  StepGrid sg;
  sg.steps = static_cast<std::size_t>(std::ceil((cfg.T_max - cfg.t_min) / cfg.dt - 1e-9));
  sg.h = (cfg.T_max - cfg.t_min) / static_cast<double>(sg.steps);
  for (double s : log_spaced(cfg.t_min, cfg.T_max, cfg.snapshots)) {
    sg.snap_idx.push_back(static_cast<std::size_t>(std::llround((cfg.T_max - s) / sg.h)));
  }
  std::sort(sg.snap_idx.begin(), sg.snap_idx.end());
  sg.snap_idx.erase(std::unique(sg.snap_idx.begin(), sg.snap_idx.end()), sg.snap_idx.end());
  return sg;
}

// Cubic Lagrange interpolation in s over snapshot fields.
class SnapshotInterpolator {
 public:
  explicit SnapshotInterpolator(const std::vector<double>& s) : s_(s) {}

  // Nodes and weights for the value at m.
  void locate(double m, std::array<std::size_t, 4>& nodes, std::array<double, 4>& w) const {
    const std::size_t M = s_.size();
    auto it = std::upper_bound(s_.begin(), s_.end(), m);
    std::size_t j = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
    j = std::min(j, M - 2);
    const std::size_t first = M < 4 ? 0 : std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, M - 4);
    const std::size_t count = std::min<std::size_t>(4, M);
    for (std::size_t a = 0; a < 4; ++a) {
      nodes[a] = first + std::min(a, count - 1);
      w[a] = 0.0;
    }
    for (std::size_t a = 0; a < count; ++a) {
      double l = 1.0;
      for (std::size_t b = 0; b < count; ++b) {
        if (a != b) l *= (m - s_[first + b]) / (s_[first + a] - s_[first + b]);
      }
      w[a] = l;
    }
  }

 private:
  const std::vector<double>& s_;
};

struct Background {
  std::vector<double> s;
  std::vector<ComplexField> V;
  std::vector<ComplexField> F;
};

double dx_norm_sum(const ComplexField& f, double s) { return l2_norm(f) + l2_norm(lens_dx(f, s)); }

DuhamelResult iterate(const AsymSeries& V_N, const DuhamelConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  const ScatteringData& data = V_N.base();
  const double beta = data.beta;
  const double gamma = data.gamma;
  const Grid1D& g = V_N.grid();
  const std::size_t n = g.size();
  const StepGrid sg = make_step_grid(cfg);
  const std::size_t M = sg.snap_idx.size();
  auto s_of = [&](std::size_t idx) { return cfg.T_max - static_cast<double>(idx) * sg.h; };

  // Snapshot slot q (ascending s) holds step index snap_idx[M-1-q].
  DuhamelTrajectory traj;
  traj.s.resize(M);
  for (std::size_t q = 0; q < M; ++q) traj.s[q] = s_of(sg.snap_idx[M - 1 - q]);
  traj.s.front() = cfg.t_min;
  traj.s.back() = cfg.T_max;
  for (double s : traj.s) {
    traj.V_bg.push_back(evaluate_series(V_N, s));
    traj.F_bg.push_back(psi_direct(V_N, s));
  }

  IterationLog log;
  {
    // K from the source: s int_s^T (||F|| + ||d_x F||) / (1 + |beta| ln(1+s))^2
    double integral = 0.0;
    double prev = dx_norm_sum(traj.F_bg[M - 1], traj.s[M - 1]);
    for (std::size_t q = M - 1; q-- > 0;) {
      const double cur = dx_norm_sum(traj.F_bg[q], traj.s[q]);
      integral += 0.5 * (traj.s[q + 1] - traj.s[q]) * (cur + prev);
      prev = cur;
      const double L = 1.0 + std::abs(beta) * std::log1p(traj.s[q]);
      log.K = std::max(log.K, traj.s[q] * integral / (L * L));
    }
  }

  const FftPlan& plan = FftPlan::get(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  const SnapshotInterpolator interp(traj.s);
  std::vector<ComplexField> W_prev;  // empty: zero iterate
  std::vector<cplx> H(n), E(n);
  double prev_weighted = 0.0;
  double first_diff = -1.0;

  // Source spectra at the snapshots; the march interpolates them in s.
  std::vector<std::vector<cplx>> S_hat(M, std::vector<cplx>(n));

  for (int k = 1; k <= cfg.max_iters; ++k) {
    for (std::size_t q = 0; q < M; ++q) {
      const double s = traj.s[q];
      const ComplexField& F = traj.F_bg[q];
      auto& out = S_hat[q];
      if (W_prev.empty()) {
        for (std::size_t i = 0; i < n; ++i) out[i] = -F[i];
      } else {
        const ComplexField& V = traj.V_bg[q];
        const ComplexField& W = W_prev[q];
        const double c3 = beta / s, c5 = gamma / (s * s);
        for (std::size_t i = 0; i < n; ++i) {
          const cplx u = V[i] + W[i];
          const double mu = std::norm(u), m0 = std::norm(V[i]);
          out[i] = c3 * (mu * u - m0 * V[i]) + c5 * (mu * mu * u - m0 * m0 * V[i]) - F[i];
        }
      }
      plan.forward(out.data(), out.data());
    }

    std::vector<ComplexField> W_new(M, ComplexField(g));
    std::vector<double> energy(M, 0.0);
    std::fill(H.begin(), H.end(), cplx(0.0));
    double acc = 0.0;
    // Slot M-1 is s = T_max where W = 0; the march fills slots M-2 down to 0.
    std::size_t next_snap = M - 2;
    std::array<std::size_t, 4> nodes{};
    std::array<double, 4> w{};
    const double hstep = sg.h;
    for (std::size_t idx = 0; idx < sg.steps; ++idx) {
      const double m = s_of(idx) - 0.5 * hstep;
      interp.locate(m, nodes, w);
      dispersion_multiplier(g, 1.0 / m, E);
      const cplx* S0 = S_hat[nodes[0]].data();
      const cplx* S1 = S_hat[nodes[1]].data();
      const cplx* S2 = S_hat[nodes[2]].data();
      const cplx* S3 = S_hat[nodes[3]].data();
      double s2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const cplx Si = w[0] * S0[i] + w[1] * S1[i] + w[2] * S2[i] + w[3] * S3[i];
        s2 += std::norm(Si);
        H[i] += I * hstep * std::conj(E[i]) * Si;
      }
      acc += hstep * std::sqrt(s2 * g.dx() * inv_n);

      const std::size_t step_done = idx + 1;
      if (next_snap < M && sg.snap_idx[M - 1 - next_snap] == step_done) {
        const double s = traj.s[next_snap];
        dispersion_multiplier(g, 1.0 / s, E);
        ComplexField& Wq = W_new[next_snap];
        for (std::size_t i = 0; i < n; ++i) Wq[i] = inv_n * E[i] * H[i];
        plan.inverse(Wq.data(), Wq.data());
        energy[next_snap] = acc;
        if (!Wq.all_finite() || linf_norm(Wq) > 1e6) {
          throw NumericalFailure("duhamel iteration blew up at s = " + std::to_string(s));
        }
        next_snap = next_snap == 0 ? M : next_snap - 1;
      }
    }

    IterationRecord rec;
    rec.k = k;
    // Differences to the previous iterate.
    for (std::size_t q = 0; q < M; ++q) {
      const double d = W_prev.empty() ? l2_norm(W_new[q]) : l2_norm(W_new[q] - W_prev[q]);
      const double L = 1.0 + std::log1p(traj.s[q]);
      rec.diff_sup = std::max(rec.diff_sup, d);
      rec.weighted_diff_sup = std::max(rec.weighted_diff_sup, traj.s[q] * d / (L * L));
    }
    rec.contraction_ratio = prev_weighted > 0.0 ? rec.weighted_diff_sup / prev_weighted : 0.0;
    prev_weighted = rec.weighted_diff_sup;

    // Energy, derivative energy and the inductive bound on the new iterate.
    double dintegral = 0.0;
    double dprev = 0.0;
    for (std::size_t q = M; q-- > 0;) {
      const double s = traj.s[q];
      ComplexField Sq = traj.F_bg[q];
      Sq *= -1.0;
      if (!W_prev.empty()) Sq += nonlinear_difference(traj.V_bg[q], W_prev[q], beta / s, gamma / (s * s));
      const double dcur = dx_norm_sum(Sq, s);
      if (q + 1 < M) dintegral += 0.5 * (traj.s[q + 1] - s) * (dcur + dprev);
      dprev = dcur;

      const double wn = l2_norm(W_new[q]);
      const double lhs = wn + l2_norm(lens_dx(W_new[q], s));
      if (energy[q] > 0.0) rec.energy_ratio_max = std::max(rec.energy_ratio_max, wn / energy[q]);
      if (wn > energy[q] * (1.0 + 1e-9) + 1e-300) rec.energy_ok = false;
      if (dintegral > 0.0) {
        rec.derivative_energy_ratio_max = std::max(rec.derivative_energy_ratio_max, lhs / dintegral);
      }
      if (lhs > dintegral * (1.0 + 1e-3) + 1e-14) rec.derivative_energy_ok = false;
      const double L = 1.0 + std::abs(beta) * std::log1p(s);
      const double rhs = 2.0 * log.K * L * L / s;
      if (rhs > 0.0) rec.bound_ratio_max = std::max(rec.bound_ratio_max, lhs / rhs);
      if (lhs > rhs * (1.0 + 1e-9) + 1e-300) rec.bound_ok = false;
    }
    log.records.push_back(rec);
    if (observer) observer(rec);

    W_prev = std::move(W_new);
    traj.energy_bound = std::move(energy);
    if (first_diff < 0.0) first_diff = rec.diff_sup;
    if (!std::isfinite(rec.diff_sup)) throw NumericalFailure("duhamel iteration produced non-finite values");
    if (rec.diff_sup < cfg.tol) {
      log.converged = true;
      break;
    }
    if (first_diff > 0.0 && rec.diff_sup > 1e3 * first_diff) {
      throw ConvergenceFailure("duhamel iteration diverges (contraction ratio " +
                                   std::to_string(rec.contraction_ratio) + ")",
                               log);
    }
  }
  if (!log.converged) {
    const double r = log.records.empty() ? 0.0 : log.records.back().contraction_ratio;
    throw ConvergenceFailure("duhamel iteration did not converge in " + std::to_string(cfg.max_iters) +
                                 " iterations (last contraction ratio " + std::to_string(r) + ")",
                             log);
  }
  traj.W = std::move(W_prev);
  return {std::move(traj), std::move(log)};
}

}  // namespace

void DuhamelConfig::validate() const {
  if (!(t_min >= 1.0)) throw std::invalid_argument("t_min must be >= 1");
  if (!(T_max > t_min)) throw std::invalid_argument("T_max must exceed t_min");
  if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument("dt must lie in (0, 0.1]");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (snapshots < 8) throw std::invalid_argument("need at least 8 snapshots");
  if ((T_max - t_min) / dt < static_cast<double>(snapshots)) {
    throw std::invalid_argument("dt too coarse for the requested snapshot count");
  }
}

ComplexField lens_dx(const ComplexField& W, double s) {
  ComplexField out = spectral_deriv(W, 1);
  const Grid1D& g = W.grid;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] / s + 0.5 * I * g.point(i) * W[i];
  return out;
}

DuhamelResult duhamel_iterate(const ScatteringData& data, const DuhamelConfig& cfg,
                              const IterationObserver& observer) {
  return iterate(AsymSeries::leading(data, 2), cfg, observer);
}

DuhamelResult duhamel_iterate_high_order(const AsymSeries& V_N, const DuhamelConfig& cfg,
                                         const IterationObserver& observer) {
  if (!V_N.has_base()) throw std::invalid_argument("high-order profile lacks the base term");
  return iterate(V_N, cfg, observer);
}

double duhamel_residual_l2(const DuhamelTrajectory& traj, double s_target, double beta, double gamma) {
  const std::size_t M = traj.s.size();
  if (M < 3 || traj.W.size() != M) throw std::invalid_argument("trajectory too short for a residual");
  std::size_t q = 1;
  for (std::size_t i = 1; i + 1 < M; ++i) {
    if (std::abs(traj.s[i] - s_target) < std::abs(traj.s[q] - s_target)) q = i;
  }
  const double s0 = traj.s[q - 1], s1 = traj.s[q], s2 = traj.s[q + 1];
  const double h0 = s1 - s0, h1 = s2 - s1;
  // Three-point derivative at the middle node of a nonuniform stencil.
  const double c0 = -h1 / (h0 * (h0 + h1));
  const double c1 = (h1 - h0) / (h0 * h1);
  const double c2 = h0 / (h1 * (h0 + h1));
  const ComplexField V0 = traj.V_bg[q - 1] + traj.W[q - 1];
  const ComplexField V1 = traj.V_bg[q] + traj.W[q];
  const ComplexField V2 = traj.V_bg[q + 1] + traj.W[q + 1];
  ComplexField Vs(V1.grid);
  for (std::size_t i = 0; i < Vs.size(); ++i) Vs[i] = c0 * V0[i] + c1 * V1[i] + c2 * V2[i];
  return l2_norm(psi_numeric(V1, Vs, s1, beta, gamma));
}

}  // namespace modscat
