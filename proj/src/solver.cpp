#include "modscat/solver.hpp"

#include "modscat/fft.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace modscat {

namespace {

constexpr double kBlowUp = 1e6;

// v <- v exp(-i (a1 |v|^2 + a2 |v|^4))
void rotate(ComplexField& v, double a1, double a2) {
  if (a1 == 0.0 && a2 == 0.0) return;
  for (auto& z : v.values) {
    const double m2 = std::norm(z);
    const double th = (a1 + a2 * m2) * m2;
    z *= cplx(std::cos(th), -std::sin(th));
  }
}

void guard(const ComplexField& v, double t) {
  double m = 0.0;
  for (const auto& z : v.values) {
    const double a = std::norm(z);
    if (!(a <= kBlowUp * kBlowUp)) {
      throw NumericalFailure("blow-up guard: |v| exceeded 1e6 or became non-finite at t = " +
                             std::to_string(t));
    }
    m = std::max(m, a);
  }
}

std::vector<std::size_t> record_indices(const std::vector<double>& times, double t0, double h, std::size_t n) {
  std::vector<std::size_t> idx;
  for (double tau : times) {
    const double u = std::round((tau - t0) / h);
    idx.push_back(static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(n))));
  }
  if (idx.empty()) idx.push_back(n);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

std::size_t step_count(double t0, double t1, double dt) {
  const double steps = (t1 - t0) / dt;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(steps - 1e-9)));
}

// Generic Strang march with merged (first-same-as-last) half rotations.
// weights(i) gives the (cubic, quintic) rotation weights of step i,
// disperse(i, fhat) applies the dispersive multiplier (including 1/n) of step i.
template <class Weights, class Disperse, class Record>
void strang_march(ComplexField& v, std::size_t nsteps, double h, Couplings c,
                  const std::vector<std::size_t>& records, Weights&& weights, Disperse&& disperse,
                  Record&& record) {
  const FftPlan& plan = FftPlan::get(v.size());
  auto next_record = records.begin();
  auto is_record = [&](std::size_t i) { return next_record != records.end() && *next_record == i; };
  if (is_record(0)) {
    record(0, v);
    ++next_record;
  }
  const double hh = 0.5 * h;
  auto [w1, w2] = weights(0);
  rotate(v, hh * c.beta * w1, hh * c.gamma * w2);
  for (std::size_t i = 0; i < nsteps; ++i) {
    plan.forward(v.data(), v.data());
    disperse(i, v);
    plan.inverse(v.data(), v.data());
    const bool last = i + 1 == nsteps;
    if (last || is_record(i + 1)) {
      rotate(v, hh * c.beta * w1, hh * c.gamma * w2);
      guard(v, static_cast<double>(i + 1));
      if (is_record(i + 1)) {
        record(i + 1, v);
        ++next_record;
      }
      if (!last) {
        std::tie(w1, w2) = weights(i + 1);
        rotate(v, hh * c.beta * w1, hh * c.gamma * w2);
      }
    } else {
      const auto [n1, n2] = weights(i + 1);
      rotate(v, hh * c.beta * (w1 + n1), hh * c.gamma * (w2 + n2));
      w1 = n1;
      w2 = n2;
      if ((i & 255) == 255) guard(v, static_cast<double>(i + 1));
    }
  }
}

void check_interval(double t0, double t1, double dt) {
  if (!(t1 > t0)) throw std::invalid_argument("march end must exceed the start time");
  if (!(dt > 0.0)) throw std::invalid_argument("step must be positive");
}

std::vector<PhysicalState> march_physical(const PhysicalState& initial, double t_end, double dt,
                                          const std::vector<double>& snaps, Couplings c) {
  check_interval(initial.t, t_end, dt);
  const std::size_t n = step_count(initial.t, t_end, dt);
  const double h = (t_end - initial.t) / static_cast<double>(n);
  const Grid1D& g = initial.v.grid;
  std::vector<cplx> mult(g.size());
  dispersion_multiplier(g, -h, mult);
  const double inv_n = 1.0 / static_cast<double>(g.size());
  for (auto& z : mult) z *= inv_n;

  std::vector<PhysicalState> out;
  ComplexField v = initial.v;
  strang_march(
      v, n, h, c, record_indices(snaps, initial.t, h, n), [](std::size_t) { return std::pair{1.0, 1.0}; },
      [&](std::size_t, ComplexField& f) {
        for (std::size_t k = 0; k < f.size(); ++k) f[k] *= mult[k];
      },
      [&](std::size_t i, const ComplexField& f) {
        out.push_back({initial.t + static_cast<double>(i) * h, f});
      });
  return out;
}

std::vector<ProfileState> march_profile(const ProfileState& initial, double s_end, double ds,
                                        const std::vector<double>& snaps, Couplings c) {
  check_interval(initial.s, s_end, ds);
  if (!(initial.s > 0.0)) throw std::invalid_argument("profile march needs s > 0");
  const std::size_t n = step_count(initial.s, s_end, ds);
  const double h = (s_end - initial.s) / static_cast<double>(n);
  const Grid1D& g = initial.V.grid;
  std::vector<cplx> mult(g.size());
  const double inv_n = 1.0 / static_cast<double>(g.size());
  auto s_at = [&](std::size_t i) { return initial.s + static_cast<double>(i) * h; };

  std::vector<ProfileState> out;
  ComplexField V = initial.V;
  strang_march(
      V, n, h, c, record_indices(snaps, initial.s, h, n),
      [&](std::size_t i) {
        const double m = s_at(i) + 0.5 * h;
        return std::pair{1.0 / m, 1.0 / (m * m)};
      },
      [&](std::size_t i, ComplexField& f) {
        dispersion_multiplier(g, 1.0 / s_at(i + 1) - 1.0 / s_at(i), mult);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] *= inv_n * mult[k];
      },
      [&](std::size_t i, const ComplexField& f) { out.push_back({s_at(i), f}); });
  return out;
}

}  // namespace

void StepControl::validate(double t0, double t_end) const {
  if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument("dt must lie in (0, 0.1]");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
    throw std::invalid_argument("snapshot times must be sorted");
  }
  for (double t : snapshot_times) {
    if (t < t0 - 1e-12 || t > t_end + 1e-12) {
      throw std::invalid_argument("snapshot time outside the marching interval");
    }
  }
}

std::vector<double> log_spaced(double t0, double t1, std::size_t count) {
  if (!(t0 > 0.0) || !(t1 > t0) || count < 2) throw std::invalid_argument("log_spaced: bad arguments");
  std::vector<double> out(count);
  const double r = std::log(t1 / t0);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = t0 * std::exp(r * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = t0;
  out.back() = t1;
  return out;
}

PhysicalState step_physical(const PhysicalState& state, double dt, Couplings c) {
  return march_physical(state, state.t + dt, dt, {}, c).back();
}

ProfileState step_profile(const ProfileState& state, double ds, Couplings c) {
  return march_profile(state, state.s + ds, ds, {}, c).back();
}

std::vector<PhysicalState> solve_forward(const PhysicalState& initial, double t_end, const StepControl& ctl,
                                         Couplings c) {
  ctl.validate(initial.t, t_end);
  return march_physical(initial, t_end, ctl.dt, ctl.snapshot_times, c);
}

std::vector<ProfileState> solve_forward(const ProfileState& initial, double s_end, const StepControl& ctl,
                                        Couplings c) {
  ctl.validate(initial.s, s_end);
  return march_profile(initial, s_end, ctl.dt, ctl.snapshot_times, c);
}

ComplexField nonlinear_difference(const ComplexField& v0, const ComplexField& w, double beta, double gamma) {
  v0.check_same_grid(w);
  ComplexField out(v0.grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx u = v0[i] + w[i];
    const double mu = std::norm(u);
    const double m0 = std::norm(v0[i]);
    out[i] = beta * (mu * u - m0 * v0[i]) + gamma * (mu * mu * u - m0 * m0 * v0[i]);
  }
  return out;
}

SourcedRun march_sourced_physical(const ComplexField& w0, double t0, double t1, double dt,
                                  const std::function<ComplexField(double)>& F) {
  check_interval(t0, t1, dt);
  const std::size_t n = step_count(t0, t1, dt);
  const double h = (t1 - t0) / static_cast<double>(n);
  const Grid1D& g = w0.grid;
  const FftPlan& plan = FftPlan::get(g.size());
  const double inv_n = 1.0 / static_cast<double>(g.size());
  std::vector<cplx> full(g.size()), half(g.size());
  dispersion_multiplier(g, -h, full);
  dispersion_multiplier(g, -0.5 * h, half);

  SourcedRun run;
  ComplexField w = w0;
  run.states.push_back({t0, w});
  run.sources.push_back(F(t0));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    ComplexField f = F(t + 0.5 * h);
    run.source_integral += h * l2_norm(f);
    plan.forward(w.data(), w.data());
    plan.forward(f.data(), f.data());
    for (std::size_t k = 0; k < g.size(); ++k) {
      w[k] = inv_n * (full[k] * w[k] - cplx(0.0, h) * half[k] * f[k]);
    }
    plan.inverse(w.data(), w.data());
    const double tn = t0 + static_cast<double>(i + 1) * h;
    run.states.push_back({tn, w});
    run.sources.push_back(F(tn));
  }
  return run;
}

IntegratingFactorReport integrating_factor_bound_check(const std::vector<ProfileState>& trajectory) {
  IntegratingFactorReport rep;
  rep.snapshots = trajectory.size();
  if (trajectory.empty()) return rep;
  const Grid1D& g = trajectory.front().V.grid;
  const std::size_t n = g.size();
  std::vector<double> integral(n, 0.0), prev_integrand(n, 0.0);
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = std::abs(trajectory.front().V[i]);
  rep.min_slack = 0.0;
  bool first_slack = true;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const auto& st = trajectory[k];
    const ComplexField Vyy = spectral_deriv(st.V, 2);
    const double w = 1.0 / (st.s * st.s);
    for (std::size_t i = 0; i < n; ++i) {
      const double cur = std::abs(Vyy[i]) * w;
      if (k > 0) integral[i] += 0.5 * (st.s - trajectory[k - 1].s) * (cur + prev_integrand[i]);
      prev_integrand[i] = cur;
      const double lhs = std::abs(st.V[i]);
      const double slack = base[i] + integral[i] - lhs;
      rep.max_lhs = std::max(rep.max_lhs, lhs);
      rep.max_violation = std::max(rep.max_violation, -slack);
      if (first_slack || slack < rep.min_slack) rep.min_slack = slack;
      first_slack = false;
    }
  }
  return rep;
}

}  // namespace modscat
