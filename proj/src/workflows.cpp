#include "modscat/workflows.hpp"

#include "modscat/calibration.hpp"
#include "modscat/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

namespace modscat {

namespace {

const cplx I(0.0, 1.0);

// Evenly spread subset of indices 0..total-1 (first and last included).
std::vector<std::size_t> pick_indices(std::size_t total, std::size_t wanted) {
  std::vector<std::size_t> idx;
  if (total == 0 || wanted == 0) return idx;
  if (wanted >= total) {
    for (std::size_t i = 0; i < total; ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t k = 0; k < wanted; ++k) {
    const double u = wanted == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(wanted - 1);
    idx.push_back(static_cast<std::size_t>(std::llround(u * static_cast<double>(total - 1))));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

ScatteringData data_from_config(const RunConfig& cfg) {
  const Grid1D g = make_grid(cfg.half_length, cfg.n);
  ScatteringData d =
      make_scattering_data(parse_preset(cfg.a).sample(g), parse_preset(cfg.b).sample(g), cfg.beta, cfg.gamma);
  d.validate();
  return d;
}

DuhamelConfig duhamel_from_config(const RunConfig& cfg) {
  DuhamelConfig d;
  d.t_min = cfg.t_min;
  d.T_max = cfg.T_max;
  d.dt = cfg.backward_dt;
  d.max_iters = cfg.max_iters;
  d.tol = cfg.tol;
  d.snapshots = cfg.backward_snapshots;
  return d;
}

std::string config_text(const RunConfig& cfg) {
  std::ostringstream os;
  write_config(os, cfg);
  return os.str();
}

void print_fit(std::ostream& log, const std::string& name, const RateFit& f) {
  if (f.degenerate) {
    log << "  " << name << ": degenerate\n";
  } else {
    log << "  " << name << ": exponent " << f.exponent << ", log power " << f.log_power << '\n';
  }
}

}  // namespace

ComplexField initial_profile(const Grid1D& grid, const ProfilePreset& f, double eps, double t0) {
  ComplexField V(grid);
  const double root = std::sqrt(t0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = grid.point(i);
    V[i] = std::polar(root * eps * f(t0 * y), -0.25 * t0 * y * y);
  }
  return V;
}

ForwardRun run_forward(const ProfileState& initial, double s_end, double ds, std::size_t snapshots, Couplings c,
                       const ExtractOptions& opt) {
  StepControl ctl;
  ctl.dt = ds;
  ctl.snapshot_times = log_spaced(initial.s, s_end, snapshots);
  auto traj = solve_forward(initial, s_end, ctl, c);
  auto x = extract(traj, make_phase_accumulator(traj.front(), c), opt);
  ForwardRun out{std::move(traj), std::move(x), {}, {}};
  if (out.extracted.degenerate) {
    out.residual_rate.degenerate = true;
    return out;
  }
  for (const auto& st : out.trajectory) {
    const ComplexField v0 = asymptotic_profile(out.extracted, st.s, c.beta);
    out.residual.emplace_back(st.s, linf_norm(st.V - v0) / std::sqrt(st.s));
  }
  const double lo = opt.fit_lo > 0.0 ? opt.fit_lo : initial.s;
  const double hi = opt.fit_hi > 0.0 ? opt.fit_hi : s_end;
  out.residual_rate = fit_rate_window(out.residual, lo, hi, opt.log_correction_max);
  return out;
}

AsymSeries build_profile_series(const ScatteringData& data, int order, int truncation) {
  AsymSeries V = AsymSeries::leading(data, std::max(truncation, 2));
  for (int k = 0; k < order; ++k) V = newton_step(V, truncation);
  return V;
}

BackwardRun run_backward(const ScatteringData& data, const DuhamelConfig& cfg, int order, int truncation,
                         double fit_lo, double fit_hi, const IterationObserver& obs) {
  BackwardRun out;
  out.result = order == 0 ? duhamel_iterate(data, cfg, obs)
                          : duhamel_iterate_high_order(build_profile_series(data, order, truncation), cfg, obs);
  const auto& tr = out.result.trajectory;
  for (std::size_t q = 0; q + 1 < tr.s.size(); ++q) {
    out.decay.emplace_back(tr.s[q], linf_norm(tr.W[q]) / std::sqrt(tr.s[q]) + l2_norm(tr.W[q]));
  }
  out.decay_rate = fit_rate_window(out.decay, fit_lo, fit_hi, 2, kBackwardFitDecades);
  return out;
}

ClosedLoop closed_loop(const ScatteringData& data, const BackwardRun& back, double ds, std::size_t snapshots) {
  const auto& tr = back.result.trajectory;
  const ProfileState start{tr.s.front(), tr.V_bg.front() + tr.W.front()};
  const Couplings c{data.beta, data.gamma};
  const auto traj = solve_forward(start, tr.s.back(), StepControl{ds, StepControl::Scheme::Strang,
                                                                   log_spaced(start.s, tr.s.back(), snapshots)},
                                  c);
  ClosedLoop out{extract(traj, make_phase_accumulator(traj.front(), c))};
  for (std::size_t i = 0; i < data.a.size(); ++i) {
    out.a_error = std::max(out.a_error, std::abs(data.a[i] - out.extracted.a[i]));
    if (out.extracted.mask[i]) {
      out.b_error = std::max(out.b_error, std::abs(wrap_phase(data.b[i] - out.extracted.b[i])));
    }
  }
  return out;
}

double mass_drift(const PhysicalState& initial, double t_end, double dt, Couplings c) {
  StepControl ctl;
  ctl.dt = dt;
  for (int k = 0; k <= 50; ++k) ctl.snapshot_times.push_back(initial.t + (t_end - initial.t) * k / 50.0);
  ctl.snapshot_times.back() = t_end;
  const double m0 = std::pow(l2_norm(initial.v), 2);
  double worst = 0.0;
  for (const auto& st : solve_forward(initial, t_end, ctl, c)) {
    worst = std::max(worst, std::abs(std::pow(l2_norm(st.v), 2) / m0 - 1.0));
  }
  return worst;
}

SourcedRun sourced_reference_run(double dt) {
  const Grid1D g = make_grid(20.0, 256);
  ComplexField w0(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i);
    w0[i] = std::exp(-x * x) * cplx(1.0, 0.5 * x);
  }
  auto F = [g](double t) {
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.point(i);
      f[i] = std::exp(-(x - 1.0) * (x - 1.0)) * cplx(std::cos(t), std::sin(2.0 * t) * x);
    }
    return f;
  };
  return march_sourced_physical(w0, 0.0, 1.0, dt, F);
}

double strang_halving_ratio(double dt) {
  const Grid1D g = make_grid(30.0, 512);
  const PhysicalState init{1.0, to_complex(parse_preset("gaussian(1, 1, 0)").sample(g))};
  const Couplings c{1.0, 1.0};
  auto run = [&](double h) { return solve_forward(init, 2.0, StepControl{h, StepControl::Scheme::Strang, {}}, c).back().v; };
  const ComplexField ref = run(dt / 8.0);
  const double e1 = linf_norm(run(dt) - ref);
  const double e2 = linf_norm(run(dt / 2.0) - ref);
  return e1 / e2;
}

double energy_identity_halving_ratio(double dt) {
  return energy_identity_mismatch(sourced_reference_run(dt)) / energy_identity_mismatch(sourced_reference_run(dt / 2.0));
}

// ---------------------------------------------------------------------------

int cmd_forward(const RunConfig& cfg, const RunOptions&, std::ostream& log) {
  cfg.validate();
  const Grid1D g = make_grid(cfg.half_length, cfg.n);
  const ProfileState init{cfg.t_start, initial_profile(g, parse_preset(cfg.f), cfg.epsilon, cfg.t_start)};
  ExtractOptions opt;
  opt.fit_lo = cfg.fit_lo;
  opt.fit_hi = cfg.fit_hi;
  log << "forward: s in [" << cfg.t_start << ", " << cfg.t_end << "], ds = " << cfg.dt << '\n';
  const ForwardRun run = run_forward(init, cfg.t_end, cfg.dt, cfg.snapshots, {cfg.beta, cfg.gamma}, opt);
  const BootstrapReport boot = bootstrap_monitor(run.trajectory, cfg.epsilon);

  std::ostringstream traj;
  std::vector<ProfileState> subset;
  for (std::size_t i : pick_indices(run.trajectory.size(), cfg.write_snapshots)) subset.push_back(run.trajectory[i]);
  write_profile_trajectory(traj, subset);
  std::ostringstream ext, res, sum;
  write_extracted(ext, run.extracted);
  write_samples(res, "t", "residual_linf", run.residual);

  KvWriter kv(sum);
  kv.section("forward");
  kv.put("epsilon", cfg.epsilon);
  kv.put("beta", cfg.beta);
  kv.put("gamma", cfg.gamma);
  kv.put("snapshots", run.trajectory.size());
  kv.put("degenerate", run.extracted.degenerate);
  kv.put("fit_lo", cfg.fit_lo);
  kv.put("fit_hi", cfg.fit_hi);
  kv.section("rates");
  kv.put("rate_modulus", run.extracted.rate_modulus);
  kv.put("rate_phase", run.extracted.rate_phase);
  kv.put("residual", run.residual_rate);
  kv.section("bootstrap");
  for (int k = 0; k < 4; ++k) kv.put("l2_d" + std::to_string(k), boot.l2_growth[k]);
  kv.put("sup", boot.sup_growth);
  kv.put("dyy_sup", boot.dyy_sup_growth);
  kv.put("ok", boot.ok());

  write_text_file(cfg.out_dir, "trajectory.txt", traj.str());
  write_text_file(cfg.out_dir, "extracted.txt", ext.str());
  write_text_file(cfg.out_dir, "residual.txt", res.str());
  write_text_file(cfg.out_dir, "summary.txt", sum.str());
  write_text_file(cfg.out_dir, "config.resolved.cfg", config_text(cfg));
  print_fit(log, "rate_modulus", run.extracted.rate_modulus);
  print_fit(log, "rate_phase", run.extracted.rate_phase);
  print_fit(log, "residual", run.residual_rate);
  return kExitOk;
}

int cmd_backward(const RunConfig& cfg, const RunOptions&, std::ostream& log) {
  cfg.validate();
  const ScatteringData data = data_from_config(cfg);
  const DuhamelConfig dcfg = duhamel_from_config(cfg);
  dcfg.validate();
  write_text_file(cfg.out_dir, "config.resolved.cfg", config_text(cfg));
  log << "backward: s in [" << cfg.t_min << ", " << cfg.T_max << "], order " << cfg.order << '\n';
  auto observer = [&](const IterationRecord& r) {
    log << "  iteration " << r.k << ": diff " << r.diff_sup << ", ratio " << r.contraction_ratio << '\n';
  };
  BackwardRun run;
  try {
    run = run_backward(data, dcfg, cfg.order, cfg.effective_truncation(cfg.order), cfg.backward_fit_lo,
                       cfg.backward_fit_hi, observer);
  } catch (const ConvergenceFailure& e) {
    std::ostringstream il, sum;
    write_iteration_log(il, e.log());
    KvWriter kv(sum);
    kv.section("backward");
    kv.put("converged", false);
    kv.put("iterations", e.log().records.size());
    kv.put("last_contraction_ratio", e.last_ratio());
    kv.put("K", e.log().K);
    write_text_file(cfg.out_dir, "iterations.txt", il.str());
    write_text_file(cfg.out_dir, "summary.txt", sum.str());
    throw;
  }
  const auto& tr = run.result.trajectory;
  std::ostringstream traj, il, dec, sum;
  std::vector<double> s;
  std::vector<ComplexField> W;
  for (std::size_t i : pick_indices(tr.s.size(), cfg.write_snapshots)) {
    s.push_back(tr.s[i]);
    W.push_back(tr.W[i]);
  }
  write_profile_trajectory(traj, s, W);
  write_iteration_log(il, run.result.log);
  write_samples(dec, "t", "linf_plus_l2", run.decay);
  KvWriter kv(sum);
  kv.section("backward");
  kv.put("converged", run.result.log.converged);
  kv.put("iterations", run.result.log.records.size());
  kv.put("K", run.result.log.K);
  kv.put("order", cfg.order);
  const auto& last = run.result.log.records.back();
  kv.put("bound_ok", last.bound_ok);
  kv.put("energy_ok", last.energy_ok);
  kv.put("derivative_energy_ok", last.derivative_energy_ok);
  kv.section("rates");
  kv.put("fit_lo", cfg.backward_fit_lo);
  kv.put("fit_hi", cfg.backward_fit_hi);
  kv.put("decay", run.decay_rate);
  write_text_file(cfg.out_dir, "w_trajectory.txt", traj.str());
  write_text_file(cfg.out_dir, "iterations.txt", il.str());
  write_text_file(cfg.out_dir, "decay.txt", dec.str());
  write_text_file(cfg.out_dir, "summary.txt", sum.str());
  print_fit(log, "decay", run.decay_rate);
  return kExitOk;
}

int cmd_expand(const RunConfig& cfg, const RunOptions&, std::ostream& log) {
  cfg.validate();
  const ScatteringData data = data_from_config(cfg);
  const int N = cfg.expand_order;
  const int trunc = cfg.effective_truncation(N);
  const auto grid_s = log_spaced(cfg.expand_s_lo, cfg.expand_s_hi, cfg.expand_samples);
  std::ostringstream table, sum;
  table << "n exponent log_power residual_rms degenerate\n";
  KvWriter kv(sum);
  kv.section("expand");
  kv.put("order", N);
  kv.put("truncation", trunc);
  AsymSeries V = AsymSeries::leading(data, std::max(trunc, 2));
  for (int n = 0; n <= N; ++n) {
    if (n > 0) V = newton_step(V, trunc);
    std::ostringstream ser;
    write_series(ser, V);
    write_text_file(cfg.out_dir, "series_" + std::to_string(n) + ".txt", ser.str());
    std::vector<std::pair<double, double>> samples;
    for (double s : grid_s) samples.emplace_back(s, linf_norm(psi_direct(V, s)));
    const RateFit fit = fit_rate_window(samples, cfg.expand_s_lo, cfg.expand_s_hi, 4);
    table << n << ' ' << format_double(fit.degenerate ? 0.0 : fit.exponent) << ' ' << fit.log_power << ' '
          << format_double(fit.residual_rms) << ' ' << (fit.degenerate ? 1 : 0) << '\n';
    kv.put("residual_" + std::to_string(n), fit);
    print_fit(log, "residual of V_" + std::to_string(n), fit);
  }
  write_text_file(cfg.out_dir, "residual_rates.txt", table.str());
  write_text_file(cfg.out_dir, "summary.txt", sum.str());
  write_text_file(cfg.out_dir, "config.resolved.cfg", config_text(cfg));
  return kExitOk;
}

namespace {

// Per-field ratios lhs / rhs of the suite checks, in a fixed order.
constexpr int kSuiteChecks = 8;
const char* const kSuiteNames[kSuiteChecks] = {"supnorm",   "interpolation_1_2", "interpolation_1_3",
                                               "interpolation_2_3", "source_0", "source_1",
                                               "source_2",  "source_3"};

std::array<InequalityReport, kSuiteChecks> suite_reports(const FieldSample& f) {
  std::array<InequalityReport, kSuiteChecks> r;
  r[0] = check_supnorm_bound(f.field);
  r[1] = check_interpolation(f.field, 1, 2);
  r[2] = check_interpolation(f.field, 1, 3);
  r[3] = check_interpolation(f.field, 2, 3);
  const auto src = check_source_bounds(f.field, f.s, 1.0, 1.0);
  for (int k = 0; k < 4; ++k) r[4 + k] = src[k];
  return r;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  cfg.validate();
  std::ostringstream rep, sum;
  KvWriter kv(rep);
  std::vector<std::pair<std::string, bool>> verdicts;

  // Inequality suites over seeded random fields; threads fill disjoint slots.
  {
    log << "verify: inequality suite (" << cfg.suite_size << " fields, seed " << cfg.seed << ")\n";
    const auto suite = random_field_suite(suite_grid(), cfg.seed, cfg.suite_size, true);
    std::vector<std::array<InequalityReport, kSuiteChecks>> results(suite.size());
    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, 64));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < suite.size(); i += jobs) results[i] = suite_reports(suite[i]);
      });
    }
    for (auto& th : pool) th.join();
    for (int c = 0; c < kSuiteChecks; ++c) {
      std::size_t violations = 0;
      double worst = 0.0;
      for (const auto& r : results) {
        if (!r[c].satisfied) ++violations;
        if (r[c].rhs > 0.0) worst = std::max(worst, r[c].lhs / r[c].rhs);
      }
      kv.section(std::string("suite.") + kSuiteNames[c]);
      kv.put("seed", static_cast<long long>(cfg.seed));
      kv.put("fields", suite.size());
      kv.put("violations", violations);
      kv.put("worst_ratio", worst);
      verdicts.emplace_back(std::string("suite.") + kSuiteNames[c], violations == 0);
    }
  }

  // Energy identity and second-order checks.
  {
    log << "verify: energy identity and step-halving checks\n";
    const auto idr = check_energy_identity(sourced_reference_run(1e-3), 1e-5);
    kv.section("energy_identity");
    kv.put("dt", 1e-3);
    kv.put(idr);
    verdicts.emplace_back("energy_identity", idr.satisfied);

    const double r1 = energy_identity_halving_ratio(cfg.verify_dt);
    kv.section("energy_identity_order");
    kv.put("dt", cfg.verify_dt);
    kv.put("ratio", r1);
    verdicts.emplace_back("energy_identity_order", r1 >= 3.0 && r1 <= 5.0);

    const double r2 = strang_halving_ratio(cfg.verify_dt);
    kv.section("strang_order");
    kv.put("dt", cfg.verify_dt);
    kv.put("ratio", r2);
    verdicts.emplace_back("strang_order", r2 >= 3.0 && r2 <= 5.0);
  }

  // Mass conservation and the forward small-data diagnostics.
  const Grid1D g = make_grid(cfg.half_length, cfg.n);
  const ProfilePreset f = parse_preset(cfg.f);
  {
    log << "verify: mass conservation\n";
    const Grid1D px = make_grid(128.0, 2048);
    ComplexField v(px);
    for (std::size_t i = 0; i < px.size(); ++i) v[i] = cfg.epsilon * f(px.point(i));
    kv.section("mass_conservation");
    if (cfg.epsilon > 0.0) {
      const double drift = mass_drift({1.0, v}, 100.0, 0.01, {cfg.beta, cfg.gamma});
      kv.put(InequalityReport::make("relative_drift", drift, 1e-6));
      verdicts.emplace_back("mass_conservation", drift <= 1e-6);
    } else {
      kv.put("skipped", "zero data");
    }
  }
  {
    log << "verify: forward run diagnostics\n";
    const ProfileState init{cfg.t_start, initial_profile(g, f, cfg.epsilon, cfg.t_start)};
    StepControl ctl{cfg.dt, StepControl::Scheme::Strang, log_spaced(cfg.t_start, cfg.t_end, cfg.snapshots)};
    const auto traj = solve_forward(init, cfg.t_end, ctl, {cfg.beta, cfg.gamma});
    const auto ifr = integrating_factor_bound_check(traj);
    kv.section("integrating_factor");
    kv.put(InequalityReport::make("violation", ifr.max_violation, 1e-6 * ifr.max_lhs));
    verdicts.emplace_back("integrating_factor", ifr.max_violation <= 1e-6 * ifr.max_lhs);
    const auto boot = bootstrap_monitor(traj, cfg.epsilon);
    kv.section("bootstrap");
    for (int k = 0; k < 4; ++k) kv.put("l2_d" + std::to_string(k), boot.l2_growth[k]);
    kv.put("sup", boot.sup_growth);
    kv.put("dyy_sup", boot.dyy_sup_growth);
    kv.put("l2_ok", boot.l2_ok);
    kv.put("dyy_ok", boot.dyy_ok);
    kv.put("sup_bounded", boot.sup_bounded);
    verdicts.emplace_back("bootstrap", boot.ok());
  }

  if (cfg.closed_loop) {
    log << "verify: closed loop (backward then forward)\n";
    const ScatteringData data = data_from_config(cfg);
    const BackwardRun back =
        run_backward(data, duhamel_from_config(cfg), 0, 2, cfg.backward_fit_lo, cfg.backward_fit_hi);
    const ClosedLoop cl = closed_loop(data, back, cfg.closed_loop_dt, cfg.backward_snapshots);
    kv.section("closed_loop");
    kv.put(InequalityReport::make("a_error", cl.a_error, 5e-3));
    kv.put(InequalityReport::make("b_error", cl.b_error, 2e-2));
    verdicts.emplace_back("closed_loop", cl.a_error <= 5e-3 && cl.b_error <= 2e-2);
  }

  bool all = true;
  KvWriter s(sum);
  s.section("verdicts");
  for (const auto& [name, ok] : verdicts) {
    s.put(name, std::string(ok ? "PASS" : "FAIL"));
    log << "  " << (ok ? "PASS " : "FAIL ") << name << '\n';
    all = all && ok;
  }
  s.section("overall");
  s.put("pass", all);
  s.put("seed", static_cast<long long>(cfg.seed));
  write_text_file(cfg.out_dir, "reports.txt", rep.str());
  write_text_file(cfg.out_dir, "summary.txt", sum.str());
  write_text_file(cfg.out_dir, "config.resolved.cfg", config_text(cfg));
  return all ? kExitOk : kExitVerification;
}

}  // namespace modscat
