// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "modscat/analysis.hpp"
#include "modscat/workflows.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace modscat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(4);
  o << v;
  return o.str();
}

// Shared by criteria 1 and 9.
ScatteringData backward_data() {
  const Grid1D g = make_grid(40.0, 4096);
  return make_scattering_data(parse_preset("gaussian(0.3, 2, 0)").sample(g), RealField(g), 0.2, 0.1);
}

const BackwardRun& backward_run() {
  static const BackwardRun run = [] {
    DuhamelConfig cfg;
    cfg.t_min = 10.0;
    cfg.T_max = 1000.0;
    cfg.dt = 2e-3;
    cfg.snapshots = 400;
    return run_backward(backward_data(), cfg, 0, 3, 20.0, 500.0);
  }();
  return run;
}

// Shared by criteria 2 and 3.
const ForwardRun& forward_run() {
  static const ForwardRun run = [] {
    const Grid1D g = make_grid(40.0, 1024);
    const ProfileState init{1.0, initial_profile(g, parse_preset("gaussian(1, 1, 0)"), 0.05, 1.0)};
    ExtractOptions opt;
    opt.fit_lo = 5.0;
    opt.fit_hi = 250.0;
    return run_forward(init, 500.0, 0.01, 400, {1.0, 1.0}, opt);
  }();
  return run;
}

ScatteringData series_data(const Grid1D& g) {
  return make_scattering_data(parse_preset("gaussian(0.5, 2, 0)").sample(g),
                              parse_preset("gaussian(0.5, 3, 1)").sample(g), 1.0, 0.5);
}

Outcome c1() {
  const BackwardRun& r = backward_run();
  const RateFit& f = r.decay_rate;
  const bool ok = r.result.log.converged && !f.degenerate && f.exponent <= -0.85 && f.log_power <= 2;
  return {ok, "iterations = " + std::to_string(r.result.log.records.size()) + ", m = " + fmt(f.exponent) +
                  ", q = " + std::to_string(f.log_power) + " (need m <= -0.85, q <= 2)"};
}

Outcome c2() {
  const RateFit& f = forward_run().residual_rate;
  return {!f.degenerate && f.exponent <= -1.2, "m = " + fmt(f.exponent) + " (need <= -1.2)"};
}

Outcome c3() {
  const auto& x = forward_run().extracted;
  auto in_band = [](const RateFit& f) { return !f.degenerate && f.exponent >= -1.3 && f.exponent <= -0.7; };
  return {in_band(x.rate_modulus) && in_band(x.rate_phase),
          "modulus m = " + fmt(x.rate_modulus.exponent) + ", profile m = " + fmt(x.rate_phase.exponent) +
              " (need both in [-1.3, -0.7])"};
}

Outcome c4() {
  const Grid1D g = make_grid(40.0, 1024);
  const int trunc = 2 + 3;
  AsymSeries V = AsymSeries::leading(series_data(g), trunc);
  bool ok = true;
  std::string detail;
  for (int n = 0; n <= 2; ++n) {
    if (n > 0) V = newton_step(V, trunc);
    std::vector<std::pair<double, double>> samples;
    for (double s : log_spaced(10.0, 1000.0, 40)) samples.emplace_back(s, linf_norm(psi_direct(V, s)));
    const RateFit f = fit_rate(samples, 4);
    ok = ok && f.exponent <= -(n + 2) + 0.3;
    detail += "n=" + std::to_string(n) + ": m = " + fmt(f.exponent) + " (need <= " + fmt(-(n + 2) + 0.3) + ")  ";
  }
  return {ok, detail};
}

Outcome c5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid1D g = make_grid(40.0, 512);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double beta = 3.0 * u(rng);
    const std::string a = "gaussian(" + std::to_string(1.0 + u(rng)) + ", " + std::to_string(2.0 + u(rng)) + ", 0)";
    const ScatteringData d = make_scattering_data(parse_preset(a).sample(g), RealField(g), beta, u(rng));
    ComplexField Y(g);
    for (std::size_t i = 0; i < g.size(); ++i) Y[i] = std::polar(0.1 + std::abs(u(rng)), 3.2 * u(rng));
    const int k = 1 + static_cast<int>(rng() % 6);
    const ComplexField back = L0_leading(invert_L0_leading(Y, k, d), k, d);
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(back[i] - Y[i]) / std::abs(Y[i]));
  }
  return {worst <= 1e-12, "max relative error " + fmt(worst) + " over 100 triples (need <= 1e-12)"};
}

Outcome c6() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid1D g = make_grid(40.0, 512);
  const ScatteringData d = series_data(g);
  const double s = 7.0, h = 1e-4;
  const AsymSeries base = AsymSeries::leading(d, 8);
  const ComplexField V0 = evaluate_series(base, s), V0s = series_ds(base, s);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const TermKey key{1 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)};
    ComplexField Z(g);
    const double c = 6.0 * (u(rng) - 0.5), w = 1.0 + 2.0 * u(rng), kap = 2.0 * (u(rng) - 0.5);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = (g.point(i) - c) / w;
      Z[i] = std::polar(std::exp(-0.5 * y * y), kap * g.point(i));
    }
    AsymSeries T(d, false, 8);
    T.add_term(key, Z);
    const ComplexField Ts = evaluate_series(T, s), Tss = series_ds(T, s);
    const ComplexField Pp = psi_numeric(V0 + h * Ts, V0s + h * Tss, s, d.beta, d.gamma);
    const ComplexField Pm = psi_numeric(V0 - h * Ts, V0s - h * Tss, s, d.beta, d.gamma);
    const ComplexField fd = (1.0 / (2.0 * h)) * (Pp - Pm) - (1.0 / (s * s)) * spectral_deriv(Ts, 2);
    const ComplexField sym = evaluate_series(apply_L0({key, Z}, d), s);
    worst = std::max(worst, linf_norm(sym - fd) / linf_norm(fd));
  }
  return {worst <= 1e-5, "max relative mismatch " + fmt(worst) + " over 20 terms (need <= 1e-5)"};
}

Outcome c7() {
  const Grid1D px = make_grid(128.0, 2048);
  const ProfilePreset f = parse_preset("gaussian(1, 1, 0)");
  ComplexField v(px);
  for (std::size_t i = 0; i < px.size(); ++i) v[i] = 0.05 * f(px.point(i));
  const double drift = mass_drift({1.0, v}, 100.0, 0.01, {1.0, 1.0});
  const double mismatch = energy_identity_mismatch(sourced_reference_run(1e-3));
  const double r_energy = energy_identity_halving_ratio(0.025);
  const double r_strang = strang_halving_ratio(0.025);
  const bool ok = drift <= 1e-6 && mismatch <= 1e-5 && r_energy >= 3.0 && r_energy <= 5.0 && r_strang >= 3.0 &&
                  r_strang <= 5.0;
  return {ok, "mass drift " + fmt(drift) + ", identity mismatch " + fmt(mismatch) + ", halving ratios " +
                  fmt(r_energy) + " / " + fmt(r_strang)};
}

Outcome c8() {
  const auto suite = random_field_suite(suite_grid(), 1, 1000, true);
  std::size_t violations = 0;
  for (const auto& fs : suite) {
    if (!check_supnorm_bound(fs.field).satisfied) ++violations;
    for (auto [j, k] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
      if (!check_interpolation(fs.field, j, k).satisfied) ++violations;
    }
  }
  return {violations == 0 && suite.size() == 1000,
          std::to_string(suite.size()) + " fields, " + std::to_string(violations) + " violations"};
}

Outcome c9() {
  const ClosedLoop cl = closed_loop(backward_data(), backward_run(), 0.01, 400);
  return {cl.a_error <= 5e-3 && cl.b_error <= 2e-2,
          "|a - a'| = " + fmt(cl.a_error) + " (<= 5e-3), |b - b'| = " + fmt(cl.b_error) + " (<= 2e-2)"};
}

Outcome c10() {
  const ScatteringData d = backward_data();
  bool ok = true;
  std::string detail;
  for (int N : {1, 2}) {
    const AsymSeries V = build_profile_series(d, N, N + 3);
    std::vector<std::pair<double, double>> samples;
    for (double s : log_spaced(10.0, 1000.0, 40)) samples.emplace_back(s, linf_norm(psi_direct(V, s)));
    const RateFit f = fit_rate(samples, 4);
    ok = ok && f.exponent <= -(2 + N) + 0.3;
    detail += "N=" + std::to_string(N) + ": m = " + fmt(f.exponent) + " (need <= " + fmt(-(2 + N) + 0.3) + ")  ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"backward construction decay", c1},
      {"forward small-data residual decay", c2},
      {"modulus and profile convergence", c3},
      {"expansion residual ladder", c4},
      {"leading-band inverse round trip", c5},
      {"linearized operator vs finite differences", c6},
      {"conservation, identity and second order", c7},
      {"sup-norm and interpolation suites", c8},
      {"closed loop backward -> forward", c9},
      {"high-order source decay", c10},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s  %2d  %-42s  %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
