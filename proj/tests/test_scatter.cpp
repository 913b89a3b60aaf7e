#include "modscat/scatter.hpp"
#include "modscat/workflows.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace modscat;

namespace {

constexpr double pi = std::numbers::pi;

PhaseAccumulator accumulate_all(const std::vector<ProfileState>& traj, std::size_t from, Couplings c) {
  PhaseAccumulator acc = make_phase_accumulator(traj[from], c);
  for (std::size_t i = from; i + 1 < traj.size(); ++i) acc = accumulate_phase(acc, traj[i], traj[i + 1]);
  return acc;
}

std::vector<std::pair<double, double>> sampled(double lo, double hi, std::size_t n, double (*f)(double)) {
  std::vector<std::pair<double, double>> out;
  for (double s : log_spaced(lo, hi, n)) out.emplace_back(s, f(s));
  return out;
}

}  // namespace

TEST_CASE("accumulate_phase: zero field leaves G unchanged") {
  const Grid1D g = make_grid(20.0, 128);
  const PhaseAccumulator acc = make_phase_accumulator({1.0, ComplexField(g)}, {1.0, 1.0});
  const PhaseAccumulator out = accumulate_phase(acc, {1.0, ComplexField(g)}, {2.0, ComplexField(g)});
  CHECK(norm(out.G, NormKind::Linf) == 0.0);
  CHECK(out.last_s == 2.0);
}

TEST_CASE("accumulate_phase: constant modulus integrates 1/s") {
  const Grid1D g = make_grid(20.0, 128);
  const double a0 = 0.4, beta = 1.3;
  const ComplexField V = ComplexField::sample(g, [&](double y) { return std::polar(a0, 0.1 * y); });
  auto error = [&](std::size_t n) {
    std::vector<ProfileState> traj;
    for (std::size_t i = 0; i <= n; ++i) traj.push_back({1.0 + 9.0 * static_cast<double>(i) / static_cast<double>(n), V});
    const PhaseAccumulator acc = accumulate_all(traj, 0, {beta, 0.0});
    return std::abs(acc.G[5] - beta * a0 * a0 * std::log(10.0));
  };
  CHECK(error(2000) < 1e-5);
  CHECK(error(100) / error(200) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("accumulate_phase: rejects non-monotone or detached steps") {
  const Grid1D g = make_grid(20.0, 128);
  const PhaseAccumulator acc = make_phase_accumulator({2.0, ComplexField(g)}, {1.0, 1.0});
  CHECK_THROWS_AS(accumulate_phase(acc, {2.0, ComplexField(g)}, {1.5, ComplexField(g)}), std::invalid_argument);
  CHECK_THROWS_AS(accumulate_phase(acc, {2.0, ComplexField(g)}, {2.0, ComplexField(g)}), std::invalid_argument);
  CHECK_THROWS_AS(accumulate_phase(acc, {3.0, ComplexField(g)}, {4.0, ComplexField(g)}), std::invalid_argument);
}

TEST_CASE("extract: exact V0 trajectory recovers the data") {
  const Grid1D g = make_grid(40.0, 512);
  const ScatteringData d = make_scattering_data(parse_preset("gaussian(0.8, 3, 0)").sample(g),
                                                parse_preset("gaussian(2, 4, 1)").sample(g), 1.0, 0.0);
  std::vector<ProfileState> traj;
  for (double s : log_spaced(1.0, 1000.0, 3000)) traj.push_back({s, build_V0(d, s)});
  const ExtractedData x = extract(traj, make_phase_accumulator(traj.front(), {d.beta, d.gamma}));
  CHECK_FALSE(x.degenerate);
  double a_err = 0.0, b_err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    a_err = std::max(a_err, std::abs(x.a[i] - d.a[i]));
    if (x.mask[i]) b_err = std::max(b_err, std::abs(wrap_phase(x.b[i] - d.b[i])));
  }
  CHECK(a_err <= 1e-8);
  CHECK(b_err <= 1e-6);
}

TEST_CASE("extract: zero trajectory is degenerate") {
  const Grid1D g = make_grid(20.0, 128);
  std::vector<ProfileState> traj;
  for (double s : log_spaced(1.0, 200.0, 50)) traj.push_back({s, ComplexField(g)});
  const ExtractedData x = extract(traj, make_phase_accumulator(traj.front(), {1.0, 1.0}));
  CHECK(x.degenerate);
  CHECK(norm(x.a, NormKind::Linf) == 0.0);
  CHECK(norm(x.b, NormKind::Linf) == 0.0);
  for (bool m : x.mask) CHECK_FALSE(m);
}

TEST_CASE("extract: insufficient span is rejected") {
  const Grid1D g = make_grid(20.0, 128);
  std::vector<ProfileState> traj;
  for (double s : log_spaced(1.0, 50.0, 50)) traj.push_back({s, modscat::testing::gaussian(g)});
  CHECK_THROWS_AS(extract(traj, make_phase_accumulator(traj.front(), {1.0, 1.0})), std::invalid_argument);
}

TEST_CASE("extract: small-data forward run decays at rate 1/s") {
  const Grid1D g = make_grid(40.0, 1024);
  const ProfileState init{1.0, initial_profile(g, parse_preset("gaussian(1, 1, 0)"), 0.05, 1.0)};
  ExtractOptions opt;
  opt.fit_lo = 5.0;
  opt.fit_hi = 250.0;
  const ForwardRun run = run_forward(init, 500.0, 0.01, 400, {1.0, 1.0}, opt);
  CHECK(run.extracted.rate_modulus.exponent >= -1.3);
  CHECK(run.extracted.rate_modulus.exponent <= -0.7);
  CHECK(run.extracted.rate_phase.exponent >= -1.3);
  CHECK(run.extracted.rate_phase.exponent <= -0.7);
}

TEST_CASE("fit_rate: examples") {
  const RateFit p = fit_rate(sampled(1.0, 1e3, 20, [](double s) { return 1.0 / (s * s); }), 3);
  CHECK(std::abs(p.exponent + 2.0) <= 1e-10);
  CHECK(p.log_power == 0);

  const RateFit l = fit_rate(sampled(10.0, 1e4, 40, [](double s) {
                               const double q = 1.0 + std::log(s);
                               return q * q / s;
                             }),
                             4);
  CHECK(l.exponent == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(l.log_power == 2);

  const RateFit c = fit_rate(sampled(2.0, 2e3, 12, [](double) { return 3.0; }), 2);
  CHECK(std::abs(c.exponent) < 1e-12);
  CHECK(c.log_power == 0);
}

TEST_CASE("fit_rate: errors") {
  auto f = [](double s) { return 1.0 / s; };
  CHECK_THROWS_AS(fit_rate(sampled(1.0, 1e3, 7, +f), 0), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(sampled(1.0, 10.0, 20, +f), 0), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(std::vector<std::pair<double, double>>(10, {5.0, 1.0}), 0), std::invalid_argument);
  auto bad = sampled(1.0, 1e3, 20, +f);
  bad[3].second = 0.0;
  CHECK_THROWS_AS(fit_rate(bad, 0), std::invalid_argument);
  CHECK(fit_rate_window(bad, 1.0, 1e3, 0).degenerate);
  // A narrower span is accepted on request.
  CHECK_NOTHROW(fit_rate(sampled(20.0, 500.0, 20, +f), 0, 1.35));
}

TEST_CASE("wrap_phase: range") {
  CHECK(wrap_phase(0.0) == 0.0);
  CHECK(wrap_phase(2.0 * pi + 0.5) == doctest::Approx(0.5));
  CHECK(wrap_phase(-pi) == doctest::Approx(pi));
  CHECK(wrap_phase(3.0 * pi) == doctest::Approx(pi));
}

// ---------------------------------------------------------------------------
// Properties

TEST_CASE("property: asymptote is independent of the accumulation start") {
  const Grid1D g = make_grid(40.0, 1024);
  const ProfileState init{1.0, initial_profile(g, parse_preset("gaussian(1, 1, 0)"), 0.08, 1.0)};
  const ForwardRun run = run_forward(init, 500.0, 0.01, 400, {1.0, 1.0}, {});
  const auto& traj = run.trajectory;
  std::size_t from = 0;
  while (traj[from].s < 4.0) ++from;
  const std::vector<ProfileState> tail(traj.begin() + static_cast<std::ptrdiff_t>(from), traj.end());
  const ExtractedData x1 = extract(traj, make_phase_accumulator(traj.front(), {1.0, 1.0}));
  const ExtractedData x2 = extract(tail, make_phase_accumulator(tail.front(), {1.0, 1.0}));
  // G shifts by an s-independent field and b by the same amount.
  for (std::size_t k : {std::size_t{0}, tail.size() / 2, tail.size() - 1}) {
    const RealField& G1 = x1.G[from + k];
    const RealField& G2 = x2.G[k];
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      worst = std::max(worst, std::abs(x1.A[i] * std::polar(1.0, -G1[i]) - x2.A[i] * std::polar(1.0, -G2[i])));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("property: unwrapping never leaves jumps above pi") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 200;
    std::vector<double> smooth(n), wrapped(n);
    std::vector<bool> mask(n);
    const double slope = 2.5 * u(rng), curv = 0.02 * u(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(i) - 100.0;
      smooth[i] = slope * x + curv * x * x;
      wrapped[i] = wrap_phase(smooth[i]);
      mask[i] = std::abs(x) < 60.0 || u(rng) > 0.5;
    }
    const std::vector<double> out = unwrap_from(wrapped, mask, 100);
    std::size_t prev = 100;
    for (std::size_t i = 101; i < n; ++i) {
      if (!mask[i]) continue;
      CHECK(std::abs(std::remainder(out[i] - wrapped[i], 2.0 * pi)) < 1e-9);
      if (i == prev + 1) CHECK(std::abs(out[i] - out[prev]) <= pi);
      prev = i;
    }
  }
}
