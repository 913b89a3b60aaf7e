#include "modscat/analysis.hpp"

#include "modscat/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace modscat {

InequalityReport InequalityReport::make(std::string name, double lhs, double rhs) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.satisfied = lhs <= rhs * (1.0 + 1e-9);
  r.margin = rhs - lhs;
  return r;
}

InequalityReport check_supnorm_bound(const ComplexField& w) {
  const double sup = linf_norm(w);
  const double rhs = l2_norm(w) * l2_norm(spectral_deriv(w, 1));
  return InequalityReport::make("supnorm", sup * sup, rhs);
}

std::pair<double, double> interpolation_sides(const ComplexField& V, int j, int k) {
  if (!((j == 1 && k == 2) || (j == 1 && k == 3) || (j == 2 && k == 3))) {
    throw std::invalid_argument("interpolation check supports (j,k) in {(1,2), (1,3), (2,3)}");
  }
  const double r = static_cast<double>(k) / j;
  const double p = 2.0 * r;
  const double lhs = std::pow(norm(spectral_deriv(V, j), NormKind::Lp, p), r);
  const double rhs = std::pow(linf_norm(V), r - 1.0) * l2_norm(spectral_deriv(V, k));
  return {lhs, rhs};
}

InequalityReport check_interpolation(const ComplexField& V, int j, int k, double C) {
  const auto [lhs, rhs] = interpolation_sides(V, j, k);
  return InequalityReport::make("interpolation(" + std::to_string(j) + "," + std::to_string(k) + ")", lhs,
                                C * (1.0 + 1e-6) * rhs);
}

InequalityReport check_interpolation(const ComplexField& V, int j, int k) {
  return check_interpolation(V, j, k, frozen_calibration().interpolation(j, k));
}

double energy_identity_mismatch(const SourcedRun& run) {
  const auto& st = run.states;
  if (st.size() < 3 || run.sources.size() != st.size()) {
    throw std::invalid_argument("energy identity check needs at least 3 snapshots with sources");
  }
  std::vector<double> mass;
  for (const auto& s : st) {
    const double m = l2_norm(s.v);
    mass.push_back(m * m);
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < st.size(); ++i) {
    const double dm = (mass[i + 1] - mass[i - 1]) / (st[i + 1].t - st[i - 1].t);
    double id = 0.0;
    for (std::size_t x = 0; x < st[i].v.size(); ++x) id += std::imag(run.sources[i][x] * std::conj(st[i].v[x]));
    id *= 2.0 * st[i].v.grid.dx();
    worst = std::max(worst, std::abs(dm - id));
  }
  return worst;
}

InequalityReport check_energy_identity(const SourcedRun& run, double tol) {
  return InequalityReport::make("energy_identity", energy_identity_mismatch(run), tol);
}

std::array<double, 4> source_bound_ratios(const ComplexField& V, double s, double beta, double gamma) {
  std::array<double, 4> ratio{};
  const double scale = std::max(std::abs(beta), std::abs(gamma));
  if (scale == 0.0) return ratio;
  const std::size_t n = V.size();
  ComplexField F(V.grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double m2 = std::norm(V[i]);
    F[i] = (beta / s + gamma * m2 / (s * s)) * m2 * V[i];
  }
  const ComplexField V1 = spectral_deriv(V, 1), V2 = spectral_deriv(V, 2), V3 = spectral_deriv(V, 3);
  const std::array<ComplexField, 4> Fk{F, spectral_deriv(F, 1), spectral_deriv(F, 2), spectral_deriv(F, 3)};
  std::array<std::vector<double>, 4> B;
  for (auto& b : B) b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::abs(V[i]), d1 = std::abs(V1[i]), d2 = std::abs(V2[i]), d3 = std::abs(V3[i]);
    const double pre = (1.0 + v * v / s) / s;
    B[0][i] = pre * v * v * v;
    B[1][i] = pre * v * v * d1;
    B[2][i] = pre * (v * v * d2 + v * d1 * d1);
    B[3][i] = pre * (v * v * d3 + v * d1 * d2 + d1 * d1 * d1);
  }
  for (int k = 0; k < 4; ++k) {
    const double bmax = *std::max_element(B[k].begin(), B[k].end());
    if (!(bmax > 0.0)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (B[k][i] < 1e-6 * bmax) continue;
      ratio[k] = std::max(ratio[k], std::abs(Fk[k][i]) / (scale * B[k][i]));
    }
  }
  return ratio;
}

std::vector<InequalityReport> check_source_bounds(const ComplexField& V, double s, double beta, double gamma) {
  if (!(s > 0.0)) throw std::invalid_argument("source bounds need s > 0");
  const auto r = source_bound_ratios(V, s, beta, gamma);
  const auto& cal = frozen_calibration();
  std::vector<InequalityReport> out;
  for (int k = 0; k < 4; ++k) {
    out.push_back(InequalityReport::make("source(" + std::to_string(k) + ")", r[k], cal.source[k] * (1.0 + 1e-6)));
  }
  return out;
}

BootstrapReport bootstrap_monitor(const std::vector<ProfileState>& trajectory, double epsilon) {
  BootstrapReport rep;
  rep.epsilon = epsilon;
  std::array<std::vector<std::pair<double, double>>, 4> l2;
  std::vector<std::pair<double, double>> sup, dyy;
  for (const auto& st : trajectory) {
    if (st.s < 1.0) continue;
    l2[0].emplace_back(st.s, l2_norm(st.V));
    for (int k = 1; k <= 3; ++k) {
      const ComplexField d = spectral_deriv(st.V, k);
      l2[k].emplace_back(st.s, l2_norm(d));
      if (k == 2) dyy.emplace_back(st.s, linf_norm(d));
    }
    sup.emplace_back(st.s, linf_norm(st.V));
  }
  if (sup.empty()) throw std::invalid_argument("bootstrap monitor needs snapshots with s >= 1");
  // Growth is fitted past the initial dispersive transient (first decade)
  // whenever at least 1.5 decades remain.
  double lo = sup.front().first;
  const double hi = sup.back().first;
  if (hi / (10.0 * lo) >= std::pow(10.0, 1.5)) lo *= 10.0;
  for (int k = 0; k < 4; ++k) {
    rep.l2_growth[k] = fit_rate_window(l2[k], lo, hi, 0);
    if (rep.l2_growth[k].exponent > 0.25) rep.l2_ok = false;
  }
  rep.sup_growth = fit_rate_window(sup, lo, hi, 0);
  rep.dyy_sup_growth = fit_rate_window(dyy, lo, hi, 0);
  rep.dyy_ok = rep.dyy_sup_growth.exponent <= 0.6;
  rep.sup_bounded = std::abs(rep.sup_growth.exponent) <= 0.05;
  return rep;
}

Grid1D suite_grid() { return make_grid(40.0, 2048); }

namespace {

constexpr std::array<double, 5> kWidths{0.5, 0.75, 1.0, 1.5, 2.0};
constexpr std::array<double, 5> kKappaW{0.0, 0.5, 1.0, 2.0, 3.0};
constexpr std::array<double, 4> kAmps{0.1, 0.5, 1.0, 2.0};
constexpr std::array<double, 3> kTimes{1.0, 10.0, 100.0};
constexpr double kUsable = 36.0;  // packets live in [-36, 36]
constexpr double kReach = 9.0;    // packet extent in widths

void add_packet(ComplexField& f, double amp, double w, double kw, double theta, double c) {
  const double kappa = kw / w;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double z = f.grid.point(i) - c;
    const double env = amp * std::exp(-0.5 * z * z / (w * w));
    if (env == 0.0) continue;
    f[i] += std::polar(env, kappa * z + theta);
  }
}

double snap_to_grid(const Grid1D& g, double y) {
  const double i = std::round((y + g.half_length()) / g.dx());
  return g.point(static_cast<std::size_t>(i));
}

}  // namespace

std::vector<FieldSample> random_field_suite(const Grid1D& grid, std::uint64_t seed, std::size_t count,
                                            bool with_singles) {
  if (grid.half_length() < kUsable + 2.0) throw std::invalid_argument("suite grid too small");
  std::vector<FieldSample> out;
  out.reserve(count);
  if (with_singles) {
    for (double w : kWidths) {
      for (double kw : kKappaW) {
        for (double amp : kAmps) {
          for (double s : kTimes) {
            if (out.size() == count) return out;
            ComplexField f(grid);
            add_packet(f, amp, w, kw, 0.0, snap_to_grid(grid, 0.0));
            out.push_back({std::move(f), s});
          }
        }
      }
    }
  }
  std::mt19937_64 rng(seed);
  auto pick = [&](const auto& set) { return set[rng() % set.size()]; };
  auto unit = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  while (out.size() < count) {
    const std::size_t packets = 1 + rng() % 3;
    const double slot = 2.0 * kUsable / static_cast<double>(packets);
    ComplexField f(grid);
    for (std::size_t q = 0; q < packets; ++q) {
      double w = pick(kWidths);
      while (kReach * w > 0.5 * slot) w = pick(kWidths);
      const double c = snap_to_grid(grid, -kUsable + (static_cast<double>(q) + 0.5) * slot);
      add_packet(f, pick(kAmps), w, pick(kKappaW), 2.0 * std::numbers::pi * unit(), c);
    }
    out.push_back({std::move(f), pick(kTimes)});
  }
  return out;
}

}  // namespace modscat
