#include "modscat/scatter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace modscat {

namespace {

// Ordinary least squares y = m x + c; returns (m, c, rms).
std::array<double, 3> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double m = sxy / sxx;
  const double c = my - m * mx;
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (m * x[i] + c);
    r2 += r * r;
  }
  return {m, c, std::sqrt(r2 / n)};
}

double g_weight(double s, double m2, Couplings c) { return c.beta * m2 / s + c.gamma * m2 * m2 / (s * s); }

}  // namespace

RateFit fit_rate(const std::vector<std::pair<double, double>>& samples, int log_correction_max,
                 double min_decades) {
  if (log_correction_max < 0) throw std::invalid_argument("fit_rate: log_correction_max must be >= 0");
  if (samples.size() < 8) throw std::invalid_argument("fit_rate: need at least 8 samples");
  double smin = samples.front().first, smax = smin;
  for (const auto& [s, v] : samples) {
    if (!(s >= 1.0) || !std::isfinite(s)) throw std::invalid_argument("fit_rate: sample times must be >= 1");
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("fit_rate: values must be positive");
    smin = std::min(smin, s);
    smax = std::max(smax, s);
  }
  if (smax == smin) throw std::invalid_argument("fit_rate: degenerate samples (all equal s)");
  if (std::log10(smax / smin) < min_decades - 1e-12) {
    throw std::invalid_argument("fit_rate: samples span " + std::to_string(std::log10(smax / smin)) +
                                " decades, need " + std::to_string(min_decades));
  }

  std::vector<double> x, y(samples.size()), lv, ll;
  for (const auto& [s, v] : samples) {
    x.push_back(std::log(s));
    lv.push_back(std::log(v));
    ll.push_back(std::log1p(std::log(s)));
  }
  RateFit best;
  best.samples = samples.size();
  double best_rms = INFINITY;
  for (int q = 0; q <= log_correction_max; ++q) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = lv[i] - q * ll[i];
    const auto [m, c, rms] = line_fit(x, y);
    if (rms < best_rms * (1.0 - 1e-6) - 1e-13) {
      best_rms = rms;
      best.exponent = m;
      best.log_power = q;
      best.residual_rms = rms;
    }
  }
  return best;
}

RateFit fit_rate_window(const std::vector<std::pair<double, double>>& samples, double s_lo, double s_hi,
                        int log_correction_max, double min_decades) {
  std::vector<std::pair<double, double>> sel;
  for (const auto& p : samples) {
    if (p.first >= s_lo && p.first <= s_hi) sel.push_back(p);
  }
  const bool any_zero = std::any_of(sel.begin(), sel.end(), [](const auto& p) { return !(p.second > 0.0); });
  if (sel.empty() || any_zero) {
    RateFit r;
    r.degenerate = true;
    r.samples = sel.size();
    return r;
  }
  return fit_rate(sel, log_correction_max, min_decades);
}

PhaseAccumulator make_phase_accumulator(const ProfileState& start, Couplings c) {
  if (!(start.s > 0.0)) throw std::invalid_argument("phase accumulation needs s > 0");
  return {start.s, RealField(start.V.grid), start.s, c};
}

PhaseAccumulator accumulate_phase(const PhaseAccumulator& acc, const ProfileState& state,
                                  const ProfileState& next) {
  if (std::abs(state.s - acc.last_s) > 1e-12 * std::max(1.0, acc.last_s)) {
    throw std::invalid_argument("accumulate_phase: state does not continue the accumulator");
  }
  if (!(next.s > state.s)) throw std::invalid_argument("accumulate_phase: s must increase");
  PhaseAccumulator out = acc;
  const double h = next.s - state.s;
  for (std::size_t i = 0; i < out.G.size(); ++i) {
    const double g0 = g_weight(state.s, std::norm(state.V[i]), acc.couplings);
    const double g1 = g_weight(next.s, std::norm(next.V[i]), acc.couplings);
    out.G[i] += 0.5 * h * (g0 + g1);
  }
  out.last_s = next.s;
  return out;
}

double wrap_phase(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(x, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

std::vector<double> unwrap_from(const std::vector<double>& wrapped, const std::vector<bool>& mask,
                                std::size_t start) {
  std::vector<double> out(wrapped.size(), 0.0);
  if (wrapped.empty()) return out;
  out[start] = wrapped[start];
  auto sweep = [&](long long dir) {
    double last = wrapped[start];
    for (long long i = static_cast<long long>(start) + dir; i >= 0 && i < static_cast<long long>(wrapped.size());
         i += dir) {
      const auto u = static_cast<std::size_t>(i);
      if (!mask[u]) continue;
      out[u] = last + wrap_phase(wrapped[u] - last);
      last = out[u];
    }
  };
  sweep(+1);
  sweep(-1);
  return out;
}

ExtractedData extract(const std::vector<ProfileState>& trajectory, const PhaseAccumulator& acc,
                      const ExtractOptions& opt) {
  if (trajectory.size() < 2) throw std::invalid_argument("extract: need at least two snapshots");
  const double S = trajectory.back().s;
  if (std::abs(trajectory.front().s - acc.last_s) > 1e-12 * std::max(1.0, acc.last_s)) {
    throw std::invalid_argument("extract: accumulator does not start at the first snapshot");
  }
  if (S / trajectory.front().s < 100.0 * (1.0 - 1e-12)) {
    throw std::invalid_argument("extract: insufficient span (need S / s0 >= 100)");
  }
  const Grid1D& g = trajectory.front().V.grid;
  const std::size_t n = g.size();
  const double beta = acc.couplings.beta;

  ExtractedData out{RealField(g), RealField(g), std::vector<bool>(n, false), ComplexField(g), {}, {}, {}, {}};
  PhaseAccumulator cur = acc;
  out.s.push_back(trajectory.front().s);
  out.G.push_back(cur.G);
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    cur = accumulate_phase(cur, trajectory[k - 1], trajectory[k]);
    out.s.push_back(trajectory[k].s);
    out.G.push_back(cur.G);
  }

  const std::size_t K = trajectory.size() - 1;
  const double s1 = trajectory[K - 1].s;
  const auto& V1 = trajectory[K - 1].V;
  const auto& VK = trajectory[K].V;
  const double den = S - s1;
  double amax = 0.0;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.a[i] = std::max(0.0, (S * std::abs(VK[i]) - s1 * std::abs(V1[i])) / den);
    const cplx AK = VK[i] * std::polar(1.0, out.G[K][i]);
    const cplx A1 = V1[i] * std::polar(1.0, out.G[K - 1][i]);
    out.A[i] = (S * AK - s1 * A1) / den;
    if (out.a[i] > amax) {
      amax = out.a[i];
      peak = i;
    }
  }
  out.degenerate = !(amax > 0.0);

  if (!out.degenerate) {
    std::vector<double> wrapped(n);
    for (std::size_t i = 0; i < n; ++i) {
      wrapped[i] = std::arg(out.A[i]);
      out.mask[i] = out.a[i] > opt.mask_threshold;
    }
    out.mask[peak] = true;
    const std::vector<double> unwrapped = unwrap_from(wrapped, out.mask, peak);
    for (std::size_t i = 0; i < n; ++i) {
      if (!out.mask[i]) continue;
      out.b[i] = unwrapped[i] - (out.G[K][i] - beta * out.a[i] * out.a[i] * std::log(S));
    }
  }

  std::vector<std::pair<double, double>> mod, full;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    double em = 0.0, ef = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx V = trajectory[k].V[i];
      em = std::max(em, std::abs(std::abs(V) - out.a[i]));
      ef = std::max(ef, std::abs(V - out.A[i] * std::polar(1.0, -out.G[k][i])));
    }
    mod.emplace_back(trajectory[k].s, em);
    full.emplace_back(trajectory[k].s, ef);
  }
  const double lo = opt.fit_lo > 0.0 ? opt.fit_lo : trajectory.front().s;
  const double hi = opt.fit_hi > 0.0 ? opt.fit_hi : S;
  if (out.degenerate) {
    out.rate_modulus.degenerate = out.rate_phase.degenerate = true;
  } else {
    out.rate_modulus = fit_rate_window(mod, lo, hi, opt.log_correction_max);
    out.rate_phase = fit_rate_window(full, lo, hi, opt.log_correction_max);
  }
  return out;
}

ComplexField asymptotic_profile(const ExtractedData& x, double s, double beta) {
  if (x.s.empty()) throw std::invalid_argument("asymptotic_profile: empty extraction");
  const double S = x.s.back();
  const RealField& GS = x.G.back();
  ComplexField out(x.a.grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = x.a[i];
    if (a == 0.0) continue;
    const double b = std::arg(x.A[i]) - GS[i] + beta * a * a * std::log(S);
    out[i] = std::polar(a, -beta * a * a * std::log(s) + b);
  }
  return out;
}

}  // namespace modscat
