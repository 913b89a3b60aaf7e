#include "modscat/series.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace modscat {

namespace {

using Poly = std::map<TermKey, ComplexField>;

const cplx I(0.0, 1.0);

bool all_zero(const ComplexField& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](const cplx& v) { return v == 0.0; });
}

bool same_base(const ScatteringData& p, const ScatteringData& q) {
  return p.a.grid == q.a.grid && p.beta == q.beta && p.gamma == q.gamma && p.a.values == q.a.values &&
         p.b.values == q.b.values;
}

// Sums contributions per key and remembers how large the individual
// contributions were, so that keys which cancel down to rounding noise can be
// recognised as exact zeros.
class Accumulator {
 public:
  Accumulator(const Grid1D& grid, int truncation) : grid_(grid), truncation_(truncation) {}

  template <class Fn>
  void add(TermKey key, Fn&& value_at) {
    if (key.k > truncation_) return;
    auto it = slots_.find(key);
    if (it == slots_.end()) it = slots_.emplace(key, Slot{ComplexField(grid_), 0.0}).first;
    double mag = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const cplx v = value_at(i);
      it->second.sum[i] += v;
      mag = std::max(mag, std::abs(v));
    }
    it->second.scale += mag;
  }

  void add_field(TermKey key, const ComplexField& f, cplx factor) {
    add(key, [&](std::size_t i) { return factor * f[i]; });
  }

  // Keys whose sum is below rel_tol times the contributing magnitudes are dropped.
  Poly finish(double rel_tol = 1e-11) && {
    Poly out;
    for (auto& [key, slot] : slots_) {
      double m = 0.0;
      for (const auto& v : slot.sum.values) m = std::max(m, std::abs(v));
      if (m <= rel_tol * slot.scale || m == 0.0) continue;
      out.emplace(key, std::move(slot.sum));
    }
    return out;
  }

 private:
  struct Slot {
    ComplexField sum;
    double scale;
  };
  Grid1D grid_;
  int truncation_;
  std::map<TermKey, Slot> slots_;
};

Poly full_poly(const AsymSeries& V) {
  Poly p = V.terms();
  if (V.has_base()) p.emplace(TermKey{0, 0}, to_complex(V.base().a));
  return p;
}

Poly conj_poly(const Poly& p) {
  Poly out;
  for (const auto& [key, c] : p) out.emplace(key, conj(c));
  return out;
}

Poly multiply(const Poly& p, const Poly& q, int max_k, const Grid1D& grid) {
  Poly out;
  for (const auto& [kp, cp] : p) {
    for (const auto& [kq, cq] : q) {
      const TermKey key{kp.k + kq.k, kp.j + kq.j};
      if (key.k > max_k) continue;
      auto it = out.find(key);
      if (it == out.end()) it = out.emplace(key, ComplexField(grid)).first;
      auto& dst = it->second;
      for (std::size_t i = 0; i < grid.size(); ++i) dst[i] += cp[i] * cq[i];
    }
  }
  return out;
}

// Phase derivative data: phi_y = p1 ln s + p0, phi_yy = q1 ln s + q0.
struct PhaseDerivs {
  RealField p1, p0, q1, q0;
};

PhaseDerivs phase_derivs(const ScatteringData& d) {
  const RealField a1 = spectral_deriv(d.a, 1);
  const RealField a2 = spectral_deriv(d.a, 2);
  PhaseDerivs out{RealField(d.grid()), spectral_deriv(d.b, 1), RealField(d.grid()), spectral_deriv(d.b, 2)};
  for (std::size_t i = 0; i < d.a.size(); ++i) {
    out.p1[i] = -2.0 * d.beta * d.a[i] * a1[i];
    out.q1[i] = -2.0 * d.beta * (a1[i] * a1[i] + d.a[i] * a2[i]);
  }
  return out;
}

}  // namespace

AsymSeries::AsymSeries(ScatteringData base, bool with_base, int truncation)
    : base_(std::move(base)), has_base_(with_base), truncation_(truncation) {
  if (truncation < 1) throw std::invalid_argument("series truncation must be >= 1");
}

AsymSeries AsymSeries::leading(const ScatteringData& base, int truncation) {
  return AsymSeries(base, true, truncation);
}

void AsymSeries::add_term(TermKey key, const ComplexField& coeff) {
  if (key.k < 1 || key.j < 0) throw std::invalid_argument("series term needs k >= 1, j >= 0");
  if (!(coeff.grid == grid())) throw std::invalid_argument("series term on a different grid");
  if (!coeff.all_finite()) throw std::invalid_argument("series term has non-finite coefficients");
  if (key.k > truncation_) return;
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (!all_zero(coeff)) terms_.emplace(key, coeff);
    return;
  }
  it->second += coeff;
  if (all_zero(it->second)) terms_.erase(it);
}

int AsymSeries::min_order() const {
  if (has_base_) return 0;
  return terms_.empty() ? kNoTerms : terms_.begin()->first.k;
}

int AsymSeries::max_log_power(int k) const {
  int out = -1;
  for (const auto& [key, c] : terms_) {
    if (key.k == k) out = std::max(out, key.j);
  }
  return out;
}

AsymSeries AsymSeries::scaled(cplx alpha) const {
  if (has_base_ && alpha != 1.0) throw std::invalid_argument("cannot scale a series carrying the base term");
  AsymSeries out(base_, has_base_, truncation_);
  for (const auto& [key, c] : terms_) out.add_term(key, alpha * c);
  return out;
}

AsymSeries series_add(const AsymSeries& p, const AsymSeries& q) {
  if (!(p.grid() == q.grid())) throw std::invalid_argument("series_add: different grids");
  if (!same_base(p.base(), q.base())) throw std::invalid_argument("series_add: different base data");
  if (p.has_base() && q.has_base()) throw std::invalid_argument("series_add: both operands carry the base term");
  AsymSeries out(p.base(), p.has_base() || q.has_base(), std::min(p.truncation(), q.truncation()));
  for (const auto& [key, c] : p.terms()) out.add_term(key, c);
  for (const auto& [key, c] : q.terms()) out.add_term(key, c);
  return out;
}

LinearizedPair linearized_G(Nonlinearity which, const ScatteringData& data, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("linearized_G needs s > 0");
  const RealField phi = phase_phi(data, s);
  LinearizedPair out{ComplexField(data.grid()), ComplexField(data.grid())};
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a2 = data.a[i] * data.a[i];
    const cplx e2 = std::polar(1.0, 2.0 * phi[i]);
    if (which == Nonlinearity::Cubic) {
      out.diag[i] = 2.0 * a2;
      out.conj[i] = a2 * e2;
    } else {
      out.diag[i] = 3.0 * a2 * a2;
      out.conj[i] = 2.0 * a2 * a2 * e2;
    }
  }
  return out;
}

ComplexField apply_G(Nonlinearity which, const ComplexField& U) {
  ComplexField out(U.grid);
  for (std::size_t i = 0; i < U.size(); ++i) {
    const double m2 = std::norm(U[i]);
    out[i] = (which == Nonlinearity::Cubic ? m2 : m2 * m2) * U[i];
  }
  return out;
}

ComplexField quadratic_remainder(Nonlinearity which, const ComplexField& U, const ComplexField& V) {
  U.check_same_grid(V);
  const ComplexField GU = apply_G(which, U);
  const ComplexField GV = apply_G(which, V);
  ComplexField out(U.grid);
  for (std::size_t i = 0; i < U.size(); ++i) {
    const cplx d = U[i] - V[i];
    const double m2 = std::norm(V[i]);
    const cplx v2 = V[i] * V[i];
    cplx lin;
    if (which == Nonlinearity::Cubic) {
      lin = 2.0 * m2 * d + v2 * std::conj(d);
    } else {
      lin = 3.0 * m2 * m2 * d + 2.0 * m2 * v2 * std::conj(d);
    }
    out[i] = GU[i] - GV[i] - lin;
  }
  return out;
}

ComplexField L0_leading(const ComplexField& Z, int k, const ScatteringData& data) {
  ComplexField Y(Z.grid);
  for (std::size_t i = 0; i < Z.size(); ++i) {
    const double ba2 = data.beta * data.a[i] * data.a[i];
    Y[i] = cplx(-ba2, -static_cast<double>(k)) * Z[i] - ba2 * std::conj(Z[i]);
  }
  return Y;
}

ComplexField invert_L0_leading(const ComplexField& Y, int k, const ScatteringData& data) {
  if (k < 1) throw std::invalid_argument("invert_L0_leading needs k >= 1");
  const double kk = static_cast<double>(k);
  ComplexField Z(Y.grid);
  for (std::size_t i = 0; i < Y.size(); ++i) {
    const double ba2 = data.beta * data.a[i] * data.a[i];
    Z[i] = (cplx(-ba2, kk) * Y[i] + ba2 * std::conj(Y[i])) / (kk * kk);
  }
  return Z;
}

AsymSeries apply_L0(const AsymTerm& term, const ScatteringData& base) {
  const auto [k, j] = term.key;
  if (k < 1 || j < 0) throw std::invalid_argument("apply_L0 needs a term with k >= 1, j >= 0");
  const ComplexField& Z = term.coeff;
  AsymSeries out(base, false, k + 2);
  out.add_term({k + 1, j}, L0_leading(Z, k, base));
  if (j > 0) out.add_term({k + 1, j - 1}, cplx(0.0, j) * Z);
  ComplexField q(Z.grid);
  for (std::size_t i = 0; i < Z.size(); ++i) {
    const double a4 = std::pow(base.a[i], 4);
    q[i] = -base.gamma * (3.0 * a4 * Z[i] + 2.0 * a4 * std::conj(Z[i]));
  }
  out.add_term({k + 2, j}, q);
  return out;
}

AsymSeries psi_of_series(const AsymSeries& V, int truncation) {
  if (!V.has_base()) throw std::invalid_argument("psi_of_series: series lacks the base term");
  if (truncation < 2) throw std::invalid_argument("psi_of_series: truncation must be >= 2");
  const ScatteringData& d = V.base();
  const Grid1D& g = V.grid();
  const Poly P = full_poly(V);
  const Poly Pb = conj_poly(P);
  Accumulator acc(g, truncation);

  // i d/ds, including the phase derivative -beta a^2 / s.
  for (const auto& [key, c] : P) {
    acc.add({key.k + 1, key.j}, [&](std::size_t i) {
      return cplx(d.beta * d.a[i] * d.a[i], -static_cast<double>(key.k)) * c[i];
    });
    if (key.j > 0) acc.add_field({key.k + 1, key.j - 1}, c, cplx(0.0, key.j));
  }

  // Nonlinear terms: e^{i phi} P^2 conj(P) and e^{i phi} P^3 conj(P)^2.
  const Poly P2 = multiply(P, P, truncation - 1, g);
  for (const auto& [key, c] : multiply(P2, Pb, truncation - 1, g)) {
    acc.add_field({key.k + 1, key.j}, c, -d.beta);
  }
  if (d.gamma != 0.0) {
    const Poly P3 = multiply(P2, P, truncation - 2, g);
    const Poly Pb2 = multiply(Pb, Pb, truncation - 2, g);
    for (const auto& [key, c] : multiply(P3, Pb2, truncation - 2, g)) {
      acc.add_field({key.k + 2, key.j}, c, -d.gamma);
    }
  }

  // s^-2 d_y^2 (e^{i phi} c).
  const PhaseDerivs pd = phase_derivs(d);
  for (const auto& [key, c] : P) {
    if (key.k + 2 > truncation) continue;
    const ComplexField c1 = spectral_deriv(c, 1);
    const ComplexField c2 = spectral_deriv(c, 2);
    acc.add({key.k + 2, key.j}, [&](std::size_t i) {
      return c2[i] + 2.0 * I * pd.p0[i] * c1[i] + I * pd.q0[i] * c[i] - pd.p0[i] * pd.p0[i] * c[i];
    });
    if (d.beta != 0.0) {
      acc.add({key.k + 2, key.j + 1}, [&](std::size_t i) {
        return 2.0 * I * pd.p1[i] * c1[i] + I * pd.q1[i] * c[i] - 2.0 * pd.p0[i] * pd.p1[i] * c[i];
      });
      acc.add({key.k + 2, key.j + 2}, [&](std::size_t i) { return -pd.p1[i] * pd.p1[i] * c[i]; });
    }
  }

  AsymSeries out(d, false, truncation);
  for (auto& [key, c] : std::move(acc).finish()) out.add_term(key, c);
  return out;
}

AsymSeries newton_step(const AsymSeries& Vk, int truncation) {
  if (!Vk.has_base()) throw std::invalid_argument("newton_step: series lacks the base term");
  int order = 0;
  for (const auto& [key, c] : Vk.terms()) order = std::max(order, key.k);

  const AsymSeries R = psi_of_series(Vk, truncation);
  const int m = R.min_order();
  if (m == AsymSeries::kNoTerms) return Vk;  // exact solution (e.g. a == 0)
  if (m < order + 2) {
    throw SeriesContractError("newton_step: residual starts at order " + std::to_string(m) +
                              ", expected at least " + std::to_string(order + 2));
  }
  if (m + 1 > truncation) {
    throw std::invalid_argument("newton_step: truncation " + std::to_string(truncation) +
                                " too small to verify order " + std::to_string(m + 1));
  }

  // Band system at order m for the correction at order m-1: for each j,
  //   L0_leading(Z_j) + i (j+1) Z_{j+1} = -R_{m,j},
  // triangular from the top j down.
  const int top = R.max_log_power(m);
  AsymSeries next = Vk;
  ComplexField Zup(Vk.grid());
  for (int j = top; j >= 0; --j) {
    ComplexField Y(Vk.grid());
    if (auto it = R.terms().find({m, j}); it != R.terms().end()) Y -= it->second;
    for (std::size_t i = 0; i < Y.size(); ++i) Y[i] -= cplx(0.0, j + 1) * Zup[i];
    ComplexField Z = invert_L0_leading(Y, m - 1, Vk.base());
    next.add_term({m - 1, j}, Z);
    Zup = std::move(Z);
  }

  const AsymSeries R2 = psi_of_series(next, truncation);
  if (R2.min_order() < m + 1) {
    throw SeriesContractError("newton_step: residual still has order " + std::to_string(R2.min_order()) +
                              " terms after correcting order " + std::to_string(m));
  }
  return next;
}

ComplexField evaluate_series(const AsymSeries& V, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("evaluate_series needs s > 0");
  const double L = std::log(s);
  ComplexField sum(V.grid());
  if (V.has_base()) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = V.base().a[i];
  }
  for (const auto& [key, c] : V.terms()) {
    const double w = std::pow(L, key.j) / std::pow(s, key.k);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += w * c[i];
  }
  const RealField phi = phase_phi(V.base(), s);
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] *= std::polar(1.0, phi[i]);
  return sum;
}

ComplexField series_ds(const AsymSeries& V, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("series_ds needs s > 0");
  const double L = std::log(s);
  const ScatteringData& d = V.base();
  ComplexField sum(V.grid());    // P
  ComplexField dsum(V.grid());   // dP/ds
  if (V.has_base()) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = d.a[i];
  }
  for (const auto& [key, c] : V.terms()) {
    const double w = std::pow(L, key.j) / std::pow(s, key.k);
    const double dw = ((key.j > 0 ? key.j * std::pow(L, key.j - 1) : 0.0) - key.k * std::pow(L, key.j)) /
                      std::pow(s, key.k + 1);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += w * c[i];
      dsum[i] += dw * c[i];
    }
  }
  const RealField phi = phase_phi(d, s);
  ComplexField out(V.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double phi_s = -d.beta * d.a[i] * d.a[i] / s;
    out[i] = std::polar(1.0, phi[i]) * (I * phi_s * sum[i] + dsum[i]);
  }
  return out;
}

ComplexField psi_numeric(const ComplexField& V, const ComplexField& V_s, double s, double beta,
                         double gamma) {
  V.check_same_grid(V_s);
  ComplexField out = spectral_deriv(V, 2);
  const double is = 1.0 / s;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m2 = std::norm(V[i]);
    out[i] = I * V_s[i] - (beta * is * m2 + gamma * is * is * m2 * m2) * V[i] + is * is * out[i];
  }
  return out;
}

ComplexField psi_direct(const AsymSeries& V, double s) {
  return psi_numeric(evaluate_series(V, s), series_ds(V, s), s, V.base().beta, V.base().gamma);
}

void write_series(std::ostream& os, const AsymSeries& V) {
  const Grid1D& g = V.grid();
  auto block = [&](int k, int j, auto value_at) {
    os << k << ' ' << j << '\n';
    for (std::size_t i = 0; i < g.size(); ++i) {
      const cplx c = value_at(i);
      os << g.point(i) << ' ' << c.real() << ' ' << c.imag() << '\n';
    }
  };
  const auto prec = os.precision(17);
  if (V.has_base()) block(0, 0, [&](std::size_t i) { return cplx(V.base().a[i]); });
  for (const auto& [key, c] : V.terms()) block(key.k, key.j, [&](std::size_t i) { return c[i]; });
  os.precision(prec);
}

}  // namespace modscat
