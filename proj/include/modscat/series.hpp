#pragma once

#include "modscat/ansatz.hpp"
#include "modscat/grid.hpp"

#include <compare>
#include <iosfwd>
#include <limits>
#include <map>
#include <stdexcept>

namespace modscat {

/// Index of a term c(y) e^{i phi} ln^j s / s^k.
struct TermKey {
  int k = 0;
  int j = 0;
  auto operator<=>(const TermKey&) const = default;
};

struct AsymTerm {
  TermKey key;
  ComplexField coeff;
};

/// Thrown when a Newton step fails to raise the residual order.
class SeriesContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite sum  [a e^{i phi}]  +  sum_{k>=1, j>=0} c_{k,j}(y) e^{i phi} ln^j s / s^k.
///
/// The bracketed base term is present when has_base() is true; residual series
/// (outputs of psi_of_series) carry no base term. Keys with k > truncation are
/// dropped on insertion.
class AsymSeries {
 public:
  static constexpr int kNoTerms = std::numeric_limits<int>::max();

  AsymSeries(ScatteringData base, bool with_base, int truncation);

  /// V0 alone.
  static AsymSeries leading(const ScatteringData& base, int truncation);

  const ScatteringData& base() const noexcept { return base_; }
  const Grid1D& grid() const noexcept { return base_.grid(); }
  bool has_base() const noexcept { return has_base_; }
  int truncation() const noexcept { return truncation_; }
  const std::map<TermKey, ComplexField>& terms() const noexcept { return terms_; }

  /// Adds coeff into the (k, j) slot (k >= 1, j >= 0). Ignored if k > truncation.
  void add_term(TermKey key, const ComplexField& coeff);
  /// 0 if the base term is present, else the smallest k stored, else kNoTerms.
  int min_order() const;
  /// Largest j stored at order k, or -1.
  int max_log_power(int k) const;

  AsymSeries scaled(cplx alpha) const;

 private:
  ScatteringData base_;
  bool has_base_;
  int truncation_;
  std::map<TermKey, ComplexField> terms_;
};

AsymSeries series_add(const AsymSeries& p, const AsymSeries& q);

/// Pair (diag, conj) with G'(V0) W = diag W + conj conj(W).
struct LinearizedPair {
  ComplexField diag;
  ComplexField conj;
};

enum class Nonlinearity { Cubic, Quintic };

LinearizedPair linearized_G(Nonlinearity which, const ScatteringData& data, double s);

/// G1(U) = |U|^2 U,  G2(U) = |U|^4 U.
ComplexField apply_G(Nonlinearity which, const ComplexField& U);

/// G(U) - G(V) - G'(V)(U - V).
ComplexField quadratic_remainder(Nonlinearity which, const ComplexField& U, const ComplexField& V);

/// Image under L0 of the single term Z e^{i phi} ln^j s / s^k (k >= 1):
///   (k+1, j):   (-beta a^2 - i k) Z - beta a^2 conj(Z)
///   (k+1, j-1): i j Z
///   (k+2, j):   -gamma (3 a^4 Z + 2 a^4 conj(Z))
AsymSeries apply_L0(const AsymTerm& term, const ScatteringData& base);

/// Leading band of L0 at order k: Y = (-beta a^2 - i k) Z - beta a^2 conj(Z).
ComplexField L0_leading(const ComplexField& Z, int k, const ScatteringData& data);
/// Solves L0_leading(Z, k) = Y pointwise: Z = ((-beta a^2 + i k) Y + beta a^2 conj(Y)) / k^2.
ComplexField invert_L0_leading(const ComplexField& Y, int k, const ScatteringData& data);

/// Symbolic Psi(V) = i V_s - beta s^-1 |V|^2 V - gamma s^-2 |V|^4 V + s^-2 V_yy,
/// keeping keys with k <= truncation.
AsymSeries psi_of_series(const AsymSeries& V, int truncation);

/// One Newton correction: V_{k+1} = V_k + delta with Psi(V_{k+1}) one order smaller.
AsymSeries newton_step(const AsymSeries& Vk, int truncation);

ComplexField evaluate_series(const AsymSeries& V, double s);
/// Exact d/ds of the evaluated series.
ComplexField series_ds(const AsymSeries& V, double s);

/// Psi applied numerically to a sampled profile, given its s-derivative.
ComplexField psi_numeric(const ComplexField& V, const ComplexField& V_s, double s, double beta,
                         double gamma);
/// Psi of the evaluated series: exact d/ds, pointwise nonlinearity, spectral d_y^2.
ComplexField psi_direct(const AsymSeries& V, double s);

/// Columnar text: per term a "k j" header line followed by "y re im" rows.
void write_series(std::ostream& os, const AsymSeries& V);

}  // namespace modscat
