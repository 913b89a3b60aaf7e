#pragma once

#include "modscat/grid.hpp"
#include "modscat/scatter.hpp"
#include "modscat/solver.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace modscat {

struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;  // lhs <= rhs (1 + 1e-9)
  double margin = 0.0;    // rhs - lhs

  static InequalityReport make(std::string name, double lhs, double rhs);
};

/// ||w||_inf^2 <= ||w||_2 ||w'||_2
InequalityReport check_supnorm_bound(const ComplexField& w);

/// Left and right sides (without C) of ||d^j V||_{2k/j}^{k/j} <= C ||V||_inf^{k/j-1} ||d^k V||_2.
std::pair<double, double> interpolation_sides(const ComplexField& V, int j, int k);
/// Against the frozen calibrated constant (times 1 + 1e-6).
InequalityReport check_interpolation(const ComplexField& V, int j, int k);
InequalityReport check_interpolation(const ComplexField& V, int j, int k, double C);

/// Mass derivative (central difference) against 2 int Im(F conj(w)) at interior
/// samples; lhs is the largest absolute mismatch, rhs the tolerance.
InequalityReport check_energy_identity(const SourcedRun& run, double tol = 1e-5);
double energy_identity_mismatch(const SourcedRun& run);

/// Pointwise |F^(k)| <= C_k max(|beta|,|gamma|) B_k for k = 0..3 where
/// F = beta s^-1 |V|^2 V + gamma s^-2 |V|^4 V. Only points where B_k is at least
/// 1e-6 of its maximum take part. Returns the max ratio |F^(k)| / (max(|beta|,|gamma|) B_k).
std::array<double, 4> source_bound_ratios(const ComplexField& V, double s, double beta, double gamma);
std::vector<InequalityReport> check_source_bounds(const ComplexField& V, double s, double beta, double gamma);

struct BootstrapReport {
  std::array<RateFit, 4> l2_growth;  // ||d^k V||_2, k = 0..3
  RateFit sup_growth;                // ||V||_inf
  RateFit dyy_sup_growth;            // ||V_yy||_inf
  double epsilon = 0.0;
  bool l2_ok = true;         // all l2 exponents <= 0.25
  bool dyy_ok = true;        // exponent <= 0.6
  bool sup_bounded = true;   // |exponent| <= 0.05
  bool ok() const { return l2_ok && dyy_ok && sup_bounded; }
};
/// Exponents are fitted over [10 s_first, s_last] when that spans 1.5 decades,
/// otherwise over the whole trajectory.
BootstrapReport bootstrap_monitor(const std::vector<ProfileState>& trajectory, double epsilon);

/// Parameters of the random test fields: sums of 1-3 separated packets
/// A exp(-(y-c)^2 / 2w^2) exp(i (kappa (y - c) + theta)) with parameters from
/// small discrete sets and centres on grid points.
struct FieldSample {
  ComplexField field;
  double s = 1.0;  // evaluation time for source-bound checks
};

/// Deterministic enumeration of every single-packet shape, then seeded random
/// multi-packet fields up to `count` (enumeration first when `with_singles`).
std::vector<FieldSample> random_field_suite(const Grid1D& grid, std::uint64_t seed, std::size_t count,
                                            bool with_singles = true);

Grid1D suite_grid();

}  // namespace modscat
