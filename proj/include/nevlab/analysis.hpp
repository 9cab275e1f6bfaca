#pragma once
// Harnack constants for the half-plane Herglotz cone, quadratic-form
// sandwich checks, the additive split F = G + T, resolvent-type estimates
// and singular-value decay fits.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nevlab/herglotz.hpp"
#include "nevlab/matnum.hpp"

namespace nevlab {

/// c1 h(z1) <= h(z2) <= c2 h(z1) for every h(x + iy) = c y + sum_j y/((x - t_j)^2 + y^2) mu_j
/// with c, mu_j >= 0.
struct HarnackPair {
  cplx z1;
  cplx z2;
  double c1 = 1.0;
  double c2 = 1.0;
};

/// Throws DomainError unless both points lie in C_+.
HarnackPair harnack_constants(cplx z1, cplx z2);

struct HarnackCertificate {
  HarnackPair constants;
  int trials = 0;
  double worst_violation = 0.0;  // relative to c2 h(z1) + h(z2)
  bool pass = false;
};

/// Draws random cone functions (linear part plus up to 8 atoms) and checks
/// the sandwich at (z1, z2). Pass iff no violation exceeds 1e-12.
HarnackCertificate certify_harnack(cplx z1, cplx z2, int trials, std::uint64_t seed);

/// sup over t in R u {inf} of (a2 t^2 + a1 t + a0) / (b2 t^2 + b1 t + b0), where
/// the denominator is positive on R. Arrays are ordered {x0, x1, x2}.
double sup_quadratic_ratio(const std::array<double, 3>& num, const std::array<double, 3>& den);

/// u* Im F(z) u
double form_value(const Family& f, cplx z, const ComplexVector& u);

struct SandwichRow {
  cplx z;
  double c1 = 1.0;
  double c2 = 1.0;
  double min_ratio = 0.0;  // smallest t(z)[u] / t(z0)[u] over trials
  double max_ratio = 0.0;
  double worst_violation = 0.0;  // relative, 0 when inside [c1, c2]
};

struct SandwichReport {
  cplx z0;
  std::vector<SandwichRow> rows;
  double worst_violation = 0.0;
  bool pass = false;
};

/// Only the upper half of z_grid is used. Pass iff no violation exceeds
/// 1e-10 relative to c2 t(z0)[u] + t(z)[u].
SandwichReport form_sandwich_check(const Family& f, const ZGrid& z_grid, cplx z0, int trials, std::uint64_t seed);

struct SplitResult {
  HerglotzRep g;
  ComplexMatrix t;              // F(i) - G(i)
  double constancy = 0.0;       // max_z ||T(z) - T|| / (1 + ||T||)
  double hermitian_defect = 0.0;
  double tolerance = 1e-8;
  bool pass = false;
};

/// G is rebuilt from the Poisson data of Im F: zero constant term, linear
/// term b1 and measure sigma. T = F - G must be constant and Hermitian on the
/// grid.
SplitResult split_bounded_imag(const Family& f, const ComplexMatrix& b1, const OperatorMeasure& sigma,
                               const ZGrid& grid = default_grid(), double tolerance = 1e-8);

/// Convenience form for rep + offset.
SplitResult split_bounded_imag(const HerglotzRep& rep, const ComplexMatrix& offset,
                               const ZGrid& grid = default_grid());

struct BlackBoxSplitOptions {
  /// Intervals each holding at most one atom of the measure.
  std::vector<std::pair<double, double>> bins;
  /// Height for the linear-term estimate B1 ~ Im F(iY)/Y.
  double linear_height = 1e6;
  StieltjesOptions stieltjes;
};

/// Estimates B1 and the atoms from F alone, then splits. Tolerance 1e-2.
SplitResult split_black_box(const Family& f, const BlackBoxSplitOptions& opts,
                            const ZGrid& grid = default_grid());

/// sup over t in R u {inf} of |1 + z t| / |t - z|, Im z > 0.
double c2_of(cplx z);

struct BoundReport {
  cplx z;
  double c2 = 0.0;
  double worst_ratio = 0.0;  // max lhs / rhs, must stay <= 1
  double kernel_leak = 0.0;  // factor_check: ||D(z) P_ker|| relative
  int trials = 0;
  bool pass = false;
};

/// ||(F(z) - B1 z - B0) u|| <= c2(z) ||K^{1/2}|| ||K^{1/2} u|| for random u.
BoundReport weak_strong_check(const HerglotzRep& rep, cplx z, int trials, std::uint64_t seed);

/// ||K^{-1/2} (F(z) - B1 z - B0) K^{-1/2}|| <= c2(z) on ran K_Sigma.
BoundReport factor_check(const HerglotzRep& rep, cplx z, const TolerancePolicy& tol = {});

struct DecayRow {
  cplx z;
  double slope = 0.0;
  int points = 0;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  Index j_first = 0;  // 1-based fit window actually used
  Index j_last = 0;
  double spread = 0.0;
  bool decays = false;  // every slope below -0.05
  bool pass = false;
  std::string verdict;
};

/// Least-squares slope of log s_j vs log j.
double fit_log_slope(const RealVector& singular, Index j_first, Index j_last, double floor = 1e-14,
                     int* used = nullptr);

/// Fits over the middle third of [j_lo, j_hi] (1-based). Pass iff the slope
/// spread across the grid is at most 0.1.
DecayReport schatten_decay(const Family& f, const ZGrid& z_grid, Index j_lo, Index j_hi);

}  // namespace nevlab
