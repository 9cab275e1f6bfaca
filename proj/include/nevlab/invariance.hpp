#pragma once
// Grid verifiers for z-independence of spectral data of Nevanlinna
// families and pairs. Every checker compares each grid point with the
// reference point i and reports the worst pairwise deviation, so results do
// not depend on the order of the grid.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nevlab/herglotz.hpp"
#include "nevlab/pairs.hpp"

namespace nevlab {

struct InvarianceRow {
  cplx z;
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  Index null_dim = 0;
  double rcond = std::numeric_limits<double>::quiet_NaN();
  double distance = 0.0;  // to the value at the reference point
  bool flag = false;      // statement-specific membership (e.g. a in rho)
};

struct InvarianceReport {
  std::string statement;
  std::vector<InvarianceRow> rows;
  double worst_deviation = 0.0;
  double tolerance = 1e-8;
  bool pass = false;
  std::string note;
};

/// ker(F(z) - a) has the same dimension and span at every grid point.
InvarianceReport check_point_invariance(const NevanlinnaPair& pair, double a, const ZGrid& grid = default_grid(),
                                        const TolerancePolicy& tol = {});
InvarianceReport check_point_invariance(const Family& f, double a, const ZGrid& grid = default_grid(),
                                        const TolerancePolicy& tol = {});

/// ker Im F(z) is constant and lambda_min(|Im F(z)|) stays inside the Harnack
/// band [c1, c2] * lambda_min(Im F(i)).
InvarianceReport check_imag_kernel_invariance(const Family& f, const ZGrid& grid = default_grid(),
                                              const TolerancePolicy& tol = {});

/// Invertibility of Psi(z) - a Phi(z) is constant, and agrees with
/// invertibility of C(z) - (a - i)/(a + i) at upper points.
InvarianceReport check_resolvent_invariance(const NevanlinnaPair& pair, double a, const ZGrid& grid = default_grid(),
                                            const TolerancePolicy& tol = {});

/// The rank of Phi(z) is constant, so boundedness of F(z) is too.
InvarianceReport check_boundedness_invariance(const NevanlinnaPair& pair, const ZGrid& grid = default_grid(),
                                              const TolerancePolicy& tol = {});

/// mul F(z) has the same span at every grid point.
InvarianceReport check_mul_invariance(const NevanlinnaPair& pair, const ZGrid& grid = default_grid(),
                                      const TolerancePolicy& tol = {});

enum class PairClass { RTilde, R, Rs, Ru };

const char* to_string(PairClass c);

struct PairClassification {
  PairClass cls = PairClass::RTilde;
  cplx z;
  double lambda_min = 0.0;  // of N(z, z)
  Index kernel_dim = 0;
  Index phi_null_dim = 0;
  /// Invertibility certificates, filled for R^u.
  double phi_rcond = 0.0;
  double psi_rcond = 0.0;
};

struct PairClassifyOptions {
  /// R^u requires lambda_min(N(z,z)) >= uniform_floor * (1 + ||N(z,z)||).
  /// Zero selects 10 * eps_psd.
  double uniform_floor = 0.0;
};

/// R~ when Phi(z) is singular (the family is not operator valued), R when
/// N(z,z) has a kernel, R^s when lambda_min(N(z,z)) is below the floor,
/// otherwise R^u.
PairClassification classify_family_pair(const NevanlinnaPair& pair, cplx z = kReferencePoint,
                                        const TolerancePolicy& tol = {}, const PairClassifyOptions& opts = {});

/// ker(I - C(z)* C(z)) and ker(C(z) - alpha) are constant on the upper grid,
/// and so is invertibility of C(z) - alpha.
InvarianceReport maximum_principle_schur(const std::function<ComplexMatrix(cplx)>& schur, cplx alpha,
                                         const ZGrid& grid = default_grid(), const TolerancePolicy& tol = {});

struct SweepRow {
  Index n = 0;
  cplx z;
  double sigma_min = 0.0;  // of Im F_n(z)
  double min_ratio = 0.0;  // u* Im F_n(z) u / u* Im F_n(i) u over the trials
  double max_ratio = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // ordered by n, then by grid order
  bool monotone = false;       // sigma_min strictly decreasing in n at every z
  bool harnack = false;        // every ratio inside [c1, c2]
  bool decays = false;         // sigma_min at the last n below half its first value at every z
  bool pass = false;
  std::string verdict;
};

/// Truncation sweep over the upper half of the grid. n_list must be strictly
/// increasing; DomainError otherwise.
SweepReport sweep_continuous_spectrum(const std::function<Family(Index)>& family_of, const ZGrid& grid,
                                      const std::vector<Index>& n_list, int trials = 100, std::uint64_t seed = 0);

}  // namespace nevlab
