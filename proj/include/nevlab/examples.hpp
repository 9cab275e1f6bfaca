#pragma once
// Discretized boundary-value families and a truncated two-operator
// example, each packaged as a Family for the verifiers.
//
// Grids use n interior-plus-left nodes x_k = k h, k = 0..n-1, with h = L/n and
// a Dirichlet node at x = L eliminated. K is the second-difference matrix
// with K(0,0) = 1 (natural left end), 2 elsewhere on the diagonal and -1 off it.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nevlab/herglotz.hpp"

namespace nevlab {

enum class BoundaryVariant {
  HalflineRobin,        // -u'' + phi(z) |u(0)|^2 boundary term
  DissipativeInterval,  // -i sign(Im z) u'' + phi(z) |u(0)|^2 boundary term
  DissipativeHalfline,  // as DissipativeInterval, read as a half-line truncation
};

const char* to_string(BoundaryVariant v);

struct SturmLiouvilleConfig {
  Index n = 64;
  double length = 1.0;
  /// Scalar boundary coefficient; defaults to phi(z) = z.
  HerglotzRep phi = HerglotzRep(ComplexMatrix::Zero(1, 1), ComplexMatrix::Identity(1, 1), OperatorMeasure(1));
  BoundaryVariant variant = BoundaryVariant::DissipativeInterval;

  /// Throws DomainError on n < 8, length <= 0 or phi not scalar.
  void validate() const;
};

/// K / h^2 as above (real symmetric, positive definite).
ComplexMatrix stiffness(Index n, double length);

/// i sign(Im z) K/h^2 + (phi(z)/h) E11. Requires the DissipativeInterval or
/// DissipativeHalfline variant.
Family build_interval_family(const SturmLiouvilleConfig& config);

/// K/h^2 + (phi(z)/h) E11 on [0, length]. Requires HalflineRobin.
Family build_halfline_family(const SturmLiouvilleConfig& config);

/// Dispatches on config.variant.
Family build_sturm_liouville(const SturmLiouvilleConfig& config);

/// i sign(Im z) K_D/h^2 with Dirichlet conditions at both ends; constant in
/// each half-plane.
Family build_dirichlet_interval_family(Index n, double length);

struct DecayFit {
  cplx z;
  double slope = 0.0;
  Index j_first = 0;
  Index j_last = 0;
  RealVector inverse_singular;  // s_j(G(z)^{-1}), descending
};

/// Slope of log s_j(G(z)^{-1}) against log j over j in [n/8, n/3].
DecayFit decay_exponent(const Family& g, cplx z);

struct FillRow {
  Index n = 0;
  double length = 0.0;
  cplx z;
  double epsilon = 0.0;  // sigma_min(F_n(z) - a)
};

struct FillReport {
  double a = 0.0;
  double step = 0.0;
  std::vector<FillRow> rows;  // ordered by n, then by grid order
  bool pass = false;          // epsilon at the largest n below half its first value at every z
};

/// Half-line truncations with fixed step h: L = n h for n in n_list.
FillReport spectrum_fill_sweep(const HerglotzRep& phi, double step, const std::vector<Index>& n_list, double a,
                               const ZGrid& grid);

struct Ex4AConfig {
  Index n = 30;
  /// Floored at 1e-6; j = 0..n-1.
  std::function<double(Index)> b_decay = [](Index j) { return std::ldexp(1.0, -static_cast<int>(j)); };
  double c_perturbation = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Ex4A {
  Family m;        // B^{1/2} (C - 1/z) B^{1/2}
  Family f;        // -M(z)^{-1}
  Family f_tilde;  // -(C - 1/z)^{-1}
  ComplexMatrix b;
  ComplexMatrix c;
};

Ex4A build_ex4a(const Ex4AConfig& config);

struct FormDomainRow {
  cplx z;
  double min_ratio = 0.0;  // generalized eigenvalues of Q(z) against Q(i)
  double max_ratio = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double identity_error = 0.0;  // || B^{1/2} Im F(z) B^{1/2} - Im F~(z) || relative
  double m_rcond = 0.0;         // conditioning of the solve behind F(z)
};

struct FormDomainReport {
  std::vector<FormDomainRow> rows;
  bool pass = false;
};

/// Q(z) = Im F~(z) is the form of Im F(z) on ran B^{1/2}. Pass iff every
/// generalized eigenvalue lies in [c1, c2] (slack 1e-8) and the identity
/// error stays below 1e-8.
FormDomainReport form_domain_report(const Ex4A& ex, const ZGrid& grid);

}  // namespace nevlab
