#pragma once
// Dense complex matrix numerics shared by every other module.
//
// All numerical decisions (positivity, rank, equality) are made relative to
// the spectral norm of the operand, with thresholds taken from a
// TolerancePolicy.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nevlab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class DimensionError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A linear solve was attempted on a matrix too close to singular.
class ConditioningError : public NumericError {
 public:
  ConditioningError(const std::string& what, double rcond)
      : NumericError(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// An argument lies outside the domain of the operation (pole, wrong
/// half-plane, non-Hermitian input where Hermitian is required, ...).
class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct TolerancePolicy {
  double eps_psd = 1e-10;
  double eps_rank = 1e-8;
  double eps_eq = 1e-9;

  /// Throws DomainError unless every field lies in (0, 1).
  void validate() const;
};

/// Reciprocal condition below which solve() refuses to answer.
inline constexpr double kSolveRcondFloor = 1e-14;
/// Reciprocal condition used as the "bounded inverse" certificate.
inline constexpr double kInvertibleRcond = 1e-12;

void require_square(const ComplexMatrix& a, const char* what);
void require_finite(const ComplexMatrix& a, const char* what);

double spectral_norm(const ComplexMatrix& a);

/// (T + T*)/2
ComplexMatrix real_part(const ComplexMatrix& t);
/// (T - T*)/(2i)
ComplexMatrix imag_part(const ComplexMatrix& t);
/// (H + H*)/2, used before every Hermitian eigendecomposition.
ComplexMatrix hermitian_part(const ComplexMatrix& h);

/// ||H - H*|| relative to max(1, ||H||).
double hermitian_defect(const ComplexMatrix& h);

struct PsdResult {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

/// PSD iff lambda_min >= -eps_psd * (1 + ||H||). Throws DomainError when H
/// is not Hermitian within eps_eq * ||H||.
PsdResult is_psd(const ComplexMatrix& h, const TolerancePolicy& tol = {});

struct HermitianEigen {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // orthonormal columns, same order
};

HermitianEigen eig_hermitian(const ComplexMatrix& h);

/// Singular values in descending order.
RealVector singular_values(const ComplexMatrix& a);

double min_singular_value(const ComplexMatrix& a);

/// sigma_min / max(sigma_max, scale); 0 for an empty or zero matrix. A
/// positive scale sets the size below which a block counts as negligible,
/// e.g. the norm of the stacked pair it was cut from.
double reciprocal_condition(const ComplexMatrix& a, double scale = 0.0);

/// Orthonormal basis of ker A: right singular vectors whose singular value is
/// <= eps_rank * max(sigma_max, scale), plus the directions beyond
/// min(rows, cols).
ComplexMatrix null_space(const ComplexMatrix& a, const TolerancePolicy& tol = {}, double scale = 0.0);

/// Orthonormal basis of ran A, with the same rank cutoff as null_space().
ComplexMatrix range_basis(const ComplexMatrix& a, const TolerancePolicy& tol = {});

Index numerical_rank(const ComplexMatrix& a, const TolerancePolicy& tol = {}, double scale = 0.0);

/// Sine of the largest principal angle between span U and span V (both
/// orthonormal). Returns 1 when the dimensions differ, 0 when both are empty.
double subspace_distance(const ComplexMatrix& u, const ComplexMatrix& v);

/// ||(I - V V*) U||: how far span U sticks out of span V.
double containment_defect(const ComplexMatrix& u, const ComplexMatrix& v);

/// span U is contained in span V within eps_rank.
bool contains(const ComplexMatrix& v, const ComplexMatrix& u, const TolerancePolicy& tol = {});

struct SolveResult {
  ComplexMatrix x;
  double rcond = 0.0;
};

/// Solves A X = B. Throws ConditioningError when the reciprocal condition of
/// A is below kSolveRcondFloor.
SolveResult solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// A^{-1}, same conditioning contract as solve().
ComplexMatrix inverse(const ComplexMatrix& a);

/// X A^{-1}, i.e. the solution of Y A = X.
ComplexMatrix solve_right(const ComplexMatrix& x, const ComplexMatrix& a);

/// Principal square root of a PSD matrix (negative round-off clipped).
ComplexMatrix psd_sqrt(const ComplexMatrix& h);

/// Block diagonal [[a, 0], [0, b]].
ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace nevlab
