#include "nevlab/matnum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nevlab {

namespace {

// BDCSVD runs one-sided Jacobi below its block size and divide-and-conquer
// above it.
using Svd = Eigen::BDCSVD<ComplexMatrix>;

std::string shape(const ComplexMatrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

}  // namespace

void TolerancePolicy::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_unit(eps_psd) || !in_unit(eps_rank) || !in_unit(eps_eq)) {
    throw DomainError("tolerance policy fields must lie in (0, 1)");
  }
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " + shape(a));
  }
}

void require_finite(const ComplexMatrix& a, const char* what) {
  if (!a.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Svd svd(a);
  return svd.singularValues()(0);
}

ComplexMatrix real_part(const ComplexMatrix& t) {
  require_square(t, "real_part");
  return (t + t.adjoint()) / 2.0;
}

ComplexMatrix imag_part(const ComplexMatrix& t) {
  require_square(t, "imag_part");
  return (t - t.adjoint()) / (2.0 * kI);
}

ComplexMatrix hermitian_part(const ComplexMatrix& h) {
  require_square(h, "hermitian_part");
  return (h + h.adjoint()) / 2.0;
}

double hermitian_defect(const ComplexMatrix& h) {
  require_square(h, "hermitian_defect");
  const double scale = std::max(1.0, spectral_norm(h));
  return spectral_norm(h - h.adjoint()) / scale;
}

PsdResult is_psd(const ComplexMatrix& h, const TolerancePolicy& tol) {
  require_square(h, "is_psd");
  if (h.size() == 0) return {true, 0.0};
  const double norm = spectral_norm(h);
  if (spectral_norm(h - h.adjoint()) > tol.eps_eq * norm) {
    throw DomainError("is_psd: matrix is not Hermitian within tolerance");
  }
  const HermitianEigen eig = eig_hermitian(h);
  const double lmin = eig.values(0);
  return {lmin >= -tol.eps_psd * (1.0 + norm), lmin};
}

HermitianEigen eig_hermitian(const ComplexMatrix& h) {
  require_square(h, "eig_hermitian");
  if (h.size() == 0) return {RealVector(0), ComplexMatrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) throw NumericError("eig_hermitian: no convergence");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector singular_values(const ComplexMatrix& a) {
  if (a.size() == 0) return RealVector(0);
  Svd svd(a);
  return svd.singularValues();
}

double min_singular_value(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  const RealVector s = singular_values(a);
  return s(s.size() - 1);
}

double reciprocal_condition(const ComplexMatrix& a, double scale) {
  if (a.size() == 0) return 0.0;
  const RealVector s = singular_values(a);
  if (s(0) == 0.0) return 0.0;
  if (a.rows() != a.cols()) return 0.0;
  return s(s.size() - 1) / std::max(s(0), scale);
}

ComplexMatrix null_space(const ComplexMatrix& a, const TolerancePolicy& tol, double scale) {
  const Index n = a.cols();
  if (n == 0) return ComplexMatrix(0, 0);
  if (a.rows() == 0) return ComplexMatrix::Identity(n, n);
  Svd svd(a, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double cutoff = tol.eps_rank * std::max(s(0), scale);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

ComplexMatrix range_basis(const ComplexMatrix& a, const TolerancePolicy& tol) {
  const Index m = a.rows();
  if (a.size() == 0) return ComplexMatrix(m, 0);
  Svd svd(a, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  const double cutoff = tol.eps_rank * s(0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

Index numerical_rank(const ComplexMatrix& a, const TolerancePolicy& tol, double scale) {
  if (a.size() == 0) return 0;
  const RealVector s = singular_values(a);
  const double cutoff = tol.eps_rank * std::max(s(0), scale);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return rank;
}

double containment_defect(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.cols() == 0) return 0.0;
  if (v.cols() == 0) return spectral_norm(u);
  if (u.rows() != v.rows()) throw DimensionError("containment_defect: ambient dimensions differ");
  return spectral_norm(u - v * (v.adjoint() * u));
}

double subspace_distance(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows()) throw DimensionError("subspace_distance: ambient dimensions differ");
  if (u.cols() != v.cols()) return 1.0;
  if (u.cols() == 0) return 0.0;
  // For equal dimensions the two one-sided defects agree in exact arithmetic;
  // taking the max keeps the result symmetric under round-off.
  const double d = std::max(containment_defect(u, v), containment_defect(v, u));
  return std::min(d, 1.0);
}

bool contains(const ComplexMatrix& v, const ComplexMatrix& u, const TolerancePolicy& tol) {
  return containment_defect(u, v) <= tol.eps_rank;
}

SolveResult solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "solve");
  if (a.rows() != b.rows()) throw DimensionError("solve: right-hand side has wrong row count");
  if (a.size() == 0) return {ComplexMatrix(0, b.cols()), 1.0};
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  // The LU estimator can miss an exactly zero pivot; the pivot ratio catches it.
  const RealVector pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = std::min(lu.rcond(), pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0);
  if (!(rcond >= kSolveRcondFloor)) {
    throw ConditioningError("solve: matrix is numerically singular", std::isfinite(rcond) ? rcond : 0.0);
  }
  return {lu.solve(b), rcond};
}

ComplexMatrix inverse(const ComplexMatrix& a) {
  require_square(a, "inverse");
  return solve(a, ComplexMatrix::Identity(a.rows(), a.rows())).x;
}

ComplexMatrix solve_right(const ComplexMatrix& x, const ComplexMatrix& a) {
  // Y A = X  <=>  A* Y* = X*
  return solve(a.adjoint(), x.adjoint()).x.adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& h) {
  const HermitianEigen eig = eig_hermitian(h);
  const RealVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * root.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace nevlab
