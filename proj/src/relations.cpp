#include "nevlab/relations.hpp"

namespace nevlab {

namespace {

void require_same_ambient(const LinearRelation& a, const LinearRelation& b, const char* what) {
  if (a.ambient() != b.ambient()) throw DimensionError(std::string(what) + ": relations live in different spaces");
}

ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

// -i(F* G - G* F), the form whose sign decides dissipativity.
ComplexMatrix dissipation_form(const LinearRelation& t) {
  const ComplexMatrix f = t.first();
  const ComplexMatrix g = t.second();
  return hermitian_part(-kI * (f.adjoint() * g - g.adjoint() * f));
}

// Blocks built from an orthonormal basis have unit scale, so sigma_min is
// measured against max(sigma_max, 1) rather than sigma_max alone.
bool square_invertible(const ComplexMatrix& a) {
  return a.rows() == a.cols() && a.rows() > 0 && reciprocal_condition(a, 1.0) >= kInvertibleRcond;
}

}  // namespace

LinearRelation LinearRelation::from_span(Index n, const ComplexMatrix& columns, const TolerancePolicy& tol) {
  if (columns.rows() != 2 * n) throw DimensionError("LinearRelation: spanning set must have 2n rows");
  require_finite(columns, "LinearRelation spanning set");
  return LinearRelation(n, range_basis(columns, tol));
}

LinearRelation LinearRelation::graph_of(const ComplexMatrix& a) {
  require_square(a, "graph_of");
  const Index n = a.rows();
  return from_span(n, vstack(ComplexMatrix::Identity(n, n), a));
}

LinearRelation LinearRelation::zero(Index n) { return LinearRelation(n, ComplexMatrix(2 * n, 0)); }

LinearRelation LinearRelation::full(Index n) { return LinearRelation(n, ComplexMatrix::Identity(2 * n, 2 * n)); }

LinearRelation LinearRelation::pure_mul(Index n) {
  return LinearRelation(n, vstack(ComplexMatrix::Zero(n, n), ComplexMatrix::Identity(n, n)));
}

LinearRelation from_pair_at(const NevanlinnaPair& pair, cplx z, const TolerancePolicy& tol) {
  return LinearRelation::from_span(pair.dim(), pair.stacked(z), tol);
}

RelationParts parts(const LinearRelation& t, const TolerancePolicy& tol) {
  const ComplexMatrix f = t.first();
  const ComplexMatrix g = t.second();
  RelationParts p;
  p.dom = range_basis(f, tol);
  p.ran = range_basis(g, tol);
  p.ker = range_basis(f * null_space(g, tol), tol);
  p.mul = range_basis(g * null_space(f, tol), tol);
  if (t.dim() == 0) {
    p.dom = p.ran = p.ker = p.mul = ComplexMatrix(t.ambient(), 0);
  }
  return p;
}

LinearRelation adjoint(const LinearRelation& t, const TolerancePolicy& tol) {
  const Index n = t.ambient();
  if (t.dim() == 0) return LinearRelation::full(n);
  const ComplexMatrix rotated = vstack(-t.second(), t.first());
  return LinearRelation::from_span(n, null_space(rotated.adjoint(), tol), tol);
}

bool is_symmetric(const LinearRelation& t, const TolerancePolicy& tol) {
  if (t.dim() == 0) return true;
  return spectral_norm(dissipation_form(t)) <= tol.eps_eq;
}

bool is_dissipative(const LinearRelation& t, const TolerancePolicy& tol) {
  if (t.dim() == 0) return true;
  return is_psd(dissipation_form(t), tol).psd;
}

bool is_accumulative(const LinearRelation& t, const TolerancePolicy& tol) {
  if (t.dim() == 0) return true;
  return is_psd(-dissipation_form(t), tol).psd;
}

bool is_maximal_dissipative(const LinearRelation& t, const TolerancePolicy& tol) {
  if (t.dim() != t.ambient()) return false;
  return is_dissipative(t, tol) && square_invertible(t.second() + kI * t.first());
}

bool is_maximal_accumulative(const LinearRelation& t, const TolerancePolicy& tol) {
  if (t.dim() != t.ambient()) return false;
  return is_accumulative(t, tol) && square_invertible(t.second() - kI * t.first());
}

bool is_selfadjoint(const LinearRelation& t, const TolerancePolicy& tol) {
  if (t.dim() != t.ambient() || !is_symmetric(t, tol)) return false;
  if (!square_invertible(t.second() + kI * t.first()) || !square_invertible(t.second() - kI * t.first())) {
    return false;
  }
  return subspace_distance(adjoint(t, tol).basis(), t.basis()) <= tol.eps_rank;
}

std::optional<ComplexMatrix> resolvent_at(const LinearRelation& t, cplx z) {
  const ComplexMatrix shifted = t.second() - z * t.first();
  if (!square_invertible(shifted)) return std::nullopt;
  return solve_right(t.first(), shifted);
}

LinearRelation intersect(const LinearRelation& a, const LinearRelation& b, const TolerancePolicy& tol) {
  require_same_ambient(a, b, "intersect");
  const Index n = a.ambient();
  if (a.dim() == 0 || b.dim() == 0) return LinearRelation::zero(n);
  const ComplexMatrix coeff = null_space(hstack(a.basis(), -b.basis()), tol);
  if (coeff.cols() == 0) return LinearRelation::zero(n);
  return LinearRelation::from_span(n, a.basis() * coeff.topRows(a.dim()), tol);
}

LinearRelation componentwise_sum(const LinearRelation& a, const LinearRelation& b, const TolerancePolicy& tol) {
  require_same_ambient(a, b, "componentwise_sum");
  return LinearRelation::from_span(a.ambient(), hstack(a.basis(), b.basis()), tol);
}

LinearRelation operator_sum(const LinearRelation& a, const LinearRelation& b, const TolerancePolicy& tol) {
  require_same_ambient(a, b, "operator_sum");
  const Index n = a.ambient();
  if (a.dim() == 0 || b.dim() == 0) return LinearRelation::zero(n);
  // Coefficients (x; y) with F_A x = F_B y give (F_A x, G_A x + G_B y).
  const ComplexMatrix coeff = null_space(hstack(a.first(), -b.first()), tol);
  if (coeff.cols() == 0) return LinearRelation::zero(n);
  const ComplexMatrix x = coeff.topRows(a.dim());
  const ComplexMatrix y = coeff.bottomRows(b.dim());
  return LinearRelation::from_span(n, vstack(a.first() * x, a.second() * x + b.second() * y), tol);
}

LinearRelation symmetric_core(const NevanlinnaPair& pair, cplx z, const TolerancePolicy& tol) {
  if (!(z.imag() > 0.0)) throw DomainError("symmetric_core: requires Im z > 0");
  const ComplexMatrix kernel = hermitian_part(pair_kernel(pair, z, z, tol));
  const HermitianEigen eig = eig_hermitian(kernel);
  const double cutoff = tol.eps_rank * (1.0 + spectral_norm(kernel));
  Index null_dim = 0;
  while (null_dim < eig.values.size() && eig.values(null_dim) <= cutoff) ++null_dim;
  if (null_dim == 0) return LinearRelation::zero(pair.dim());
  return LinearRelation::from_span(pair.dim(), pair.stacked(z) * eig.vectors.leftCols(null_dim), tol);
}

ComplexMatrix eigenspace(const LinearRelation& t, cplx a, const TolerancePolicy& tol) {
  if (t.dim() == 0) return ComplexMatrix(t.ambient(), 0);
  const ComplexMatrix f = t.first();
  const ComplexMatrix coeff = null_space(t.second() - a * f, tol, 1.0 + std::abs(a));
  if (coeff.cols() == 0) return ComplexMatrix(t.ambient(), 0);
  return range_basis(f * coeff, tol);
}

bool contains(const LinearRelation& t, const LinearRelation& s, const TolerancePolicy& tol) {
  require_same_ambient(t, s, "contains");
  return contains(t.basis(), s.basis(), tol);
}

double relation_distance(const LinearRelation& a, const LinearRelation& b) {
  require_same_ambient(a, b, "relation_distance");
  return subspace_distance(a.basis(), b.basis());
}

}  // namespace nevlab
