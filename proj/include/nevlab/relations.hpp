#pragma once
// Finite-dimensional linear relations: subspaces of H x H stored as an
// orthonormal basis of the stacked 2n x k form [F; G].

#include <optional>

#include "nevlab/matnum.hpp"
#include "nevlab/pairs.hpp"

namespace nevlab {

class LinearRelation {
 public:
  /// Orthonormalizes the columns of the 2n x m matrix; rank is decided with eps_rank.
  static LinearRelation from_span(Index n, const ComplexMatrix& columns, const TolerancePolicy& tol = {});
  static LinearRelation graph_of(const ComplexMatrix& a);
  static LinearRelation zero(Index n);          // {0} x {0}
  static LinearRelation full(Index n);          // H x H
  static LinearRelation pure_mul(Index n);      // {0} x H

  Index ambient() const noexcept { return n_; }
  Index dim() const noexcept { return basis_.cols(); }
  const ComplexMatrix& basis() const noexcept { return basis_; }
  auto first() const { return basis_.topRows(n_); }
  auto second() const { return basis_.bottomRows(n_); }

 private:
  LinearRelation(Index n, ComplexMatrix basis) : n_(n), basis_(std::move(basis)) {}

  Index n_;
  ComplexMatrix basis_;
};

/// Column span of [Phi(z); Psi(z)].
LinearRelation from_pair_at(const NevanlinnaPair& pair, cplx z, const TolerancePolicy& tol = {});

struct RelationParts {
  ComplexMatrix dom;
  ComplexMatrix ran;
  ComplexMatrix ker;
  ComplexMatrix mul;
};

RelationParts parts(const LinearRelation& t, const TolerancePolicy& tol = {});

/// Orthogonal complement of {(-g, f) : (f, g) in T}.
LinearRelation adjoint(const LinearRelation& t, const TolerancePolicy& tol = {});

bool is_symmetric(const LinearRelation& t, const TolerancePolicy& tol = {});
bool is_dissipative(const LinearRelation& t, const TolerancePolicy& tol = {});
bool is_accumulative(const LinearRelation& t, const TolerancePolicy& tol = {});
bool is_maximal_dissipative(const LinearRelation& t, const TolerancePolicy& tol = {});
bool is_maximal_accumulative(const LinearRelation& t, const TolerancePolicy& tol = {});
bool is_selfadjoint(const LinearRelation& t, const TolerancePolicy& tol = {});

/// (T - z)^{-1} = F (G - z F)^{-1}; empty when z is not in the resolvent set.
std::optional<ComplexMatrix> resolvent_at(const LinearRelation& t, cplx z);

LinearRelation intersect(const LinearRelation& a, const LinearRelation& b, const TolerancePolicy& tol = {});
/// {(f + h, g + k) : (f, g) in A, (h, k) in B}
LinearRelation componentwise_sum(const LinearRelation& a, const LinearRelation& b, const TolerancePolicy& tol = {});
/// {(f, g + h) : (f, g) in A, (f, h) in B}
LinearRelation operator_sum(const LinearRelation& a, const LinearRelation& b, const TolerancePolicy& tol = {});

/// {(Phi(z) u, Psi(z) u) : u in ker N(z, z)}, Im z > 0.
LinearRelation symmetric_core(const NevanlinnaPair& pair, cplx z, const TolerancePolicy& tol = {});

/// ker(T - a) = {f : (f, a f) in T}, as an orthonormal basis of H.
ComplexMatrix eigenspace(const LinearRelation& t, cplx a, const TolerancePolicy& tol = {});

/// S is a subset of T when every basis vector of S lies in T within eps_rank.
bool contains(const LinearRelation& t, const LinearRelation& s, const TolerancePolicy& tol = {});

double relation_distance(const LinearRelation& a, const LinearRelation& b);

}  // namespace nevlab
