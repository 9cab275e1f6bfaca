#include <cmath>

#include "doctest.h"
#include "nevlab/random.hpp"
#include "nevlab/relations.hpp"
#include "support/models.hpp"

using namespace nevlab;
using namespace nevlab::testing;

namespace {

LinearRelation mul_only(Index n) { return LinearRelation::pure_mul(n); }

ComplexMatrix nilpotent() { return ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}; }

ComplexMatrix e(Index n, Index k) { return ComplexMatrix::Identity(n, n).col(k); }

}  // namespace

TEST_CASE("relations from pairs") {
  const NevanlinnaPair id = canonical_pair(as_family(identity_rep(1)));
  const LinearRelation at_i = from_pair_at(id, kI);
  CHECK(at_i.dim() == 1);
  CHECK(relation_distance(at_i, LinearRelation::graph_of(scalar(kI))) < 1e-14);

  const NevanlinnaPair mul = constant_pair(ComplexMatrix::Zero(2, 2), ComplexMatrix::Identity(2, 2));
  CHECK(relation_distance(from_pair_at(mul, kI), mul_only(2)) < 1e-15);

  const LinearRelation d = from_pair_at(canonical_pair(as_family(diag_z_3())), cplx(0, 2));
  CHECK(d.dim() == 2);
  ComplexMatrix v(4, 1);
  v << 0.0, 1.0, 0.0, 3.0;
  v /= std::sqrt(10.0);
  CHECK(containment_defect(v, d.basis()) < 1e-14);
}

TEST_CASE("parts") {
  const RelationParts zero = parts(LinearRelation::graph_of(scalar(0.0)));
  CHECK(zero.dom.cols() == 1);
  CHECK(zero.ker.cols() == 1);
  CHECK(zero.ran.cols() == 0);
  CHECK(zero.mul.cols() == 0);

  const RelationParts m = parts(mul_only(1));
  CHECK(m.dom.cols() == 0);
  CHECK(m.mul.cols() == 1);

  const RelationParts nil = parts(LinearRelation::graph_of(nilpotent()));
  CHECK(subspace_distance(nil.ker, e(2, 0)) < 1e-14);
  CHECK(subspace_distance(nil.ran, e(2, 0)) < 1e-14);
  CHECK(nil.mul.cols() == 0);
}

TEST_CASE("adjoints") {
  const LinearRelation zero = LinearRelation::graph_of(scalar(0.0));
  CHECK(relation_distance(adjoint(zero), zero) < 1e-14);
  CHECK(relation_distance(adjoint(mul_only(1)), mul_only(1)) < 1e-14);
  CHECK(relation_distance(adjoint(LinearRelation::graph_of(nilpotent())),
                          LinearRelation::graph_of(nilpotent().adjoint())) < 1e-14);
  CHECK(relation_distance(adjoint(LinearRelation::zero(2)), LinearRelation::full(2)) < 1e-14);

  Rng rng = make_rng(41, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + trial % 4;
    const Index m = 1 + trial % (2 * n);
    const LinearRelation t = LinearRelation::from_span(n, random_gaussian(2 * n, m, rng));
    CHECK(relation_distance(adjoint(adjoint(t)), t) <= 1e-10);
    CHECK(adjoint(t).dim() == 2 * n - t.dim());
    const ComplexMatrix a = random_gaussian(n, n, rng);
    CHECK(relation_distance(adjoint(LinearRelation::graph_of(a)), LinearRelation::graph_of(a.adjoint())) < 1e-10);
  }
}

TEST_CASE("sign predicates") {
  Rng rng = make_rng(42, 0);
  const LinearRelation herm = LinearRelation::graph_of(random_hermitian(3, rng));
  CHECK(is_symmetric(herm));
  CHECK(is_selfadjoint(herm));

  const LinearRelation up = LinearRelation::graph_of(scalar(kI));
  CHECK(is_dissipative(up));
  CHECK_FALSE(is_symmetric(up));
  CHECK(is_maximal_dissipative(up));
  CHECK_FALSE(is_accumulative(up));

  const LinearRelation down = LinearRelation::graph_of(scalar(-kI));
  CHECK(is_accumulative(down));
  CHECK(is_maximal_accumulative(down));
  CHECK_FALSE(is_dissipative(down));

  // Graph of 0 on span e1 only: symmetric, not selfadjoint.
  const LinearRelation partial = LinearRelation::from_span(2, e(4, 0));
  CHECK(is_symmetric(partial));
  CHECK_FALSE(is_selfadjoint(partial));
  CHECK_FALSE(is_maximal_dissipative(partial));

  CHECK(is_selfadjoint(mul_only(1)));
}

TEST_CASE("resolvents") {
  const auto r = resolvent_at(LinearRelation::graph_of(scalar(0.0)), kI);
  REQUIRE(r.has_value());
  CHECK(std::abs((*r)(0, 0) - kI) < 1e-15);

  const auto m = resolvent_at(mul_only(1), cplx(0.3, 2.0));
  REQUIRE(m.has_value());
  CHECK(m->norm() < 1e-15);

  CHECK_FALSE(resolvent_at(LinearRelation::graph_of(scalar(1.0)), 1.0).has_value());

  Rng rng = make_rng(43, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_hermitian(3, rng);
    const cplx z = random_point(rng);
    const auto res = resolvent_at(LinearRelation::graph_of(a), z);
    REQUIRE(res.has_value());
    CHECK(spectral_norm(*res - inverse(a - z * ComplexMatrix::Identity(3, 3))) < 1e-10);
  }
}

TEST_CASE("relation algebra") {
  Rng rng = make_rng(44, 0);
  const LinearRelation t = LinearRelation::from_span(2, random_gaussian(4, 2, rng));
  CHECK(relation_distance(intersect(t, t), t) < 1e-12);

  const LinearRelation span = componentwise_sum(LinearRelation::graph_of(scalar(0.0)), mul_only(1));
  CHECK(span.dim() == 2);
  CHECK(relation_distance(span, LinearRelation::full(1)) < 1e-14);

  const ComplexMatrix a = random_gaussian(3, 3, rng);
  const ComplexMatrix b = random_gaussian(3, 3, rng);
  CHECK(relation_distance(operator_sum(LinearRelation::graph_of(a), LinearRelation::graph_of(b)),
                          LinearRelation::graph_of(a + b)) < 1e-10);

  CHECK(intersect(LinearRelation::graph_of(scalar(1.0)), LinearRelation::graph_of(scalar(2.0))).dim() == 0);
}

TEST_CASE("symmetric cores") {
  const NevanlinnaPair id = canonical_pair(as_family(identity_rep(1)));
  CHECK(symmetric_core(id, kI).dim() == 0);

  ComplexMatrix v(4, 1);
  v << 0.0, 1.0, 0.0, 3.0;
  const NevanlinnaPair d = canonical_pair(as_family(diag_z_3()));
  for (const cplx z : upper_half(default_grid())) {
    const LinearRelation core = symmetric_core(d, z);
    CHECK(core.dim() == 1);
    CHECK(relation_distance(core, LinearRelation::from_span(2, v)) < 1e-10);
  }

  const NevanlinnaPair block =
      direct_sum(d, constant_pair(ComplexMatrix::Zero(1, 1), ComplexMatrix::Identity(1, 1)));
  const LinearRelation core = symmetric_core(block, kI);
  CHECK(core.dim() == 2);
  ComplexMatrix w = ComplexMatrix::Zero(6, 2);
  w(1, 0) = 1.0;
  w(4, 0) = 3.0;
  w(5, 1) = 1.0;
  CHECK(contains(core, LinearRelation::from_span(3, w)));
}

TEST_CASE("eigenspaces") {
  const LinearRelation d = from_pair_at(canonical_pair(as_family(diag_z_3())), cplx(1, 1));
  CHECK(subspace_distance(eigenspace(d, 3.0), e(2, 1)) < 1e-10);
  CHECK(eigenspace(d, 2.0).cols() == 0);
  CHECK(eigenspace(mul_only(2), 0.0).cols() == 0);
}
