#include <cmath>
#include <vector>

#include "doctest.h"
#include "nevlab/pairs.hpp"
#include "nevlab/random.hpp"
#include "nevlab/relations.hpp"
#include "support/models.hpp"

using namespace nevlab;
using namespace nevlab::testing;

namespace {

const NevanlinnaPair& identity_pair() {
  static const NevanlinnaPair p = canonical_pair(as_family(identity_rep(1)));
  return p;
}

NevanlinnaPair mul_pair(Index n) {
  return constant_pair(ComplexMatrix::Zero(n, n), ComplexMatrix::Identity(n, n), "mul");
}

}  // namespace

TEST_CASE("canonical pair of F(z) = z") {
  for (const cplx z : upper_half(default_grid())) {
    const PairValue v = identity_pair()(z);
    CHECK(std::abs(v.phi(0, 0) - 1.0 / (z + kI)) < 1e-15);
    CHECK(std::abs(v.psi(0, 0) - z / (z + kI)) < 1e-14);
  }
  CHECK_THROWS_AS(identity_pair()(cplx(1.0, 0.0)), DomainError);
}

TEST_CASE("canonical pair of a constant and of diag(z, 3)") {
  const Family zero(1, [](cplx) { return scalar(0.0); }, "0");
  const PairValue v = canonical_pair(zero)(kI);
  CHECK(std::abs(v.phi(0, 0) + kI) < 1e-15);
  CHECK(std::abs(v.psi(0, 0)) < 1e-15);

  const NevanlinnaPair d = canonical_pair(as_family(diag_z_3()));
  ComplexMatrix seed(4, 1);
  seed << 0.0, 1.0, 0.0, 3.0;
  for (const cplx z : default_grid()) CHECK(contains(from_pair_at(d, z), LinearRelation::from_span(2, seed)));
}

TEST_CASE("pair axioms") {
  const PairReport ok = validate(identity_pair(), default_grid());
  CHECK(ok.pass);
  CHECK(ok.worst_np2 <= 1e-12);

  const NevanlinnaPair wrong = constant_pair(ComplexMatrix::Identity(1, 1), scalar(-kI));
  const PairReport bad = validate(wrong, {kI});
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.samples[0].np1);

  CHECK(validate(mul_pair(2), default_grid()).pass);

  Rng rng = make_rng(31, 0);
  for (int trial = 0; trial < 30; ++trial) {
    CHECK(validate(canonical_pair(as_family(random_rep(rng))), default_grid()).pass);
    CHECK(validate(mul_carrying_pair(rng), default_grid()).pass);
  }
}

TEST_CASE("pair kernel") {
  for (const cplx z : upper_half(default_grid())) {
    CHECK(std::abs(pair_kernel(identity_pair(), z, z)(0, 0) - 1.0 / std::norm(z + kI)) < 1e-14);
  }
  CHECK(std::abs(pair_kernel(identity_pair(), kI, kI)(0, 0) - 0.25) < 1e-15);
  CHECK(pair_kernel(mul_pair(2), kI, cplx(1, 2)).norm() == 0.0);
  CHECK_THROWS_AS(pair_kernel(identity_pair(), kI, kI * -1.0), DomainError);

  Rng rng = make_rng(32, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const NevanlinnaPair p = canonical_pair(as_family(random_uniform_rep(rng)));
    CHECK(eig_hermitian(pair_kernel(p, kI, kI)).values(0) > 0.0);
  }
}

TEST_CASE("cayley transform") {
  for (const cplx z : upper_half(default_grid())) {
    CHECK(std::abs(cayley(identity_pair(), z)(0, 0) - (z - kI) / (z + kI)) < 1e-14);
    CHECK((cayley(mul_pair(2), z) - ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
    const ComplexMatrix c = cayley(canonical_pair(as_family(diag_z_3())), z);
    CHECK(std::abs(c(0, 0) - (z - kI) / (z + kI)) < 1e-14);
    CHECK(std::abs(c(1, 1) - cplx(3, -1) / cplx(3, 1)) < 1e-14);
    CHECK(std::abs(std::abs(c(1, 1)) - 1.0) < 1e-14);
  }
  CHECK(std::abs(cayley(identity_pair(), kI)(0, 0)) < 1e-15);
  CHECK(std::abs(cayley(identity_pair(), cplx(0, 2))(0, 0)) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("schur kernel chain") {
  CHECK(std::abs(schur_kernel(identity_pair(), kI, kI)(0, 0) - 0.5) < 1e-12);
  CHECK(kernel_identity_residual(identity_pair(), kI, kI) < 1e-15);
  CHECK(schur_kernel(mul_pair(1), kI, cplx(2, 3)).norm() < 1e-15);

  Rng rng = make_rng(33, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const NevanlinnaPair p = canonical_pair(as_family(random_rep(rng)));
    std::vector<cplx> pts;
    for (int k = 0; k < 4; ++k) pts.push_back(random_point(rng, true));
    const Index n = p.dim();
    ComplexMatrix gram(4 * n, 4 * n);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        gram.block(a * n, b * n, n, n) = schur_kernel(p, pts[b], pts[a]);
        CHECK(kernel_identity_residual(p, pts[b], pts[a]) <= 1e-10);
      }
    }
    CHECK(eig_hermitian(hermitian_part(gram)).values(0) >= -1e-10 * (1.0 + spectral_norm(gram)));
  }
}

TEST_CASE("J-unitaries") {
  const ComplexMatrix j = krein_j(2);
  CHECK((j * j - ComplexMatrix::Identity(4, 4)).norm() < 1e-15);
  CHECK((j.adjoint() - j).norm() == 0.0);
  CHECK_THROWS_AS(JUnitary(2.0 * ComplexMatrix::Identity(4, 4)), DomainError);
  CHECK_THROWS_AS(JUnitary::shift(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}), DomainError);

  Rng rng = make_rng(34, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const JUnitary w = random_j_unitary(3, rng);
    const ComplexMatrix m = w.matrix();
    CHECK((m.adjoint() * krein_j(3) * m - krein_j(3)).norm() <= 1e-12 * (1.0 + m.squaredNorm()));
  }
}

TEST_CASE("pair kernel is invariant under J-unitary transforms") {
  Rng rng = make_rng(35, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const NevanlinnaPair p = canonical_pair(as_family(random_rep(rng)));
    const NevanlinnaPair q = transform(p, random_j_unitary(p.dim(), rng));
    const cplx z = random_point(rng), w = random_point(rng);
    if (std::abs(z - std::conj(w)) < 1e-3) continue;
    const ComplexMatrix n = pair_kernel(p, z, w);
    CHECK(spectral_norm(pair_kernel(q, z, w) - n) <= 1e-9 * (1.0 + spectral_norm(n)));
  }
}

TEST_CASE("standard transforms") {
  const NevanlinnaPair same = transform(identity_pair(), JUnitary::identity(1));
  for (const cplx z : default_grid()) {
    CHECK((same(z).phi - identity_pair()(z).phi).norm() == 0.0);
    CHECK((same(z).psi - identity_pair()(z).psi).norm() == 0.0);
  }

  const NevanlinnaPair inv = inverse_transform(identity_pair());
  for (const cplx z : default_grid()) {
    const LinearRelation expected = LinearRelation::graph_of(scalar(-1.0 / z));
    CHECK(relation_distance(from_pair_at(inv, z), expected) < 1e-12);
  }
  CHECK(std::abs(pair_kernel(inv, kI, kI)(0, 0) - 0.25) < 1e-15);

  const NevanlinnaPair shifted = shift_transform(identity_pair(), scalar(1.0));
  for (const cplx z : default_grid()) {
    CHECK(relation_distance(from_pair_at(shifted, z), LinearRelation::graph_of(scalar(z + 1.0))) < 1e-12);
  }

  CHECK_NOTHROW(herglotz_shift_transform(identity_pair(), identity_rep(1)));
  const HerglotzRep degenerate(ComplexMatrix::Zero(2, 2), diag({1.0, 0.0}), OperatorMeasure(2));
  CHECK_THROWS_AS(herglotz_shift_transform(canonical_pair(as_family(identity_rep(2))), degenerate), DomainError);
}

TEST_CASE("pair equivalence") {
  const NevanlinnaPair doubled = explicit_pair(
      1,
      [](cplx z) {
        const PairValue v = identity_pair()(z);
        return PairValue{2.0 * v.phi, 2.0 * v.psi};
      },
      "2x");
  CHECK(equivalent(identity_pair(), doubled, default_grid()));
  const NevanlinnaPair plus_one = canonical_pair(as_family(HerglotzRep(scalar(1.0), scalar(1.0), OperatorMeasure(1))));
  CHECK_FALSE(equivalent(identity_pair(), plus_one, default_grid()));

  // A J-unitary fixes the graph of F(z) = z only when it maps it to itself;
  // a generic shift does not.
  CHECK_FALSE(equivalent(identity_pair(), transform(identity_pair(), JUnitary::shift(scalar(0.7))), default_grid()));
  CHECK(equivalent(identity_pair(), transform(identity_pair(), JUnitary::congruence(scalar(-1.0))), default_grid()));
}

TEST_CASE("direct sums and origins") {
  const NevanlinnaPair s = direct_sum(identity_pair(), mul_pair(1));
  CHECK(s.dim() == 2);
  CHECK(s.stacked(kI).rows() == 4);
  CHECK(std::string(to_string(s.origin())).size() > 0);
  CHECK(identity_pair().origin() == PairOrigin::Canonical);
  CHECK(mul_pair(1).origin() == PairOrigin::Constant);
}
