#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nevlab/analysis.hpp"
#include "nevlab/random.hpp"
#include "support/models.hpp"

using namespace nevlab;
using namespace nevlab::testing;

namespace {

double poisson(cplx z, double t) { return z.imag() / ((z.real() - t) * (z.real() - t) + z.imag() * z.imag()); }

// Brute-force c2: scan Poisson-kernel ratios over a dense t grid and the
// linear part y2 / y1.
double scanned_c2(cplx z1, cplx z2) {
  double best = z2.imag() / z1.imag();
  for (double s = -1.0; s <= 1.0; s += 2e-6) {
    const double t = std::tan(s * M_PI / 2.0 * 0.999999);
    best = std::max(best, poisson(z2, t) / poisson(z1, t));
  }
  return best;
}

double scanned_modulus_ratio(cplx z) {
  double best = std::abs(z);  // t -> infinity
  for (double s = -1.0; s <= 1.0; s += 2e-6) {
    const double t = std::tan(s * M_PI / 2.0 * 0.999999);
    best = std::max(best, std::abs(1.0 + z * t) / std::abs(t - z));
  }
  return best;
}

}  // namespace

TEST_CASE("harnack constants") {
  const HarnackPair same = harnack_constants(kI, kI);
  CHECK(same.c1 == doctest::Approx(1.0));
  CHECK(same.c2 == doctest::Approx(1.0));

  const HarnackPair two = harnack_constants(kI, cplx(0, 2));
  CHECK(std::abs(two.c2 - 2.0) < 1e-12);
  CHECK(std::abs(two.c1 - 0.5) < 1e-12);

  Rng rng = make_rng(61, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const cplx z1 = random_point(rng, true), z2 = random_point(rng, true);
    const HarnackPair h = harnack_constants(z1, z2);
    CHECK(h.c2 == doctest::Approx(scanned_c2(z1, z2)).epsilon(1e-6));
    CHECK(h.c1 == doctest::Approx(1.0 / scanned_c2(z2, z1)).epsilon(1e-6));
    CHECK(h.c1 <= h.c2);
  }
  CHECK_THROWS_AS(harnack_constants(kI, -kI), DomainError);
}

TEST_CASE("harnack certificates") {
  Rng rng = make_rng(62, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const HarnackCertificate cert = certify_harnack(random_point(rng, true), random_point(rng, true), 1000, trial);
    CHECK(cert.pass);
    CHECK(cert.worst_violation <= 1e-12);
  }
}

TEST_CASE("quadratic ratio supremum") {
  Rng rng = make_rng(63, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::array<double, 3> num{uniform(-2, 2, rng), uniform(-2, 2, rng), uniform(-2, 2, rng)};
    const double b2 = uniform(0.5, 2, rng), b1 = uniform(-1, 1, rng);
    const std::array<double, 3> den{b1 * b1 / (4 * b2) + uniform(0.1, 2, rng), b1, b2};
    double sampled = num[2] / den[2];
    for (double s = -1.0; s <= 1.0; s += 1e-5) {
      const double t = std::tan(s * M_PI / 2.0 * 0.99999);
      sampled = std::max(sampled, (num[2] * t * t + num[1] * t + num[0]) / (den[2] * t * t + den[1] * t + den[0]));
    }
    const double exact = sup_quadratic_ratio(num, den);
    CHECK(exact >= sampled - 1e-9 * (1.0 + std::abs(sampled)));
    CHECK(exact <= sampled + 1e-6 * (1.0 + std::abs(sampled)));
  }
  CHECK_THROWS_AS(sup_quadratic_ratio({1, 0, 1}, {-1, 0, 1}), DomainError);
}

TEST_CASE("form sandwich") {
  const SandwichReport id = form_sandwich_check(as_family(identity_rep(2)), default_grid(), kI, 20, 1);
  CHECK(id.pass);
  for (const SandwichRow& row : id.rows) {
    CHECK(row.min_ratio == doctest::Approx(row.z.imag()));
    CHECK(row.max_ratio == doctest::Approx(row.z.imag()));
    CHECK(row.c1 <= row.min_ratio * (1 + 1e-12));
    CHECK(row.max_ratio <= row.c2 * (1 + 1e-12));
  }

  const SandwichReport inv = form_sandwich_check(as_family(minus_inverse_rep()), default_grid(), kI, 5, 1);
  CHECK(inv.pass);
  for (const SandwichRow& row : inv.rows) CHECK(row.min_ratio == doctest::Approx(row.z.imag() / std::norm(row.z)));

  Rng rng = make_rng(64, 0);
  for (int trial = 0; trial < 20; ++trial) {
    CHECK(form_sandwich_check(as_family(random_rep(rng)), default_grid(), random_point(rng, true), 100, trial).pass);
  }
}

TEST_CASE("additive split") {
  Rng rng = make_rng(65, 0);
  const HerglotzRep base = random_rep(rng, {3, 4});
  const HerglotzRep pure(ComplexMatrix::Zero(base.dim(), base.dim()), base.b1(), base.measure());
  const SplitResult zero = split_bounded_imag(pure, ComplexMatrix::Zero(base.dim(), base.dim()));
  CHECK(zero.pass);
  CHECK(spectral_norm(zero.t) < 1e-12);

  const HerglotzRep two = random_rep(rng, {2, 4});
  if (two.dim() == 2) {
    const ComplexMatrix big = diag({1e6, -1e6});
    const HerglotzRep p2(ComplexMatrix::Zero(2, 2), two.b1(), two.measure());
    const SplitResult s = split_bounded_imag(p2, big);
    CHECK(s.pass);
    CHECK(spectral_norm(s.t - big) <= 1e-10 * spectral_norm(big));
  }

  for (int trial = 0; trial < 20; ++trial) {
    const HerglotzRep rep = random_rep(rng);
    const HerglotzRep p(ComplexMatrix::Zero(rep.dim(), rep.dim()), rep.b1(), rep.measure());
    const ComplexMatrix t0 = random_hermitian(rep.dim(), rng);
    // Evaluate F through a different summation order than G uses.
    const Family f(rep.dim(), [p, t0](cplx z) { return ComplexMatrix(t0 + (z * p.b1() + (evaluate(p, z) - z * p.b1()))); },
                   "planted");
    const SplitResult s = split_bounded_imag(f, p.b1(), p.measure());
    CHECK(s.pass);
    CHECK(spectral_norm(s.t - t0) <= 1e-10 * (1.0 + spectral_norm(t0)));
  }
}

TEST_CASE("black-box split estimates the measure") {
  const HerglotzRep rep(diag({0.5, -1.0}), diag({0.2, 0.1}),
                        OperatorMeasure(2, {{-1.0, diag({1.0, 0.5})}, {2.0, ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}}}}));
  const ComplexMatrix t0 = ComplexMatrix{{3.0, cplx(0, 1)}, {cplx(0, -1), -2.0}};
  BlackBoxSplitOptions opts;
  opts.bins = {{-1.5, -0.5}, {1.5, 2.5}};
  const SplitResult s = split_black_box(with_offset(rep, t0), opts);
  CHECK(s.pass);
  CHECK(spectral_norm(s.t - (rep.b0() + t0)) <= 1e-2 * (1.0 + spectral_norm(t0)));
}

TEST_CASE("resolvent-type estimates") {
  CHECK(c2_of(kI) == 1.0);
  CHECK(std::abs(c2_of(cplx(0, 2)) - 2.0) <= 1e-9);
  Rng rng = make_rng(66, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const cplx z = random_point(rng, true);
    CHECK(c2_of(z) == doctest::Approx(scanned_modulus_ratio(z)).epsilon(1e-6));
  }

  const HerglotzRep atom(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2),
                         OperatorMeasure(2, {{0.0, ComplexMatrix::Identity(2, 2)}}));
  CHECK(weak_strong_check(atom, kI, 50, 1).pass);
  CHECK(factor_check(atom, kI).pass);

  RepOptions opts;
  opts.common_null = true;
  for (int trial = 0; trial < 30; ++trial) {
    const HerglotzRep rep = random_rep(rng, trial % 2 ? opts : RepOptions{});
    const cplx z = random_point(rng, true);
    const BoundReport w = weak_strong_check(rep, z, 20, trial);
    const BoundReport f = factor_check(rep, z);
    CHECK(w.pass);
    CHECK(f.pass);
    CHECK(f.kernel_leak <= 1e-8);
  }
}

TEST_CASE("log-slope fits") {
  RealVector s(40);
  for (Index j = 0; j < 40; ++j) s(j) = 5.0 * std::pow(static_cast<double>(j + 1), -2.5);
  int used = 0;
  CHECK(fit_log_slope(s, 5, 30, 1e-14, &used) == doctest::Approx(-2.5));
  CHECK(used == 26);
  RealVector tiny = RealVector::Constant(10, 1e-20);
  CHECK(std::isnan(fit_log_slope(tiny, 1, 10)));
}

TEST_CASE("schatten decay") {
  const Index n = 30;
  RealVector k(n);
  for (Index j = 0; j < n; ++j) k(j) = std::ldexp(1.0, -static_cast<int>(j));
  const ComplexMatrix km = k.cast<cplx>().asDiagonal();
  const Family geometric(n, [km](cplx z) { return ComplexMatrix(km / (1.5 - z)); }, "K/(t0 - z)");
  const DecayReport g = schatten_decay(geometric, default_grid(), 1, 30);
  CHECK(g.pass);
  CHECK(g.spread < 1e-10);

  const DecayReport flat = schatten_decay(as_family(identity_rep(10)), default_grid(), 1, 10);
  CHECK(flat.pass);
  CHECK_FALSE(flat.decays);
  CHECK(flat.verdict == "no decay: not in any S_p");

  RealVector w(n);
  for (Index j = 0; j < n; ++j) w(j) = std::pow(static_cast<double>(j + 1), -3.0);
  const HerglotzRep cubic(ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n),
                          OperatorMeasure(n, {{0.5, w.cast<cplx>().asDiagonal()}}));
  const DecayReport c = schatten_decay(as_family(cubic), default_grid(), 1, n);
  CHECK(c.pass);
  for (const DecayRow& row : c.rows) CHECK(std::abs(row.slope + 3.0) <= 0.1);

  CHECK_THROWS_AS(schatten_decay(geometric, default_grid(), 0, 5), DomainError);
}
