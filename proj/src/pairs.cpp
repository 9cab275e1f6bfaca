#include "nevlab/pairs.hpp"

#include <algorithm>
#include <cmath>

namespace nevlab {

const char* to_string(PairOrigin origin) {
  switch (origin) {
    case PairOrigin::Canonical: return "canonical-from-family";
    case PairOrigin::Constant: return "constant";
    case PairOrigin::Transformed: return "transformed";
    case PairOrigin::Explicit: return "explicit";
  }
  return "?";
}

NevanlinnaPair::NevanlinnaPair(Index dim, Rule rule, PairOrigin origin, std::string label)
    : dim_(dim), rule_(std::move(rule)), origin_(origin), label_(std::move(label)) {
  if (!rule_) throw DomainError("NevanlinnaPair: empty rule");
}

PairValue NevanlinnaPair::operator()(cplx z) const {
  if (z.imag() == 0.0) throw DomainError("NevanlinnaPair '" + label_ + "': z must be off the real axis");
  PairValue v = rule_(z);
  if (v.phi.rows() != dim_ || v.phi.cols() != dim_ || v.psi.rows() != dim_ || v.psi.cols() != dim_) {
    throw DimensionError("NevanlinnaPair '" + label_ + "': rule returned blocks of the wrong size");
  }
  require_finite(v.phi, "Phi");
  require_finite(v.psi, "Psi");
  return v;
}

ComplexMatrix NevanlinnaPair::stacked(cplx z) const {
  const PairValue v = (*this)(z);
  ComplexMatrix t(2 * dim_, dim_);
  t << v.phi, v.psi;
  return t;
}

NevanlinnaPair canonical_pair(const Family& f) {
  const Index n = f.dim();
  auto rule = [f, n](cplx z) {
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const cplx s = z.imag() > 0.0 ? kI : -kI;
    PairValue v;
    v.phi = inverse(f(z) + s * id);
    v.psi = id - s * v.phi;
    return v;
  };
  return NevanlinnaPair(n, rule, PairOrigin::Canonical, "canonical(" + f.label() + ")");
}

NevanlinnaPair constant_pair(const ComplexMatrix& phi, const ComplexMatrix& psi, std::string label) {
  require_square(phi, "constant_pair Phi");
  if (psi.rows() != phi.rows() || psi.cols() != phi.cols()) throw DimensionError("constant_pair: block sizes differ");
  return NevanlinnaPair(phi.rows(), [phi, psi](cplx) { return PairValue{phi, psi}; }, PairOrigin::Constant,
                        std::move(label));
}

NevanlinnaPair explicit_pair(Index dim, NevanlinnaPair::Rule rule, std::string label) {
  return NevanlinnaPair(dim, std::move(rule), PairOrigin::Explicit, std::move(label));
}

NevanlinnaPair direct_sum(const NevanlinnaPair& a, const NevanlinnaPair& b) {
  auto rule = [a, b](cplx z) {
    const PairValue va = a(z);
    const PairValue vb = b(z);
    return PairValue{block_diag(va.phi, vb.phi), block_diag(va.psi, vb.psi)};
  };
  const PairOrigin origin = a.origin() == b.origin() ? a.origin() : PairOrigin::Explicit;
  return NevanlinnaPair(a.dim() + b.dim(), rule, origin, a.label() + "(+)" + b.label());
}

PairReport validate(const NevanlinnaPair& pair, const ZGrid& samples, const TolerancePolicy& tol) {
  PairReport report;
  report.pass = true;
  for (const cplx z : samples) {
    PairSample s;
    s.z = z;
    const PairValue v = pair(z);
    const PairValue vc = pair(std::conj(z));
    const double sign = z.imag() > 0.0 ? 1.0 : -1.0;
    const double scale = 1.0 + spectral_norm(v.phi) * spectral_norm(v.psi);

    // NP1: the block form is anti-Hermitian exactly, so -i(...) is Hermitian.
    const ComplexMatrix form = hermitian_part(-kI * (v.phi.adjoint() * v.psi - v.psi.adjoint() * v.phi) * sign);
    const PsdResult psd = is_psd(form, tol);
    s.np1_min_eigenvalue = psd.min_eigenvalue / scale;
    s.np1 = psd.psd;

    s.np2_residual = spectral_norm(vc.psi.adjoint() * v.phi - vc.phi.adjoint() * v.psi) / scale;
    s.np2 = s.np2_residual <= tol.eps_eq;

    const cplx is = sign * kI;
    s.np3_rcond = reciprocal_condition(v.psi + is * v.phi, spectral_norm(pair.stacked(z)));
    s.np3 = s.np3_rcond >= kInvertibleRcond;

    report.worst_np1 = std::min(report.worst_np1, s.np1_min_eigenvalue);
    report.worst_np2 = std::max(report.worst_np2, s.np2_residual);
    report.worst_np3 = std::min(report.worst_np3, s.np3_rcond);
    report.pass = report.pass && s.np1 && s.np2 && s.np3;
    report.samples.push_back(s);
  }
  return report;
}

ComplexMatrix pair_kernel(const NevanlinnaPair& pair, cplx z, cplx w, const TolerancePolicy& tol) {
  const cplx gap = z - std::conj(w);
  if (std::abs(gap) <= tol.eps_eq * (std::abs(z) + std::abs(w))) {
    throw DomainError("pair_kernel: z = conj(w) is not in the domain of the pair kernel");
  }
  const PairValue vz = pair(z);
  const PairValue vw = (w == z) ? vz : pair(w);
  return (vw.phi.adjoint() * vz.psi - vw.psi.adjoint() * vz.phi) / gap;
}

namespace {

void require_upper(cplx z, const char* what) {
  if (!(z.imag() > 0.0)) throw DomainError(std::string(what) + ": requires Im z > 0");
}

}  // namespace

ComplexMatrix cayley(const NevanlinnaPair& pair, cplx z) {
  require_upper(z, "cayley");
  const PairValue v = pair(z);
  return solve_right(v.psi - kI * v.phi, v.psi + kI * v.phi);
}

ComplexMatrix schur_kernel(const NevanlinnaPair& pair, cplx z, cplx w) {
  require_upper(z, "schur_kernel");
  require_upper(w, "schur_kernel");
  const ComplexMatrix cz = cayley(pair, z);
  const ComplexMatrix cw = (w == z) ? cz : cayley(pair, w);
  const Index n = pair.dim();
  return (ComplexMatrix::Identity(n, n) - cw.adjoint() * cz) / (-kI * (z - std::conj(w)));
}

double kernel_identity_residual(const NevanlinnaPair& pair, cplx z, cplx w) {
  const ComplexMatrix k = schur_kernel(pair, z, w);
  const PairValue vz = pair(z);
  const PairValue vw = pair(w);
  const ComplexMatrix n = pair_kernel(pair, z, w);
  // 2 (Psi+iPhi)(w)^{-*} N (Psi+iPhi)(z)^{-1}
  const ComplexMatrix left = solve((vw.psi + kI * vw.phi).adjoint(), n).x;
  const ComplexMatrix rhs = 2.0 * solve_right(left, vz.psi + kI * vz.phi);
  return spectral_norm(k - rhs) / (1.0 + spectral_norm(k));
}

ComplexMatrix krein_j(Index dim) {
  ComplexMatrix j = ComplexMatrix::Zero(2 * dim, 2 * dim);
  j.topRightCorner(dim, dim) = -kI * ComplexMatrix::Identity(dim, dim);
  j.bottomLeftCorner(dim, dim) = kI * ComplexMatrix::Identity(dim, dim);
  return j;
}

JUnitary::JUnitary(ComplexMatrix w, const TolerancePolicy& tol) : w_(std::move(w)) {
  require_square(w_, "JUnitary");
  if (w_.rows() % 2 != 0) throw DimensionError("JUnitary: size must be even");
  const ComplexMatrix j = krein_j(w_.rows() / 2);
  const double norm = spectral_norm(w_);
  if (spectral_norm(w_.adjoint() * j * w_ - j) > tol.eps_eq * (1.0 + norm * norm)) {
    throw DomainError("JUnitary: W* J W != J");
  }
}

JUnitary JUnitary::identity(Index dim) { return JUnitary(ComplexMatrix::Identity(2 * dim, 2 * dim)); }

JUnitary JUnitary::shift(const ComplexMatrix& x) {
  require_square(x, "JUnitary::shift");
  if (hermitian_defect(x) > 1e-12) throw DomainError("JUnitary::shift: X must be Hermitian");
  const Index n = x.rows();
  ComplexMatrix w = ComplexMatrix::Identity(2 * n, 2 * n);
  w.bottomLeftCorner(n, n) = hermitian_part(x);
  return JUnitary(w);
}

JUnitary JUnitary::congruence(const ComplexMatrix& y) {
  require_square(y, "JUnitary::congruence");
  return JUnitary(block_diag(inverse(y), y.adjoint()));
}

JUnitary JUnitary::swap(Index dim) {
  ComplexMatrix w = ComplexMatrix::Zero(2 * dim, 2 * dim);
  w.topRightCorner(dim, dim) = -ComplexMatrix::Identity(dim, dim);
  w.bottomLeftCorner(dim, dim) = ComplexMatrix::Identity(dim, dim);
  return JUnitary(w);
}

JUnitary JUnitary::operator*(const JUnitary& rhs) const {
  if (rhs.dim() != dim()) throw DimensionError("JUnitary product: dimensions differ");
  TolerancePolicy loose;
  loose.eps_eq = 1e-8;
  return JUnitary(w_ * rhs.w_, loose);
}

NevanlinnaPair transform(const NevanlinnaPair& pair, const JUnitary& w) {
  if (w.dim() != pair.dim()) throw DimensionError("transform: J-unitary has the wrong size");
  const Index n = pair.dim();
  const ComplexMatrix m = w.matrix();
  auto rule = [pair, m, n](cplx z) {
    const ComplexMatrix t = m * pair.stacked(z);
    return PairValue{t.topRows(n), t.bottomRows(n)};
  };
  return NevanlinnaPair(n, rule, PairOrigin::Transformed, "W*" + pair.label());
}

NevanlinnaPair shift_transform(const NevanlinnaPair& pair, const ComplexMatrix& x) {
  return transform(pair, JUnitary::shift(x));
}

NevanlinnaPair congruence_transform(const NevanlinnaPair& pair, const ComplexMatrix& y) {
  return transform(pair, JUnitary::congruence(y));
}

NevanlinnaPair inverse_transform(const NevanlinnaPair& pair) {
  return transform(pair, JUnitary::swap(pair.dim()));
}

NevanlinnaPair herglotz_shift_transform(const NevanlinnaPair& pair, const HerglotzRep& m,
                                        const TolerancePolicy& tol) {
  if (m.dim() != pair.dim()) throw DimensionError("herglotz_shift_transform: M has the wrong dimension");
  const Classification c = classify(as_family(m), tol);
  if (c.cls != FamilyClass::Ru) throw DomainError("herglotz_shift_transform: M must belong to R^u[H]");
  auto rule = [pair, m](cplx z) {
    PairValue v = pair(z);
    v.psi += evaluate(m, z) * v.phi;
    return v;
  };
  return NevanlinnaPair(pair.dim(), rule, PairOrigin::Transformed, "M-shift*" + pair.label());
}

bool equivalent(const NevanlinnaPair& a, const NevanlinnaPair& b, const ZGrid& samples, const TolerancePolicy& tol) {
  if (a.dim() != b.dim()) throw DimensionError("equivalent: pairs act on different spaces");
  for (const cplx z : samples) {
    const ComplexMatrix ua = range_basis(a.stacked(z), tol);
    const ComplexMatrix ub = range_basis(b.stacked(z), tol);
    if (subspace_distance(ua, ub) > tol.eps_rank) return false;
  }
  return true;
}

}  // namespace nevlab
