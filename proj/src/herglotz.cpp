#include "nevlab/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "quadrature.hpp"

namespace nevlab {

ZGrid default_grid() {
  static constexpr double xs[] = {-2.0, -0.5, 0.0, 0.7, 3.0};
  static constexpr double ys[] = {0.1, 1.0, 10.0};
  ZGrid grid;
  grid.reserve(30);
  for (double x : xs)
    for (double y : ys) grid.emplace_back(x, y);
  for (std::size_t k = 0; k < 15; ++k) grid.push_back(std::conj(grid[k]));
  return grid;
}

ZGrid extended_grid(std::uint64_t seed) {
  ZGrid grid = default_grid();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xdist(-3.0, 3.0);
  std::uniform_real_distribution<double> ldist(-1.0, 1.0);
  ZGrid extra;
  for (int k = 0; k < 5; ++k) {
    const double x = xdist(rng);
    const double y = std::pow(10.0, ldist(rng));
    extra.emplace_back(x, y);
  }
  for (const cplx z : extra) grid.push_back(z);
  for (const cplx z : extra) grid.push_back(std::conj(z));
  return grid;
}

ZGrid upper_half(const ZGrid& grid) {
  ZGrid out;
  std::copy_if(grid.begin(), grid.end(), std::back_inserter(out), [](cplx z) { return z.imag() > 0.0; });
  return out;
}

// ---------------------------------------------------------------------------

OperatorMeasure::OperatorMeasure(Index dim, std::vector<Atom> atoms, const TolerancePolicy& tol)
    : dim_(dim) {
  for (Atom& atom : atoms) {
    if (!std::isfinite(atom.location)) throw DomainError("atom location must be finite");
    if (atom.weight.rows() != dim || atom.weight.cols() != dim) {
      throw DimensionError("atom weight has the wrong dimension");
    }
    require_finite(atom.weight, "atom weight");
    if (!is_psd(atom.weight, tol).psd) throw DomainError("atom weight is not positive semidefinite");
    atom.weight = hermitian_part(atom.weight);
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.location < r.location; });
  for (Atom& atom : atoms) {
    if (!atoms_.empty() && atoms_.back().location == atom.location) {
      atoms_.back().weight += atom.weight;
    } else {
      atoms_.push_back(std::move(atom));
    }
  }
  if (!is_psd(k_sigma(), tol).psd) throw DomainError("K_Sigma is not positive semidefinite");
}

ComplexMatrix OperatorMeasure::k_sigma() const {
  ComplexMatrix k = ComplexMatrix::Zero(dim_, dim_);
  for (const Atom& atom : atoms_) k += atom.weight / (1.0 + atom.location * atom.location);
  return k;
}

HerglotzRep::HerglotzRep(ComplexMatrix b0, ComplexMatrix b1, OperatorMeasure measure,
                         const TolerancePolicy& tol)
    : b0_(std::move(b0)), b1_(std::move(b1)), measure_(std::move(measure)) {
  require_square(b0_, "HerglotzRep B0");
  require_square(b1_, "HerglotzRep B1");
  if (b1_.rows() != b0_.rows() || measure_.dim() != b0_.rows()) {
    throw DimensionError("HerglotzRep: B0, B1 and the measure must share one dimension");
  }
  require_finite(b0_, "HerglotzRep B0");
  require_finite(b1_, "HerglotzRep B1");
  if (spectral_norm(b0_ - b0_.adjoint()) > tol.eps_eq * std::max(1.0, spectral_norm(b0_))) {
    throw DomainError("HerglotzRep: B0 is not Hermitian");
  }
  if (!is_psd(b1_, tol).psd) throw DomainError("HerglotzRep: B1 is not positive semidefinite");
  b0_ = hermitian_part(b0_);
  b1_ = hermitian_part(b1_);
}

HerglotzRep HerglotzRep::zero(Index dim) {
  return HerglotzRep(ComplexMatrix::Zero(dim, dim), ComplexMatrix::Zero(dim, dim), OperatorMeasure(dim));
}

namespace {

void reject_pole(const HerglotzRep& rep, cplx z) {
  if (z.imag() != 0.0) return;
  for (const Atom& atom : rep.measure().atoms()) {
    if (atom.location == z.real()) {
      std::ostringstream os;
      os << "evaluation at the atom location t = " << atom.location;
      throw DomainError(os.str());
    }
  }
}

}  // namespace

ComplexMatrix evaluate(const HerglotzRep& rep, cplx z) {
  reject_pole(rep, z);
  ComplexMatrix f = rep.b0().cast<cplx>() + z * rep.b1();
  for (const Atom& atom : rep.measure().atoms()) {
    const double t = atom.location;
    const cplx coeff = 1.0 / (t - z) - t / (t * t + 1.0);
    f += coeff * atom.weight;
  }
  return f;
}

ComplexMatrix derivative(const HerglotzRep& rep, cplx z) {
  reject_pole(rep, z);
  ComplexMatrix d = rep.b1();
  for (const Atom& atom : rep.measure().atoms()) {
    const cplx q = atom.location - z;
    d += atom.weight / (q * q);
  }
  return d;
}

ComplexMatrix imag_poisson(const HerglotzRep& rep, cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (!(y > 0.0)) throw DomainError("imag_poisson: requires Im z > 0");
  ComplexMatrix h = y * rep.b1();
  for (const Atom& atom : rep.measure().atoms()) {
    const double dx = x - atom.location;
    h += (y / (dx * dx + y * y)) * atom.weight;
  }
  return h;
}

// ---------------------------------------------------------------------------

Family::Family(Index dim, Rule value, std::string label, Rule derivative)
    : dim_(dim), value_(std::move(value)), derivative_(std::move(derivative)), label_(std::move(label)) {
  if (!value_) throw DomainError("Family: empty evaluation rule");
}

ComplexMatrix Family::operator()(cplx z) const {
  ComplexMatrix f = value_(z);
  if (f.rows() != dim_ || f.cols() != dim_) {
    throw DimensionError("Family '" + label_ + "' returned a matrix of the wrong size");
  }
  require_finite(f, label_.c_str());
  return f;
}

ComplexMatrix Family::derivative(cplx z) const {
  if (derivative_) return derivative_(z);
  // Five-point central difference along the real direction; the step stays
  // well inside the half-plane of z.
  const double h = z.imag() != 0.0 ? 1e-3 * std::abs(z.imag()) : 1e-3;
  const ComplexMatrix d = (-(*this)(z + 2.0 * h) + 8.0 * (*this)(z + h) - 8.0 * (*this)(z - h) +
                           (*this)(z - 2.0 * h)) /
                          (12.0 * h);
  return d;
}

Family as_family(const HerglotzRep& rep, std::string label) {
  return Family(
      rep.dim(), [rep](cplx z) { return evaluate(rep, z); }, std::move(label),
      [rep](cplx z) { return derivative(rep, z); });
}

Family with_offset(const HerglotzRep& rep, const ComplexMatrix& offset, std::string label) {
  if (offset.rows() != rep.dim() || offset.cols() != rep.dim()) {
    throw DimensionError("with_offset: offset has the wrong dimension");
  }
  if (hermitian_defect(offset) > 1e-12) throw DomainError("with_offset: offset is not Hermitian");
  const ComplexMatrix t = hermitian_part(offset);
  return Family(
      rep.dim(), [rep, t](cplx z) { return ComplexMatrix(evaluate(rep, z) + t); }, std::move(label),
      [rep](cplx z) { return derivative(rep, z); });
}

Family direct_sum(const Family& a, const Family& b) {
  Family::Rule value = [a, b](cplx z) { return block_diag(a(z), b(z)); };
  Family::Rule deriv;
  if (a.has_exact_derivative() && b.has_exact_derivative()) {
    deriv = [a, b](cplx z) { return block_diag(a.derivative(z), b.derivative(z)); };
  }
  return Family(a.dim() + b.dim(), std::move(value), a.label() + "(+)" + b.label(), std::move(deriv));
}

ComplexMatrix nevanlinna_kernel(const Family& f, cplx z, cplx w, const TolerancePolicy& tol) {
  if (z.imag() == 0.0 || w.imag() == 0.0) throw DomainError("nevanlinna_kernel: points must be off the real axis");
  const cplx gap = z - std::conj(w);
  if (std::abs(gap) <= tol.eps_eq * (std::abs(z) + std::abs(w))) return f.derivative(z);
  return (f(z) - f(w).adjoint()) / gap;
}

ComplexMatrix nevanlinna_kernel(const HerglotzRep& rep, cplx z, cplx w, const TolerancePolicy& tol) {
  return nevanlinna_kernel(as_family(rep), z, w, tol);
}

ComplexMatrix kernel_gram(const Family& f, std::span<const cplx> points,
                          std::span<const ComplexVector> vectors, const TolerancePolicy& tol) {
  if (points.size() != vectors.size()) throw DimensionError("kernel_gram: points and vectors differ in length");
  const auto m = static_cast<Index>(points.size());
  for (const ComplexVector& h : vectors) {
    if (h.size() != f.dim()) throw DimensionError("kernel_gram: vector has the wrong dimension");
  }
  ComplexMatrix gram(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      const ComplexMatrix n = nevanlinna_kernel(f, points[j], points[i], tol);
      gram(i, j) = vectors[i].dot(n * vectors[j]);  // dot() conjugates its left argument
    }
  }
  return gram;
}

const char* to_string(FamilyClass c) {
  switch (c) {
    case FamilyClass::NotR: return "not-R";
    case FamilyClass::R: return "R";
    case FamilyClass::Rs: return "R^s";
    case FamilyClass::Ru: return "R^u";
  }
  return "?";
}

Classification classify(const Family& f, const TolerancePolicy& tol, const ClassifyOptions& opts) {
  Classification out;
  const ZGrid grid = opts.grid.empty() ? default_grid() : opts.grid;
  for (const cplx z : grid) {
    if (z.imag() == 0.0) continue;
    const ComplexMatrix fz = f(z);
    const ComplexMatrix fc = f(std::conj(z));
    const double sym = spectral_norm(fc - fz.adjoint()) / (1.0 + spectral_norm(fz));
    out.symmetry_residual = std::max(out.symmetry_residual, sym);
    const double sign = z.imag() > 0.0 ? 1.0 : -1.0;
    const PsdResult psd = is_psd(sign * imag_part(fz), tol);
    out.worst_sign_margin = std::min(out.worst_sign_margin, psd.min_eigenvalue);
    if (!psd.psd && out.reason.empty()) {
      std::ostringstream os;
      os << "Im F(z) has the wrong sign at z = " << z;
      out.reason = os.str();
    }
  }
  if (out.symmetry_residual > tol.eps_eq && out.reason.empty()) out.reason = "F(conj z) != F(z)* on the grid";

  const ComplexMatrix im = imag_part(f(kReferencePoint));
  const HermitianEigen eig = eig_hermitian(im);
  out.lambda_min = eig.values.size() ? eig.values(0) : 0.0;
  out.kernel_dim = null_space(im, tol).cols();
  if (!out.reason.empty()) {
    out.cls = FamilyClass::NotR;
    return out;
  }
  const double floor = opts.uniform_floor > 0.0 ? opts.uniform_floor : 10.0 * tol.eps_psd;
  if (out.kernel_dim > 0) {
    out.cls = FamilyClass::R;
  } else if (out.lambda_min >= floor * (1.0 + spectral_norm(im))) {
    out.cls = FamilyClass::Ru;
  } else {
    out.cls = FamilyClass::Rs;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// int_a^b g(t + i eta) dt for g holomorphic in the upper half-plane, computed
// along the other three sides of the rectangle above the segment. The
// vertical sides sit over a and b, away from the singularities on the real
// axis, so the integrands stay smooth even when eta is tiny.
ComplexMatrix segment_integral(const std::function<ComplexMatrix(cplx)>& g, double a, double b, double eta,
                               double scale) {
  const double top = eta + std::max(1.0, b - a);
  const detail::GaussKronrod15 quad(1e-14 * scale, 1e-12);
  // Vertical sides in log-height: zeta = x + i e^u, d zeta = i e^u du.
  auto vertical = [&](double x) {
    return quad
        .integrate(
            [&](double u) {
              const double s = std::exp(u);
              return ComplexMatrix(g(cplx(x, s)) * (kI * s));
            },
            std::log(eta), std::log(top))
        .value;
  };
  const ComplexMatrix up_left = vertical(a);
  const ComplexMatrix up_right = vertical(b);
  const ComplexMatrix across =
      quad.integrate([&](double t) { return g(cplx(t, top)); }, a, b).value;
  return up_left + across - up_right;
}

StieltjesResult sweep(const Family& f, double a, double b, const StieltjesOptions& opts, int moment) {
  if (!(a < b)) throw DomainError("stieltjes: interval must satisfy a < b");
  if (opts.etas.size() < 3) throw DomainError("stieltjes: eta sweep needs at least three values");
  StieltjesResult out;
  const double scale = 1.0 + spectral_norm(f(cplx(0.5 * (a + b), 1.0)));
  for (const double eta : opts.etas) {
    if (!(eta > 0.0)) throw DomainError("stieltjes: eta must be positive");
    auto g = [&](cplx zeta) -> ComplexMatrix {
      if (moment == 0) return f(zeta);
      // t = zeta - i eta on the segment; (zeta - i eta) F(zeta) is holomorphic.
      return (zeta - kI * eta) * f(zeta);
    };
    const ComplexMatrix integral = segment_integral(g, a, b, eta, scale);
    out.raw.push_back(imag_part(integral) / std::numbers::pi);
  }
  for (std::size_t k = 1; k < out.raw.size(); ++k) {
    const double r = opts.etas[k - 1] / opts.etas[k];
    out.extrapolated.push_back((r * out.raw[k] - out.raw[k - 1]) / (r - 1.0));
  }
  const ComplexMatrix& last = out.extrapolated.back();
  const ComplexMatrix& prev = out.extrapolated[out.extrapolated.size() - 2];
  double biggest = 0.0;
  for (const ComplexMatrix& e : out.raw) biggest = std::max(biggest, spectral_norm(e));
  const double denom = std::max({spectral_norm(last), spectral_norm(prev), 1e-9 * (1.0 + biggest)});
  out.variation = spectral_norm(last - prev) / denom;
  out.weight = last;
  if (out.variation > opts.max_variation) {
    std::ostringstream os;
    os << "stieltjes: eta sweep did not converge (variation " << out.variation << ")";
    throw ConvergenceError(os.str());
  }
  return out;
}

}  // namespace

StieltjesResult stieltjes_invert(const Family& f, double a, double b, const StieltjesOptions& opts) {
  return sweep(f, a, b, opts, 0);
}

StieltjesResult stieltjes_moment(const Family& f, double a, double b, const StieltjesOptions& opts) {
  return sweep(f, a, b, opts, 1);
}

}  // namespace nevlab
