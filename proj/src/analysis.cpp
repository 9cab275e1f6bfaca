#include "nevlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nevlab/random.hpp"

namespace nevlab {

namespace {

void require_upper(cplx z, const char* what) {
  if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError(std::string(what) + ": point must lie in the open upper half-plane");
  }
}

double eval_quadratic(const std::array<double, 3>& c, double t) { return (c[2] * t + c[1]) * t + c[0]; }

}  // namespace

double sup_quadratic_ratio(const std::array<double, 3>& num, const std::array<double, 3>& den) {
  if (!(den[2] > 0.0)) throw DomainError("sup_quadratic_ratio: denominator must have a positive leading term");
  const double disc_den = den[1] * den[1] - 4.0 * den[2] * den[0];
  if (disc_den >= 0.0) throw DomainError("sup_quadratic_ratio: denominator vanishes on the real line");

  double best = num[2] / den[2];
  auto consider = [&](double t) {
    if (std::isfinite(t)) best = std::max(best, eval_quadratic(num, t) / eval_quadratic(den, t));
  };

  // Zeros of num' den - num den', a quadratic A t^2 + B t + C.
  const double a = num[2] * den[1] - num[1] * den[2];
  const double b = 2.0 * (num[2] * den[0] - num[0] * den[2]);
  const double c = num[1] * den[0] - num[0] * den[1];
  const double scale = std::abs(a) + std::abs(b) + std::abs(c);
  if (scale == 0.0) return best;
  if (std::abs(a) <= 1e-15 * scale) {
    if (b != 0.0) consider(-c / b);
    return best;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return best;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  consider(q / a);
  if (q != 0.0) consider(c / q);
  return best;
}

HarnackPair harnack_constants(cplx z1, cplx z2) {
  require_upper(z1, "harnack_constants");
  require_upper(z2, "harnack_constants");
  auto upper = [](cplx p, cplx q) {
    // P(q, t) / P(p, t) = (y_q / y_p) ((x_p - t)^2 + y_p^2) / ((x_q - t)^2 + y_q^2)
    const double ratio = q.imag() / p.imag();
    const std::array<double, 3> num{std::norm(p), -2.0 * p.real(), 1.0};
    const std::array<double, 3> den{std::norm(q), -2.0 * q.real(), 1.0};
    return std::max(ratio, ratio * sup_quadratic_ratio(num, den));
  };
  HarnackPair h;
  h.z1 = z1;
  h.z2 = z2;
  h.c2 = upper(z1, z2);
  h.c1 = 1.0 / upper(z2, z1);
  return h;
}

HarnackCertificate certify_harnack(cplx z1, cplx z2, int trials, std::uint64_t seed) {
  HarnackCertificate cert;
  cert.constants = harnack_constants(z1, z2);
  cert.trials = trials;
  Rng rng(seed);
  std::uniform_int_distribution<int> atom_count(0, 8);
  auto poisson = [](cplx z, double t) { return z.imag() / ((z.real() - t) * (z.real() - t) + z.imag() * z.imag()); };
  for (int k = 0; k < trials; ++k) {
    const double linear = uniform(0.0, 1.0, rng) < 0.3 ? 0.0 : uniform(0.0, 2.0, rng);
    double h1 = linear * z1.imag();
    double h2 = linear * z2.imag();
    const int atoms = atom_count(rng);
    for (int j = 0; j < atoms; ++j) {
      const double t = uniform(-10.0, 10.0, rng);
      const double mass = uniform(0.0, 1.0, rng);
      h1 += mass * poisson(z1, t);
      h2 += mass * poisson(z2, t);
    }
    if (h1 <= 0.0 && h2 <= 0.0) continue;
    const double excess = std::max({0.0, cert.constants.c1 * h1 - h2, h2 - cert.constants.c2 * h1});
    cert.worst_violation = std::max(cert.worst_violation, excess / (cert.constants.c2 * h1 + h2));
  }
  cert.pass = cert.worst_violation <= 1e-12;
  return cert;
}

double form_value(const Family& f, cplx z, const ComplexVector& u) {
  return (u.adjoint() * imag_part(f(z)) * u)(0, 0).real();
}

SandwichReport form_sandwich_check(const Family& f, const ZGrid& z_grid, cplx z0, int trials, std::uint64_t seed) {
  require_upper(z0, "form_sandwich_check");
  SandwichReport report;
  report.z0 = z0;
  Rng rng(seed);
  std::vector<ComplexVector> us;
  us.reserve(static_cast<std::size_t>(trials));
  for (int k = 0; k < trials; ++k) us.push_back(random_unit_vector(f.dim(), rng));

  const ComplexMatrix im0 = imag_part(f(z0));
  std::vector<double> t0(us.size());
  for (std::size_t k = 0; k < us.size(); ++k) t0[k] = (us[k].adjoint() * im0 * us[k])(0, 0).real();

  for (const cplx z : upper_half(z_grid)) {
    SandwichRow row;
    row.z = z;
    const HarnackPair h = harnack_constants(z0, z);
    row.c1 = h.c1;
    row.c2 = h.c2;
    row.min_ratio = std::numeric_limits<double>::infinity();
    row.max_ratio = -std::numeric_limits<double>::infinity();
    const ComplexMatrix im = imag_part(f(z));
    for (std::size_t k = 0; k < us.size(); ++k) {
      const double t = (us[k].adjoint() * im * us[k])(0, 0).real();
      const double denom = h.c2 * std::abs(t0[k]) + std::abs(t) + std::numeric_limits<double>::min();
      const double excess = std::max({0.0, h.c1 * t0[k] - t, t - h.c2 * t0[k]});
      row.worst_violation = std::max(row.worst_violation, excess / denom);
      if (t0[k] > 0.0) {
        row.min_ratio = std::min(row.min_ratio, t / t0[k]);
        row.max_ratio = std::max(row.max_ratio, t / t0[k]);
      }
    }
    report.worst_violation = std::max(report.worst_violation, row.worst_violation);
    report.rows.push_back(row);
  }
  report.pass = report.worst_violation <= 1e-10;
  return report;
}

SplitResult split_bounded_imag(const Family& f, const ComplexMatrix& b1, const OperatorMeasure& sigma,
                               const ZGrid& grid, double tolerance) {
  const Index n = f.dim();
  HerglotzRep g(ComplexMatrix::Zero(n, n), b1, sigma);
  const ComplexMatrix t = f(kReferencePoint) - evaluate(g, kReferencePoint);
  const double scale = 1.0 + spectral_norm(t);
  SplitResult out{g, hermitian_part(t)};
  out.tolerance = tolerance;
  out.hermitian_defect = hermitian_defect(t) / scale;
  for (const cplx z : grid) {
    const ComplexMatrix tz = f(z) - evaluate(g, z);
    out.constancy = std::max(out.constancy, spectral_norm(tz - t) / scale);
  }
  out.pass = out.constancy <= tolerance && out.hermitian_defect <= tolerance;
  return out;
}

SplitResult split_bounded_imag(const HerglotzRep& rep, const ComplexMatrix& offset, const ZGrid& grid) {
  return split_bounded_imag(with_offset(rep, offset), rep.b1(), rep.measure(), grid);
}

SplitResult split_black_box(const Family& f, const BlackBoxSplitOptions& opts, const ZGrid& grid) {
  const Index n = f.dim();
  const double y = opts.linear_height;
  // Round-off can leave small negative eigenvalues in the estimates.
  auto clip_psd = [](const ComplexMatrix& h) {
    const HermitianEigen eig = eig_hermitian(h);
    const RealVector clipped = eig.values.cwiseMax(0.0);
    return ComplexMatrix(eig.vectors * clipped.cast<cplx>().asDiagonal() * eig.vectors.adjoint());
  };
  const ComplexMatrix b1 = clip_psd(imag_part(f(cplx(0.0, y))) / y);
  std::vector<Atom> atoms;
  for (const auto& [a, b] : opts.bins) {
    const ComplexMatrix w0 = hermitian_part(stieltjes_invert(f, a, b, opts.stieltjes).weight);
    const ComplexMatrix w1 = hermitian_part(stieltjes_moment(f, a, b, opts.stieltjes).weight);
    const double mass = w0.trace().real();
    if (!(mass > 1e-10 * (1.0 + spectral_norm(w0)))) continue;
    atoms.push_back({w1.trace().real() / mass, clip_psd(w0)});
  }
  TolerancePolicy loose;
  loose.eps_psd = 1e-6;
  const OperatorMeasure sigma(n, std::move(atoms), loose);
  return split_bounded_imag(f, b1, sigma, grid, 1e-2);
}

double c2_of(cplx z) {
  require_upper(z, "c2_of");
  // |1 + z t|^2 / |t - z|^2 = (|z|^2 t^2 + 2 x t + 1) / (t^2 - 2 x t + |z|^2)
  const double r2 = std::norm(z);
  const std::array<double, 3> num{1.0, 2.0 * z.real(), r2};
  const std::array<double, 3> den{r2, -2.0 * z.real(), 1.0};
  return std::sqrt(sup_quadratic_ratio(num, den));
}

namespace {

ComplexMatrix measure_part(const HerglotzRep& rep, cplx z) { return evaluate(rep, z) - z * rep.b1() - rep.b0(); }

}  // namespace

BoundReport weak_strong_check(const HerglotzRep& rep, cplx z, int trials, std::uint64_t seed) {
  BoundReport report;
  report.z = z;
  report.c2 = c2_of(z);
  report.trials = trials;
  const ComplexMatrix d = measure_part(rep, z);
  const ComplexMatrix root = psd_sqrt(rep.measure().k_sigma());
  const double root_norm = spectral_norm(root);
  Rng rng(seed);
  for (int k = 0; k < trials; ++k) {
    const ComplexVector u = random_unit_vector(rep.dim(), rng);
    const double lhs = (d * u).norm();
    const double rhs = report.c2 * root_norm * (root * u).norm();
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs <= 1e-14 ? 0.0 : std::numeric_limits<double>::infinity());
    report.worst_ratio = std::max(report.worst_ratio, ratio);
  }
  report.pass = report.worst_ratio <= 1.0 + 1e-10;
  return report;
}

BoundReport factor_check(const HerglotzRep& rep, cplx z, const TolerancePolicy& tol) {
  BoundReport report;
  report.z = z;
  report.c2 = c2_of(z);
  const ComplexMatrix d = measure_part(rep, z);
  const HermitianEigen eig = eig_hermitian(rep.measure().k_sigma());
  const Index n = rep.dim();
  const double top = eig.values.size() > 0 ? eig.values(n - 1) : 0.0;
  const double cutoff = tol.eps_rank * top;
  Index null_dim = 0;
  while (null_dim < n && eig.values(null_dim) <= cutoff) ++null_dim;

  if (null_dim > 0) {
    report.kernel_leak = spectral_norm(d * eig.vectors.leftCols(null_dim)) / (1.0 + spectral_norm(d));
  }
  if (null_dim < n) {
    const ComplexMatrix v = eig.vectors.rightCols(n - null_dim);
    const RealVector inv_root = eig.values.tail(n - null_dim).cwiseSqrt().cwiseInverse();
    const ComplexMatrix scaled = inv_root.cast<cplx>().asDiagonal() * (v.adjoint() * d * v) *
                                 inv_root.cast<cplx>().asDiagonal();
    report.worst_ratio = spectral_norm(scaled) / report.c2;
  }
  report.pass = report.worst_ratio <= 1.0 + 1e-8 && report.kernel_leak <= tol.eps_rank;
  return report;
}

double fit_log_slope(const RealVector& singular, Index j_first, Index j_last, double floor, int* used) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (Index j = j_first; j <= j_last && j <= singular.size(); ++j) {
    const double s = singular(j - 1);
    if (!(s > floor)) continue;
    const double x = std::log(static_cast<double>(j));
    const double yv = std::log(s);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++count;
  }
  if (used != nullptr) *used = count;
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = count * sxx - sx * sx;
  return (count * sxy - sx * sy) / denom;
}

DecayReport schatten_decay(const Family& f, const ZGrid& z_grid, Index j_lo, Index j_hi) {
  if (j_lo < 1 || j_hi > f.dim() || j_hi - j_lo < 2) {
    throw DomainError("schatten_decay: index range must satisfy 1 <= j_lo < j_hi <= dim with at least 3 indices");
  }
  DecayReport report;
  const Index third = (j_hi - j_lo + 1) / 3;
  report.j_first = j_lo + third;
  report.j_last = std::max(j_hi - third, report.j_first + 1);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  report.decays = true;
  bool fitted = true;
  for (const cplx z : z_grid) {
    DecayRow row;
    row.z = z;
    row.slope = fit_log_slope(singular_values(f(z)), report.j_first, report.j_last, 1e-14, &row.points);
    if (std::isnan(row.slope)) {
      fitted = false;
    } else {
      lo = std::min(lo, row.slope);
      hi = std::max(hi, row.slope);
      report.decays = report.decays && row.slope < -0.05;
    }
    report.rows.push_back(row);
  }
  report.spread = fitted && !report.rows.empty() ? hi - lo : std::numeric_limits<double>::infinity();
  report.pass = report.spread <= 0.1;
  if (!fitted) {
    report.verdict = "fit failed: too few singular values above 1e-14";
  } else if (report.decays) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "decay s_j ~ j^%.3f at every z", 0.5 * (lo + hi));
    report.verdict = buf;
  } else {
    report.verdict = "no decay: not in any S_p";
  }
  return report;
}

}  // namespace nevlab
