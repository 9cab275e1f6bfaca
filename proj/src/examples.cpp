#include "nevlab/examples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nevlab/analysis.hpp"
#include "nevlab/random.hpp"

namespace nevlab {

const char* to_string(BoundaryVariant v) {
  switch (v) {
    case BoundaryVariant::HalflineRobin: return "halfline-robin";
    case BoundaryVariant::DissipativeInterval: return "dissipative-interval";
    case BoundaryVariant::DissipativeHalfline: return "dissipative-halfline";
  }
  return "?";
}

void SturmLiouvilleConfig::validate() const {
  if (n < 8) throw DomainError("SturmLiouvilleConfig: n must be at least 8");
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("SturmLiouvilleConfig: length must be positive");
  if (phi.dim() != 1) throw DomainError("SturmLiouvilleConfig: phi must be scalar");
}

ComplexMatrix stiffness(Index n, double length) {
  const double h = length / static_cast<double>(n);
  ComplexMatrix k = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    k(j, j) = 2.0;
    if (j + 1 < n) k(j, j + 1) = k(j + 1, j) = -1.0;
  }
  k(0, 0) = 1.0;
  return k / (h * h);
}

namespace {

Family boundary_family(const SturmLiouvilleConfig& config, bool dissipative) {
  config.validate();
  const ComplexMatrix k = stiffness(config.n, config.length);
  const double h = config.length / static_cast<double>(config.n);
  const HerglotzRep phi = config.phi;
  const Index n = config.n;
  auto value = [k, h, phi, dissipative](cplx z) {
    ComplexMatrix g = dissipative ? ComplexMatrix((z.imag() > 0.0 ? kI : -kI) * k) : k;
    g(0, 0) += evaluate(phi, z)(0, 0) / h;
    return g;
  };
  auto deriv = [h, phi, n](cplx z) {
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    d(0, 0) = derivative(phi, z)(0, 0) / h;
    return d;
  };
  std::string label = std::string(to_string(config.variant)) + "(n=" + std::to_string(n) + ")";
  return Family(n, value, std::move(label), deriv);
}

}  // namespace

Family build_interval_family(const SturmLiouvilleConfig& config) {
  if (config.variant == BoundaryVariant::HalflineRobin) {
    throw DomainError("build_interval_family: use build_halfline_family for the halfline-robin variant");
  }
  return boundary_family(config, true);
}

Family build_halfline_family(const SturmLiouvilleConfig& config) {
  if (config.variant != BoundaryVariant::HalflineRobin) {
    throw DomainError("build_halfline_family: variant must be halfline-robin");
  }
  return boundary_family(config, false);
}

Family build_sturm_liouville(const SturmLiouvilleConfig& config) {
  return config.variant == BoundaryVariant::HalflineRobin ? build_halfline_family(config)
                                                          : build_interval_family(config);
}

Family build_dirichlet_interval_family(Index n, double length) {
  if (n < 8) throw DomainError("build_dirichlet_interval_family: n must be at least 8");
  // n interior nodes of [0, length], both ends eliminated.
  const double h = length / static_cast<double>(n + 1);
  ComplexMatrix k = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    k(j, j) = 2.0 / (h * h);
    if (j + 1 < n) k(j, j + 1) = k(j + 1, j) = -1.0 / (h * h);
  }
  auto value = [k](cplx z) { return ComplexMatrix((z.imag() > 0.0 ? kI : -kI) * k); };
  auto deriv = [n](cplx) { return ComplexMatrix(ComplexMatrix::Zero(n, n)); };
  return Family(n, value, "dirichlet-interval(n=" + std::to_string(n) + ")", deriv);
}

DecayFit decay_exponent(const Family& g, cplx z) {
  const Index n = g.dim();
  if (n < 24) throw DomainError("decay_exponent: need n >= 24 for the fit window");
  DecayFit fit;
  fit.z = z;
  const RealVector s = singular_values(g(z));
  if (!(s(n - 1) > 0.0)) throw ConditioningError("decay_exponent: G(z) is singular", 0.0);
  // s_j(G^{-1}) = 1 / s_{n+1-j}(G)
  fit.inverse_singular = s.reverse().cwiseInverse();
  fit.j_first = n / 8;
  fit.j_last = n / 3;
  fit.slope = fit_log_slope(fit.inverse_singular, fit.j_first, fit.j_last, 0.0);
  return fit;
}

FillReport spectrum_fill_sweep(const HerglotzRep& phi, double step, const std::vector<Index>& n_list, double a,
                               const ZGrid& grid) {
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) throw DomainError("spectrum_fill_sweep: n_list must be strictly increasing");
  }
  FillReport report;
  report.a = a;
  report.step = step;
  std::vector<double> first(grid.size()), last(grid.size());
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    SturmLiouvilleConfig config;
    config.n = n_list[k];
    config.length = step * static_cast<double>(n_list[k]);
    config.phi = phi;
    config.variant = BoundaryVariant::HalflineRobin;
    const Family f = build_halfline_family(config);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      FillRow row;
      row.n = n_list[k];
      row.length = config.length;
      row.z = grid[p];
      ComplexMatrix shifted = f(grid[p]);
      shifted.diagonal().array() -= a;
      row.epsilon = min_singular_value(shifted);
      if (k == 0) first[p] = row.epsilon;
      last[p] = row.epsilon;
      report.rows.push_back(row);
    }
  }
  report.pass = n_list.size() > 1 && !grid.empty();
  for (std::size_t p = 0; p < grid.size(); ++p) report.pass = report.pass && last[p] <= 0.5 * first[p];
  return report;
}

void Ex4AConfig::validate() const {
  if (n < 1) throw DomainError("Ex4AConfig: n must be positive");
  if (!(c_perturbation >= 0.0 && c_perturbation < 0.9)) throw DomainError("Ex4AConfig: perturbation scale must lie in [0, 0.9)");
  if (!b_decay) throw DomainError("Ex4AConfig: missing b_decay rule");
  for (Index j = 0; j < n; ++j) {
    if (!(b_decay(j) > 0.0)) throw DomainError("Ex4AConfig: b_j must be positive");
    if (j > 0 && !(b_decay(j) < b_decay(j - 1))) throw DomainError("Ex4AConfig: b_j must be strictly decreasing");
  }
}

Ex4A build_ex4a(const Ex4AConfig& config) {
  config.validate();
  const Index n = config.n;
  RealVector b(n);
  for (Index j = 0; j < n; ++j) b(j) = std::max(config.b_decay(j), 1e-6);
  const RealVector root = b.cwiseSqrt();

  ComplexMatrix c = ComplexMatrix::Identity(n, n);
  if (config.c_perturbation > 0.0) {
    Rng rng = make_rng(config.seed, 0);
    const ComplexMatrix s = random_hermitian(n, rng);
    c += config.c_perturbation * s / spectral_norm(s);
  }

  auto shifted = [c, n](cplx z) { return ComplexMatrix(c - (1.0 / z) * ComplexMatrix::Identity(n, n)); };
  auto m = [shifted, root](cplx z) {
    return ComplexMatrix(root.cast<cplx>().asDiagonal() * shifted(z) * root.cast<cplx>().asDiagonal());
  };
  const ComplexMatrix b_diag = b.cast<cplx>().asDiagonal();
  auto m_deriv = [b_diag](cplx z) { return ComplexMatrix(b_diag / (z * z)); };
  auto f = [m](cplx z) { return ComplexMatrix(-inverse(m(z))); };
  auto f_tilde = [shifted](cplx z) { return ComplexMatrix(-inverse(shifted(z))); };

  return Ex4A{Family(n, m, "ex4a-M", m_deriv), Family(n, f, "ex4a-F"), Family(n, f_tilde, "ex4a-Ftilde"), b_diag, c};
}

FormDomainReport form_domain_report(const Ex4A& ex, const ZGrid& grid) {
  FormDomainReport report;
  report.pass = true;
  const RealVector root = ex.b.diagonal().real().cwiseSqrt();
  const ComplexMatrix q0 = imag_part(ex.f_tilde(kReferencePoint));
  // Q(i)^{-1/2} whitens the reference form.
  const HermitianEigen e0 = eig_hermitian(q0);
  if (!(e0.values(0) > 0.0)) throw ConditioningError("form_domain_report: reference form is not positive", 0.0);
  const ComplexMatrix whiten =
      e0.vectors * e0.values.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * e0.vectors.adjoint();

  for (const cplx z : upper_half(grid)) {
    FormDomainRow row;
    row.z = z;
    const HarnackPair h = harnack_constants(kReferencePoint, z);
    row.c1 = h.c1;
    row.c2 = h.c2;
    const ComplexMatrix q = imag_part(ex.f_tilde(z));
    const RealVector ratios = eig_hermitian(whiten * q * whiten).values;
    row.min_ratio = ratios(0);
    row.max_ratio = ratios(ratios.size() - 1);

    const ComplexMatrix weighted =
        root.cast<cplx>().asDiagonal() * imag_part(ex.f(z)) * root.cast<cplx>().asDiagonal();
    row.identity_error = spectral_norm(weighted - q) / spectral_norm(q);
    row.m_rcond = reciprocal_condition(ex.m(z));

    const bool inside = row.min_ratio >= row.c1 * (1.0 - 1e-8) && row.max_ratio <= row.c2 * (1.0 + 1e-8);
    report.pass = report.pass && inside && row.identity_error <= 1e-8;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace nevlab
