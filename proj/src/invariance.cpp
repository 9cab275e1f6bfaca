#include "nevlab/invariance.hpp"

#include <algorithm>
#include <cmath>

#include "nevlab/analysis.hpp"
#include "nevlab/random.hpp"
#include "nevlab/relations.hpp"

namespace nevlab {

namespace {

constexpr double kMachine = std::numeric_limits<double>::epsilon();

// Largest subspace distance over all pairs; 1 when dimensions differ.
double pairwise_worst(const std::vector<ComplexMatrix>& spaces) {
  double worst = 0.0;
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    for (std::size_t j = i + 1; j < spaces.size(); ++j) {
      worst = std::max(worst, subspace_distance(spaces[i], spaces[j]));
    }
  }
  return worst;
}

// Eigenvectors of a Hermitian matrix whose eigenvalues lie at or below
// eps_rank * ||H||.
ComplexMatrix small_eigenspace(const HermitianEigen& eig, const TolerancePolicy& tol) {
  const Index n = eig.values.size();
  if (n == 0) return ComplexMatrix(0, 0);
  const double norm = std::max(std::abs(eig.values(0)), std::abs(eig.values(n - 1)));
  Index k = 0;
  while (k < n && eig.values(k) <= tol.eps_rank * norm) ++k;
  return eig.vectors.leftCols(k);
}

InvarianceReport finish(InvarianceReport report, const std::vector<ComplexMatrix>& spaces, double extra) {
  report.worst_deviation = std::max(pairwise_worst(spaces), extra);
  report.pass = report.worst_deviation <= report.tolerance;
  return report;
}

}  // namespace

InvarianceReport check_point_invariance(const NevanlinnaPair& pair, double a, const ZGrid& grid,
                                        const TolerancePolicy& tol) {
  InvarianceReport report;
  report.statement = "point-spectrum";
  const ComplexMatrix ref = eigenspace(from_pair_at(pair, kReferencePoint, tol), a, tol);
  std::vector<ComplexMatrix> spaces{ref};
  for (const cplx z : grid) {
    ComplexMatrix e = eigenspace(from_pair_at(pair, z, tol), a, tol);
    InvarianceRow row;
    row.z = z;
    row.null_dim = e.cols();
    row.flag = e.cols() > 0;
    row.distance = subspace_distance(e, ref);
    report.rows.push_back(row);
    spaces.push_back(std::move(e));
  }
  report.note = ref.cols() == 0 ? "a is not an eigenvalue at any grid point" : "";
  return finish(std::move(report), spaces, 0.0);
}

InvarianceReport check_point_invariance(const Family& f, double a, const ZGrid& grid, const TolerancePolicy& tol) {
  return check_point_invariance(canonical_pair(f), a, grid, tol);
}

InvarianceReport check_imag_kernel_invariance(const Family& f, const ZGrid& grid, const TolerancePolicy& tol) {
  InvarianceReport report;
  report.statement = "imag-kernel";
  auto signed_imag = [&](cplx z) {
    const double sign = z.imag() > 0.0 ? 1.0 : -1.0;
    return ComplexMatrix(sign * imag_part(f(z)));
  };
  const ComplexMatrix h0 = signed_imag(kReferencePoint);
  const HermitianEigen eig0 = eig_hermitian(h0);
  const double lambda0 = eig0.values.size() ? eig0.values(0) : 0.0;
  const ComplexMatrix ref = small_eigenspace(eig0, tol);
  std::vector<ComplexMatrix> spaces{ref};
  double harnack_excess = 0.0;
  for (const cplx z : grid) {
    const ComplexMatrix h = signed_imag(z);
    const HermitianEigen eig = eig_hermitian(h);
    ComplexMatrix k = small_eigenspace(eig, tol);
    InvarianceRow row;
    row.z = z;
    row.lambda_min = eig.values.size() ? eig.values(0) : 0.0;
    row.null_dim = k.cols();
    row.flag = k.cols() == 0;
    row.distance = subspace_distance(k, ref);

    // Every u* Im F(.) u is a Herglotz-cone harmonic function, so the
    // smallest eigenvalue inherits the Harnack band.
    const cplx zu = z.imag() > 0.0 ? z : std::conj(z);
    const HarnackPair hp = harnack_constants(kReferencePoint, zu);
    const double lo = hp.c1 * lambda0;
    const double hi = hp.c2 * lambda0;
    const double slack = 1e3 * kMachine * (spectral_norm(h) + hp.c2 * spectral_norm(h0));
    const double excess = std::max({0.0, lo - row.lambda_min, row.lambda_min - hi}) - slack;
    if (excess > 0.0) {
      harnack_excess = std::max(harnack_excess, excess / (std::abs(hi) + std::abs(row.lambda_min)));
    }
    report.rows.push_back(row);
    spaces.push_back(std::move(k));
  }
  return finish(std::move(report), spaces, harnack_excess);
}

InvarianceReport check_resolvent_invariance(const NevanlinnaPair& pair, double a, const ZGrid& grid,
                                            const TolerancePolicy&) {
  InvarianceReport report;
  report.statement = "resolvent-set";
  const cplx alpha = (cplx(a, 0.0) - kI) / (cplx(a, 0.0) + kI);
  auto in_resolvent = [&](cplx z, double& rcond) {
    const PairValue v = pair(z);
    const double scale = (1.0 + std::abs(a)) * spectral_norm(pair.stacked(z));
    rcond = reciprocal_condition(v.psi - a * v.phi, scale);
    return rcond >= kInvertibleRcond;
  };
  double ref_rcond = 0.0;
  const bool ref = in_resolvent(kReferencePoint, ref_rcond);
  int mismatches = 0;
  int cayley_mismatches = 0;
  for (const cplx z : grid) {
    InvarianceRow row;
    row.z = z;
    row.flag = in_resolvent(z, row.rcond);
    if (row.flag != ref) ++mismatches;
    if (z.imag() > 0.0) {
      bool cayley_flag = false;
      try {
        const ComplexMatrix c = cayley(pair, z);
        cayley_flag = reciprocal_condition(c - alpha * ComplexMatrix::Identity(c.rows(), c.cols()), 2.0) >= kInvertibleRcond;
      } catch (const NumericError&) {
        cayley_flag = !row.flag;  // Psi + i Phi singular: count as a disagreement
      }
      if (cayley_flag != row.flag) ++cayley_mismatches;
    }
    row.distance = row.flag == ref ? 0.0 : 1.0;
    report.rows.push_back(row);
  }
  if (cayley_mismatches > 0) report.note = "Cayley cross-check disagreed at " + std::to_string(cayley_mismatches) + " point(s)";
  report.worst_deviation = (mismatches + cayley_mismatches) > 0 ? 1.0 : 0.0;
  report.pass = report.worst_deviation <= report.tolerance;
  return report;
}

InvarianceReport check_boundedness_invariance(const NevanlinnaPair& pair, const ZGrid& grid,
                                              const TolerancePolicy& tol) {
  InvarianceReport report;
  report.statement = "boundedness";
  const Index n = pair.dim();
  auto phi_rank = [&](cplx z) { return numerical_rank(pair(z).phi, tol, spectral_norm(pair.stacked(z))); };
  const Index ref = n - phi_rank(kReferencePoint);
  Index worst = 0;
  for (const cplx z : grid) {
    const ComplexMatrix phi = pair(z).phi;
    InvarianceRow row;
    row.z = z;
    row.null_dim = n - phi_rank(z);
    row.rcond = reciprocal_condition(phi, spectral_norm(pair.stacked(z)));
    row.flag = row.null_dim == 0;
    row.distance = static_cast<double>(std::abs(row.null_dim - ref));
    worst = std::max<Index>(worst, std::abs(row.null_dim - ref));
    report.rows.push_back(row);
  }
  report.note = "rank Phi = " + std::to_string(n - ref);
  report.worst_deviation = static_cast<double>(worst);
  report.pass = worst == 0;
  return report;
}

InvarianceReport check_mul_invariance(const NevanlinnaPair& pair, const ZGrid& grid, const TolerancePolicy& tol) {
  InvarianceReport report;
  report.statement = "multivalued-part";
  const ComplexMatrix ref = parts(from_pair_at(pair, kReferencePoint, tol), tol).mul;
  std::vector<ComplexMatrix> spaces{ref};
  for (const cplx z : grid) {
    ComplexMatrix mul = parts(from_pair_at(pair, z, tol), tol).mul;
    InvarianceRow row;
    row.z = z;
    row.null_dim = mul.cols();
    row.flag = mul.cols() > 0;
    row.distance = subspace_distance(mul, ref);
    report.rows.push_back(row);
    spaces.push_back(std::move(mul));
  }
  return finish(std::move(report), spaces, 0.0);
}

const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::RTilde: return "R~";
    case PairClass::R: return "R";
    case PairClass::Rs: return "R^s";
    case PairClass::Ru: return "R^u";
  }
  return "?";
}

PairClassification classify_family_pair(const NevanlinnaPair& pair, cplx z, const TolerancePolicy& tol,
                                        const PairClassifyOptions& opts) {
  PairClassification out;
  out.z = z;
  const PairValue v = pair(z);
  const ComplexMatrix n = hermitian_part(pair_kernel(pair, z, z, tol));
  const HermitianEigen eig = eig_hermitian(n);
  out.lambda_min = eig.values.size() ? eig.values(0) : 0.0;
  out.kernel_dim = null_space(n, tol).cols();
  out.phi_null_dim = pair.dim() - numerical_rank(v.phi, tol, spectral_norm(pair.stacked(z)));
  const double floor = opts.uniform_floor > 0.0 ? opts.uniform_floor : 10.0 * tol.eps_psd;
  if (out.phi_null_dim > 0) {
    out.cls = PairClass::RTilde;
  } else if (out.kernel_dim > 0) {
    out.cls = PairClass::R;
  } else if (out.lambda_min < floor * (1.0 + spectral_norm(n))) {
    out.cls = PairClass::Rs;
  } else {
    out.cls = PairClass::Ru;
    out.phi_rcond = reciprocal_condition(v.phi);
    out.psi_rcond = reciprocal_condition(v.psi);
  }
  return out;
}

InvarianceReport maximum_principle_schur(const std::function<ComplexMatrix(cplx)>& schur, cplx alpha,
                                         const ZGrid& grid, const TolerancePolicy& tol) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12) throw DomainError("maximum_principle_schur: alpha must be unimodular");
  InvarianceReport report;
  report.statement = "schur-maximum-principle";
  struct Sample {
    ComplexMatrix defect;
    ComplexMatrix fixed;
    double lambda_min;
    double rcond;
  };
  auto sample = [&](cplx z) {
    const ComplexMatrix c = schur(z);
    require_square(c, "maximum_principle_schur");
    const Index n = c.rows();
    const ComplexMatrix d = hermitian_part(ComplexMatrix::Identity(n, n) - c.adjoint() * c);
    const HermitianEigen eig = eig_hermitian(d);
    const ComplexMatrix shifted = c - alpha * ComplexMatrix::Identity(n, n);
    // C is a contraction and |alpha| = 1, so 2 bounds the scale of C - alpha.
    return Sample{small_eigenspace(eig, tol), null_space(shifted, tol, 2.0), eig.values.size() ? eig.values(0) : 0.0,
                  reciprocal_condition(shifted, 2.0)};
  };
  const Sample ref = sample(kReferencePoint);
  const bool ref_flag = ref.rcond >= kInvertibleRcond;
  std::vector<ComplexMatrix> defects{ref.defect};
  std::vector<ComplexMatrix> fixed{ref.fixed};
  int flag_changes = 0;
  for (const cplx z : upper_half(grid)) {
    Sample s = sample(z);
    InvarianceRow row;
    row.z = z;
    row.lambda_min = s.lambda_min;
    row.null_dim = s.defect.cols();
    row.rcond = s.rcond;
    row.flag = s.rcond >= kInvertibleRcond;
    row.distance = std::max(subspace_distance(s.defect, ref.defect), subspace_distance(s.fixed, ref.fixed));
    if (row.flag != ref_flag) ++flag_changes;
    report.rows.push_back(row);
    defects.push_back(std::move(s.defect));
    fixed.push_back(std::move(s.fixed));
  }
  const double flags = flag_changes > 0 ? 1.0 : 0.0;
  return finish(std::move(report), defects, std::max(pairwise_worst(fixed), flags));
}

SweepReport sweep_continuous_spectrum(const std::function<Family(Index)>& family_of, const ZGrid& grid,
                                      const std::vector<Index>& n_list, int trials, std::uint64_t seed) {
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) throw DomainError("sweep_continuous_spectrum: n_list must be strictly increasing");
  }
  const ZGrid points = upper_half(grid);
  SweepReport report;
  report.monotone = true;
  report.harnack = true;
  std::vector<HarnackPair> constants;
  for (const cplx z : points) constants.push_back(harnack_constants(kReferencePoint, z));

  std::vector<double> first(points.size()), last(points.size());
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    const Family f = family_of(n_list[k]);
    if (f.dim() != n_list[k]) throw DimensionError("sweep_continuous_spectrum: family dimension does not match n");
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(n_list[k]));
    std::vector<ComplexVector> us;
    for (int t = 0; t < trials; ++t) us.push_back(random_unit_vector(f.dim(), rng));
    const ComplexMatrix im0 = imag_part(f(kReferencePoint));

    for (std::size_t p = 0; p < points.size(); ++p) {
      const ComplexMatrix im = imag_part(f(points[p]));
      SweepRow row;
      row.n = n_list[k];
      row.z = points[p];
      row.sigma_min = min_singular_value(im);
      row.c1 = constants[p].c1;
      row.c2 = constants[p].c2;
      row.min_ratio = std::numeric_limits<double>::infinity();
      row.max_ratio = -row.min_ratio;
      for (const ComplexVector& u : us) {
        const double t0 = (u.adjoint() * im0 * u)(0, 0).real();
        const double t = (u.adjoint() * im * u)(0, 0).real();
        const double ratio = t / t0;
        row.min_ratio = std::min(row.min_ratio, ratio);
        row.max_ratio = std::max(row.max_ratio, ratio);
      }
      const double slack = 1e-10;
      if (row.min_ratio < row.c1 * (1.0 - slack) || row.max_ratio > row.c2 * (1.0 + slack)) report.harnack = false;
      if (k == 0) {
        first[p] = row.sigma_min;
      } else if (!(row.sigma_min < last[p])) {
        report.monotone = false;
      }
      last[p] = row.sigma_min;
      report.rows.push_back(row);
    }
  }
  report.decays = !points.empty() && n_list.size() > 1;
  for (std::size_t p = 0; p < points.size(); ++p) report.decays = report.decays && last[p] <= 0.5 * first[p];
  report.pass = report.monotone && report.harnack;
  if (report.monotone && report.decays) {
    report.verdict = "sigma_min decays along the truncations at every z (continuous-spectrum analogue)";
  } else {
    report.verdict = "sigma_min bounded below along the truncations: no continuous spectrum";
  }
  return report;
}

}  // namespace nevlab
