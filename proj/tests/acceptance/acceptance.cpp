// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is 0 only when every criterion passes.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nevlab/analysis.hpp"
#include "nevlab/examples.hpp"
#include "nevlab/invariance.hpp"
#include "nevlab/pairs.hpp"
#include "nevlab/random.hpp"
#include "nevlab/relations.hpp"
#include "support/models.hpp"

using namespace nevlab;
using namespace nevlab::testing;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;  // zero when no runtime limit applies
  std::function<Outcome()> run;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Family diagonal_harmonic(Index n) {
  RealVector d(n);
  for (Index k = 0; k < n; ++k) d(k) = 1.0 / static_cast<double>(k + 1);
  const ComplexMatrix dm = d.cast<cplx>().asDiagonal();
  return Family(n, [dm](cplx z) { return ComplexMatrix(z * dm); }, "z diag(1/k)");
}

NevanlinnaPair mul_pair(Index n) {
  return constant_pair(ComplexMatrix::Zero(n, n), ComplexMatrix::Identity(n, n), "mul");
}

// Pairs of every construction used below: canonical, mul-carrying and
// J-transformed.
NevanlinnaPair random_pair(Rng& rng) {
  switch (static_cast<int>(uniform(0.0, 3.0, rng))) {
    case 0:
      return canonical_pair(as_family(random_rep(rng)));
    case 1:
      return mul_carrying_pair(rng);
    default: {
      const NevanlinnaPair p = canonical_pair(as_family(random_rep(rng)));
      return transform(p, random_j_unitary(p.dim(), rng));
    }
  }
}

Outcome kernel_positivity() {
  Rng rng = make_rng(kSeed, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const HerglotzRep rep = random_rep(rng);
    std::vector<cplx> points;
    std::vector<ComplexVector> vectors;
    for (int k = 0; k < 6; ++k) {
      points.push_back(random_point(rng));
      vectors.push_back(random_unit_vector(rep.dim(), rng));
    }
    const ComplexMatrix gram = kernel_gram(as_family(rep), points, vectors);
    const double lmin = eig_hermitian(gram).values(0);
    worst = std::min(worst, lmin / (1.0 + spectral_norm(gram)));
  }
  return {worst >= -1e-10, fmt("worst relative lambda_min %.3e over 1000 Gram matrices", worst)};
}

Outcome invariance_reports() {
  Rng rng = make_rng(kSeed, 2);
  double worst = 0.0;
  int failed = 0;
  int reports = 0;
  auto take = [&](const InvarianceReport& r) {
    ++reports;
    worst = std::max(worst, r.worst_deviation);
    if (!r.pass || r.worst_deviation > 1e-8) ++failed;
  };
  for (int trial = 0; trial < 200; ++trial) {
    switch (trial % 3) {
      case 0: {
        const PinnedFamily pf = pinned_family(rng, uniform(-3.0, 3.0, rng));
        const NevanlinnaPair p = canonical_pair(pf.family);
        take(check_point_invariance(p, pf.a));
        take(check_imag_kernel_invariance(pf.family));
        take(check_resolvent_invariance(p, pf.a));
        take(check_boundedness_invariance(p));
        take(check_mul_invariance(p));
        break;
      }
      case 1: {
        const NevanlinnaPair p = mul_carrying_pair(rng);
        const double a = uniform(-3.0, 3.0, rng);
        take(check_point_invariance(p, a));
        take(check_resolvent_invariance(p, a));
        take(check_boundedness_invariance(p));
        take(check_mul_invariance(p));
        break;
      }
      default: {
        const PinnedFamily pf = pinned_family(rng, uniform(-3.0, 3.0, rng));
        const NevanlinnaPair p = direct_sum(canonical_pair(pf.family), mul_pair(1));
        take(check_point_invariance(p, pf.a));
        take(check_resolvent_invariance(p, pf.a));
        take(check_boundedness_invariance(p));
        take(check_mul_invariance(p));
        break;
      }
    }
  }
  return {failed == 0, fmt("%.0f of %.0f reports failed, worst distance %.3e", failed, reports, worst)};
}

Outcome cayley_chain() {
  Rng rng = make_rng(kSeed, 3);
  const ZGrid upper = upper_half(default_grid());
  double worst_norm = 0.0;
  double worst_identity = 0.0;
  int validated = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const NevanlinnaPair p = random_pair(rng);
    if (!validate(p, default_grid()).pass) continue;
    ++validated;
    for (const cplx z : upper) {
      worst_norm = std::max(worst_norm, spectral_norm(cayley(p, z)));
      for (const cplx w : upper) worst_identity = std::max(worst_identity, kernel_identity_residual(p, z, w));
    }
  }
  const NevanlinnaPair identity = canonical_pair(as_family(identity_rep(1)));
  const double witness = std::abs(schur_kernel(identity, kI, kI)(0, 0) - 0.5);
  const bool pass = validated == 100 && worst_norm <= 1.0 + 1e-10 && worst_identity <= 1e-10 && witness <= 1e-12;
  return {pass, fmt("max ||C|| %.15g, identity residual %.3e, |K(i,i) - 1/2| %.3e", worst_norm, worst_identity, witness) +
                    fmt(", %.0f/100 pairs validated", validated)};
}

Outcome classification_agreement() {
  Rng rng = make_rng(kSeed, 4);
  RepOptions null_opts;
  null_opts.common_null = true;
  int disagreements = 0;
  int uncertified = 0;
  int counts[4] = {0, 0, 0, 0};
  for (int trial = 0; trial < 1000; ++trial) {
    NevanlinnaPair p = mul_pair(1);
    switch (trial % 4) {
      case 0:
        p = canonical_pair(as_family(random_rep(rng)));
        break;
      case 1:
        p = canonical_pair(as_family(random_rep(rng, null_opts)));
        break;
      case 2:
        p = canonical_pair(as_family(random_uniform_rep(rng)));
        break;
      default:
        p = mul_carrying_pair(rng);
        break;
    }
    const PairClassification at_i = classify_family_pair(p);
    ++counts[static_cast<int>(at_i.cls)];
    if (at_i.cls == PairClass::Ru && (at_i.phi_rcond < kInvertibleRcond || at_i.psi_rcond < kInvertibleRcond)) {
      ++uncertified;
    }
    for (int k = 0; k < 10; ++k) {
      const PairClassification other = classify_family_pair(p, random_point(rng));
      if (other.cls != at_i.cls) ++disagreements;
      if (other.cls == PairClass::Ru && (other.phi_rcond < kInvertibleRcond || other.psi_rcond < kInvertibleRcond)) {
        ++uncertified;
      }
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d disagreements, %d uncertified R^u verdicts (R~ %d, R %d, R^s %d, R^u %d)",
                disagreements, uncertified, counts[0], counts[1], counts[2], counts[3]);
  return {disagreements == 0 && uncertified == 0, buf};
}

Outcome j_unitary_invariance() {
  Rng rng = make_rng(kSeed, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const NevanlinnaPair p = canonical_pair(as_family(random_rep(rng)));
    const NevanlinnaPair q = transform(p, random_j_unitary(p.dim(), rng));
    for (int k = 0; k < 5; ++k) {
      const cplx z = random_point(rng), w = random_point(rng);
      const ComplexMatrix n = pair_kernel(p, z, w);
      worst = std::max(worst, spectral_norm(pair_kernel(q, z, w) - n) / (1.0 + spectral_norm(n)));
    }
  }
  double worst_inverse = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const HerglotzRep rep = random_uniform_rep(rng);
    const NevanlinnaPair inv = inverse_transform(canonical_pair(as_family(rep)));
    for (const cplx z : default_grid()) {
      const LinearRelation expected = LinearRelation::graph_of(-inverse(evaluate(rep, z)));
      worst_inverse = std::max(worst_inverse, relation_distance(from_pair_at(inv, z), expected));
    }
  }
  return {worst <= 1e-10 && worst_inverse <= 1e-10,
          fmt("kernel deviation %.3e, inverse-transform distance %.3e", worst, worst_inverse)};
}

Outcome harnack() {
  Rng rng = make_rng(kSeed, 6);
  double worst = 0.0;
  bool pass = true;
  for (int k = 0; k < 10; ++k) {
    const HarnackCertificate c = certify_harnack(random_point(rng, true), random_point(rng, true), 1000, kSeed + k);
    worst = std::max(worst, c.worst_violation);
    pass = pass && c.pass && c.worst_violation <= 1e-12;
  }
  int sandwich_failed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const SandwichReport s =
        form_sandwich_check(as_family(random_rep(rng)), default_grid(), random_point(rng, true), 20, kSeed + trial);
    if (!s.pass) ++sandwich_failed;
  }
  return {pass && sandwich_failed == 0,
          fmt("worst cone violation %.3e over 10x1000 trials, %.0f/100 sandwich failures", worst, sandwich_failed)};
}

Outcome split() {
  Rng rng = make_rng(kSeed, 7);
  double worst_residual = 0.0;
  double worst_constancy = 0.0;
  bool pass = true;
  const double scales[] = {1.0, 1e2, 1e4, 1e6};
  for (int trial = 0; trial < 40; ++trial) {
    const HerglotzRep rep = random_rep(rng);
    const HerglotzRep p(ComplexMatrix::Zero(rep.dim(), rep.dim()), rep.b1(), rep.measure());
    ComplexMatrix t0 = random_hermitian(rep.dim(), rng);
    t0 *= scales[trial % 4] / spectral_norm(t0);
    // F is evaluated with a different summation order than the rebuilt G.
    const Family f(rep.dim(), [p, t0](cplx z) { return ComplexMatrix(t0 + (z * p.b1() + (evaluate(p, z) - z * p.b1()))); },
                   "planted");
    const SplitResult s = split_bounded_imag(f, p.b1(), p.measure());
    const double residual = spectral_norm(s.t - t0) / (1.0 + spectral_norm(t0));
    worst_residual = std::max(worst_residual, residual);
    worst_constancy = std::max(worst_constancy, s.constancy);
    pass = pass && s.pass && residual <= 1e-8 && s.constancy <= 1e-8;
  }
  return {pass, fmt("worst residual %.3e, worst constancy %.3e, offsets up to 1e6", worst_residual, worst_constancy)};
}

Outcome estimates() {
  const double at_i = c2_of(kI);
  const double at_2i = c2_of(cplx(0, 2));
  Rng rng = make_rng(kSeed, 8);
  RepOptions null_opts;
  null_opts.common_null = true;
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const HerglotzRep rep = random_rep(rng, trial % 2 ? null_opts : RepOptions{});
    const cplx z = random_point(rng, true);
    const BoundReport w = weak_strong_check(rep, z, 1, kSeed + trial);
    const BoundReport f = factor_check(rep, z);
    worst = std::max({worst, w.worst_ratio, f.worst_ratio});
    if (!w.pass || !f.pass) ++violations;
  }
  return {at_i == 1.0 && std::abs(at_2i - 2.0) <= 1e-9 && violations == 0,
          fmt("c2(i) = %.17g, c2(2i) = %.17g, worst bound ratio %.6f", at_i, at_2i, worst) +
              fmt(", %.0f violations in 1000 trials", violations)};
}

Outcome decay() {
  SturmLiouvilleConfig config;
  config.n = 400;
  config.variant = BoundaryVariant::DissipativeInterval;
  config.phi = identity_rep(1);
  const Family g = build_sturm_liouville(config);
  const ZGrid points{{0.0, 1.0}, {2.0, 3.0}, {-0.5, 0.1}, {0.7, 10.0}, {3.0, 1.0}};
  double lo = 1e300, hi = -1e300;
  for (const cplx z : points) {
    const double slope = decay_exponent(g, z).slope;
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  return {lo >= -2.1 && hi <= -1.9 && hi - lo <= 0.05, fmt("slopes in [%.4f, %.4f], spread %.4f", lo, hi, hi - lo)};
}

Outcome continuous_sweep() {
  const std::vector<Index> n_list{50, 100, 200, 400};
  const SweepReport a = sweep_continuous_spectrum(diagonal_harmonic, default_grid(), n_list, 100, kSeed);
  const SweepReport b = sweep_continuous_spectrum(diagonal_harmonic, default_grid(), n_list, 100, kSeed);
  bool same = a.rows.size() == b.rows.size();
  for (std::size_t k = 0; same && k < a.rows.size(); ++k) {
    const SweepRow& x = a.rows[k];
    const SweepRow& y = b.rows[k];
    same = x.n == y.n && x.z == y.z && x.sigma_min == y.sigma_min && x.min_ratio == y.min_ratio &&
           x.max_ratio == y.max_ratio && x.c1 == y.c1 && x.c2 == y.c2;
  }
  std::string detail = std::string("monotone ") + (a.monotone ? "yes" : "no") + ", harnack " +
                       (a.harnack ? "yes" : "no") + ", repeat identical " + (same ? "yes" : "no") + ": " + a.verdict;
  return {a.monotone && a.harnack && same, detail};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NEVLAB_CLI_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path root = fs::current_path() / "acceptance-cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string demo = NEVLAB_DEMO_DOCUMENT;
  const int first = run_cli("run " + demo + " --out " + (root / "a").string());
  const int second = run_cli("run " + demo + " --out " + (root / "b").string());

  int files = 0;
  int differing = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    const fs::path other = root / "b" / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
  }
  for (const auto& entry : fs::directory_iterator(root / "b")) {
    if (!fs::exists(root / "a" / entry.path().filename())) ++differing;
  }

  std::ofstream(root / "failing.json") << R"({
    "version": "nevlab/1",
    "entities": [
      { "name": "phi", "kind": "herglotz", "b1": [[1]] },
      { "name": "g", "kind": "sturm_liouville", "n": 48, "length": 1, "variant": "dissipative-interval", "phi": "phi" }
    ],
    "tasks": [{ "name": "d", "kind": "decay", "target": "g", "expect": [-1.0, -0.5] }]
  })";
  std::ofstream(root / "malformed.json") << "{ \"version\": ";
  const int failing = run_cli("run " + (root / "failing.json").string() + " --out " + (root / "c").string());
  const int malformed = run_cli("run " + (root / "malformed.json").string());
  const int usage = run_cli("--no-such-flag");

  char buf[256];
  std::snprintf(buf, sizeof buf, "%d files, %d differing; exit codes demo %d/%d, failing %d, malformed %d, usage %d",
                files, differing, first, second, failing, malformed, usage);
  const bool pass = files > 0 && differing == 0 && first == 0 && second == 0 && failing == 1 && malformed == 2 &&
                    usage == 2;
  if (pass) fs::remove_all(root);
  return {pass, buf};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "kernel positivity", 30.0, kernel_positivity},
      {2, "invariance reports", 60.0, invariance_reports},
      {3, "cayley and schur kernel chain", 0.0, cayley_chain},
      {4, "classification agreement", 0.0, classification_agreement},
      {5, "J-unitary invariance", 0.0, j_unitary_invariance},
      {6, "harnack certificates", 0.0, harnack},
      {7, "additive split", 0.0, split},
      {8, "resolvent-type estimates", 0.0, estimates},
      {9, "inverse singular value decay", 120.0, decay},
      {10, "continuous spectrum sweep", 0.0, continuous_sweep},
      {11, "cli determinism", 0.0, cli_determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      o.pass = false;
      o.detail += fmt(" (over the %.0f s budget)", c.budget_seconds);
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %-32s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
