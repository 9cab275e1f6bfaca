#include "nevlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "nevlab/analysis.hpp"
#include "nevlab/examples.hpp"
#include "nevlab/invariance.hpp"
#include "nevlab/pairs.hpp"
#include "nevlab/random.hpp"
#include "nevlab/relations.hpp"

namespace nevlab::cli {

namespace {

const std::set<std::string> kEntityKinds{"herglotz", "pair", "sturm_liouville", "ex4a", "diagonal_sequence"};
const std::set<std::string> kTaskKinds{"classify", "pair_check", "invariance", "harnack", "sandwich", "split",
                                       "bounds", "schatten", "decay", "sweep", "fill", "form_domain"};

// ---------------------------------------------------------------------------
// JSON <-> numerics

cplx complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw DomainError(where + ": expected a number or a [re, im] pair");
}

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw DomainError(where + ": expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  ComplexMatrix m;
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw DomainError(where + ": row " + std::to_string(r) + " is not an array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw DomainError(where + ": ragged rows");
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)],
                                  where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

double number_or(const Json& spec, const char* key, double fallback, const std::string& where) {
  if (!spec.contains(key)) return fallback;
  if (!spec[key].is_number()) throw DomainError(where + ": '" + key + "' must be a number");
  return spec[key].get<double>();
}

Index index_or(const Json& spec, const char* key, Index fallback, const std::string& where) {
  if (!spec.contains(key)) return fallback;
  if (!spec[key].is_number_integer()) throw DomainError(where + ": '" + key + "' must be an integer");
  return spec[key].get<Index>();
}

std::string string_or(const Json& spec, const char* key, const std::string& fallback, const std::string& where) {
  if (!spec.contains(key)) return fallback;
  if (!spec[key].is_string()) throw DomainError(where + ": '" + key + "' must be a string");
  return spec[key].get<std::string>();
}

std::vector<Index> index_list(const Json& spec, const char* key, const std::string& where) {
  if (!spec.contains(key) || !spec[key].is_array() || spec[key].empty()) {
    throw DomainError(where + ": '" + key + "' must be a non-empty array of integers");
  }
  std::vector<Index> out;
  for (const Json& v : spec[key]) {
    if (!v.is_number_integer()) throw DomainError(where + ": '" + key + "' must contain integers");
    out.push_back(v.get<Index>());
  }
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k] <= out[k - 1]) throw DomainError(where + ": '" + key + "' must be strictly increasing");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entity registry

struct Built {
  std::string kind;
  std::optional<HerglotzRep> rep;
  std::optional<ComplexMatrix> offset;
  std::optional<NevanlinnaPair> pair;
  std::optional<SturmLiouvilleConfig> sturm;
  std::optional<Ex4AConfig> ex4a;
  Index n = 0;
  double exponent = 1.0;
};

Family diagonal_family(Index n, double exponent) {
  RealVector d(n);
  for (Index k = 0; k < n; ++k) d(k) = std::pow(static_cast<double>(k + 1), -exponent);
  const ComplexMatrix diag = d.cast<cplx>().asDiagonal();
  return Family(n, [diag](cplx z) { return ComplexMatrix(z * diag); },
                "z*diag(k^-" + std::to_string(exponent) + ")", [diag](cplx) { return diag; });
}

class Registry {
 public:
  explicit Registry(const TolerancePolicy& tol) : tol_(tol) {}

  void add(const Entity& e) {
    const std::string where = "entity '" + e.name + "'";
    Built b;
    b.kind = e.kind;
    const Json& s = e.spec;
    if (e.kind == "herglotz") {
      build_rep(s, where, b);
    } else if (e.kind == "pair") {
      b.pair = build_pair(s, where);
    } else if (e.kind == "sturm_liouville") {
      SturmLiouvilleConfig cfg;
      cfg.n = index_or(s, "n", 64, where);
      cfg.length = number_or(s, "length", 1.0, where);
      const std::string variant = string_or(s, "variant", "dissipative-interval", where);
      if (variant == "dissipative-interval") {
        cfg.variant = BoundaryVariant::DissipativeInterval;
      } else if (variant == "halfline-robin") {
        cfg.variant = BoundaryVariant::HalflineRobin;
      } else if (variant == "dissipative-halfline") {
        cfg.variant = BoundaryVariant::DissipativeHalfline;
      } else {
        throw DomainError(where + ": unknown variant '" + variant + "'");
      }
      if (s.contains("phi")) {
        const Built& phi = lookup(string_or(s, "phi", "", where), where);
        if (!phi.rep) throw DomainError(where + ": 'phi' must name a herglotz entity");
        cfg.phi = *phi.rep;
      }
      cfg.validate();
      b.sturm = cfg;
    } else if (e.kind == "ex4a") {
      Ex4AConfig cfg;
      cfg.n = index_or(s, "n", 30, where);
      cfg.c_perturbation = number_or(s, "perturbation", 0.0, where);
      cfg.seed = static_cast<std::uint64_t>(index_or(s, "seed", 0, where));
      const double base = number_or(s, "b_base", 2.0, where);
      if (!(base > 1.0)) throw DomainError(where + ": 'b_base' must exceed 1");
      cfg.b_decay = [base](Index j) { return std::pow(base, -static_cast<double>(j)); };
      cfg.validate();
      b.ex4a = cfg;
    } else if (e.kind == "diagonal_sequence") {
      b.n = index_or(s, "n", 50, where);
      b.exponent = number_or(s, "exponent", 1.0, where);
      if (b.n < 1) throw DomainError(where + ": 'n' must be positive");
    } else {
      throw DomainError(where + ": unknown kind '" + e.kind + "'");
    }
    items_.emplace(e.name, std::move(b));
  }

  bool has(const std::string& name) const { return items_.count(name) > 0; }
  const Built& get(const std::string& name) const { return items_.at(name); }

  bool is_family(const std::string& name) const { return has(name) && get(name).kind != "pair"; }

  Family family(const std::string& name) const {
    const Built& b = get(name);
    if (b.rep) return b.offset ? with_offset(*b.rep, *b.offset, name) : as_family(*b.rep, name);
    if (b.sturm) return build_sturm_liouville(*b.sturm);
    if (b.ex4a) return build_ex4a(*b.ex4a).f;
    if (b.kind == "diagonal_sequence") return diagonal_family(b.n, b.exponent);
    throw DomainError("entity '" + name + "' is a pair, not a family");
  }

  NevanlinnaPair pair(const std::string& name) const {
    const Built& b = get(name);
    if (b.pair) return *b.pair;
    return canonical_pair(family(name));
  }

 private:
  const Built& lookup(const std::string& name, const std::string& where) const {
    if (!has(name)) throw DomainError(where + ": references undefined entity '" + name + "'");
    return get(name);
  }

  void build_rep(const Json& s, const std::string& where, Built& b) const {
    Index dim = index_or(s, "dim", -1, where);
    std::optional<ComplexMatrix> b0, b1, offset;
    if (s.contains("b0")) b0 = matrix_from_json(s["b0"], where + " b0");
    if (s.contains("b1")) b1 = matrix_from_json(s["b1"], where + " b1");
    if (s.contains("offset")) offset = matrix_from_json(s["offset"], where + " offset");
    std::vector<Atom> atoms;
    if (s.contains("atoms")) {
      if (!s["atoms"].is_array()) throw DomainError(where + ": 'atoms' must be an array of [t, matrix]");
      for (std::size_t k = 0; k < s["atoms"].size(); ++k) {
        const Json& a = s["atoms"][k];
        const std::string at = where + " atoms[" + std::to_string(k) + "]";
        if (!a.is_array() || a.size() != 2 || !a[0].is_number()) throw DomainError(at + ": expected [t, matrix]");
        atoms.push_back({a[0].get<double>(), matrix_from_json(a[1], at)});
      }
    }
    for (const auto* m : {&b0, &b1, &offset}) {
      if (*m && dim < 0) dim = (*m)->rows();
    }
    if (dim < 0 && !atoms.empty()) dim = atoms.front().weight.rows();
    if (dim < 1) throw DomainError(where + ": cannot infer the dimension; give 'dim'");
    const ComplexMatrix zero = ComplexMatrix::Zero(dim, dim);
    b.rep.emplace(b0.value_or(zero), b1.value_or(zero), OperatorMeasure(dim, std::move(atoms), tol_), tol_);
    if (offset) {
      if (offset->rows() != dim || offset->cols() != dim) throw DimensionError(where + ": offset has the wrong size");
      if (hermitian_defect(*offset) > tol_.eps_eq * (1.0 + spectral_norm(*offset))) {
        throw DomainError(where + ": offset must be Hermitian");
      }
      b.offset = offset;
    }
  }

  NevanlinnaPair build_pair(const Json& s, const std::string& where) const {
    const std::string form = string_or(s, "form", "", where);
    if (form == "canonical") {
      const std::string of = string_or(s, "of", "", where);
      lookup(of, where);
      if (!is_family(of)) throw DomainError(where + ": canonical pair needs a family, '" + of + "' is a pair");
      return canonical_pair(family(of));
    }
    if (form == "constant") {
      if (!s.contains("phi") || !s.contains("psi")) throw DomainError(where + ": constant pair needs 'phi' and 'psi'");
      return constant_pair(matrix_from_json(s["phi"], where + " phi"), matrix_from_json(s["psi"], where + " psi"));
    }
    if (form == "direct_sum") {
      if (!s.contains("parts") || !s["parts"].is_array() || s["parts"].size() < 2) {
        throw DomainError(where + ": direct_sum needs at least two 'parts'");
      }
      std::optional<NevanlinnaPair> acc;
      for (const Json& p : s["parts"]) {
        if (!p.is_string()) throw DomainError(where + ": 'parts' must list entity names");
        lookup(p.get<std::string>(), where);
        NevanlinnaPair next = pair(p.get<std::string>());
        acc = acc ? direct_sum(*acc, next) : next;
      }
      return *acc;
    }
    if (form == "transform") {
      const std::string of = string_or(s, "of", "", where);
      lookup(of, where);
      NevanlinnaPair p = pair(of);
      if (!s.contains("steps") || !s["steps"].is_array()) throw DomainError(where + ": transform needs 'steps'");
      for (std::size_t k = 0; k < s["steps"].size(); ++k) {
        const Json& step = s["steps"][k];
        const std::string at = where + " steps[" + std::to_string(k) + "]";
        if (step.contains("shift")) {
          p = shift_transform(p, matrix_from_json(step["shift"], at));
        } else if (step.contains("congruence")) {
          p = congruence_transform(p, matrix_from_json(step["congruence"], at));
        } else if (step.contains("invert")) {
          p = inverse_transform(p);
        } else if (step.contains("herglotz_shift")) {
          const Built& m = lookup(string_or(step, "herglotz_shift", "", at), at);
          if (!m.rep) throw DomainError(at + ": 'herglotz_shift' must name a herglotz entity");
          p = herglotz_shift_transform(p, *m.rep, tol_);
        } else {
          throw DomainError(at + ": expected one of shift, congruence, invert, herglotz_shift");
        }
      }
      return p;
    }
    throw DomainError(where + ": unknown pair form '" + form + "'");
  }

  TolerancePolicy tol_;
  std::map<std::string, Built> items_;
};

// ---------------------------------------------------------------------------
// Task execution

struct Context {
  const JobDocument& doc;
  const Registry& registry;
  ZGrid grid;
  std::uint64_t seed;
};

void require_target(const Task& t, const Registry& reg, bool family_only) {
  if (t.target.empty()) throw DomainError("task '" + t.name + "': missing 'target'");
  if (!reg.has(t.target)) throw DomainError("task '" + t.name + "': references undefined entity '" + t.target + "'");
  if (family_only && !reg.is_family(t.target)) {
    throw DomainError("task '" + t.name + "': target '" + t.target + "' must be a family, not a pair");
  }
}

const HerglotzRep& require_rep(const Task& t, const Registry& reg) {
  require_target(t, reg, true);
  const Built& b = reg.get(t.target);
  if (!b.rep) throw DomainError("task '" + t.name + "': target '" + t.target + "' must be a herglotz entity");
  return *b.rep;
}

void run_classify(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, false);
  const std::string where = "task '" + t.name + "'";
  const double floor = number_or(t.params, "uniform_floor", 0.0, where);
  out.table.columns = {"target", "z_re", "z_im", "class", "lambda_min", "kernel_dim", "phi_rcond", "psi_rcond"};
  if (ctx.registry.is_family(t.target)) {
    ClassifyOptions opts;
    opts.uniform_floor = floor;
    opts.grid = ctx.grid;
    const Classification c = classify(ctx.registry.family(t.target), ctx.doc.tol, opts);
    out.summary["class"] = to_string(c.cls);
    out.summary["lambda_min"] = c.lambda_min;
    out.summary["kernel_dim"] = c.kernel_dim;
    out.summary["symmetry_residual"] = c.symmetry_residual;
    out.summary["worst_sign_margin"] = c.worst_sign_margin;
    if (!c.reason.empty()) out.summary["reason"] = c.reason;
    out.table.rows.push_back({t.target, 0.0, 1.0, to_string(c.cls), c.lambda_min, c.kernel_dim, nullptr, nullptr});
    out.pass = c.cls != FamilyClass::NotR;
  } else {
    PairClassifyOptions opts;
    opts.uniform_floor = floor;
    const PairClassification c = classify_family_pair(ctx.registry.pair(t.target), kReferencePoint, ctx.doc.tol, opts);
    out.summary["class"] = to_string(c.cls);
    out.summary["lambda_min"] = c.lambda_min;
    out.summary["kernel_dim"] = c.kernel_dim;
    if (c.cls == PairClass::Ru) {
      out.summary["phi_rcond"] = c.phi_rcond;
      out.summary["psi_rcond"] = c.psi_rcond;
    }
    out.table.rows.push_back({t.target, 0.0, 1.0, to_string(c.cls), c.lambda_min, c.kernel_dim,
                              c.cls == PairClass::Ru ? Json(c.phi_rcond) : Json(nullptr),
                              c.cls == PairClass::Ru ? Json(c.psi_rcond) : Json(nullptr)});
    out.pass = true;
  }
}

void run_pair_check(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, false);
  const NevanlinnaPair pair = ctx.registry.pair(t.target);
  const PairReport rep = validate(pair, ctx.grid, ctx.doc.tol);
  out.table.columns = {"z_re", "z_im", "np1_min_eigenvalue", "np2_residual", "np3_rcond", "cayley_norm",
                       "kernel_identity_residual"};
  double worst_norm = 0.0;
  double worst_identity = 0.0;
  for (const PairSample& s : rep.samples) {
    Json norm = nullptr, identity = nullptr;
    if (s.z.imag() > 0.0) {
      const double cn = spectral_norm(cayley(pair, s.z));
      const double res =
          std::max(kernel_identity_residual(pair, s.z, s.z), kernel_identity_residual(pair, s.z, kReferencePoint));
      worst_norm = std::max(worst_norm, cn);
      worst_identity = std::max(worst_identity, res);
      norm = cn;
      identity = res;
    }
    out.table.rows.push_back({s.z.real(), s.z.imag(), s.np1_min_eigenvalue, s.np2_residual, s.np3_rcond, norm, identity});
  }
  out.summary["axioms_pass"] = rep.pass;
  out.summary["worst_cayley_norm"] = worst_norm;
  out.summary["worst_kernel_identity_residual"] = worst_identity;
  out.pass = rep.pass && worst_norm <= 1.0 + 1e-10 && worst_identity <= 1e-10;
}

void append_invariance(const InvarianceReport& r, TaskResult& out) {
  for (const InvarianceRow& row : r.rows) {
    out.table.rows.push_back({r.statement, row.z.real(), row.z.imag(), row.lambda_min, row.null_dim, row.rcond,
                              row.distance, row.flag});
  }
  Json s = Json::object();
  s["pass"] = r.pass;
  s["worst_deviation"] = r.worst_deviation;
  s["tolerance"] = r.tolerance;
  if (!r.note.empty()) s["note"] = r.note;
  out.summary["checks"][r.statement] = s;
  out.pass = out.pass && r.pass;
}

void run_invariance(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, false);
  const std::string where = "task '" + t.name + "'";
  const double a = number_or(t.params, "a", 0.0, where);
  const bool is_family = ctx.registry.is_family(t.target);
  std::vector<std::string> checks;
  if (t.params.contains("checks")) {
    for (const Json& c : t.params["checks"]) checks.push_back(c.get<std::string>());
  } else {
    checks = {"point", "resolvent", "boundedness", "mul"};
    if (is_family) checks.insert(checks.begin() + 1, "imag-kernel");
  }
  out.table.columns = {"statement", "z_re", "z_im", "lambda_min", "null_dim", "rcond", "distance", "flag"};
  out.summary["a"] = a;
  out.summary["checks"] = Json::object();
  out.pass = true;
  const NevanlinnaPair pair = ctx.registry.pair(t.target);
  for (const std::string& c : checks) {
    if (c == "point") {
      append_invariance(check_point_invariance(pair, a, ctx.grid, ctx.doc.tol), out);
    } else if (c == "imag-kernel") {
      if (!is_family) throw DomainError(where + ": imag-kernel needs a family target");
      append_invariance(check_imag_kernel_invariance(ctx.registry.family(t.target), ctx.grid, ctx.doc.tol), out);
    } else if (c == "resolvent") {
      append_invariance(check_resolvent_invariance(pair, a, ctx.grid, ctx.doc.tol), out);
    } else if (c == "boundedness") {
      append_invariance(check_boundedness_invariance(pair, ctx.grid, ctx.doc.tol), out);
    } else if (c == "mul") {
      append_invariance(check_mul_invariance(pair, ctx.grid, ctx.doc.tol), out);
    } else {
      throw DomainError(where + ": unknown check '" + c + "'");
    }
  }
}

void run_harnack(const Task& t, const Context& ctx, TaskResult& out) {
  const std::string where = "task '" + t.name + "'";
  if (!t.params.contains("z1") || !t.params.contains("z2")) throw DomainError(where + ": needs 'z1' and 'z2'");
  const cplx z1 = complex_from_json(t.params["z1"], where + " z1");
  const cplx z2 = complex_from_json(t.params["z2"], where + " z2");
  const int trials = static_cast<int>(index_or(t.params, "trials", 1000, where));
  const HarnackCertificate cert = certify_harnack(z1, z2, trials, ctx.seed);
  out.table.columns = {"z1_re", "z1_im", "z2_re", "z2_im", "c1", "c2", "trials", "worst_violation"};
  out.table.rows.push_back({z1.real(), z1.imag(), z2.real(), z2.imag(), cert.constants.c1, cert.constants.c2,
                            cert.trials, cert.worst_violation});
  out.summary["c1"] = cert.constants.c1;
  out.summary["c2"] = cert.constants.c2;
  out.summary["cone"] = "c*y + sum of Poisson kernels";
  out.summary["worst_violation"] = cert.worst_violation;
  out.pass = cert.pass;
}

void run_sandwich(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, true);
  const std::string where = "task '" + t.name + "'";
  const int trials = static_cast<int>(index_or(t.params, "trials", 100, where));
  const cplx z0 = t.params.contains("z0") ? complex_from_json(t.params["z0"], where + " z0") : kReferencePoint;
  const SandwichReport r = form_sandwich_check(ctx.registry.family(t.target), ctx.grid, z0, trials, ctx.seed);
  out.table.columns = {"z_re", "z_im", "c1", "c2", "min_ratio", "max_ratio", "worst_violation"};
  for (const SandwichRow& row : r.rows) {
    out.table.rows.push_back({row.z.real(), row.z.imag(), row.c1, row.c2, row.min_ratio, row.max_ratio,
                              row.worst_violation});
  }
  out.summary["z0"] = complex_to_json(z0);
  out.summary["worst_violation"] = r.worst_violation;
  out.pass = r.pass;
}

void run_split(const Task& t, const Context& ctx, TaskResult& out) {
  const HerglotzRep& rep = require_rep(t, ctx.registry);
  const Built& b = ctx.registry.get(t.target);
  const ComplexMatrix offset = b.offset.value_or(ComplexMatrix::Zero(rep.dim(), rep.dim()));
  const SplitResult s = split_bounded_imag(rep, offset, ctx.grid);
  const ComplexMatrix expected = rep.b0() + offset;
  const double recovery = spectral_norm(s.t - expected) / (1.0 + spectral_norm(expected));
  out.table.columns = {"z_re", "z_im", "deviation"};
  const Family f = ctx.registry.family(t.target);
  const double scale = 1.0 + spectral_norm(s.t);
  for (const cplx z : ctx.grid) {
    out.table.rows.push_back({z.real(), z.imag(), spectral_norm(f(z) - evaluate(s.g, z) - s.t) / scale});
  }
  out.summary["t"] = matrix_to_json(s.t);
  out.summary["constancy"] = s.constancy;
  out.summary["hermitian_defect"] = s.hermitian_defect;
  out.summary["recovery_error"] = recovery;
  out.pass = s.pass && recovery <= 1e-8;
}

void run_bounds(const Task& t, const Context& ctx, TaskResult& out) {
  const HerglotzRep& rep = require_rep(t, ctx.registry);
  const int trials = static_cast<int>(index_or(t.params, "trials", 100, "task '" + t.name + "'"));
  out.table.columns = {"z_re", "z_im", "c2", "weak_strong_ratio", "factor_ratio", "kernel_leak"};
  out.pass = true;
  std::uint64_t stream = 0;
  for (const cplx z : upper_half(ctx.grid)) {
    const BoundReport w = weak_strong_check(rep, z, trials, make_rng(ctx.seed, ++stream)());
    const BoundReport f = factor_check(rep, z, ctx.doc.tol);
    out.table.rows.push_back({z.real(), z.imag(), w.c2, w.worst_ratio, f.worst_ratio, f.kernel_leak});
    out.pass = out.pass && w.pass && f.pass;
  }
}

void run_schatten(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, true);
  const std::string where = "task '" + t.name + "'";
  const Family f = ctx.registry.family(t.target);
  Index lo = 1, hi = f.dim();
  if (t.params.contains("j_range")) {
    const Json& r = t.params["j_range"];
    if (!r.is_array() || r.size() != 2) throw DomainError(where + ": 'j_range' must be [lo, hi]");
    lo = r[0].get<Index>();
    hi = r[1].get<Index>();
  }
  const DecayReport r = schatten_decay(f, ctx.grid, lo, hi);
  out.table.columns = {"z_re", "z_im", "slope", "points"};
  for (const DecayRow& row : r.rows) out.table.rows.push_back({row.z.real(), row.z.imag(), row.slope, row.points});
  out.summary["j_first"] = r.j_first;
  out.summary["j_last"] = r.j_last;
  out.summary["spread"] = r.spread;
  out.summary["verdict"] = r.verdict;
  out.pass = r.pass;
}

void run_decay(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, true);
  const std::string where = "task '" + t.name + "'";
  const Family g = ctx.registry.family(t.target);
  ZGrid points;
  if (t.params.contains("points")) {
    for (const Json& p : t.params["points"]) points.push_back(complex_from_json(p, where + " points"));
  } else {
    points = {{0.0, 1.0}, {2.0, 3.0}, {-0.5, 0.1}, {0.7, 10.0}, {3.0, 1.0}};
  }
  const double max_spread = number_or(t.params, "max_spread", 0.05, where);
  out.table.columns = {"z_re", "z_im", "slope", "j_first", "j_last"};
  out.series.columns = {"z_re", "z_im", "j", "s_j"};
  double lo = 1e300, hi = -1e300;
  bool in_band = true;
  std::optional<std::pair<double, double>> band;
  if (t.params.contains("expect")) {
    const Json& e = t.params["expect"];
    band = std::make_pair(e.at(0).get<double>(), e.at(1).get<double>());
  }
  for (const cplx z : points) {
    const DecayFit fit = decay_exponent(g, z);
    out.table.rows.push_back({z.real(), z.imag(), fit.slope, fit.j_first, fit.j_last});
    for (Index j = 0; j < fit.inverse_singular.size(); ++j) {
      out.series.rows.push_back({z.real(), z.imag(), j + 1, fit.inverse_singular(j)});
    }
    lo = std::min(lo, fit.slope);
    hi = std::max(hi, fit.slope);
    if (band) in_band = in_band && fit.slope >= band->first && fit.slope <= band->second;
  }
  out.summary["spread"] = hi - lo;
  out.summary["min_slope"] = lo;
  out.summary["max_slope"] = hi;
  out.pass = (hi - lo) <= max_spread && in_band;
}

void run_sweep(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, true);
  const std::string where = "task '" + t.name + "'";
  const Built& b = ctx.registry.get(t.target);
  if (b.kind != "diagonal_sequence") throw DomainError(where + ": sweep needs a diagonal_sequence target");
  const std::vector<Index> n_list = index_list(t.params, "n_list", where);
  const int trials = static_cast<int>(index_or(t.params, "trials", 100, where));
  const double exponent = b.exponent;
  const SweepReport r = sweep_continuous_spectrum([exponent](Index n) { return diagonal_family(n, exponent); },
                                                  ctx.grid, n_list, trials, ctx.seed);
  out.table.columns = {"n", "z_re", "z_im", "sigma_min", "min_ratio", "max_ratio", "c1", "c2"};
  for (const SweepRow& row : r.rows) {
    out.table.rows.push_back({row.n, row.z.real(), row.z.imag(), row.sigma_min, row.min_ratio, row.max_ratio, row.c1,
                              row.c2});
  }
  out.summary["monotone"] = r.monotone;
  out.summary["harnack"] = r.harnack;
  out.summary["decays"] = r.decays;
  out.summary["verdict"] = r.verdict;
  out.summary["label"] = "finite-dimensional truncation analogue of continuous spectrum";
  out.pass = r.pass;
}

void run_fill(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, true);
  const std::string where = "task '" + t.name + "'";
  const Built& b = ctx.registry.get(t.target);
  if (!b.sturm) throw DomainError(where + ": fill needs a sturm_liouville target");
  const std::vector<Index> n_list = index_list(t.params, "n_list", where);
  const double a = number_or(t.params, "a", 1.0, where);
  const double step = b.sturm->length / static_cast<double>(b.sturm->n);
  const FillReport r = spectrum_fill_sweep(b.sturm->phi, step, n_list, a, upper_half(ctx.grid));
  out.table.columns = {"n", "length", "z_re", "z_im", "epsilon"};
  for (const FillRow& row : r.rows) out.table.rows.push_back({row.n, row.length, row.z.real(), row.z.imag(), row.epsilon});
  out.summary["a"] = a;
  out.summary["step"] = step;
  out.pass = r.pass;
}

void run_form_domain(const Task& t, const Context& ctx, TaskResult& out) {
  require_target(t, ctx.registry, true);
  const Built& b = ctx.registry.get(t.target);
  if (!b.ex4a) throw DomainError("task '" + t.name + "': form_domain needs an ex4a target");
  const FormDomainReport r = form_domain_report(build_ex4a(*b.ex4a), ctx.grid);
  out.table.columns = {"z_re", "z_im", "min_ratio", "max_ratio", "c1", "c2", "identity_error", "m_rcond"};
  for (const FormDomainRow& row : r.rows) {
    out.table.rows.push_back({row.z.real(), row.z.imag(), row.min_ratio, row.max_ratio, row.c1, row.c2,
                              row.identity_error, row.m_rcond});
  }
  out.pass = r.pass;
}

using Runner = void (*)(const Task&, const Context&, TaskResult&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"classify", run_classify}, {"pair_check", run_pair_check}, {"invariance", run_invariance},
      {"harnack", run_harnack},   {"sandwich", run_sandwich},     {"split", run_split},
      {"bounds", run_bounds},     {"schatten", run_schatten},     {"decay", run_decay},
      {"sweep", run_sweep},       {"fill", run_fill},             {"form_domain", run_form_domain}};
  return table;
}

// Static parameter checks that do not need numerics.
void check_task_params(const Task& t, const Registry& reg, std::vector<std::string>& issues) {
  const std::string where = "task '" + t.name + "'";
  try {
    if (t.kind == "harnack") {
      if (!t.params.contains("z1") || !t.params.contains("z2")) throw DomainError(where + ": needs 'z1' and 'z2'");
      complex_from_json(t.params["z1"], where + " z1");
      complex_from_json(t.params["z2"], where + " z2");
      return;
    }
    if (t.target.empty()) throw DomainError(where + ": missing 'target'");
    if (!reg.has(t.target)) throw DomainError(where + ": references undefined entity '" + t.target + "'");
    if (t.kind == "sweep" || t.kind == "fill") index_list(t.params, "n_list", where);
    if (t.params.contains("grid")) resolve_grid(t.params["grid"], 0);
  } catch (const std::exception& e) {
    issues.emplace_back(e.what());
  }
}

std::string format_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (const char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

// ---------------------------------------------------------------------------

ParseError::ParseError(std::vector<std::string> issues)
    : std::runtime_error(issues.empty() ? "invalid document" : issues.front()), issues_(std::move(issues)) {}

bool JobDocument::operator==(const JobDocument& other) const {
  return version == other.version && seed == other.seed && tol.eps_psd == other.tol.eps_psd &&
         tol.eps_rank == other.tol.eps_rank && tol.eps_eq == other.tol.eps_eq && grid == other.grid &&
         entities == other.entities && tasks == other.tasks && output == other.output;
}

Json grid_from_flag(std::string_view text) {
  if (text == "default" || text == "extended") return std::string(text);
  Json points = Json::array();
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ';')) {
    double re = 0.0, im = 0.0;
    char comma = 0;
    std::istringstream is(item);
    if (!(is >> re >> comma >> im) || comma != ',') {
      throw DomainError("grid: expected 'default', 'extended' or 're,im;re,im;...', got '" + std::string(text) + "'");
    }
    points.push_back(Json::array({re, im}));
  }
  if (points.empty()) throw DomainError("grid: no points given");
  return points;
}

ZGrid resolve_grid(const Json& grid, std::uint64_t seed) {
  if (grid.is_string()) {
    const std::string g = grid.get<std::string>();
    if (g == "default") return default_grid();
    if (g == "extended") return extended_grid(seed);
    throw DomainError("grid: unknown grid name '" + g + "'");
  }
  if (!grid.is_array() || grid.empty()) throw DomainError("grid: expected a name or a non-empty list of points");
  ZGrid out;
  for (const Json& p : grid) {
    const cplx z = complex_from_json(p, "grid point");
    if (z.imag() == 0.0) throw DomainError("grid: points must lie off the real axis");
    out.push_back(z);
  }
  return out;
}

std::vector<std::string> validate(const JobDocument& doc) {
  std::vector<std::string> issues;
  if (doc.version != kVersion) issues.push_back("version: expected \"" + std::string(kVersion) + "\", got \"" + doc.version + "\"");
  try {
    doc.tol.validate();
  } catch (const std::exception& e) {
    issues.emplace_back(std::string("tolerances: ") + e.what());
  }
  try {
    resolve_grid(doc.grid, doc.seed);
  } catch (const std::exception& e) {
    issues.emplace_back(e.what());
  }

  std::map<std::string, std::size_t> seen;
  for (std::size_t k = 0; k < doc.entities.size(); ++k) {
    const Entity& e = doc.entities[k];
    const auto [it, fresh] = seen.emplace(e.name, k);
    if (!fresh) {
      issues.push_back("duplicate entity name '" + e.name + "': entities[" + std::to_string(it->second) +
                       "] and entities[" + std::to_string(k) + "]");
    }
    if (kEntityKinds.count(e.kind) == 0) issues.push_back("entities[" + std::to_string(k) + "]: unknown entity kind '" + e.kind + "'");
  }

  Registry registry(doc.tol);
  for (const Entity& e : doc.entities) {
    if (kEntityKinds.count(e.kind) == 0 || registry.has(e.name)) continue;
    try {
      registry.add(e);
    } catch (const std::exception& ex) {
      issues.emplace_back(ex.what());
    }
  }

  std::map<std::string, std::size_t> task_names;
  for (std::size_t k = 0; k < doc.tasks.size(); ++k) {
    const Task& t = doc.tasks[k];
    const auto [it, fresh] = task_names.emplace(t.name, k);
    if (!fresh) {
      issues.push_back("duplicate task name '" + t.name + "': tasks[" + std::to_string(it->second) + "] and tasks[" +
                       std::to_string(k) + "]");
    }
    if (kTaskKinds.count(t.kind) == 0) {
      issues.push_back("tasks[" + std::to_string(k) + "]: unknown task kind '" + t.kind + "'");
      continue;
    }
    const bool defined = std::any_of(doc.entities.begin(), doc.entities.end(),
                                     [&](const Entity& e) { return e.name == t.target; });
    if (!t.target.empty() && defined && !registry.has(t.target)) continue;  // entity already reported
    check_task_params(t, registry, issues);
  }
  for (const std::string& f : doc.output.formats) {
    if (f != "json" && f != "csv") issues.push_back("output: unknown format '" + f + "'");
  }
  return issues;
}

JobDocument parse(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError({"syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      e.what()});
  }
  std::vector<std::string> issues;
  if (!root.is_object()) throw ParseError({"document: top level must be an object"});

  JobDocument doc;
  auto get_string = [&](const Json& obj, const char* key, const std::string& where, std::string& out) {
    if (!obj.contains(key)) {
      issues.push_back(where + ": missing '" + key + "'");
    } else if (!obj[key].is_string()) {
      issues.push_back(where + ": '" + key + "' must be a string");
    } else {
      out = obj[key].get<std::string>();
    }
  };

  get_string(root, "version", "document", doc.version);
  if (root.contains("seed")) {
    if (root["seed"].is_number_unsigned() || root["seed"].is_number_integer()) {
      doc.seed = root["seed"].get<std::uint64_t>();
    } else {
      issues.push_back("document: 'seed' must be a non-negative integer");
    }
  }
  if (root.contains("tolerances")) {
    const Json& t = root["tolerances"];
    for (const auto& [key, field] : {std::pair{"psd", &doc.tol.eps_psd}, std::pair{"rank", &doc.tol.eps_rank},
                                     std::pair{"eq", &doc.tol.eps_eq}}) {
      if (!t.contains(key)) continue;
      if (t[key].is_number()) {
        *field = t[key].get<double>();
      } else {
        issues.push_back(std::string("tolerances: '") + key + "' must be a number");
      }
    }
  }
  if (root.contains("grid")) doc.grid = root["grid"];

  auto split_object = [](const Json& obj, std::initializer_list<const char*> drop) {
    Json rest = Json::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(drop.begin(), drop.end(), [&](const char* d) { return it.key() == d; })) rest[it.key()] = it.value();
    }
    return rest;
  };

  if (root.contains("entities")) {
    if (!root["entities"].is_array()) {
      issues.push_back("document: 'entities' must be an array");
    } else {
      for (std::size_t k = 0; k < root["entities"].size(); ++k) {
        const Json& e = root["entities"][k];
        const std::string where = "entities[" + std::to_string(k) + "]";
        if (!e.is_object()) {
          issues.push_back(where + ": must be an object");
          continue;
        }
        Entity entity;
        get_string(e, "name", where, entity.name);
        get_string(e, "kind", where, entity.kind);
        entity.spec = split_object(e, {"name", "kind"});
        doc.entities.push_back(std::move(entity));
      }
    }
  }
  if (root.contains("tasks")) {
    if (!root["tasks"].is_array()) {
      issues.push_back("document: 'tasks' must be an array");
    } else {
      for (std::size_t k = 0; k < root["tasks"].size(); ++k) {
        const Json& t = root["tasks"][k];
        const std::string where = "tasks[" + std::to_string(k) + "]";
        if (!t.is_object()) {
          issues.push_back(where + ": must be an object");
          continue;
        }
        Task task;
        get_string(t, "kind", where, task.kind);
        if (t.contains("name")) {
          get_string(t, "name", where, task.name);
        } else {
          task.name = std::to_string(k) + "-" + task.kind;
        }
        if (t.contains("target")) get_string(t, "target", where, task.target);
        task.params = split_object(t, {"name", "kind", "target"});
        doc.tasks.push_back(std::move(task));
      }
    }
  }
  if (root.contains("output")) {
    const Json& o = root["output"];
    if (o.contains("directory")) get_string(o, "directory", "output", doc.output.directory);
    if (o.contains("formats")) {
      doc.output.formats.clear();
      for (const Json& f : o["formats"]) {
        if (f.is_string()) {
          doc.output.formats.push_back(f.get<std::string>());
        } else {
          issues.push_back("output: formats must be strings");
        }
      }
    }
  }

  for (std::string& issue : validate(doc)) issues.push_back(std::move(issue));
  if (!issues.empty()) throw ParseError(std::move(issues));
  return doc;
}

Json to_json(const JobDocument& doc) {
  Json root = Json::object();
  root["version"] = doc.version;
  root["seed"] = doc.seed;
  root["tolerances"] = {{"psd", doc.tol.eps_psd}, {"rank", doc.tol.eps_rank}, {"eq", doc.tol.eps_eq}};
  root["grid"] = doc.grid;
  root["entities"] = Json::array();
  for (const Entity& e : doc.entities) {
    Json j = {{"name", e.name}, {"kind", e.kind}};
    for (auto it = e.spec.begin(); it != e.spec.end(); ++it) j[it.key()] = it.value();
    root["entities"].push_back(std::move(j));
  }
  root["tasks"] = Json::array();
  for (const Task& t : doc.tasks) {
    Json j = {{"name", t.name}, {"kind", t.kind}};
    if (!t.target.empty()) j["target"] = t.target;
    for (auto it = t.params.begin(); it != t.params.end(); ++it) j[it.key()] = it.value();
    root["tasks"].push_back(std::move(j));
  }
  root["output"] = {{"directory", doc.output.directory}, {"formats", doc.output.formats}};
  return root;
}

std::string serialize(const JobDocument& doc) { return to_json(doc).dump(2) + "\n"; }

RunResult run(const JobDocument& doc) {
  Registry registry(doc.tol);
  for (const Entity& e : doc.entities) registry.add(e);
  const ZGrid grid = resolve_grid(doc.grid, doc.seed);

  RunResult result;
  result.pass = true;
  for (std::size_t k = 0; k < doc.tasks.size(); ++k) {
    const Task& t = doc.tasks[k];
    Context ctx{doc, registry, grid, make_rng(doc.seed, k + 1)()};
    if (t.params.contains("grid")) ctx.grid = resolve_grid(t.params["grid"], ctx.seed);
    TaskResult out;
    out.name = t.name;
    out.kind = t.kind;
    out.target = t.target;
    try {
      runners().at(t.kind)(t, ctx, out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.summary["error"] = e.what();
    }
    result.pass = result.pass && out.pass;
    result.tasks.push_back(std::move(out));
  }
  return result;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_cell(row[c]);
    out += "\n";
  }
  return out;
}

Json to_json(const TaskResult& result) {
  Json j = Json::object();
  j["task"] = result.name;
  j["kind"] = result.kind;
  if (!result.target.empty()) j["target"] = result.target;
  j["pass"] = result.pass;
  j["summary"] = result.summary;
  j["columns"] = result.table.columns;
  j["rows"] = Json::array();
  for (const auto& row : result.table.rows) j["rows"].push_back(Json(row));
  return j;
}

void write_reports(const RunResult& result, const JobDocument& doc) {
  namespace fs = std::filesystem;
  const fs::path dir(doc.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

  auto write = [](const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
  };
  const bool json = std::find(doc.output.formats.begin(), doc.output.formats.end(), "json") != doc.output.formats.end();
  const bool csv = std::find(doc.output.formats.begin(), doc.output.formats.end(), "csv") != doc.output.formats.end();

  Json summary = {{"version", doc.version}, {"seed", doc.seed}, {"pass", result.pass}, {"tasks", Json::array()}};
  for (const TaskResult& t : result.tasks) {
    if (json) write(dir / (t.name + ".json"), to_json(t).dump(2) + "\n");
    if (csv) {
      write(dir / (t.name + ".csv"), to_csv(t.table));
      if (!t.series.columns.empty()) write(dir / (t.name + ".series.csv"), to_csv(t.series));
    }
    summary["tasks"].push_back({{"name", t.name}, {"kind", t.kind}, {"pass", t.pass}});
  }
  write(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace nevlab::cli
