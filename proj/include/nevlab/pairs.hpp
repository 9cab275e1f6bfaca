#pragma once
// Nevanlinna pairs {Phi(z), Psi(z)}: the family of relations
// F(z) = {(Phi(z) h, Psi(z) h) : h in H}, including multivalued ones.

#include <functional>
#include <string>
#include <vector>

#include "nevlab/herglotz.hpp"
#include "nevlab/matnum.hpp"

namespace nevlab {

struct PairValue {
  ComplexMatrix phi;
  ComplexMatrix psi;
};

enum class PairOrigin { Canonical, Constant, Transformed, Explicit };

const char* to_string(PairOrigin origin);

class NevanlinnaPair {
 public:
  using Rule = std::function<PairValue(cplx)>;

  NevanlinnaPair(Index dim, Rule rule, PairOrigin origin, std::string label);

  Index dim() const noexcept { return dim_; }
  PairOrigin origin() const noexcept { return origin_; }
  const std::string& label() const noexcept { return label_; }

  /// Throws DomainError on the real axis.
  PairValue operator()(cplx z) const;

  /// The stacked 2n x n block [Phi(z); Psi(z)].
  ComplexMatrix stacked(cplx z) const;

 private:
  Index dim_;
  Rule rule_;
  PairOrigin origin_;
  std::string label_;
};

/// Phi = (F +- i)^{-1}, Psi = I -+ i Phi for z in C_+ (upper sign) and C_-.
/// Evaluation throws ConditioningError when F(z) +- i is singular.
NevanlinnaPair canonical_pair(const Family& f);

/// A z-independent pair (A, B).
NevanlinnaPair constant_pair(const ComplexMatrix& phi, const ComplexMatrix& psi, std::string label = "constant");

NevanlinnaPair explicit_pair(Index dim, NevanlinnaPair::Rule rule, std::string label);

/// Blockwise [[Phi1, 0], [0, Phi2]], [[Psi1, 0], [0, Psi2]].
NevanlinnaPair direct_sum(const NevanlinnaPair& a, const NevanlinnaPair& b);

struct PairSample {
  cplx z;
  double np1_min_eigenvalue = 0.0;  // of -i(Phi*Psi - Psi*Phi)/sign(Im z), scaled
  double np2_residual = 0.0;        // ||Psi(conj z)* Phi(z) - Phi(conj z)* Psi(z)||, relative
  double np3_rcond = 0.0;           // reciprocal condition of Psi +- i Phi
  bool np1 = false;
  bool np2 = false;
  bool np3 = false;
};

struct PairReport {
  std::vector<PairSample> samples;
  double worst_np1 = 0.0;
  double worst_np2 = 0.0;
  double worst_np3 = 1.0;
  bool pass = false;
};

PairReport validate(const NevanlinnaPair& pair, const ZGrid& samples, const TolerancePolicy& tol = {});

/// (Phi(w)* Psi(z) - Psi(w)* Phi(z)) / (z - conj w). Throws DomainError when
/// z = conj w within eps_eq.
ComplexMatrix pair_kernel(const NevanlinnaPair& pair, cplx z, cplx w, const TolerancePolicy& tol = {});

/// C(z) = (Psi - i Phi)(Psi + i Phi)^{-1}, z in C_+.
ComplexMatrix cayley(const NevanlinnaPair& pair, cplx z);

/// (I - C(w)* C(z)) / (-i (z - conj w)), z, w in C_+.
ComplexMatrix schur_kernel(const NevanlinnaPair& pair, cplx z, cplx w);

/// ||K - 2 (Psi+i Phi)(w)^{-*} N(z,w) (Psi+i Phi)(z)^{-1}|| / (1 + ||K||).
double kernel_identity_residual(const NevanlinnaPair& pair, cplx z, cplx w);

/// The 2n x 2n Krein-space fundamental symmetry [[0, -iI], [iI, 0]].
ComplexMatrix krein_j(Index dim);

/// A 2n x 2n matrix with W* J W = J.
class JUnitary {
 public:
  /// Throws DomainError unless W* J W = J within eps_eq (1 + ||W||^2).
  explicit JUnitary(ComplexMatrix w, const TolerancePolicy& tol = {});

  Index dim() const noexcept { return w_.rows() / 2; }
  const ComplexMatrix& matrix() const noexcept { return w_; }

  static JUnitary identity(Index dim);
  /// [[I, 0], [X, I]] with X Hermitian.
  static JUnitary shift(const ComplexMatrix& x);
  /// [[Y^{-1}, 0], [0, Y*]] with Y invertible.
  static JUnitary congruence(const ComplexMatrix& y);
  /// [[0, -I], [I, 0]].
  static JUnitary swap(Index dim);

  JUnitary operator*(const JUnitary& rhs) const;

 private:
  ComplexMatrix w_;
};

/// [Phi~; Psi~] = W [Phi; Psi].
NevanlinnaPair transform(const NevanlinnaPair& pair, const JUnitary& w);

/// {Phi, Psi + X Phi}
NevanlinnaPair shift_transform(const NevanlinnaPair& pair, const ComplexMatrix& x);
/// {Y^{-1} Phi, Y* Psi}
NevanlinnaPair congruence_transform(const NevanlinnaPair& pair, const ComplexMatrix& y);
/// {-Psi, Phi}; the family becomes -F^{-1}.
NevanlinnaPair inverse_transform(const NevanlinnaPair& pair);
/// {Phi, Psi + M Phi} with M in R^u[H]; throws DomainError otherwise.
NevanlinnaPair herglotz_shift_transform(const NevanlinnaPair& pair, const HerglotzRep& m,
                                        const TolerancePolicy& tol = {});

/// Same graph at every sample: the column spans of [Phi; Psi] agree.
bool equivalent(const NevanlinnaPair& a, const NevanlinnaPair& b, const ZGrid& samples,
                const TolerancePolicy& tol = {});

}  // namespace nevlab
