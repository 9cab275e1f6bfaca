#pragma once
// Matrix-valued Herglotz-Nevanlinna functions given by the integral
// representation
//
//   F(z) = B0 + B1 z + sum_j (1/(t_j - z) - t_j/(t_j^2 + 1)) W_j
//
// with a finite atomic operator measure, plus black-box families z -> F(z).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nevlab/matnum.hpp"

namespace nevlab {

using ZGrid = std::vector<cplx>;

/// {x + iy : x in {-2, -0.5, 0, 0.7, 3}, y in {0.1, 1, 10}} followed by the
/// conjugates of the same 15 points.
ZGrid default_grid();

/// default_grid() plus 5 seeded random upper half-plane points and their
/// conjugates.
ZGrid extended_grid(std::uint64_t seed);

ZGrid upper_half(const ZGrid& grid);

/// Reference point used by every invariance comparison.
inline constexpr cplx kReferencePoint{0.0, 1.0};

struct Atom {
  double location = 0.0;
  ComplexMatrix weight;
};

/// Finite atomic PSD operator measure, atoms kept in strictly increasing
/// order of location (coincident locations are merged).
class OperatorMeasure {
 public:
  explicit OperatorMeasure(Index dim = 0) : dim_(dim) {}
  OperatorMeasure(Index dim, std::vector<Atom> atoms, const TolerancePolicy& tol = {});

  Index dim() const noexcept { return dim_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }

  /// K_Sigma = sum_j W_j / (1 + t_j^2)
  ComplexMatrix k_sigma() const;

 private:
  Index dim_;
  std::vector<Atom> atoms_;
};

class HerglotzRep {
 public:
  /// Validates B0 Hermitian, B1 Hermitian PSD and matching dimensions.
  /// B0 and B1 are stored symmetrized.
  HerglotzRep(ComplexMatrix b0, ComplexMatrix b1, OperatorMeasure measure,
              const TolerancePolicy& tol = {});

  static HerglotzRep zero(Index dim);

  Index dim() const noexcept { return b0_.rows(); }
  const ComplexMatrix& b0() const noexcept { return b0_; }
  const ComplexMatrix& b1() const noexcept { return b1_; }
  const OperatorMeasure& measure() const noexcept { return measure_; }

 private:
  ComplexMatrix b0_;
  ComplexMatrix b1_;
  OperatorMeasure measure_;
};

/// Throws DomainError when z coincides with an atom location.
ComplexMatrix evaluate(const HerglotzRep& rep, cplx z);
ComplexMatrix derivative(const HerglotzRep& rep, cplx z);

/// Poisson form of the imaginary part, B1 y + sum_j y/((x-t_j)^2+y^2) W_j.
/// Requires Im z > 0.
ComplexMatrix imag_poisson(const HerglotzRep& rep, cplx z);

/// A rule z -> F(z) on C \ R with a declared dimension. Carries an exact
/// derivative when one is known; otherwise derivative() uses a central
/// difference.
class Family {
 public:
  using Rule = std::function<ComplexMatrix(cplx)>;

  Family(Index dim, Rule value, std::string label, Rule derivative = {});

  Index dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }

  ComplexMatrix operator()(cplx z) const;
  ComplexMatrix derivative(cplx z) const;
  bool has_exact_derivative() const noexcept { return static_cast<bool>(derivative_); }

 private:
  Index dim_;
  Rule value_;
  Rule derivative_;
  std::string label_;
};

Family as_family(const HerglotzRep& rep, std::string label = "rep");
/// z -> rep(z) + offset, offset Hermitian.
Family with_offset(const HerglotzRep& rep, const ComplexMatrix& offset, std::string label = "rep+offset");
Family direct_sum(const Family& a, const Family& b);

/// (F(z) - F(w)*)/(z - conj(w)), switching to F'(z) when
/// |z - conj(w)| <= eps_eq (|z| + |w|).
ComplexMatrix nevanlinna_kernel(const Family& f, cplx z, cplx w, const TolerancePolicy& tol = {});
ComplexMatrix nevanlinna_kernel(const HerglotzRep& rep, cplx z, cplx w, const TolerancePolicy& tol = {});

/// Gram matrix G(i, j) = <N(z_j, z_i) h_j, h_i>.
ComplexMatrix kernel_gram(const Family& f, std::span<const cplx> points,
                          std::span<const ComplexVector> vectors, const TolerancePolicy& tol = {});

enum class FamilyClass { NotR, R, Rs, Ru };

const char* to_string(FamilyClass c);

struct ClassifyOptions {
  /// R^u requires lambda_min(Im F(i)) >= uniform_floor * (1 + ||Im F(i)||).
  /// Zero selects the default 10 * eps_psd.
  double uniform_floor = 0.0;
  /// Points used for the not-R screen; empty selects default_grid().
  ZGrid grid;
};

struct Classification {
  FamilyClass cls = FamilyClass::NotR;
  double lambda_min = 0.0;         // of Im F(i)
  Index kernel_dim = 0;            // dim ker Im F(i)
  double symmetry_residual = 0.0;  // worst relative ||F(conj z) - F(z)*|| on the grid
  double worst_sign_margin = 0.0;  // most negative lambda_min of +-Im F(z) on the grid
  std::string reason;
};

/// Membership in R[H] is screened on the grid; the subclass is decided at
/// z = i alone.
Classification classify(const Family& f, const TolerancePolicy& tol = {}, const ClassifyOptions& opts = {});

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct StieltjesOptions {
  std::vector<double> etas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  /// Relative variation allowed between the last two extrapolated estimates.
  double max_variation = 0.1;
};

struct StieltjesResult {
  ComplexMatrix weight;              // extrapolated limit
  std::vector<ComplexMatrix> raw;    // one estimate per eta
  std::vector<ComplexMatrix> extrapolated;  // from consecutive raw pairs
  double variation = 0.0;
};

/// Approximates Sigma((a, b)) by (1/pi) int_a^b Im F(t + i eta) dt along the
/// eta sweep, with linear extrapolation in eta. Throws ConvergenceError when
/// the last two extrapolated estimates differ by more than max_variation.
StieltjesResult stieltjes_invert(const Family& f, double a, double b, const StieltjesOptions& opts = {});

/// First moment (1/pi) int_a^b t Im F(t + i eta) dt, extrapolated like
/// stieltjes_invert().
StieltjesResult stieltjes_moment(const Family& f, double a, double b, const StieltjesOptions& opts = {});

}  // namespace nevlab
