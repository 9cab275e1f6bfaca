#pragma once
// Adaptive Gauss-Kronrod (7/15) quadrature for matrix-valued integrands.

#include <array>
#include <cmath>
#include <functional>

#include "nevlab/matnum.hpp"

namespace nevlab::detail {

struct QuadratureResult {
  ComplexMatrix value;
  double error = 0.0;
  int evaluations = 0;
};

class GaussKronrod15 {
 public:
  using Integrand = std::function<ComplexMatrix(double)>;

  GaussKronrod15(double abs_tol, double rel_tol, int max_depth = 48)
      : abs_tol_(abs_tol), rel_tol_(rel_tol), max_depth_(max_depth) {}

  QuadratureResult integrate(const Integrand& f, double a, double b) const {
    QuadratureResult out;
    ComplexMatrix err_est;
    const ComplexMatrix whole = panel(f, a, b, err_est, out.evaluations);
    const double target = std::max(abs_tol_, rel_tol_ * whole.norm());
    out.value = refine(f, a, b, whole, err_est, target, 0, out);
    return out;
  }

 private:
  static constexpr std::array<double, 8> kNodes{
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> kKronrod{
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
  static constexpr std::array<double, 4> kGauss{
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  static ComplexMatrix panel(const Integrand& f, double a, double b, ComplexMatrix& err, int& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    ComplexMatrix center = f(c);
    ++evals;
    ComplexMatrix kron = kKronrod[7] * center;
    ComplexMatrix gauss = kGauss[3] * center;
    for (int k = 0; k < 7; ++k) {
      const ComplexMatrix s = f(c - h * kNodes[k]) + f(c + h * kNodes[k]);
      evals += 2;
      kron += kKronrod[k] * s;
      if (k % 2 == 1) gauss += kGauss[k / 2] * s;
    }
    kron *= h;
    gauss *= h;
    err = kron - gauss;
    return kron;
  }

  ComplexMatrix refine(const Integrand& f, double a, double b, const ComplexMatrix& estimate,
                       const ComplexMatrix& err_est, double target, int depth,
                       QuadratureResult& out) const {
    const double err = err_est.norm();
    if (err <= target || depth >= max_depth_) {
      out.error += err;
      return estimate;
    }
    const double m = 0.5 * (a + b);
    ComplexMatrix el, er;
    const ComplexMatrix left = panel(f, a, m, el, out.evaluations);
    const ComplexMatrix right = panel(f, m, b, er, out.evaluations);
    return refine(f, a, m, left, el, target / std::sqrt(2.0), depth + 1, out) +
           refine(f, m, b, right, er, target / std::sqrt(2.0), depth + 1, out);
  }

  double abs_tol_;
  double rel_tol_;
  int max_depth_;
};

}  // namespace nevlab::detail
