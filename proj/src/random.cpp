#include "nevlab/random.hpp"

#include <Eigen/QR>

namespace nevlab {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = {re, im};
    }
  }
  return g;
}

ComplexVector random_unit_vector(Index n, Rng& rng) {
  ComplexVector v = random_gaussian(n, 1, rng);
  return v / v.norm();
}

ComplexMatrix random_hermitian(Index n, Rng& rng) { return hermitian_part(random_gaussian(n, n, rng)); }

ComplexMatrix random_psd(Index n, Index rank, Rng& rng) {
  const ComplexMatrix g = random_gaussian(n, rank, rng);
  return hermitian_part(g * g.adjoint() / static_cast<double>(n));
}

ComplexMatrix random_unitary(Index n, Rng& rng) {
  const Eigen::HouseholderQR<ComplexMatrix> qr(random_gaussian(n, n, rng));
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  // Fix the phases of R's diagonal so the distribution is Haar.
  const ComplexMatrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

double uniform(double lo, double hi, Rng& rng) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace nevlab
