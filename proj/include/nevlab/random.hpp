#pragma once
// Seeded random matrices and vectors. Every generator takes the engine by
// reference so callers control the stream.

#include <cstdint>
#include <random>

#include "nevlab/matnum.hpp"

namespace nevlab {

using Rng = std::mt19937_64;

/// Independent deterministic stream number `stream` derived from `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Entries with independent standard normal real and imaginary parts.
ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng);

ComplexVector random_unit_vector(Index n, Rng& rng);

/// (G + G*)/2 with G Gaussian.
ComplexMatrix random_hermitian(Index n, Rng& rng);

/// G G* / n with G Gaussian n x rank.
ComplexMatrix random_psd(Index n, Index rank, Rng& rng);

/// Haar-distributed unitary from the QR factor of a Gaussian matrix.
ComplexMatrix random_unitary(Index n, Rng& rng);

double uniform(double lo, double hi, Rng& rng);

}  // namespace nevlab
