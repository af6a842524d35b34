#pragma once

// Seeded randomness with a fixed algorithm so synthesized fixtures are the
// same on every platform. The standard distributions are implementation
// defined, so the normal sampler is a plain Box-Muller transform on top of
// SplitMix64 (Steele, Lea, Flood 2014):
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)

#include <cstdint>
#include <limits>

#include "biham/linalg.hpp"

namespace biham {

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

RealMatrix random_gaussian(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols);
ComplexMatrix random_complex_gaussian(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols);

/// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix, with
/// the sign convention diag(R) > 0.
RealMatrix random_orthogonal(SplitMix64& rng, Eigen::Index dim);
ComplexMatrix random_unitary(SplitMix64& rng, Eigen::Index dim);

/// Symmetric positive-definite matrix with eigenvalues in [lo, hi].
RealMatrix random_spd(SplitMix64& rng, Eigen::Index dim, double lo = 0.5, double hi = 2.0);

}  // namespace biham
