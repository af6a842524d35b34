#include "biham/random.hpp"

#include <cmath>
#include <numbers>

namespace biham {

SplitMix64::result_type SplitMix64::operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

RealMatrix random_gaussian(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
    RealMatrix m(rows, cols);
    // Fill row by row so the stream order matches the serialized layout.
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

ComplexMatrix random_complex_gaussian(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            m(i, j) = Complex(re, im);
        }
    return m;
}

RealMatrix random_orthogonal(SplitMix64& rng, Eigen::Index dim) {
    const RealMatrix a = random_gaussian(rng, dim, dim);
    Eigen::HouseholderQR<RealMatrix> qr(a);
    RealMatrix q = qr.householderQ();
    const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k)
        if (r(k, k) < 0.0) q.col(k) = -q.col(k);
    return q;
}

ComplexMatrix random_unitary(SplitMix64& rng, Eigen::Index dim) {
    const ComplexMatrix a = random_complex_gaussian(rng, dim, dim);
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0) q.col(k) *= std::conj(r(k, k)) / mag;
    }
    return q;
}

RealMatrix random_spd(SplitMix64& rng, Eigen::Index dim, double lo, double hi) {
    const RealMatrix q = random_orthogonal(rng, dim);
    RealVector d(dim);
    for (Eigen::Index k = 0; k < dim; ++k) d(k) = rng.uniform(lo, hi);
    RealMatrix m = q * d.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
}

}  // namespace biham
