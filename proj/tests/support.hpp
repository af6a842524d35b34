#pragma once

// Shared fixtures and generators for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "biham/decomposition.hpp"
#include "biham/random.hpp"

namespace biham::testing {

inline RealMatrix standard_s() {
    RealMatrix s(2, 2);
    s << 0, 1, -1, 0;
    return s;
}

inline RealMatrix block_diag(std::initializer_list<RealMatrix> blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.rows();
    RealMatrix out = RealMatrix::Zero(n, n);
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
        out.block(off, off, b.rows(), b.cols()) = b;
        off += b.rows();
    }
    return out;
}

/// S + S + ... + S on R^{2n}.
inline RealMatrix standard_omega(Eigen::Index n) {
    RealMatrix out = RealMatrix::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) out.block(2 * k, 2 * k, 2, 2) = standard_s();
    return out;
}

inline RealMatrix diag(std::initializer_list<double> v) {
    RealVector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d(i++) = x;
    return d.asDiagonal();
}

inline AdmissibleTriple triple(const RealMatrix& g, const RealMatrix& w, const Tolerance& tol = {}) {
    auto c = check_admissible(MetricTensor::from(g, tol), SymplecticForm::from(w, tol), tol);
    if (!c) throw std::logic_error("fixture triple is not admissible");
    return *c.value;
}

inline CompatiblePair pair(const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2,
                           const RealMatrix& w2, const Tolerance& tol = {}) {
    auto c = check_compatible(triple(g1, w1, tol), triple(g2, w2, tol), tol);
    if (!c) throw std::logic_error("fixture pair is not compatible");
    return *c.value;
}

/// g1 = diag(1,4), omega1 = 2S; g2 = diag(2,8), omega2 = 4S.
inline CompatiblePair reference_2d() {
    return pair(diag({1, 4}), 2 * standard_s(), diag({2, 8}), 4 * standard_s());
}

/// g1 = I, omega1 = S+S; g2 = diag(2,2,3,3), omega2 = 2S + (-3S).
inline CompatiblePair reference_4d() {
    const RealMatrix s = standard_s();
    return pair(RealMatrix::Identity(4, 4), standard_omega(2), diag({2, 2, 3, 3}),
                block_diag({RealMatrix(2 * s), RealMatrix(-3 * s)}));
}

/// Standard triple paired with itself on R^{2n}.
inline CompatiblePair identity_pair(Eigen::Index n) {
    const RealMatrix g = RealMatrix::Identity(2 * n, 2 * n);
    const RealMatrix w = standard_omega(n);
    return pair(g, w, g, w);
}

/// Random spec with complex dimension n. Distinct lambdas sit on a jittered
/// grid so neighbours are at least `spacing` apart relative to their size.
inline std::vector<BlockSpec> random_spec(SplitMix64& rng, int n, int max_factors,
                                          double spacing = 0.15) {
    std::vector<BlockSpec> spec;
    const int cap = std::max(1, (2 * n) / std::max(1, max_factors));
    int left = n;
    double lambda = rng.uniform(0.3, 1.0);
    while (left > 0) {
        const bool last = static_cast<int>(spec.size()) + 1 >= max_factors;
        const int r = last ? left : 1 + static_cast<int>(rng.uniform() * std::min(left, cap));
        spec.push_back({lambda, rng.uniform() < 0.5 ? 1 : -1, std::min(r, left)});
        left -= spec.back().multiplicity;
        lambda *= 1.0 + spacing + rng.uniform(0.0, 0.5);
    }
    return spec;
}

/// Random generic spec: n factors of multiplicity one.
inline std::vector<BlockSpec> random_generic_spec(SplitMix64& rng, int n, double spacing = 0.15) {
    std::vector<BlockSpec> spec;
    double lambda = rng.uniform(0.3, 1.0);
    for (int k = 0; k < n; ++k) {
        spec.push_back({lambda, rng.uniform() < 0.5 ? 1 : -1, 1});
        lambda *= 1.0 + spacing + rng.uniform(0.0, 0.5);
    }
    return spec;
}

/// Random admissible triple in a random frame: g = M^T M, omega = M^T S M.
inline AdmissibleTriple random_triple(SplitMix64& rng, Eigen::Index n) {
    const RealMatrix q = random_orthogonal(rng, 2 * n);
    RealVector d(2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) d(i) = rng.uniform(0.6, 1.6);
    const RealMatrix m = d.asDiagonal() * q;
    return triple(RealMatrix(m.transpose() * m), RealMatrix(m.transpose() * standard_omega(n) * m));
}

/// Hermitian positive-definite matrix with eigenvalues drawn from `values`.
inline ComplexMatrix hermitian_with_spectrum(SplitMix64& rng, const std::vector<double>& values) {
    const auto n = static_cast<Eigen::Index>(values.size());
    const ComplexMatrix u = random_unitary(rng, n);
    RealVector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = values[static_cast<std::size_t>(i)];
    return u * d.cast<Complex>().asDiagonal() * u.adjoint();
}

inline ComplexMatrix random_hpd(SplitMix64& rng, Eigen::Index n) {
    std::vector<double> v;
    for (Eigen::Index i = 0; i < n; ++i) v.push_back(rng.uniform(0.5, 2.0));
    return hermitian_with_spectrum(rng, v);
}

inline std::string fixture(const std::string& name) {
    return std::string(BIHAM_FIXTURE_DIR) + "/" + name;
}

}  // namespace biham::testing
