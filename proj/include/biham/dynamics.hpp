#pragma once

#include <span>
#include <vector>

#include "biham/decomposition.hpp"

namespace biham {

/// Linear fields preserving g1, omega1, g2 and omega2 at once.
struct BiPreservingAlgebra {
    /// Frobenius-orthonormal basis.
    std::vector<RealMatrix> basis;
    std::size_t dim = 0;
    /// sum of r_i^2 over the group signature of the same pair.
    std::size_t expected_dim = 0;
    RankDecision rank;  // of the constraint system; dim = unknowns - rank
};

/// Solves g_a A + A^T g_a = 0, omega_a A + A^T omega_a = 0 (a = 1, 2) for A.
/// The g1 constraint is eliminated by parametrizing A as L^-T K L^T with K
/// skew, g1 = L L^T; the other three are stacked and solved by SVD. Throws
/// NumericalError when a singular value lands in the ambiguity band.
BiPreservingAlgebra bi_preserving_algebra(const CompatiblePair& p);

/// [J1, T J1, ..., T^{n-1} J1].
struct RecursionBasis {
    std::vector<LinearField> fields;
};

RecursionBasis recursion_basis(const CompatiblePair& p);

struct RecursionCertificate {
    /// (a) max preservation residual per field over the four tensors.
    std::vector<double> preservation;
    bool preserves = false;
    /// (b) max pairwise commutator, relative to ||A|| ||B||.
    double max_commutator = 0.0;
    bool commute = false;
    /// (c) rank of the vectorized, column-normalized fields.
    RankDecision rank;
    bool independent = false;
    /// (d) number of distinct eigenvalue clusters of T.
    std::size_t t_clusters = 0;
    bool vandermonde_consistent = false;
    /// (e) ||[T J1, T] - T [J1, T]|| / max(1, ||T||^2 ||J1||).
    double nijenhuis_residual = 0.0;
    bool nijenhuis = false;

    [[nodiscard]] bool ok() const {
        return preserves && commute && independent && vandermonde_consistent && nijenhuis;
    }
};

RecursionCertificate certify_recursion(const RecursionBasis& rb, const CompatiblePair& p);

/// ||[T A, T] - T [A, T]|| normalized by max(1, ||T||^2 ||A||).
double nijenhuis_residual(const RealMatrix& t, const RealMatrix& a);

/// exp(t A). Uses cos(ct) I + sin(ct)/c A when A^2 = -c^2 I, the generic
/// scaling-and-squaring exponential otherwise. Throws NumericalError on overflow.
RealMatrix flow(const LinearField& field, double t, const Tolerance& tol = {});

struct ConservationReport {
    /// max over sampled times of ||O^T tau O - tau|| / ||tau||
    double g1 = 0.0;
    double omega1 = 0.0;
    double g2 = 0.0;
    double omega2 = 0.0;

    [[nodiscard]] double max() const;
};

ConservationReport conservation_probe(const LinearField& field, const CompatiblePair& p,
                                      std::span<const double> times);

/// n evenly spaced samples in [lo, hi], endpoints included.
std::vector<double> sample_times(double lo, double hi, std::size_t n);

}  // namespace biham
