#pragma once

// Complex formulation: two Hermitian forms on C^n and the operator F with
// (x, y)_2 = (F x, y)_1. Forms are conjugate-linear in the first argument,
// (x, y) = x^* H y, which makes F = H1^-1 H2 as matrices.

#include <vector>

#include "biham/decomposition.hpp"

namespace biham {

class HermitianForm {
public:
    /// Validates conjugate symmetry (small residuals are hermitized away) and
    /// positive-definiteness. Throws InvalidInput otherwise.
    static HermitianForm from(const ComplexMatrix& h, const Tolerance& tol = {});

    const ComplexMatrix& matrix() const { return h_; }
    Eigen::Index dim() const { return h_.rows(); }
    Complex operator()(const ComplexVector& x, const ComplexVector& y) const {
        return x.dot(h_ * y);  // Eigen's dot conjugates the left operand
    }

private:
    explicit HermitianForm(ComplexMatrix h) : h_(std::move(h)) {}
    ComplexMatrix h_;
};

struct OperatorF {
    ComplexMatrix f;
    HermitianForm h1;
    HermitianForm h2;
    std::vector<double> eigenvalues;  // ascending, all positive
    ComplexMatrix eigenvectors;       // columns h1-orthonormal
    Tolerance tol;
};

/// Throws NumericalError when F fails self-adjointness or positivity.
OperatorF build_f(const HermitianForm& h1, const HermitianForm& h2, const Tolerance& tol = {});

/// A ||x||_2 <= ||x||_1 <= B ||x||_2 with the best constants.
struct NormBounds {
    double a = 0.0;  // 1 / sqrt(lambda_max)
    double b = 0.0;  // 1 / sqrt(lambda_min)
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double norm_f = 0.0;  // operator norm w.r.t. h1, = lambda_max
    /// min(||F|| - 1/B^2, 1/A^2 - ||F||); nonnegative when the chain holds.
    double chain_slack = 0.0;
};

NormBounds norm_bounds(const OperatorF& f);

struct Commutant {
    std::size_t dim = 0;
    std::vector<ComplexMatrix> basis;
    RankDecision rank;
};

/// Null space of X -> F X - X F. The rank threshold is rel * 2||F||_2, the
/// norm bound of the commutator map, so scalar F yields the full algebra.
Commutant commutant(const OperatorF& f);
std::size_t commutant_dim(const OperatorF& f);

/// Joint commutant of the commutant, computed from a few seeded random
/// combinations of its basis stacked into a single null-space problem.
Commutant bicommutant(const OperatorF& f, const Commutant& c);
std::size_t bicommutant_dim(const OperatorF& f);

/// Eigenvalue clusters of F under the cluster tolerance.
std::vector<Cluster> f_clusters(const OperatorF& f);

/// commutant == bicommutant. Throws NumericalError if that disagrees with the
/// simple-spectrum test.
bool is_generic_f(const OperatorF& f);

/// exp(i f(F) t) for f(x) = sum_k coeffs[k] x^k, computed spectrally.
struct BiunitarySample {
    ComplexMatrix u;
    double residual_h1 = 0.0;  // ||U^* H1 U - H1||
    double residual_h2 = 0.0;
};

BiunitarySample biunitary_sample(const OperatorF& f, const std::vector<double>& poly_coeffs,
                                 double t);

struct Complexification {
    HermitianForm h1;
    HermitianForm h2;
    /// One entry per block of the real decomposition; -1 blocks were conjugated.
    std::vector<int> sign_pattern;
    /// Real 2n x n matrix whose columns e_k give the complex basis; J1 e_k
    /// supplies the imaginary directions.
    RealMatrix frame;
};

/// Complex structure from J1, h_a(x, y) = g_a(x, y) + i g_a(J x, y) on the
/// frame. On blocks where J2 = -J1 the second form is conjugated so both are
/// sesquilinear for the same complex structure.
Complexification complexify(const CompatiblePair& p);
Complexification complexify(const CompatiblePair& p, const BlockDecomposition& d);

}  // namespace biham
