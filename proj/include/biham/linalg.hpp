#pragma once

// Dense linear algebra primitives shared by every other module.
//
// Matrices are plain Eigen column-major storage; "row-major semantics" only
// matters at the serialization boundary. All checks are relative to
// scale(M) = max(1, ||M||_inf), the max-row-sum bound on the spectral norm.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace biham {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

struct Tolerance {
    double rel = 1e-9;
    double cluster_gap = 1e-7;

    /// Throws InvalidInput unless rel > 0, cluster_gap > 0, cluster_gap >= rel.
    void validate() const;
};

double inf_norm(const RealMatrix& m);
double inf_norm(const ComplexMatrix& m);
/// max(1, ||m||_inf)
double scale_of(const RealMatrix& m);
double scale_of(const ComplexMatrix& m);

void require_finite(const RealMatrix& m, const char* what);
void require_square(const RealMatrix& m, const char* what);
void require_same_dim(const RealMatrix& a, const RealMatrix& b, const char* what);

/// g^-1 A^T g, the adjoint of A with respect to the metric g.
RealMatrix metric_adjoint(const RealMatrix& a, const RealMatrix& g);

/// Symmetric nonnegative square root. Eigenvalues in [-rel*||M||, 0) are
/// clipped to zero; anything more negative is rejected.
RealMatrix sym_sqrt(const RealMatrix& m, const Tolerance& tol = {});

struct SelfAdjointEigen {
    std::vector<double> values;  // ascending
    RealMatrix basis;            // columns g-orthonormal
};

/// Eigendecomposition of an operator that is self-adjoint w.r.t. the metric g.
/// Solved by whitening g = L L^T and diagonalizing the symmetric L^-1 (gA) L^-T.
SelfAdjointEigen eig_self_adjoint(const RealMatrix& a, const RealMatrix& g,
                                  const Tolerance& tol = {});

struct Cluster {
    double representative = 0.0;  // mean of the merged values
    std::size_t multiplicity = 0;
    std::size_t first = 0;  // index of the first member in the input
};

/// Merges consecutive sorted values whose gap is <= cluster_gap * max(1, |v|).
std::vector<Cluster> cluster_eigenvalues(std::span<const double> values,
                                         double cluster_gap);

/// AB - BA.
RealMatrix commutator(const RealMatrix& a, const RealMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Numerical rank from a descending singular value list. Values above
/// `threshold` count toward the rank; the neighbours of the cut are kept so
/// callers can report how clean the decision was.
struct RankDecision {
    std::size_t rank = 0;
    double threshold = 0.0;
    double sigma_max = 0.0;
    double smallest_kept = 0.0;     // sigma_{rank-1}, 0 if rank == 0
    double largest_dropped = 0.0;   // sigma_rank, 0 if full rank
    std::vector<double> singular_values;

    /// True when a singular value sits within `band` decades of the threshold.
    [[nodiscard]] bool ambiguous(double band = 2.0) const;
};

RankDecision decide_rank(std::vector<double> singular_values, double threshold);

/// Column-stacks a square matrix.
RealVector vectorize(const RealMatrix& m);
RealMatrix unvectorize(const RealVector& v, Eigen::Index dim);

}  // namespace biham
