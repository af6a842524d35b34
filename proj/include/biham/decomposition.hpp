#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "biham/compatibility.hpp"

namespace biham {

/// Joint eigenspace W_{lambda, sign*lambda} of G and T.
struct Block {
    double lambda = 0.0;  // eigenvalue of G
    int sign = 1;         // T = sign * lambda on the block
    Eigen::Index dim = 0;
    /// dim columns, g1-orthonormal, ordered as (e_1, J1 e_1, e_2, J1 e_2, ...).
    RealMatrix basis;
    /// Measured g2(e,e)/g1(e,e) averaged over the basis; equals lambda.
    double rho = 0.0;
    /// ||B^T (g2 - lambda g1) B||, ||B^T (omega2 - sign lambda omega1) B||,
    /// ||(J2 - sign J1) B||, and the G/T eigen-equation residuals.
    CheckReport residuals;
};

struct BlockDecomposition {
    std::vector<Block> blocks;  // ascending lambda, then sign +1 before -1
    Tolerance tol;
    /// max over i != j, a in {1,2} of ||B_i^T g_a B_j||
    double cross_residual = 0.0;
    std::shared_ptr<const CompatiblePair> source;

    Eigen::Index dim() const;
};

/// Diagonalizes G (g1-self-adjoint), clusters its eigenvalues, then splits each
/// eigenspace by the sign of T. Throws NumericalError when T is not +-lambda on
/// an eigenspace or a block has odd dimension.
BlockDecomposition decompose(const CompatiblePair& p);

/// Every block two-dimensional.
bool is_generic(const BlockDecomposition& d);

struct CanonicalBasis {
    RealVector e1;  // g1(e1, e1) = 1
    RealVector e2;  // J1 e1
    double lambda = 0.0;
    double rho = 0.0;  // g2(e1, e1) / g1(e1, e1)
    int sign = 1;
    CheckReport residuals;
};

/// Adapted basis of a two-dimensional block. Throws InvalidInput otherwise.
CanonicalBasis canonical_basis(const Block& b, const CompatiblePair& p);

struct GroupFactor {
    double lambda = 0.0;
    int sign = 1;
    int r = 0;
};

struct GroupSignature {
    std::vector<GroupFactor> factors;

    std::vector<int> multiplicities() const;
    int n() const;
    /// "U(r1)×U(r2)×..."
    std::string complex_form() const;
    /// "SO(2)×..." with U(2r;g,ω) for factors of rank r > 1.
    std::string real_form() const;
    /// sum of r_i^2, the dimension of the bi-unitary Lie algebra.
    int algebra_dim() const;
};

/// Merges blocks whose (lambda, sign) agree within the cluster tolerance.
GroupSignature group_signature(const BlockDecomposition& d);

struct BlockSpec {
    double lambda = 1.0;
    int sign = 1;
    int multiplicity = 1;
};

enum class SynthFrame {
    /// Conjugate by a random orthogonal map commuting with J1; triple 1 stays
    /// the standard (I, S+...+S).
    Unitary,
    /// Additionally apply a random well-conditioned congruence, so neither
    /// triple is in standard form.
    General,
};

/// Builds g1 = I, omega1 = S+...+S, g2 = +lambda I, omega2 = +sign lambda S
/// block by block, then changes frame with a seeded transformation. Throws
/// InvalidInput for an inconsistent spec.
CompatiblePair synthesize_pair(const std::vector<BlockSpec>& spec, std::uint64_t seed,
                               SynthFrame frame = SynthFrame::Unitary,
                               const Tolerance& tol = {});

/// "lambda:sign:multiplicity" triples joined by commas, e.g. "2:+:1,3:-:1".
std::vector<BlockSpec> parse_block_spec(const std::string& text);
std::string format_block_spec(const std::vector<BlockSpec>& spec);

}  // namespace biham
