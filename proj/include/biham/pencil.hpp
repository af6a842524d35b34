#pragma once

#include <vector>

#include "biham/decomposition.hpp"

namespace biham {

struct PencilBlock {
    double lambda = 0.0;
    int sign = 1;
    Eigen::Index dim = 0;
    /// J_gamma = factor * J1 on the block; predicted (1 + sign gamma lambda) / (1 + gamma lambda).
    double predicted_factor = 0.0;
    double measured_factor = 0.0;
    /// J_gamma^2 in the block's g1-orthonormal coordinates.
    RealMatrix j_squared;
    double residual = 0.0;  // ||J_gamma^2 + I|| on the block
    double limit = 0.0;
    bool admissible = false;
};

/// (g1 + gamma g2, omega1 + gamma omega2, J_gamma = g_gamma^-1 omega_gamma).
struct PencilMember {
    double gamma = 0.0;
    RealMatrix g_gamma;
    RealMatrix omega_gamma;
    RealMatrix j_gamma;
    bool admissible = false;  // on the whole space
    double residual = 0.0;    // ||J_gamma^2 + I||
    std::vector<PencilBlock> blocks;
};

/// Throws InvalidInput when g_gamma is not positive-definite.
PencilMember pencil_member(const CompatiblePair& p, double gamma);
PencilMember pencil_member(const CompatiblePair& p, const BlockDecomposition& d, double gamma);

}  // namespace biham
