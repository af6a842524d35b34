#include "biham/pencil.hpp"

#include <cmath>
#include <sstream>

#include "biham/error.hpp"

namespace biham {

PencilMember pencil_member(const CompatiblePair& p, double gamma) {
    return pencil_member(p, decompose(p), gamma);
}

PencilMember pencil_member(const CompatiblePair& p, const BlockDecomposition& d, double gamma) {
    if (!std::isfinite(gamma)) throw InvalidInput("pencil_member: gamma must be finite");
    const Tolerance& tol = p.tolerance();
    const RealMatrix& g1 = p.t1().g().matrix();
    const RealMatrix& j1 = p.t1().j().matrix();
    const auto dim = p.dim();

    PencilMember m;
    m.gamma = gamma;
    m.g_gamma = g1 + gamma * p.t2().g().matrix();
    m.omega_gamma = p.t1().omega().matrix() + gamma * p.t2().omega().matrix();

    Eigen::LLT<RealMatrix> llt(m.g_gamma);
    if (llt.info() != Eigen::Success ||
        llt.matrixLLT().diagonal().minCoeff() <= std::sqrt(tol.rel * scale_of(m.g_gamma))) {
        std::ostringstream os;
        os << "pencil_member: g_gamma is not positive-definite for gamma = " << gamma;
        throw InvalidInput(os.str());
    }
    m.j_gamma = llt.solve(m.omega_gamma);

    const double sj = scale_of(m.j_gamma);
    m.residual = inf_norm(RealMatrix(m.j_gamma * m.j_gamma + RealMatrix::Identity(dim, dim)));
    m.admissible = m.residual <= tol.rel * static_cast<double>(dim) * sj * sj;

    for (const auto& b : d.blocks) {
        PencilBlock pb;
        pb.lambda = b.lambda;
        pb.sign = b.sign;
        pb.dim = b.dim;
        pb.predicted_factor = (1.0 + b.sign * gamma * b.lambda) / (1.0 + gamma * b.lambda);

        const RealMatrix coords = b.basis.transpose() * g1;
        const RealMatrix jg = coords * m.j_gamma * b.basis;
        const RealMatrix j1b = coords * j1 * b.basis;
        pb.measured_factor = (jg.cwiseProduct(j1b)).sum() / j1b.squaredNorm();
        pb.j_squared = jg * jg;
        pb.residual = inf_norm(RealMatrix(pb.j_squared + RealMatrix::Identity(b.dim, b.dim)));
        const double sb = scale_of(jg);
        pb.limit = tol.rel * static_cast<double>(b.dim) * sb * sb;
        pb.admissible = pb.residual <= pb.limit;
        m.blocks.push_back(std::move(pb));
    }
    return m;
}

}  // namespace biham
