#include "biham/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biham/error.hpp"

namespace biham {

void Tolerance::validate() const {
    if (!(rel > 0.0) || !std::isfinite(rel))
        throw InvalidInput("tolerance: rel must be a positive finite number");
    if (!(cluster_gap > 0.0) || !std::isfinite(cluster_gap))
        throw InvalidInput("tolerance: cluster_gap must be a positive finite number");
    if (cluster_gap < rel)
        throw InvalidInput("tolerance: cluster_gap must be >= rel");
}

double inf_norm(const RealMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double scale_of(const RealMatrix& m) { return std::max(1.0, inf_norm(m)); }
double scale_of(const ComplexMatrix& m) { return std::max(1.0, inf_norm(m)); }

void require_finite(const RealMatrix& m, const char* what) {
    if (!m.allFinite())
        throw InvalidInput(std::string(what) + ": entries must be finite");
}

void require_square(const RealMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InvalidInput(std::string(what) + ": matrix must be square and non-empty");
}

void require_same_dim(const RealMatrix& a, const RealMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a.rows() << "x" << a.cols() << " vs "
           << b.rows() << "x" << b.cols() << ")";
        throw InvalidInput(os.str());
    }
}

namespace {

Eigen::LLT<RealMatrix> factor_metric(const RealMatrix& g, const char* what) {
    Eigen::LLT<RealMatrix> llt(g);
    if (llt.info() != Eigen::Success)
        throw InvalidInput(std::string(what) + ": metric is not positive-definite");
    return llt;
}

}  // namespace

RealMatrix metric_adjoint(const RealMatrix& a, const RealMatrix& g) {
    require_square(a, "metric_adjoint");
    require_same_dim(a, g, "metric_adjoint");
    require_finite(a, "metric_adjoint");
    require_finite(g, "metric_adjoint");
    auto llt = factor_metric(g, "metric_adjoint");
    return llt.solve(a.transpose() * g);
}

RealMatrix sym_sqrt(const RealMatrix& m, const Tolerance& tol) {
    require_square(m, "sym_sqrt");
    require_finite(m, "sym_sqrt");
    const double scale = scale_of(m);
    const double asym = inf_norm(RealMatrix(m - m.transpose()));
    if (asym > tol.rel * scale) {
        std::ostringstream os;
        os << "sym_sqrt: matrix is not symmetric (residual " << asym << ")";
        throw InvalidInput(os.str());
    }
    const RealMatrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
    if (es.info() != Eigen::Success) throw NumericalError("sym_sqrt: eigensolver failed");
    RealVector ev = es.eigenvalues();
    if (ev.minCoeff() < -tol.rel * scale) {
        std::ostringstream os;
        os << "sym_sqrt: matrix has a negative eigenvalue " << ev.minCoeff();
        throw InvalidInput(os.str());
    }
    ev = ev.cwiseMax(0.0).cwiseSqrt();
    const RealMatrix& q = es.eigenvectors();
    RealMatrix p = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (p + p.transpose());
}

SelfAdjointEigen eig_self_adjoint(const RealMatrix& a, const RealMatrix& g,
                                  const Tolerance& tol) {
    require_square(a, "eig_self_adjoint");
    require_same_dim(a, g, "eig_self_adjoint");
    require_finite(a, "eig_self_adjoint");
    require_finite(g, "eig_self_adjoint");
    auto llt = factor_metric(g, "eig_self_adjoint");

    // A is g-self-adjoint iff gA is symmetric.
    const RealMatrix ga = g * a;
    const double asym = inf_norm(RealMatrix(ga - ga.transpose()));
    const double limit = tol.rel * scale_of(g) * scale_of(a);
    if (asym > limit) {
        std::ostringstream os;
        os << "eig_self_adjoint: operator is not self-adjoint w.r.t. the metric (residual "
           << asym << ", limit " << limit << ")";
        throw InvalidInput(os.str());
    }

    // L^-1 (gA) L^-T
    RealMatrix whitened = llt.matrixL().solve(ga);
    whitened = llt.matrixL().solve(RealMatrix(whitened.transpose())).transpose();
    whitened = 0.5 * (whitened + whitened.transpose());

    Eigen::SelfAdjointEigenSolver<RealMatrix> es(whitened);
    if (es.info() != Eigen::Success)
        throw NumericalError("eig_self_adjoint: eigensolver failed");

    SelfAdjointEigen out;
    out.values.assign(es.eigenvalues().data(),
                      es.eigenvalues().data() + es.eigenvalues().size());
    out.basis = llt.matrixU().solve(es.eigenvectors());
    return out;
}

std::vector<Cluster> cluster_eigenvalues(std::span<const double> values,
                                         double cluster_gap) {
    std::vector<Cluster> out;
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        const bool merge =
            !out.empty() &&
            std::abs(v - values[i - 1]) <= cluster_gap * std::max(1.0, std::abs(v));
        if (merge) {
            auto& c = out.back();
            sum += v;
            ++c.multiplicity;
            c.representative = sum / static_cast<double>(c.multiplicity);
        } else {
            out.push_back({v, 1, i});
            sum = v;
        }
    }
    return out;
}

RealMatrix commutator(const RealMatrix& a, const RealMatrix& b) {
    require_same_dim(a, b, "commutator");
    return a * b - b * a;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("commutator: dimension mismatch");
    return a * b - b * a;
}

bool RankDecision::ambiguous(double band) const {
    if (threshold <= 0.0) return false;
    const double factor = std::pow(10.0, band);
    for (double s : singular_values)
        if (s > threshold / factor && s < threshold * factor) return true;
    return false;
}

RankDecision decide_rank(std::vector<double> singular_values, double threshold) {
    std::sort(singular_values.begin(), singular_values.end(), std::greater<>());
    RankDecision d;
    d.threshold = threshold;
    d.sigma_max = singular_values.empty() ? 0.0 : singular_values.front();
    for (double s : singular_values)
        if (s > threshold) ++d.rank;
    d.smallest_kept = d.rank > 0 ? singular_values[d.rank - 1] : 0.0;
    d.largest_dropped = d.rank < singular_values.size() ? singular_values[d.rank] : 0.0;
    d.singular_values = std::move(singular_values);
    return d;
}

RealVector vectorize(const RealMatrix& m) {
    return Eigen::Map<const RealVector>(m.data(), m.size());
}

RealMatrix unvectorize(const RealVector& v, Eigen::Index dim) {
    return Eigen::Map<const RealMatrix>(v.data(), dim, dim);
}

}  // namespace biham
