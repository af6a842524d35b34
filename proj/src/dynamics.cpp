#include "biham/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "biham/error.hpp"

namespace biham {

namespace {

// Whitened form L^-1 tau L^-T for g1 = L L^T.
RealMatrix whiten(const Eigen::LLT<RealMatrix>& llt, const RealMatrix& tau) {
    RealMatrix x = llt.matrixL().solve(tau);
    return llt.matrixL().solve(RealMatrix(x.transpose())).transpose();
}

}  // namespace

BiPreservingAlgebra bi_preserving_algebra(const CompatiblePair& p) {
    const Tolerance& tol = p.tolerance();
    const auto dim = p.dim();
    Eigen::LLT<RealMatrix> llt(p.t1().g().matrix());

    struct Constraint {
        RealMatrix form;
        bool symmetric;
    };
    std::vector<Constraint> constraints;
    for (const auto& [m, sym] : {std::pair{&p.t1().omega().matrix(), false},
                                 std::pair{&p.t2().g().matrix(), true},
                                 std::pair{&p.t2().omega().matrix(), false}}) {
        RealMatrix w = whiten(llt, *m);
        w = sym ? RealMatrix(0.5 * (w + w.transpose())) : RealMatrix(0.5 * (w - w.transpose()));
        w /= Eigen::JacobiSVD<RealMatrix>(w).singularValues()(0);
        constraints.push_back({std::move(w), sym});
    }

    // Unknowns: K(i,j) for i < j, K skew. Rows: the independent entries of
    // tau K - K tau, which is symmetric for symmetric tau and skew otherwise.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> unknowns;
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index k = i + 1; k < dim; ++k) unknowns.emplace_back(i, k);
    Eigen::Index rows = 0;
    for (const auto& c : constraints) rows += c.symmetric ? dim * (dim + 1) / 2 : dim * (dim - 1) / 2;

    const auto cols = static_cast<Eigen::Index>(unknowns.size());
    RealMatrix system(rows, cols);
    for (Eigen::Index u = 0; u < cols; ++u) {
        RealMatrix k = RealMatrix::Zero(dim, dim);
        k(unknowns[u].first, unknowns[u].second) = 1.0;
        k(unknowns[u].second, unknowns[u].first) = -1.0;
        Eigen::Index row = 0;
        for (const auto& c : constraints) {
            const RealMatrix r = c.form * k - k * c.form;
            for (Eigen::Index i = 0; i < dim; ++i)
                for (Eigen::Index j = c.symmetric ? i : i + 1; j < dim; ++j) system(row++, u) = r(i, j);
        }
    }

    Eigen::JacobiSVD<RealMatrix> svd(system, Eigen::ComputeFullV);
    std::vector<double> sv(svd.singularValues().data(),
                           svd.singularValues().data() + svd.singularValues().size());
    sv.resize(static_cast<std::size_t>(cols), 0.0);
    // Each form has unit norm, so the system is bounded by 2 sqrt(3). Scaling
    // by the observed sigma_max instead would turn pure noise into rank when
    // every constraint is satisfied identically (the 2D case).
    BiPreservingAlgebra out;
    out.rank = decide_rank(sv, tol.rel * 2.0 * std::sqrt(3.0));
    if (out.rank.ambiguous()) {
        std::ostringstream os;
        os << "bi_preserving_algebra: rank decision is ambiguous (kept " << out.rank.smallest_kept
           << ", dropped " << out.rank.largest_dropped << ", threshold " << out.rank.threshold
           << ")";
        throw NumericalError(os.str());
    }
    out.dim = static_cast<std::size_t>(cols) - out.rank.rank;

    if (out.dim > 0) {
        const RealMatrix lt = llt.matrixU();
        RealMatrix stacked(dim * dim, static_cast<Eigen::Index>(out.dim));
        for (std::size_t c = 0; c < out.dim; ++c) {
            const auto v = svd.matrixV().col(static_cast<Eigen::Index>(out.rank.rank + c));
            RealMatrix k = RealMatrix::Zero(dim, dim);
            for (Eigen::Index u = 0; u < cols; ++u) {
                k(unknowns[u].first, unknowns[u].second) = v(u);
                k(unknowns[u].second, unknowns[u].first) = -v(u);
            }
            const RealMatrix a = llt.matrixU().solve(RealMatrix(k * lt));  // L^-T K L^T
            stacked.col(static_cast<Eigen::Index>(c)) = vectorize(a);
        }
        Eigen::HouseholderQR<RealMatrix> qr(stacked);
        const RealMatrix q = qr.householderQ() * RealMatrix::Identity(stacked.rows(), stacked.cols());
        for (Eigen::Index c = 0; c < q.cols(); ++c) out.basis.push_back(unvectorize(q.col(c), dim));
    }

    out.expected_dim = static_cast<std::size_t>(group_signature(decompose(p)).algebra_dim());
    return out;
}

RecursionBasis recursion_basis(const CompatiblePair& p) {
    RecursionBasis rb;
    RealMatrix current = p.t1().j().matrix();
    for (Eigen::Index k = 0; k < p.n(); ++k) {
        rb.fields.push_back({current});
        current = p.big_t() * current;
    }
    return rb;
}

double nijenhuis_residual(const RealMatrix& t, const RealMatrix& a) {
    require_same_dim(t, a, "nijenhuis_residual");
    const RealMatrix lhs = commutator(RealMatrix(t * a), t);
    const RealMatrix rhs = t * commutator(a, t);
    const double st = scale_of(t);
    return inf_norm(RealMatrix(lhs - rhs)) / (st * st * scale_of(a));
}

RecursionCertificate certify_recursion(const RecursionBasis& rb, const CompatiblePair& p) {
    const Tolerance& tol = p.tolerance();
    const auto n = static_cast<std::size_t>(p.n());
    RecursionCertificate c;

    c.preserves = true;
    for (const auto& f : rb.fields) {
        const auto r1 = field_preserves(f, p.t1(), tol);
        const auto r2 = field_preserves(f, p.t2(), tol);
        const double worst =
            std::max({r1.g_residual / r1.g_limit, r1.omega_residual / r1.omega_limit,
                      r2.g_residual / r2.g_limit, r2.omega_residual / r2.omega_limit});
        c.preservation.push_back(worst * tol.rel);
        c.preserves = c.preserves && r1.preserves && r2.preserves;
    }

    for (std::size_t i = 0; i < rb.fields.size(); ++i)
        for (std::size_t k = i + 1; k < rb.fields.size(); ++k) {
            const auto& a = rb.fields[i].a;
            const auto& b = rb.fields[k].a;
            c.max_commutator = std::max(c.max_commutator,
                                        inf_norm(commutator(a, b)) / (scale_of(a) * scale_of(b)));
        }
    c.commute = c.max_commutator <= tol.rel;

    if (!rb.fields.empty()) {
        const auto dim = rb.fields.front().a.rows();
        RealMatrix stacked(dim * dim, static_cast<Eigen::Index>(rb.fields.size()));
        for (std::size_t k = 0; k < rb.fields.size(); ++k) {
            RealVector v = vectorize(rb.fields[k].a);
            const double nv = v.norm();
            stacked.col(static_cast<Eigen::Index>(k)) = nv > 0.0 ? RealVector(v / nv) : v;
        }
        Eigen::JacobiSVD<RealMatrix> svd(stacked);
        std::vector<double> sv(svd.singularValues().data(),
                               svd.singularValues().data() + svd.singularValues().size());
        const double smax = sv.empty() ? 0.0 : sv.front();
        c.rank = decide_rank(std::move(sv), tol.rel * smax);
    }
    c.independent = c.rank.rank == n;

    const auto teig = eig_self_adjoint(p.big_t(), p.t1().g().matrix(), tol);
    c.t_clusters = cluster_eigenvalues(teig.values, tol.cluster_gap).size();
    c.vandermonde_consistent = c.rank.rank == std::min(n, c.t_clusters);

    c.nijenhuis_residual = nijenhuis_residual(p.big_t(), p.t1().j().matrix());
    c.nijenhuis = c.nijenhuis_residual <= 1e-12;
    return c;
}

RealMatrix flow(const LinearField& field, double t, const Tolerance& tol) {
    const RealMatrix& a = field.a;
    require_square(a, "flow");
    require_finite(a, "flow");
    if (!std::isfinite(t)) throw InvalidInput("flow: time must be finite");
    const auto dim = a.rows();
    const RealMatrix id = RealMatrix::Identity(dim, dim);

    const RealMatrix a2 = a * a;
    const double c2 = -a2.trace() / static_cast<double>(dim);
    const double sa = scale_of(a);
    if (c2 > 0.0 &&
        inf_norm(RealMatrix(a2 + c2 * id)) <= tol.rel * static_cast<double>(dim) * sa * sa) {
        const double c = std::sqrt(c2);
        return std::cos(c * t) * id + (std::sin(c * t) / c) * a;
    }

    RealMatrix out = (t * a).exp();
    if (!out.allFinite()) {
        std::ostringstream os;
        os << "flow: exponential overflowed (t ||A|| = " << std::abs(t) * inf_norm(a) << ")";
        throw NumericalError(os.str());
    }
    return out;
}

double ConservationReport::max() const { return std::max({g1, omega1, g2, omega2}); }

ConservationReport conservation_probe(const LinearField& field, const CompatiblePair& p,
                                      std::span<const double> times) {
    ConservationReport r;
    const RealMatrix* tensors[] = {&p.t1().g().matrix(), &p.t1().omega().matrix(),
                                   &p.t2().g().matrix(), &p.t2().omega().matrix()};
    double* slots[] = {&r.g1, &r.omega1, &r.g2, &r.omega2};
    for (double t : times) {
        const RealMatrix o = flow(field, t, p.tolerance());
        for (int k = 0; k < 4; ++k) {
            const RealMatrix& tau = *tensors[k];
            const double drift = inf_norm(RealMatrix(o.transpose() * tau * o - tau)) / inf_norm(tau);
            *slots[k] = std::max(*slots[k], drift);
        }
    }
    return r;
}

std::vector<double> sample_times(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    if (n == 0) return out;
    if (n == 1) return {lo};
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    return out;
}

}  // namespace biham
