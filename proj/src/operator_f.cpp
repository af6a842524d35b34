#include "biham/operator_f.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "biham/error.hpp"
#include "biham/random.hpp"

namespace biham {

namespace {

ComplexMatrix kron_identity_left(const ComplexMatrix& m) {
    // I (x) M
    const auto n = m.rows();
    ComplexMatrix out = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index b = 0; b < n; ++b) out.block(b * n, b * n, n, n) = m;
    return out;
}

ComplexMatrix kron_identity_right(const ComplexMatrix& m) {
    // M (x) I
    const auto n = m.rows();
    ComplexMatrix out = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            out.block(i * n, k * n, n, n) = m(i, k) * ComplexMatrix::Identity(n, n);
    return out;
}

// vec(C X - X C) = (I (x) C - C^T (x) I) vec(X), column-major vec.
ComplexMatrix commutator_operator(const ComplexMatrix& c) {
    return kron_identity_left(c) - kron_identity_right(c.transpose());
}

double spectral_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

ComplexMatrix reshape(const ComplexVector& v, Eigen::Index n) {
    return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

std::string ambiguity_message(const char* what, const RankDecision& r) {
    std::ostringstream os;
    os << what << ": rank decision is ambiguous (kept " << r.smallest_kept << ", dropped "
       << r.largest_dropped << ", threshold " << r.threshold << ")";
    return os.str();
}

// BDCSVD in Eigen 3.4.0 occasionally returns a non-orthonormal V on exactly
// rank-deficient input. Accept its result only if V is unitary and each
// ||m v_k|| reproduces sigma_k; otherwise pay for Jacobi.
template <class Svd>
bool consistent(const ComplexMatrix& m, const Svd& svd) {
    const ComplexMatrix& v = svd.matrixV();
    const auto d = m.cols();
    const double eps = 1e3 * std::numeric_limits<double>::epsilon() * static_cast<double>(d);
    if ((v.adjoint() * v - ComplexMatrix::Identity(d, d)).norm() > eps) return false;
    const ComplexMatrix mv = m * v;
    const auto k = svd.singularValues().size();
    const double smax = k > 0 ? svd.singularValues()(0) : 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
        const double s = c < k ? svd.singularValues()(c) : 0.0;
        if (std::abs(mv.col(c).norm() - s) > eps * std::max(1.0, smax)) return false;
    }
    return true;
}

// Null space of m (rows x d) with an explicit threshold; columns of V.
std::pair<ComplexMatrix, RankDecision> null_space(const ComplexMatrix& m, double threshold,
                                                  const char* what) {
    std::vector<double> sv;
    ComplexMatrix v;
    Eigen::BDCSVD<ComplexMatrix> fast(m, Eigen::ComputeFullV);
    if (consistent(m, fast)) {
        sv.assign(fast.singularValues().data(),
                  fast.singularValues().data() + fast.singularValues().size());
        v = fast.matrixV();
    } else {
        Eigen::JacobiSVD<ComplexMatrix> slow(m, Eigen::ComputeFullV);
        sv.assign(slow.singularValues().data(),
                  slow.singularValues().data() + slow.singularValues().size());
        v = slow.matrixV();
    }
    sv.resize(static_cast<std::size_t>(m.cols()), 0.0);
    auto rank = decide_rank(std::move(sv), threshold);
    if (rank.ambiguous()) throw NumericalError(ambiguity_message(what, rank));
    const auto r = static_cast<Eigen::Index>(rank.rank);
    ComplexMatrix null = v.rightCols(m.cols() - r);
    return {std::move(null), std::move(rank)};
}

}  // namespace

HermitianForm HermitianForm::from(const ComplexMatrix& h, const Tolerance& tol) {
    if (h.rows() != h.cols() || h.rows() == 0)
        throw InvalidInput("hermitian form: matrix must be square and non-empty");
    if (!h.allFinite()) throw InvalidInput("hermitian form: entries must be finite");
    const double scale = scale_of(h);
    const double asym = inf_norm(ComplexMatrix(h - h.adjoint()));
    if (asym > tol.rel * scale) {
        std::ostringstream os;
        os << "hermitian form: not conjugate-symmetric (residual " << asym << ")";
        throw InvalidInput(os.str());
    }
    ComplexMatrix herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > tol.rel * scale))
        throw InvalidInput("hermitian form: not positive-definite");
    return HermitianForm(std::move(herm));
}

OperatorF build_f(const HermitianForm& h1, const HermitianForm& h2, const Tolerance& tol) {
    if (h1.dim() != h2.dim()) throw InvalidInput("build_f: dimension mismatch");
    const ComplexMatrix& a = h1.matrix();
    const ComplexMatrix& b = h2.matrix();

    OperatorF out{Eigen::LLT<ComplexMatrix>(a).solve(b), h1, h2, {}, {}, tol};

    for (const auto* h : {&a, &b}) {
        const ComplexMatrix hf = *h * out.f;
        const double res = inf_norm(ComplexMatrix(hf - hf.adjoint()));
        const double limit = tol.rel * scale_of(*h) * scale_of(out.f);
        if (res > limit) {
            std::ostringstream os;
            os << "build_f: F is not self-adjoint (residual " << res << ", limit " << limit << ")";
            throw NumericalError(os.str());
        }
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<ComplexMatrix> ges(b, a);
    if (ges.info() != Eigen::Success) throw NumericalError("build_f: eigensolver failed");
    const auto& ev = ges.eigenvalues();
    out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    out.eigenvectors = ges.eigenvectors();
    if (!(out.eigenvalues.front() > 0.0)) throw NumericalError("build_f: F is not positive");
    return out;
}

NormBounds norm_bounds(const OperatorF& f) {
    NormBounds nb;
    nb.lambda_min = f.eigenvalues.front();
    nb.lambda_max = f.eigenvalues.back();
    nb.a = 1.0 / std::sqrt(nb.lambda_max);
    nb.b = 1.0 / std::sqrt(nb.lambda_min);
    nb.norm_f = nb.lambda_max;
    nb.chain_slack =
        std::min(nb.norm_f - 1.0 / (nb.b * nb.b), 1.0 / (nb.a * nb.a) - nb.norm_f);
    return nb;
}

Commutant commutant(const OperatorF& f) {
    const auto n = f.f.rows();
    const double threshold = f.tol.rel * 2.0 * spectral_norm(f.f);
    auto [null, rank] = null_space(commutator_operator(f.f), threshold, "commutant");
    Commutant c;
    c.rank = std::move(rank);
    c.dim = static_cast<std::size_t>(null.cols());
    for (Eigen::Index k = 0; k < null.cols(); ++k) c.basis.push_back(reshape(null.col(k), n));
    return c;
}

std::size_t commutant_dim(const OperatorF& f) { return commutant(f).dim; }

Commutant bicommutant(const OperatorF& f, const Commutant& c) {
    const auto n = f.f.rows();
    Commutant out;
    if (c.basis.empty()) {
        out.dim = static_cast<std::size_t>(n * n);
        for (Eigen::Index k = 0; k < n * n; ++k)
            out.basis.push_back(reshape(ComplexMatrix::Identity(n * n, n * n).col(k), n));
        return out;
    }
    // A handful of random combinations generates the commutant algebra almost
    // surely. Intersecting one element at a time compounds rounding (a scalar F
    // has n^2 of them), so all constraints go into one SVD instead.
    constexpr int kMixes = 4;
    SplitMix64 rng(0x6269636fULL);
    ComplexMatrix stacked(kMixes * n * n, n * n);
    double norm2 = 0.0;
    for (int m = 0; m < kMixes; ++m) {
        ComplexMatrix mix = ComplexMatrix::Zero(n, n);
        for (const auto& elem : c.basis) mix += Complex(rng.normal(), rng.normal()) * elem;
        mix /= mix.norm();
        const double s = spectral_norm(mix);
        norm2 += s * s;
        stacked.middleRows(m * n * n, n * n) = commutator_operator(mix);
    }
    auto [null, rank] = null_space(stacked, f.tol.rel * 2.0 * std::sqrt(norm2), "bicommutant");
    out.rank = std::move(rank);
    out.dim = static_cast<std::size_t>(null.cols());
    for (Eigen::Index k = 0; k < null.cols(); ++k) out.basis.push_back(reshape(null.col(k), n));
    return out;
}

std::size_t bicommutant_dim(const OperatorF& f) { return bicommutant(f, commutant(f)).dim; }

std::vector<Cluster> f_clusters(const OperatorF& f) {
    return cluster_eigenvalues(f.eigenvalues, f.tol.cluster_gap);
}

bool is_generic_f(const OperatorF& f) {
    const auto c = commutant(f);
    const auto bc = bicommutant(f, c);
    const bool generic = c.dim == bc.dim;
    const auto clusters = f_clusters(f);
    const bool simple = std::all_of(clusters.begin(), clusters.end(),
                                    [](const Cluster& k) { return k.multiplicity == 1; });
    if (generic != simple) {
        std::ostringstream os;
        os << "is_generic_f: commutant/bicommutant test (" << c.dim << " vs " << bc.dim
           << ") disagrees with spectral clustering";
        throw NumericalError(os.str());
    }
    return generic;
}

BiunitarySample biunitary_sample(const OperatorF& f, const std::vector<double>& poly_coeffs,
                                 double t) {
    const auto n = f.f.rows();
    ComplexVector phase(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = f.eigenvalues[static_cast<std::size_t>(k)];
        double v = 0.0;
        for (auto it = poly_coeffs.rbegin(); it != poly_coeffs.rend(); ++it) v = v * x + *it;
        phase(k) = std::polar(1.0, v * t);
    }
    const ComplexMatrix& v = f.eigenvectors;
    const ComplexMatrix& h1 = f.h1.matrix();
    const ComplexMatrix& h2 = f.h2.matrix();
    BiunitarySample s;
    s.u = v * phase.asDiagonal() * (v.adjoint() * h1);
    s.residual_h1 = inf_norm(ComplexMatrix(s.u.adjoint() * h1 * s.u - h1));
    s.residual_h2 = inf_norm(ComplexMatrix(s.u.adjoint() * h2 * s.u - h2));
    return s;
}

Complexification complexify(const CompatiblePair& p) { return complexify(p, decompose(p)); }

Complexification complexify(const CompatiblePair& p, const BlockDecomposition& d) {
    const RealMatrix& g1 = p.t1().g().matrix();
    const RealMatrix& g2 = p.t2().g().matrix();
    const RealMatrix& j1 = p.t1().j().matrix();
    const RealMatrix& j2 = p.t2().j().matrix();
    const auto n = p.n();

    RealMatrix frame(p.dim(), n);
    ComplexMatrix h1 = ComplexMatrix::Zero(n, n);
    ComplexMatrix h2 = ComplexMatrix::Zero(n, n);
    std::vector<int> signs;

    // h(x, y) = g(x, y) + i g(J x, y), conjugate-linear in x for i acting as J.
    auto form = [](const RealMatrix& g, const RealMatrix& j, const RealMatrix& e) {
        const RealMatrix re = e.transpose() * g * e;
        const RealMatrix im = (j * e).transpose() * g * e;
        ComplexMatrix h(e.cols(), e.cols());
        h.real() = re;
        h.imag() = im;
        return h;
    };

    Eigen::Index off = 0;
    for (const auto& b : d.blocks) {
        const Eigen::Index m = b.dim / 2;
        RealMatrix e(p.dim(), m);
        for (Eigen::Index k = 0; k < m; ++k) e.col(k) = b.basis.col(2 * k);
        frame.middleCols(off, m) = e;
        h1.block(off, off, m, m) = form(g1, j1, e);
        ComplexMatrix hb = form(g2, j2, e);
        if (b.sign < 0) hb = hb.conjugate().eval();
        h2.block(off, off, m, m) = hb;
        signs.push_back(b.sign);
        off += m;
    }

    return {HermitianForm::from(h1, p.tolerance()), HermitianForm::from(h2, p.tolerance()),
            std::move(signs), std::move(frame)};
}

}  // namespace biham
