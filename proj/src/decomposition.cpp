#include "biham/decomposition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "biham/error.hpp"
#include "biham/random.hpp"

namespace biham {

Eigen::Index BlockDecomposition::dim() const {
    Eigen::Index d = 0;
    for (const auto& b : blocks) d += b.dim;
    return d;
}

namespace {

// Flip e so that its largest-magnitude entry (first on ties) is positive.
void normalize_sign(RealVector& e) {
    Eigen::Index k = 0;
    for (Eigen::Index i = 1; i < e.size(); ++i)
        if (std::abs(e(i)) > std::abs(e(k))) k = i;
    if (e(k) < 0.0) e = -e;
}

// Rearranges a g1-orthonormal basis of a J1-invariant subspace into pairs
// (e_k, J1 e_k). Pivots on the candidate with the largest residual.
RealMatrix adapted_basis(const RealMatrix& w, const RealMatrix& g1, const RealMatrix& j1) {
    const Eigen::Index dim = w.cols();
    RealMatrix out(w.rows(), dim);
    Eigen::Index filled = 0;

    auto project_out = [&](RealVector v) {
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index k = 0; k < filled; ++k) {
                const auto q = out.col(k);
                v -= q.dot(g1 * v) * q;
            }
        return v;
    };
    auto g_norm = [&](const RealVector& v) { return std::sqrt(std::max(0.0, v.dot(g1 * v))); };

    while (filled < dim) {
        Eigen::Index best = -1;
        double best_norm = -1.0;
        RealVector best_vec;
        for (Eigen::Index c = 0; c < dim; ++c) {
            RealVector v = project_out(w.col(c));
            const double nv = g_norm(v);
            if (nv > best_norm) {
                best_norm = nv;
                best = c;
                best_vec = std::move(v);
            }
        }
        if (best < 0 || best_norm < 0.5)
            throw NumericalError("decompose: block is not invariant under J1");
        RealVector e = best_vec / best_norm;
        normalize_sign(e);
        out.col(filled++) = e;

        RealVector f = project_out(j1 * e);
        const double nf = g_norm(f);
        if (nf < 0.5) throw NumericalError("decompose: J1 e is not independent of the block basis");
        out.col(filled++) = f / nf;
    }
    return out;
}

double restricted_norm(const RealMatrix& b, const RealMatrix& form) {
    return inf_norm(RealMatrix(b.transpose() * form * b));
}

}  // namespace

BlockDecomposition decompose(const CompatiblePair& p) {
    const Tolerance& tol = p.tolerance();
    const RealMatrix& g1 = p.t1().g().matrix();
    const RealMatrix& g2 = p.t2().g().matrix();
    const RealMatrix& w1 = p.t1().omega().matrix();
    const RealMatrix& w2 = p.t2().omega().matrix();
    const RealMatrix& j1 = p.t1().j().matrix();
    const RealMatrix& j2 = p.t2().j().matrix();
    const RealMatrix& big_g = p.big_g();
    const RealMatrix& big_t = p.big_t();

    const auto eig = eig_self_adjoint(big_g, g1, tol);
    if (!(eig.values.front() > 0.0))
        throw NumericalError("decompose: G has a non-positive eigenvalue");
    const auto clusters = cluster_eigenvalues(eig.values, tol.cluster_gap);

    BlockDecomposition d;
    d.tol = tol;
    d.source = std::make_shared<const CompatiblePair>(p);

    for (const auto& c : clusters) {
        const double lambda = c.representative;
        const auto m = static_cast<Eigen::Index>(c.multiplicity);
        const RealMatrix v = eig.basis.middleCols(static_cast<Eigen::Index>(c.first), m);

        RealMatrix tc = v.transpose() * g1 * big_t * v;
        tc = 0.5 * (tc + tc.transpose());
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(tc);

        std::vector<Eigen::Index> plus, minus;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double mu = es.eigenvalues()(k);
            const int sign = mu >= 0.0 ? 1 : -1;
            if (std::abs(mu - sign * lambda) > tol.cluster_gap * std::max(1.0, lambda)) {
                std::ostringstream os;
                os << "decompose: T eigenvalue " << mu << " is not +-" << lambda
                   << " on the G-eigenspace";
                throw NumericalError(os.str());
            }
            (sign > 0 ? plus : minus).push_back(k);
        }

        for (int sign : {1, -1}) {
            const auto& idx = sign > 0 ? plus : minus;
            if (idx.empty()) continue;
            if (idx.size() % 2 != 0) {
                std::ostringstream os;
                os << "decompose: block (lambda=" << lambda << ", sign=" << sign
                   << ") has odd dimension " << idx.size();
                throw NumericalError(os.str());
            }
            RealMatrix w(v.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k)
                w.col(static_cast<Eigen::Index>(k)) = v * es.eigenvectors().col(idx[k]);

            Block b;
            b.lambda = lambda;
            b.sign = sign;
            b.dim = w.cols();
            b.basis = adapted_basis(w, g1, j1);
            const RealMatrix& bb = b.basis;
            b.rho = (bb.transpose() * g2 * bb).trace() / static_cast<double>(b.dim);

            const double s = std::max(1.0, lambda);
            const auto id = RealMatrix::Identity(g1.rows(), g1.cols());
            const RealMatrix coords = bb.transpose() * g1;  // coordinates in the block
            b.residuals.add("g2 = lambda g1", restricted_norm(bb, RealMatrix(g2 - lambda * g1)),
                            tol.rel * std::max(scale_of(g2), s));
            b.residuals.add("omega2 = sign lambda omega1",
                            restricted_norm(bb, RealMatrix(w2 - sign * lambda * w1)),
                            tol.rel * std::max(scale_of(w2), s));
            b.residuals.add("J2 = sign J1", inf_norm(RealMatrix(coords * (j2 - sign * j1) * bb)),
                            tol.rel * scale_of(j1) * scale_of(j2) * scale_of(coords) *
                                scale_of(bb));
            b.residuals.add("G = lambda", inf_norm(RealMatrix(coords * (big_g - lambda * id) * bb)),
                            tol.rel * scale_of(big_g) * scale_of(coords) * scale_of(bb));
            b.residuals.add("T = sign lambda",
                            inf_norm(RealMatrix(coords * (big_t - sign * lambda * id) * bb)),
                            tol.rel * scale_of(big_t) * scale_of(coords) * scale_of(bb));
            b.residuals.add("basis g1-orthonormal",
                            inf_norm(RealMatrix(bb.transpose() * g1 * bb -
                                                RealMatrix::Identity(b.dim, b.dim))),
                            tol.rel * scale_of(g1) * scale_of(bb) * scale_of(bb));
            if (!b.residuals.ok()) {
                std::ostringstream os;
                os << "decompose: block (lambda=" << lambda << ", sign=" << sign
                   << ") failed: " << b.residuals.failures().front();
                throw NumericalError(os.str());
            }
            d.blocks.push_back(std::move(b));
        }
    }

    double lambda_max = 1.0;
    for (const auto& b : d.blocks) lambda_max = std::max(lambda_max, b.lambda);
    for (std::size_t i = 0; i < d.blocks.size(); ++i)
        for (std::size_t k = i + 1; k < d.blocks.size(); ++k)
            for (const RealMatrix* g : {&g1, &g2})
                d.cross_residual = std::max(
                    d.cross_residual,
                    inf_norm(RealMatrix(d.blocks[i].basis.transpose() * *g * d.blocks[k].basis)));
    const double cross_limit = tol.rel * lambda_max * static_cast<double>(g1.rows());
    if (d.cross_residual > cross_limit) {
        std::ostringstream os;
        os << "decompose: blocks are not bi-orthogonal (residual " << d.cross_residual << ")";
        throw NumericalError(os.str());
    }
    return d;
}

bool is_generic(const BlockDecomposition& d) {
    return std::all_of(d.blocks.begin(), d.blocks.end(),
                       [](const Block& b) { return b.dim == 2; });
}

CanonicalBasis canonical_basis(const Block& b, const CompatiblePair& p) {
    if (b.dim != 2) throw InvalidInput("canonical_basis: block is not two-dimensional");
    const RealMatrix& g1 = p.t1().g().matrix();
    const RealMatrix& g2 = p.t2().g().matrix();
    const RealMatrix& w1 = p.t1().omega().matrix();
    const RealMatrix& j1 = p.t1().j().matrix();
    const RealMatrix& j2 = p.t2().j().matrix();
    const Tolerance& tol = p.tolerance();

    CanonicalBasis c;
    c.e1 = b.basis.col(0);
    c.e2 = j1 * c.e1;
    c.lambda = b.lambda;
    c.sign = b.sign;

    const double n11 = c.e1.dot(g1 * c.e1);
    const double n22 = c.e2.dot(g1 * c.e2);
    c.rho = c.e1.dot(g2 * c.e1) / n11;

    RealMatrix e(g1.rows(), 2);
    e << c.e1, c.e2;
    const double s = std::max(1.0, n11);
    c.residuals.add("g1(e1,e2) = 0", std::abs(c.e1.dot(g1 * c.e2)), tol.rel * s);
    c.residuals.add("g1(e2,e2) = g1(e1,e1)", std::abs(n22 - n11), tol.rel * s);
    // omega(x, y) = x^T omega y = g(x, J y), so the positive pairing is (e2, e1).
    c.residuals.add("omega1(e2,e1) = g1(e1,e1)", std::abs(c.e2.dot(w1 * c.e1) - n11), tol.rel * s);
    c.residuals.add("g2 = rho g1 on block",
                    inf_norm(RealMatrix(e.transpose() * (g2 - c.rho * g1) * e)),
                    tol.rel * std::max(scale_of(g2), c.rho) * s);
    c.residuals.add("J2 e1 = sign J1 e1", (j2 * c.e1 - b.sign * c.e2).lpNorm<Eigen::Infinity>(),
                    tol.rel * scale_of(j2) * std::max(1.0, c.e1.lpNorm<Eigen::Infinity>()));
    c.residuals.add("rho = lambda", std::abs(c.rho - c.lambda),
                    tol.cluster_gap * std::max(1.0, c.lambda));
    return c;
}

std::vector<int> GroupSignature::multiplicities() const {
    std::vector<int> out;
    out.reserve(factors.size());
    for (const auto& f : factors) out.push_back(f.r);
    return out;
}

int GroupSignature::n() const {
    int s = 0;
    for (const auto& f : factors) s += f.r;
    return s;
}

std::string GroupSignature::complex_form() const {
    std::string out;
    for (const auto& f : factors) {
        if (!out.empty()) out += "×";
        out += "U(" + std::to_string(f.r) + ")";
    }
    return out;
}

std::string GroupSignature::real_form() const {
    std::string out;
    for (const auto& f : factors) {
        if (!out.empty()) out += "×";
        out += f.r == 1 ? std::string("SO(2)")
                        : "U(" + std::to_string(2 * f.r) + ";g,ω)";
    }
    return out;
}

int GroupSignature::algebra_dim() const {
    int s = 0;
    for (const auto& f : factors) s += f.r * f.r;
    return s;
}

GroupSignature group_signature(const BlockDecomposition& d) {
    GroupSignature sig;
    for (const auto& b : d.blocks) {
        const auto r = static_cast<int>(b.dim / 2);
        auto it = std::find_if(sig.factors.begin(), sig.factors.end(), [&](const GroupFactor& f) {
            return f.sign == b.sign && std::abs(f.lambda - b.lambda) <=
                                           d.tol.cluster_gap * std::max(1.0, b.lambda);
        });
        if (it != sig.factors.end())
            it->r += r;
        else
            sig.factors.push_back({b.lambda, b.sign, r});
    }
    return sig;
}

namespace {

RealMatrix standard_form(Eigen::Index n) {
    RealMatrix s = RealMatrix::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        s(2 * k, 2 * k + 1) = 1.0;
        s(2 * k + 1, 2 * k) = -1.0;
    }
    return s;
}

// Real 2n x 2n matrix of a complex n x n matrix when i acts as S = [[0,1],[-1,0]].
RealMatrix realify(const ComplexMatrix& u) {
    const Eigen::Index n = u.rows();
    RealMatrix r(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double a = u(i, k).real();
            const double b = u(i, k).imag();
            r(2 * i, 2 * k) = a;
            r(2 * i, 2 * k + 1) = b;
            r(2 * i + 1, 2 * k) = -b;
            r(2 * i + 1, 2 * k + 1) = a;
        }
    return r;
}

RealMatrix congruence(const RealMatrix& m, const RealMatrix& form) {
    return m.transpose() * form * m;
}

}  // namespace

CompatiblePair synthesize_pair(const std::vector<BlockSpec>& spec, std::uint64_t seed,
                               SynthFrame frame, const Tolerance& tol) {
    tol.validate();
    if (spec.empty()) throw InvalidInput("synthesize_pair: empty spec");
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto& s = spec[i];
        if (!(s.lambda > 0.0) || !std::isfinite(s.lambda))
            throw InvalidInput("synthesize_pair: lambda must be positive and finite");
        if (s.sign != 1 && s.sign != -1)
            throw InvalidInput("synthesize_pair: sign must be + or -");
        if (s.multiplicity < 1)
            throw InvalidInput("synthesize_pair: multiplicity must be >= 1");
        for (std::size_t k = 0; k < i; ++k)
            if (spec[k].sign == s.sign &&
                std::abs(spec[k].lambda - s.lambda) <=
                    1e3 * tol.cluster_gap * std::max(1.0, s.lambda))
                throw InvalidInput(
                    "synthesize_pair: inconsistent spec, repeated (lambda, sign) entry");
        n += s.multiplicity;
    }

    const Eigen::Index dim = 2 * n;
    const RealMatrix s_form = standard_form(n);
    RealMatrix g1 = RealMatrix::Identity(dim, dim);
    RealMatrix w1 = s_form;
    RealMatrix g2 = RealMatrix::Zero(dim, dim);
    RealMatrix w2 = RealMatrix::Zero(dim, dim);
    Eigen::Index off = 0;
    for (const auto& s : spec) {
        const Eigen::Index m = 2 * s.multiplicity;
        g2.block(off, off, m, m) = s.lambda * RealMatrix::Identity(m, m);
        w2.block(off, off, m, m) = s.sign * s.lambda * s_form.block(off, off, m, m);
        off += m;
    }

    SplitMix64 rng(seed);
    RealMatrix change = realify(random_unitary(rng, n));
    if (frame == SynthFrame::General) {
        const RealMatrix q1 = random_orthogonal(rng, dim);
        const RealMatrix q2 = random_orthogonal(rng, dim);
        RealVector d(dim);
        for (Eigen::Index k = 0; k < dim; ++k) d(k) = rng.uniform(0.7, 1.4);
        change = change * (q1 * d.asDiagonal() * q2);
    }
    g1 = congruence(change, g1);
    w1 = congruence(change, w1);
    g2 = congruence(change, g2);
    w2 = congruence(change, w2);

    auto triple = [&](const RealMatrix& g, const RealMatrix& w, const char* which) {
        auto c = check_admissible(MetricTensor::from(g, tol), SymplecticForm::from(w, tol), tol);
        if (!c)
            throw NumericalError(std::string("synthesize_pair: ") + which + " not admissible (" +
                                 c.report.failures().front() + ")");
        return std::move(*c.value);
    };
    auto pair = check_compatible(triple(g1, w1, "triple 1"), triple(g2, w2, "triple 2"), tol);
    if (!pair)
        throw NumericalError("synthesize_pair: synthesized pair failed compatibility (" +
                             pair.report.failures().front() + ")");
    return std::move(*pair.value);
}

std::vector<BlockSpec> parse_block_spec(const std::string& text) {
    std::vector<BlockSpec> out;
    auto fail = [&](const std::string& why) -> void {
        throw InvalidInput("bad block spec '" + text + "': " + why);
    };
    if (text.empty()) fail("empty");
    std::size_t from = 0;
    while (from <= text.size()) {
        // explicit split so a trailing comma yields an empty (bad) item
        const auto comma = std::min(text.find(',', from), text.size());
        const std::string item = text.substr(from, comma - from);
        from = comma + 1;
        const auto c1 = item.find(':');
        const auto c2 = c1 == std::string::npos ? c1 : item.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            item.find(':', c2 + 1) != std::string::npos)
            fail("expected lambda:sign:multiplicity");
        const std::string ls = item.substr(0, c1);
        const std::string ss = item.substr(c1 + 1, c2 - c1 - 1);
        const std::string ms = item.substr(c2 + 1);

        BlockSpec b;
        auto [p1, e1] = std::from_chars(ls.data(), ls.data() + ls.size(), b.lambda);
        if (e1 != std::errc() || p1 != ls.data() + ls.size() || ls.empty()) fail("bad lambda");
        if (ss == "+" || ss == "+1")
            b.sign = 1;
        else if (ss == "-" || ss == "-1")
            b.sign = -1;
        else
            fail("sign must be + or -");
        auto [p3, e3] = std::from_chars(ms.data(), ms.data() + ms.size(), b.multiplicity);
        if (e3 != std::errc() || p3 != ms.data() + ms.size() || ms.empty())
            fail("bad multiplicity");
        if (!(b.lambda > 0.0) || !std::isfinite(b.lambda)) fail("lambda must be positive");
        if (b.multiplicity < 1) fail("multiplicity must be >= 1");
        out.push_back(b);
    }
    if (out.empty()) fail("empty");
    return out;
}

std::string format_block_spec(const std::vector<BlockSpec>& spec) {
    std::string out;
    for (const auto& b : spec) {
        if (!out.empty()) out += ',';
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, b.lambda);
        out.append(buf, p);
        out += b.sign > 0 ? ":+:" : ":-:";
        out += std::to_string(b.multiplicity);
    }
    return out;
}

}  // namespace biham
