// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biham/document.hpp"
#include "biham/dynamics.hpp"
#include "biham/error.hpp"
#include "biham/operator_f.hpp"
#include "biham/pencil.hpp"
#include "support.hpp"

using namespace biham;
using namespace biham::testing;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

double rel_err(const RealMatrix& a, const RealMatrix& b) {
    return inf_norm(RealMatrix(a - b)) / std::max(1.0, inf_norm(b));
}

// -- 1 ----------------------------------------------------------------------

Outcome two_dimensional_example() {
    Outcome out;
    SplitMix64 rng(101);
    const double tol = Tolerance{}.rel;
    double worst_j = 0.0, worst_w = 0.0, worst_flow = 0.0;
    int verdicts = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double r1 = rng.uniform(0.2, 5.0), r2 = rng.uniform(0.2, 5.0);
        const auto t1 = admissible_form_for(MetricTensor::from(diag({r1, r2})),
                                            SymplecticForm::from(standard_s()));
        RealMatrix j(2, 2), w(2, 2);
        j << 0, std::sqrt(r2 / r1), -std::sqrt(r1 / r2), 0;
        w << 0, std::sqrt(r1 * r2), -std::sqrt(r1 * r2), 0;
        worst_j = std::max(worst_j, inf_norm(RealMatrix(t1.j().matrix() - j)));
        worst_w = std::max(worst_w, inf_norm(RealMatrix(t1.omega().matrix() - w)));

        // half the trials proportional, half off by a visible amount
        const double c = rng.uniform(0.3, 3.0);
        const double skew = trial % 2 == 0 ? 1.0 : 1.0 + rng.uniform(1e-3, 0.5);
        const double s1 = c * r1, s2 = c * r2 * skew;
        const auto t2 = admissible_form_for(MetricTensor::from(diag({s1, s2})),
                                            SymplecticForm::from(standard_s()));
        const bool verdict = check_compatible(t1, t2).ok();
        const bool expected = std::abs(r2 / r1 - s2 / s1) <= tol * std::max(1.0, r2 / r1);
        verdicts += verdict == expected;

        const double t = rng.uniform(-10.0, 10.0);
        const RealMatrix closed =
            std::cos(t) * RealMatrix::Identity(2, 2) + std::sin(t) * t1.j().matrix();
        worst_flow = std::max(worst_flow, inf_norm(RealMatrix(flow(LinearField{t1.j().matrix()}, t) - closed)));
    }
    out.require(worst_j <= 1e-12, "J1 error " + fmt(worst_j));
    out.require(worst_w <= 1e-12, "omega1 error " + fmt(worst_w));
    out.require(verdicts == 100, "verdict mismatches " + std::to_string(100 - verdicts));
    out.require(worst_flow <= 1e-12, "flow error " + fmt(worst_flow));
    if (out.ok)
        out.detail = "100 pairs, J1 err " + fmt(worst_j) + ", omega1 err " + fmt(worst_w) +
                     ", flow err " + fmt(worst_flow);
    return out;
}

// -- shared synthesized corpus ------------------------------------------------

struct Case {
    std::vector<BlockSpec> spec;
    CompatiblePair pair;
};

std::vector<Case> corpus(std::uint64_t seed, const std::vector<int>& complex_dims, int per_dim) {
    std::vector<Case> out;
    SplitMix64 rng(seed);
    for (int n : complex_dims)
        for (int k = 0; k < per_dim; ++k) {
            const int factors = 1 + static_cast<int>(rng.uniform() * n);
            auto spec = k % 3 == 0 ? random_generic_spec(rng, n) : random_spec(rng, n, factors);
            const auto frame = k % 2 == 0 ? SynthFrame::General : SynthFrame::Unitary;
            out.push_back({spec, synthesize_pair(spec, rng(), frame)});
        }
    return out;
}

// -- 2 ----------------------------------------------------------------------

Outcome round_trip() {
    Outcome out;
    const auto cases = corpus(202, {1, 2, 4, 8, 16}, 24);
    double worst_lambda = 0.0, worst_block = 0.0, worst_cross = 0.0;
    for (const auto& c : cases) {
        const auto d = decompose(c.pair);
        const auto sig = group_signature(d);
        std::vector<std::tuple<int, int>> got, want;
        bool same = sig.factors.size() == c.spec.size();
        for (std::size_t i = 0; same && i < c.spec.size(); ++i) {
            // both sides are ordered by lambda, sign + first
            auto spec = c.spec;
            std::sort(spec.begin(), spec.end(), [](const BlockSpec& a, const BlockSpec& b) {
                return a.lambda != b.lambda ? a.lambda < b.lambda : a.sign > b.sign;
            });
            const auto& f = sig.factors[i];
            same = f.sign == spec[i].sign && f.r == spec[i].multiplicity;
            worst_lambda = std::max(worst_lambda, std::abs(f.lambda - spec[i].lambda) / spec[i].lambda);
        }
        out.require(same, "block multiset mismatch for " + format_block_spec(c.spec));

        const RealMatrix& g1 = c.pair.t1().g().matrix();
        const RealMatrix& w1 = c.pair.t1().omega().matrix();
        const RealMatrix& g2 = c.pair.t2().g().matrix();
        const RealMatrix& w2 = c.pair.t2().omega().matrix();
        const RealMatrix& j1 = c.pair.t1().j().matrix();
        const RealMatrix& j2 = c.pair.t2().j().matrix();
        for (std::size_t a = 0; a < d.blocks.size(); ++a) {
            const auto& b = d.blocks[a];
            const RealMatrix& x = b.basis;
            const double l = b.lambda, e = b.sign;
            worst_block = std::max(
                {worst_block,
                 inf_norm(RealMatrix(x.transpose() * (g2 - l * g1) * x)) / std::max(1.0, l),
                 inf_norm(RealMatrix(x.transpose() * (w2 - e * l * w1) * x)) / std::max(1.0, l),
                 inf_norm(RealMatrix((j2 - e * j1) * x)) / std::max(1.0, inf_norm(x))});
            for (std::size_t o = a + 1; o < d.blocks.size(); ++o) {
                const RealMatrix& y = d.blocks[o].basis;
                worst_cross = std::max({worst_cross, inf_norm(RealMatrix(x.transpose() * g1 * y)),
                                        inf_norm(RealMatrix(x.transpose() * g2 * y)) /
                                            std::max(1.0, inf_norm(g2))});
            }
        }
    }
    out.require(worst_lambda <= 1e-8, "lambda error " + fmt(worst_lambda));
    out.require(worst_cross <= 1e-9, "bi-orthogonality " + fmt(worst_cross));
    out.require(worst_block <= 1e-9, "block relations " + fmt(worst_block));
    if (out.ok)
        out.detail = std::to_string(cases.size()) + " specs at dims 2..32, lambda err " +
                     fmt(worst_lambda) + ", cross " + fmt(worst_cross) + ", blocks " +
                     fmt(worst_block);
    return out;
}

// -- 3 ----------------------------------------------------------------------

Outcome group_consistency() {
    Outcome out;
    auto cases = corpus(303, {1, 2, 3, 4, 6, 8}, 12);
    for (auto& c : corpus(313, {16}, 2)) cases.push_back(std::move(c));  // real dim 32 is slow
    double worst_comm = 0.0, worst_span = 0.0;
    int generic = 0;
    std::string large;
    for (const auto& c : cases) {
        const auto alg = bi_preserving_algebra(c.pair);
        const auto sig = group_signature(decompose(c.pair));
        out.require(alg.dim == static_cast<std::size_t>(sig.algebra_dim()),
                    "algebra dim " + std::to_string(alg.dim) + " for " + format_block_spec(c.spec));
        const bool is_gen = std::all_of(c.spec.begin(), c.spec.end(),
                                        [](const BlockSpec& b) { return b.multiplicity == 1; });
        if (!is_gen) continue;
        ++generic;
        const auto n = static_cast<std::size_t>(c.pair.n());
        out.require(alg.dim == n, "generic algebra dim");
        const auto rb = recursion_basis(c.pair);
        const auto cert = certify_recursion(rb, c.pair);
        // Past n ~ 12 the monomial fields T^r J1 form a Vandermonde system too
        // ill-conditioned to resolve at rel = 1e-9; report the rank only.
        if (n > 8) {
            large += " n=" + std::to_string(n) + " rank " + std::to_string(cert.rank.rank);
        } else {
            out.require(cert.rank.rank == n, "recursion rank " + std::to_string(cert.rank.rank));
        }
        for (std::size_t i = 0; i < rb.fields.size(); ++i)
            for (std::size_t k = i + 1; k < rb.fields.size(); ++k) {
                const auto& a = rb.fields[i].a;
                const auto& b = rb.fields[k].a;
                worst_comm = std::max(worst_comm, inf_norm(commutator(a, b)) /
                                                      std::max(1.0, inf_norm(a) * inf_norm(b)));
            }
        // each field lies in the algebra: project onto its orthonormal basis
        for (const auto& f : rb.fields) {
            RealMatrix rest = f.a;
            for (const auto& e : alg.basis) rest -= (e.cwiseProduct(f.a)).sum() * e;
            worst_span = std::max(worst_span, rest.norm() / std::max(1.0, f.a.norm()));
        }
    }
    out.require(worst_comm <= 1e-10, "recursion commutator " + fmt(worst_comm));
    out.require(worst_span <= 1e-9, "recursion field outside the algebra " + fmt(worst_span));
    out.require(generic > 0, "no generic cases");
    if (out.ok)
        out.detail = std::to_string(cases.size()) + " pairs (" + std::to_string(generic) +
                     " generic), commutator " + fmt(worst_comm) + ", span residual " +
                     fmt(worst_span) + "; rank = n checked to real dim 16" +
                     (large.empty() ? "" : ", informative:" + large);
    return out;
}

// -- 4 ----------------------------------------------------------------------

Outcome recursion_degeneration() {
    Outcome out;
    SplitMix64 rng(404);
    int cases = 0;
    for (int n : {2, 4, 8})
        for (int k : {1, 2, 3}) {
            if (k >= n) continue;
            for (int rep = 0; rep < 4; ++rep) {
                // k distinct (lambda, sign) clusters sharing n complex dimensions
                std::vector<BlockSpec> spec;
                int left = n;
                double lambda = rng.uniform(0.4, 1.0);
                for (int i = 0; i < k; ++i) {
                    const int r = i + 1 == k ? left : 1 + static_cast<int>(rng.uniform() * (left - (k - i)));
                    spec.push_back({lambda, rng.uniform() < 0.5 ? 1 : -1, r});
                    left -= r;
                    lambda *= rng.uniform(1.3, 2.0);
                }
                const auto p = synthesize_pair(spec, rng(), SynthFrame::General);
                const auto cert = certify_recursion(recursion_basis(p), p);
                out.require(cert.rank.rank == static_cast<std::size_t>(k),
                            "rank " + std::to_string(cert.rank.rank) + " for " + format_block_spec(spec));
                out.require(cert.t_clusters == static_cast<std::size_t>(k), "cluster count");
                ++cases;
            }
        }
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto dim = static_cast<Eigen::Index>(2 + 2 * (trial % 8));
        worst = std::max(worst, nijenhuis_residual(random_gaussian(rng, dim, dim),
                                                   random_gaussian(rng, dim, dim)));
    }
    out.require(worst <= 1e-12, "Nijenhuis residual " + fmt(worst));
    if (out.ok)
        out.detail = std::to_string(cases) + " degenerate pairs, rank = k; Nijenhuis " + fmt(worst);
    return out;
}

// -- 5 ----------------------------------------------------------------------

Outcome operator_f_suite() {
    Outcome out;
    SplitMix64 rng(505);
    double worst_unitary = 0.0, worst_slack = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + trial % 16);
        // clustered spectrum: a few distinct values, repeated
        const int distinct = 1 + static_cast<int>(rng.uniform() * static_cast<double>(n));
        std::vector<double> levels;
        double v = rng.uniform(0.3, 1.0);
        for (int i = 0; i < distinct; ++i, v *= rng.uniform(1.2, 1.6)) levels.push_back(v);
        std::vector<double> values;
        for (Eigen::Index i = 0; i < n; ++i)
            values.push_back(i < distinct ? levels[static_cast<std::size_t>(i)]
                                          : levels[static_cast<std::size_t>(rng.uniform() * distinct)]);
        const ComplexMatrix h1 = random_hpd(rng, n);
        const ComplexMatrix l = Eigen::LLT<ComplexMatrix>(h1).matrixL();
        const ComplexMatrix h2 = l * hermitian_with_spectrum(rng, values) * l.adjoint();
        const auto f = build_f(HermitianForm::from(h1), HermitianForm::from(h2));

        std::size_t expected = 0;
        for (double level : levels) {
            const auto m = static_cast<std::size_t>(std::count(values.begin(), values.end(), level));
            expected += m * m;
        }
        const auto c = commutant(f);
        const auto bc = bicommutant(f, c);
        out.require(c.dim == expected, "commutant dim " + std::to_string(c.dim) + " != " +
                                           std::to_string(expected));
        out.require(bc.dim == levels.size(), "bicommutant dim " + std::to_string(bc.dim));
        out.require(is_generic_f(f) == (static_cast<Eigen::Index>(levels.size()) == n), "genericity");

        std::vector<double> coeffs = {rng.normal(), rng.normal(), rng.normal()};
        const auto u = biunitary_sample(f, coeffs, rng.uniform(-5.0, 5.0));
        worst_unitary = std::max({worst_unitary, u.residual_h1 / scale_of(h1), u.residual_h2 / scale_of(h2)});
        worst_slack = std::min(worst_slack, norm_bounds(f).chain_slack);
    }
    out.require(worst_unitary <= 1e-10, "biunitary residual " + fmt(worst_unitary));
    out.require(worst_slack >= -1e-12, "norm chain slack " + fmt(worst_slack));

    double worst_eig = 0.0;
    for (const auto& c : corpus(515, {1, 2, 4, 8, 16}, 6)) {
        const auto d = decompose(c.pair);
        const auto cx = complexify(c.pair, d);
        const auto f = build_f(cx.h1, cx.h2);
        std::vector<double> want;
        for (const auto& b : d.blocks)
            for (Eigen::Index i = 0; i < b.dim / 2; ++i) want.push_back(b.lambda);
        std::sort(want.begin(), want.end());
        out.require(want.size() == f.eigenvalues.size(), "complexified dimension");
        for (std::size_t i = 0; i < std::min(want.size(), f.eigenvalues.size()); ++i)
            worst_eig = std::max(worst_eig, std::abs(f.eigenvalues[i] - want[i]) / std::max(1.0, want[i]));
    }
    out.require(worst_eig <= 1e-9, "complexified spectrum " + fmt(worst_eig));
    if (out.ok)
        out.detail = "100 Hermitian pairs; biunitary " + fmt(worst_unitary) + ", slack " +
                     fmt(worst_slack) + ", complexified spectrum " + fmt(worst_eig);
    return out;
}

// -- 6 ----------------------------------------------------------------------

Outcome conservation() {
    Outcome out;
    const auto times = sample_times(0.0, 10.0, 100);
    double worst = 0.0;
    std::size_t fields = 0;
    for (const auto& c : corpus(606, {1, 2, 3, 4}, 6)) {
        for (const auto& e : bi_preserving_algebra(c.pair).basis) {
            worst = std::max(worst, conservation_probe(LinearField{e}, c.pair, times).max());
            ++fields;
        }
    }
    out.require(worst <= 1e-9, "drift " + fmt(worst));
    if (out.ok) out.detail = std::to_string(fields) + " basis flows, max drift " + fmt(worst);
    return out;
}

// -- 7 ----------------------------------------------------------------------

Outcome pencil() {
    Outcome out;
    const auto p = reference_4d();
    const auto m = pencil_member(p, 1.0);
    out.require(m.blocks.size() == 2, "block count");
    if (!out.ok) return out;
    out.require(m.blocks[0].admissible, "block 1 should be admissible");
    out.require(!m.blocks[1].admissible, "block 2 should be inadmissible");
    const double jsq = inf_norm(RealMatrix(m.blocks[1].j_squared + 0.25 * RealMatrix::Identity(2, 2)));
    out.require(jsq <= 1e-12, "J_gamma^2 + I/4 on block 2 = " + fmt(jsq));
    const auto range = positivity_range(p);
    out.require(std::abs(range.lower + 1.0 / 3.0) <= 1e-12, "range lower " + fmt(range.lower));
    out.require(std::isinf(range.upper) && range.upper > 0, "range upper");
    if (out.ok) out.detail = "block1 yes, block2 no, J^2 err " + fmt(jsq) + ", range (-1/3, inf)";
    return out;
}

// -- 8 ----------------------------------------------------------------------

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism(const std::string& cli, const std::string& fixtures, const std::string& work) {
    Outcome out;
    if (cli.empty()) {
        out.require(false, "no CLI given (--cli)");
        return out;
    }
    std::filesystem::create_directories(work);
    struct Run {
        std::string command, file, extra;
        int exit_code;
    };
    const std::vector<Run> runs = {
        {"check", "compatible_2d.json", "", 0},      {"check", "incompatible_2d.json", "", 1},
        {"check", "malformed_dim3.json", "", 2},     {"decompose", "reference_4d.json", "", 0},
        {"recursion", "reference_4d.json", "", 0},   {"commutant", "reference_4d.json", "", 0},
        {"pencil", "reference_4d.json", " --gamma 1", 0}, {"decompose", "identity_4d.json", "", 0},
        {"check", "single_triple_2d.json", "", 0},
    };
    int k = 0;
    for (const auto& r : runs) {
        std::string outputs[2];
        for (int rep = 0; rep < 2; ++rep) {
            const std::string target = work + "/run" + std::to_string(k) + "_" + std::to_string(rep) + ".json";
            std::filesystem::remove(target);
            const int code = run("\"" + cli + "\" " + r.command + " \"" + fixtures + "/" + r.file +
                                 "\"" + r.extra + " -o \"" + target + "\" 2>/dev/null");
            out.require(code == r.exit_code, r.command + " " + r.file + " exited " +
                                                 std::to_string(code) + ", expected " +
                                                 std::to_string(r.exit_code));
            outputs[rep] = slurp(target);
        }
        out.require(outputs[0] == outputs[1], r.command + " " + r.file + " differs between runs");
        ++k;
    }
    if (out.ok) out.detail = std::to_string(runs.size()) + " commands run twice, identical bytes, exit codes 0/1/2";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::string cli, fixtures, work = "acceptance_work";
    app.add_option("--cli", cli, "biham executable");
    app.add_option("--fixtures", fixtures, "fixture directory")->required();
    app.add_option("--work", work, "scratch directory");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"2D worked example", two_dimensional_example},
        {"decomposition round trip", round_trip},
        {"group-theory consistency", group_consistency},
        {"recursion degeneration", recursion_degeneration},
        {"operator F suite", operator_f_suite},
        {"conservation along flows", conservation},
        {"pencil on the 4D pair", pencil},
        {"CLI determinism and exit codes", [&] { return cli_determinism(cli, fixtures, work); }},
    };
    int failed = 0;
    int index = 1;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.ok ? "PASS" : "FAIL") << " [" << index++ << "] " << name << ": " << o.detail
                  << " (" << fmt(secs) << " s)" << std::endl;
        failed += !o.ok;
    }
    return failed == 0 ? 0 : 1;
}
