#include <doctest.h>

#include <cmath>

#include "biham/error.hpp"
#include "biham/linalg.hpp"
#include "biham/random.hpp"
#include "support.hpp"

using namespace biham;
using namespace biham::testing;

TEST_CASE("tolerance validation") {
    CHECK_NOTHROW(Tolerance{}.validate());
    CHECK_THROWS_AS((Tolerance{0.0, 1e-7}).validate(), InvalidInput);
    CHECK_THROWS_AS((Tolerance{1e-9, -1.0}).validate(), InvalidInput);
    CHECK_THROWS_AS((Tolerance{1e-6, 1e-7}).validate(), InvalidInput);
    CHECK_THROWS_AS((Tolerance{NAN, 1e-7}).validate(), InvalidInput);
}

TEST_CASE("scale uses the max row sum with a floor of one") {
    RealMatrix m(2, 2);
    m << 0.1, -0.2, 3, 4;
    CHECK(inf_norm(m) == doctest::Approx(7.0));
    CHECK(scale_of(m) == doctest::Approx(7.0));
    CHECK(scale_of(RealMatrix(0.01 * m)) == 1.0);
}

TEST_CASE("metric adjoint examples") {
    const RealMatrix g = diag({1, 4});
    CHECK(metric_adjoint(RealMatrix::Identity(2, 2), g).isApprox(RealMatrix::Identity(2, 2)));

    RealMatrix a(2, 2);
    a << 0, 1, 0, 0;
    RealMatrix expected(2, 2);
    expected << 0, 0, 0.25, 0;
    CHECK((metric_adjoint(a, g) - expected).norm() < 1e-15);

    SplitMix64 rng(3);
    const RealMatrix r = random_gaussian(rng, 5, 5);
    CHECK(metric_adjoint(r, RealMatrix::Identity(5, 5)) == r.transpose());
}

TEST_CASE("metric adjoint rejects bad input") {
    CHECK_THROWS_AS(metric_adjoint(RealMatrix::Identity(2, 2), RealMatrix::Identity(3, 3)),
                    InvalidInput);
    CHECK_THROWS_AS(metric_adjoint(RealMatrix::Identity(2, 2), diag({1, -1})), InvalidInput);
}

TEST_CASE("metric adjoint is an involution and satisfies the defining relation") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 rng(seed);
        const auto n = 2 + static_cast<Eigen::Index>(seed % 7);
        const RealMatrix a = random_gaussian(rng, n, n);
        const RealMatrix g = random_spd(rng, n);
        const RealMatrix ad = metric_adjoint(a, g);
        CHECK(inf_norm(RealMatrix(metric_adjoint(ad, g) - a)) <= 1e-12 * scale_of(a) * 10);
        const RealVector x = random_gaussian(rng, n, 1);
        const RealVector y = random_gaussian(rng, n, 1);
        // g(A+ x, y) = g(x, A y)
        CHECK(std::abs((ad * x).dot(g * y) - x.dot(g * (a * y))) < 1e-11);
    }
}

TEST_CASE("sym_sqrt examples") {
    CHECK(sym_sqrt(RealMatrix::Identity(3, 3)).isApprox(RealMatrix::Identity(3, 3)));
    CHECK((sym_sqrt(diag({4, 9})) - diag({2, 3})).norm() < 1e-15);
    // a tiny negative eigenvalue is clipped
    const RealMatrix clipped = sym_sqrt(diag({4, -1e-14}));
    CHECK(clipped(1, 1) == 0.0);
    CHECK_THROWS_AS(sym_sqrt(diag({4, -1})), InvalidInput);
    RealMatrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(sym_sqrt(asym), InvalidInput);
}

TEST_CASE("sym_sqrt round trip on random SPD matrices") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 rng(1000 + seed);
        const auto n = static_cast<Eigen::Index>(1 + seed % 32);
        const RealMatrix m = random_spd(rng, n, 0.1, 10.0);
        const RealMatrix p = sym_sqrt(m);
        CHECK((p - p.transpose()).norm() == 0.0);
        CHECK(inf_norm(RealMatrix(p * p - m)) <= 1e-10 * inf_norm(m));
    }
}

TEST_CASE("eig_self_adjoint examples") {
    const auto e = eig_self_adjoint(RealMatrix::Identity(4, 4), RealMatrix::Identity(4, 4));
    for (double v : e.values) CHECK(v == doctest::Approx(1.0));
    CHECK((e.basis.transpose() * e.basis - RealMatrix::Identity(4, 4)).norm() < 1e-14);

    const auto d = eig_self_adjoint(diag({3, 2, 3, 2}), RealMatrix::Identity(4, 4));
    REQUIRE(d.values.size() == 4);
    CHECK(d.values[0] == doctest::Approx(2));
    CHECK(d.values[1] == doctest::Approx(2));
    CHECK(d.values[2] == doctest::Approx(3));
    CHECK(d.values[3] == doctest::Approx(3));
}

TEST_CASE("eig_self_adjoint is invariant under an orthogonal frame change") {
    // G of the 4D reference pair, moved by Q: A' = Q^T G Q, g' = Q^T g1 Q.
    SplitMix64 rng(42);
    const RealMatrix q = random_orthogonal(rng, 4);
    const RealMatrix g = q.transpose() * q;
    const RealMatrix a = q.transpose() * diag({2, 2, 3, 3}) * q;
    const auto e = eig_self_adjoint(a, g);
    const double want[] = {2, 2, 3, 3};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(e.values[static_cast<std::size_t>(i)] - want[i]) < 1e-12);
    CHECK((e.basis.transpose() * g * e.basis - RealMatrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("eig_self_adjoint reconstruction for random self-adjoint operators") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 rng(2000 + seed);
        const auto n = static_cast<Eigen::Index>(1 + seed % 16);
        const RealMatrix g = random_spd(rng, n);
        const RealMatrix s = random_gaussian(rng, n, n);
        // g-self-adjoint: A = g^-1 (S + S^T)
        const RealMatrix a = g.llt().solve(RealMatrix(s + s.transpose()));
        const auto e = eig_self_adjoint(a, g);
        const RealVector lam = Eigen::Map<const RealVector>(e.values.data(), n);
        const RealMatrix rebuilt = e.basis * lam.asDiagonal() * e.basis.inverse();
        CHECK(inf_norm(RealMatrix(rebuilt - a)) <= 1e-9 * scale_of(a));
        CHECK(std::is_sorted(e.values.begin(), e.values.end()));
    }
}

TEST_CASE("eig_self_adjoint rejects operators that are not self-adjoint") {
    RealMatrix a(2, 2);
    a << 0, 1, 0, 0;
    CHECK_THROWS_AS(eig_self_adjoint(a, RealMatrix::Identity(2, 2)), InvalidInput);
}

TEST_CASE("cluster_eigenvalues examples") {
    {
        const std::vector<double> v{2.0, 2.0 + 1e-12, 3.0};
        const auto c = cluster_eigenvalues(v, 1e-7);
        REQUIRE(c.size() == 2);
        CHECK(c[0].representative == doctest::Approx(2.0));
        CHECK(c[0].multiplicity == 2);
        CHECK(c[1].multiplicity == 1);
    }
    {
        const std::vector<double> v{1.0, 2.0, 3.0};
        CHECK(cluster_eigenvalues(v, 1e-7).size() == 3);
    }
    {
        const std::vector<double> v{2.0, 2.0000001, 2.00002};
        const auto c = cluster_eigenvalues(v, 1e-7);
        REQUIRE(c.size() == 2);
        CHECK(c[0].multiplicity == 2);
        CHECK(std::abs(c[0].representative - 2.00000005) < 1e-12);
        CHECK(c[1].representative == doctest::Approx(2.00002));
        CHECK(c[1].first == 2);
    }
    CHECK(cluster_eigenvalues(std::vector<double>{}, 1e-7).empty());
}

TEST_CASE("cluster multiplicities sum to the input length") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 rng(seed);
        std::vector<double> v;
        for (int i = 0; i < 20; ++i) v.push_back(std::floor(rng.uniform(0, 5)) + 1e-10 * rng.uniform());
        std::sort(v.begin(), v.end());
        std::size_t total = 0;
        for (const auto& c : cluster_eigenvalues(v, 1e-7)) total += c.multiplicity;
        CHECK(total == v.size());
    }
}

TEST_CASE("commutator examples") {
    SplitMix64 rng(9);
    const RealMatrix a = random_gaussian(rng, 4, 4);
    CHECK(commutator(a, a).norm() == 0.0);
    CHECK(commutator(RealMatrix::Identity(4, 4), a).norm() == 0.0);

    // J1 and J2' of the incompatible 2D pair; brute-force product as oracle.
    RealMatrix j1(2, 2), j2(2, 2);
    j1 << 0, 2, -0.5, 0;
    j2 << 0, std::sqrt(3.0), -std::sqrt(3.0) / 3.0, 0;
    RealMatrix oracle = RealMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int m = 0; m < 2; ++m) oracle(i, k) += j1(i, m) * j2(m, k) - j2(i, m) * j1(m, k);
    const RealMatrix c = commutator(j1, j2);
    CHECK((c - oracle).norm() < 1e-15);
    CHECK(c(0, 0) == doctest::Approx(-2.0 / std::sqrt(3.0) + std::sqrt(3.0) / 2.0));
    CHECK(c(1, 1) == doctest::Approx(-c(0, 0)));
    CHECK(std::abs(c(0, 1)) < 1e-15);

    CHECK_THROWS_AS(commutator(a, RealMatrix::Identity(3, 3)), InvalidInput);
}

TEST_CASE("rank decisions") {
    const auto r = decide_rank({3.0, 1.0, 1e-14}, 1e-9);
    CHECK(r.rank == 2);
    CHECK(r.smallest_kept == 1.0);
    CHECK(r.largest_dropped == 1e-14);
    CHECK_FALSE(r.ambiguous());

    const auto amb = decide_rank({1.0, 1e-8}, 1e-9);
    CHECK(amb.ambiguous());

    const auto unsorted = decide_rank({1e-14, 2.0}, 1e-9);
    CHECK(unsorted.rank == 1);
    CHECK(unsorted.sigma_max == 2.0);
}

TEST_CASE("vectorize round trip") {
    SplitMix64 rng(5);
    const RealMatrix a = random_gaussian(rng, 3, 3);
    CHECK(unvectorize(vectorize(a), 3) == a);
}

TEST_CASE("splitmix64 matches the published reference sequence") {
    // First outputs for seed 1234567 from the reference implementation.
    SplitMix64 rng(1234567);
    CHECK(rng() == 6457827717110365317ULL);
    CHECK(rng() == 3203168211198807973ULL);
    CHECK(rng() == 9817491932198370423ULL);
}

TEST_CASE("random orthogonal and unitary matrices") {
    SplitMix64 rng(77);
    const RealMatrix q = random_orthogonal(rng, 8);
    CHECK((q.transpose() * q - RealMatrix::Identity(8, 8)).norm() < 1e-13);
    const ComplexMatrix u = random_unitary(rng, 5);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(5, 5)).norm() < 1e-13);
    SplitMix64 a(1), b(1);
    CHECK(random_gaussian(a, 3, 3) == random_gaussian(b, 3, 3));
}
