#include <catch2/catch_amalgamated.hpp>

#include "corrsist/families.hpp"
#include "corrsist/tangles.hpp"
#include "support/oracles.hpp"

using namespace corrsist;
using oracles::near;

TEST_CASE("bipartite_tangle worked cases") {
    Rng rng(61);
    // product of singles: every cut gives zero
    const auto a = oracles::random_single_qubit(rng);
    const auto b = oracles::random_single_qubit(rng);
    Vec va(2), vb(2);
    // rebuild pure vectors from rank-1 density matrices via eigenvector
    Eigen::SelfAdjointEigenSolver<Mat> ea(a.entries), eb(b.entries);
    va = ea.eigenvectors().col(1);
    vb = eb.eigenvectors().col(1);
    Vec prod(4);
    for (int i = 0; i < 4; ++i) prod[i] = va[i >> 1] * vb[i & 1];
    Vec prod4(16);
    for (int i = 0; i < 16; ++i) prod4[i] = prod[i >> 2] * prod[i & 3];
    prod4 /= prod4.norm();
    const PureState psi(4, prod4);
    for (int q = 1; q <= 4; ++q) CHECK(near(bipartite_tangle(psi, {q}), 0.0, 1e-10));

    const auto ghz = named_state("GHZ", 4);
    CHECK(near(bipartite_tangle(ghz, {1}), 1.0, 1e-12));
    CHECK(near(bipartite_tangle(ghz, {1, 2}), 1.0, 1e-12));
    CHECK_THROWS_AS(bipartite_tangle(ghz, {}), std::invalid_argument);
    CHECK_THROWS_AS(bipartite_tangle(ghz, {1, 2, 3, 4}), std::invalid_argument);
}

TEST_CASE("tau_aggregates worked cases") {
    const auto ghz = tau_aggregates(named_state("GHZ", 4));
    CHECK(near(ghz.tau1, 1.0, 1e-12));
    CHECK(near(ghz.tau2, 1.0, 1e-12));
    CHECK(near(ghz.tau4, 1.0, 1e-12));

    const auto w4 = tau_aggregates(named_state("W", 4));
    CHECK(near(w4.tau1, 0.75, 1e-12));  // single-qubit purity 5/8
    CHECK(near(w4.tau2, 1.0, 1e-12));   // every 2-2 cut purity 1/2
    CHECK(near(w4.tau4, 0.0, 1e-12));

    // two Bell pairs: the natural cut is unentangled, crossing cuts are maximal
    const auto pairs = tau_aggregates(generic_a_state(GenericACoords({1, 0, 0, 0})));
    CHECK(near(pairs.tau1, 1.0, 1e-12));
    CHECK(near(pairs.per_cut.at("AB"), 0.0, 1e-12));
    CHECK(near(pairs.per_cut.at("AC"), 1.5, 1e-12));
    CHECK(near(pairs.per_cut.at("AD"), 1.5, 1e-12));
    CHECK(near(pairs.tau2, 1.0, 1e-12));
    CHECK(pairs.per_cut.size() == 7);
}

TEST_CASE("four_tangle worked cases") {
    CHECK(near(four_tangle(named_state("GHZ", 4)), 1.0, 1e-12));
    CHECK(near(four_tangle(named_state("W", 4)), 0.0, 1e-12));
    Rng rng(77);
    for (int t = 0; t < 100; ++t) {
        if (auto mc = oracles::sample_mclass(rng))
            CHECK(four_tangle(m_class_state(*mc)) < 1e-12);
    }
}

TEST_CASE("purity shortcut agrees with the eigenvalue oracle") {
    Rng rng(83);
    for (int t = 0; t < 50; ++t) {
        const auto psi = oracles::random_pure(4, rng);
        const auto red = partial_trace(DensityMatrix::from_pure(psi), {3, 4});
        CHECK(near(red.entries.squaredNorm(), oracles::purity_by_eigenvalues(red), 1e-11));
    }
}

TEST_CASE("residual identity tau4 = 4 tau1 - 3 tau2") {
    Rng rng(97);
    for (int t = 0; t < 1000; ++t) {
        const auto psi = oracles::random_pure(4, rng);
        const auto tg = tau_aggregates(psi);
        REQUIRE(near(tg.tau4, 4 * tg.tau1 - 3 * tg.tau2, 1e-9));
    }
}

TEST_CASE("class identities") {
    Rng rng(113);
    SECTION("generic class has tau1 = 1 and bounded tau2") {
        for (int t = 0; t < 300; ++t) {
            const auto tg = tau_aggregates(generic_a_state(oracles::random_generic_a(rng)));
            REQUIRE(near(tg.tau1, 1.0, 1e-9));
            REQUIRE(tg.tau2 >= tg.tau1 - 1e-9);
            REQUIRE(tg.tau2 <= (4.0 / 3.0) * tg.tau1 + 1e-9);
        }
    }
    SECTION("tau_min class has tau2 = 1") {
        for (int t = 0; t < 300; ++t) {
            const auto tg = tau_aggregates(tau_min_state(oracles::random_taumin(rng)));
            REQUIRE(near(tg.tau2, 1.0, 1e-9));
        }
    }
    SECTION("M class has tau2 = 4/3 and zero 4-tangle") {
        int produced = 0;
        for (int t = 0; t < 400 && produced < 300; ++t) {
            const auto mc = oracles::sample_mclass(rng);
            if (!mc) continue;
            ++produced;
            const auto tg = tau_aggregates(m_class_state(*mc));
            REQUIRE(near(tg.tau2, 4.0 / 3.0, 1e-9));
            REQUIRE(tg.tau4 < 1e-12);
        }
        REQUIRE(produced >= 300);
    }
}
