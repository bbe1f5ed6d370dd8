#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "support/random_networks.hpp"
#include "ttnet/feedback.hpp"
#include "ttnet/io.hpp"

using namespace ttnet;
using Catch::Approx;

TEST_CASE("oscillator2 is recognized as a negative two-gene loop", "[feedback][oscillator2]") {
    const auto loop = recognize_loop(load_network(oracle::network_path("oscillator2.json")));
    REQUIRE(loop.size() == 2);
    CHECK(loop.genes[0].a == 2.5);
    CHECK(loop.genes[0].f.low == Approx(1.0));
    CHECK(loop.genes[0].f.high == Approx(0.4));
    CHECK(loop.genes[1].f.low == Approx(0.4));
    CHECK(loop.genes[1].f.high == Approx(1.0));
    CHECK(loop.loop_sign() == -1);
    CHECK(loop.negative_edges() == 1);
    CHECK(wmax(loop, 1) == Approx(20.0 / 7.0));
    CHECK(wmax(loop, 4) == Approx(2.5 / (2 * 0.875)));
    CHECK(qualitative_cycle_exists(loop));
}

TEST_CASE("non-loop networks are refused with the offending gene", "[feedback]") {
    const auto spec = load_network(oracle::network_path("grazing2.json"));
    try {
        (void)recognize_loop(spec);
        FAIL("expected NotALoopError");
    } catch (const NotALoopError& e) {
        CHECK(e.gene() == 0);
    }
}

TEST_CASE("oscillator2 fixed point and Jacobian from first principles", "[feedback][oscillator2]") {
    const auto loop = recognize_loop(load_network(oracle::network_path("oscillator2.json")));
    const auto w = unique_fixed_point(loop);
    const std::vector<double> expected{2, 2, 2, 1};
    for (std::size_t i = 0; i < 4; ++i) CHECK(w[i] == Approx(expected[i]).margin(1e-8));
    const auto r = loop.rhs(w);
    for (double v : r) CHECK(std::abs(v) <= 1e-10);
    const auto j = jacobian_at(loop, w);
    // a f'(theta) = a (high - low) / (4 q theta)
    CHECK(j(0, 3) == Approx(2.5 * (0.4 - 1.0) / (4 * 0.01 * 1.0)).epsilon(1e-9));
    CHECK(j(2, 1) == Approx(2.5 * 0.6 / (4 * 0.01 * 2.0)).epsilon(1e-9));
    CHECK(j(1, 0) == 1.0);
    CHECK(j(0, 0) == -0.875);
    CHECK(j(3, 3) == -2.0);
    const auto pc = periodic_certificate(loop);
    CHECK(pc.verdict == Verdict::PeriodicOrbitExists);
    CHECK(pc.trace == Approx(-4.75).epsilon(1e-12));
}

TEST_CASE("cycle word sequence", "[feedback]") {
    const std::vector<std::string> n2{"0000", "1000", "1100", "1110", "1111", "0111", "0011", "0001"};
    CHECK(cycle_word_sequence(2) == n2);
    CHECK(cycle_word_sequence(3).size() == 12);
}

TEST_CASE("canceling leaves one negative edge and is a conjugacy of vector fields", "[feedback][cancel]") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 1 + rep % 4;
        const auto loop = testgen::random_loop(rng, n, true, 0.1 + 0.3 * u(rng));
        const auto c = cancel(loop);
        CHECK(c.loop.negative_edges() == 1);
        CHECK(c.loop.genes[0].f.sign() < 0);
        for (std::size_t k = 1; k < n; ++k) CHECK(c.loop.genes[k].f.sign() > 0);
        // d/dt T(w) = DT * F(w) with DT = diag(+-1)
        std::vector<double> w(2 * n);
        for (std::size_t i = 0; i < 2 * n; ++i) w[i] = wmax(loop, i + 1) * u(rng);
        const auto f = loop.rhs(w);
        const auto tw = c.to_transformed(w);
        const auto g = c.loop.rhs(tw);
        for (std::size_t i = 0; i < 2 * n; ++i) CHECK(g[i] == Approx(c.reflected[i] ? -f[i] : f[i]).margin(1e-12));
        // Qualitative-cycle verdict is invariant.
        CHECK(qualitative_cycle_exists(loop) == qualitative_cycle_exists(c.loop));
    }
}

TEST_CASE("fixed point of random negative loops", "[feedback]") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 30; ++rep) {
        const auto loop = testgen::random_loop(rng, 1 + rep % 4, true, 0.05);
        const auto w = unique_fixed_point(loop);
        for (double v : loop.rhs(w)) CHECK(std::abs(v) <= 1e-10);
        const auto pc = periodic_certificate(loop);
        if (pc.verdict != Verdict::NoQualitativeCycle) {
            Complex s = 0;
            for (auto z : pc.spectrum) s += z;
            double tr = 0;
            for (const auto& g : loop.genes) tr -= g.b + g.d;
            CHECK(s.real() == Approx(tr).epsilon(1e-8));
        }
    }
}

TEST_CASE("certificate verdicts", "[feedback]") {
    const auto spec = load_network(oracle::network_path("oscillator2.json"));
    auto loop = recognize_loop(spec);
    SECTION("step limit is inconclusive") {
        for (auto& g : loop.genes) g.f.q = 0.0;
        const auto pc = periodic_certificate(loop);
        CHECK(pc.verdict == Verdict::Inconclusive);
        CHECK(pc.reason == InconclusiveReason::StepLimit);
    }
    SECTION("threshold outside the protein range: no qualitative cycle") {
        loop.genes[1].f.threshold = 10.0;
        CHECK(periodic_certificate(loop).verdict == Verdict::NoQualitativeCycle);
    }
    SECTION("shallow switches give a stable fixed point") {
        for (auto& g : loop.genes) g.f.q = 2.0;
        const auto pc = periodic_certificate(loop);
        CHECK(pc.verdict == Verdict::Inconclusive);
        CHECK(pc.reason == InconclusiveReason::NoPositiveRealPart);
    }
    SECTION("spectral verdict on repeated eigenvalues") {
        const std::vector<Complex> s{{1.0, 0.0}, {1.0, 0.0}, {-2.0, 0.0}};
        CHECK(spectral_verdict(s).second == InconclusiveReason::RepeatedEigenvalues);
    }
}
