#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "support/oracles.hpp"
#include "support/random_networks.hpp"
#include "ttnet/io.hpp"
#include "ttnet/switching.hpp"

using namespace ttnet;
using Catch::Approx;

TEST_CASE("grazing2 grazing curves through the lowest thresholds", "[grazing][grazing2]") {
    const auto spec = load_network(oracle::network_path("grazing2.json"));
    const RegularDomainIndex h{{0, 0}};
    const auto g1 = grazing_curve(spec, h, 0, GrazingSide::Upper);
    REQUIRE(g1);
    CHECK(*g1->entry_abscissa == Approx(std::pow(8.0 / 7.0, 7.0)).epsilon(1e-10));
    CHECK(*g1->duration == Approx(8.0 * std::log(8.0 / 7.0)).epsilon(1e-10));
    const auto g2 = grazing_curve(spec, h, 1, GrazingSide::Upper);
    REQUIRE(g2);
    CHECK(*g2->entry_abscissa == Approx(std::pow(16.0 / 7.0, 7.0 / 9.0)).epsilon(1e-10));
    CHECK(*g2->duration == Approx(8.0 / 9.0 * std::log(16.0 / 7.0)).epsilon(1e-10));
    // The lower curve needs a lower threshold.
    CHECK_FALSE(grazing_curve(spec, h, 0, GrazingSide::Lower));
}

TEST_CASE("starting on a grazing curve reaches the threshold tangentially", "[grazing]") {
    const auto spec = load_network(oracle::network_path("grazing2.json"));
    const RegularDomainIndex h{{0, 0}};
    const auto g1 = grazing_curve(spec, h, 0, GrazingSide::Upper);
    REQUIRE(g1);
    const double x0 = *g1->entry_abscissa, t = *g1->duration;
    // Independent check with the textbook solution: y(t*) = theta and y'(t*) = 0.
    const auto y = [&](double s) { return oracle::y_textbook(0.0, 0.875, 1.0, 1.0, x0, 0.0, s); };
    CHECK(y(t) == Approx(1.0).epsilon(1e-10));
    CHECK((y(t + 1e-5) - y(t - 1e-5)) / 2e-5 == Approx(0.0).margin(1e-8));
}

TEST_CASE("grazing2 point Q is outside the trapping region", "[grazing][grazing2]") {
    const auto spec = load_network(oracle::network_path("grazing2.json"));
    const State q{{3.0, 1.0}, {0.5, 0.25}};
    const auto h = regular_domain_of(spec, q.y);
    const auto tr = in_trapping_region(spec, h, q);
    CHECK_FALSE(tr.inside);
    CHECK_FALSE(tr.genes[0].inside);
    const auto sim = simulate(spec, q, {.max_events = 1});
    CHECK_FALSE(sim.events().empty());
}

TEST_CASE("timemap1 entry interval ends at the upper grazing abscissa", "[grazing][timemap1]") {
    const auto spec = load_network(oracle::network_path("timemap1.json"));
    const RegularDomainIndex d1{{1}};
    // Oracle: tangency at y = 2 after entering at y = 1 means 3 x e^{-(1 - 1/(3x))} = 2.
    const double xstar = oracle::bisect([](double x) { return 3 * x * std::exp(-(1 - 1 / (3 * x))) - 2; }, 0.5, 3.0);
    CHECK(xstar == Approx(1.43702).margin(1e-4));
    const auto iv = entry_interval(spec, d1, 0, 1);
    REQUIRE(iv);
    CHECK(iv->lo == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(iv->hi == Approx(xstar).epsilon(1e-10));
    // The upper wall: alpha/beta = 0 < 2/3, so no interval there.
    CHECK_FALSE(entry_interval(spec, d1, 0, 2));
}

TEST_CASE("timemap1 time-to-switch profile jumps at x*", "[grazing][timemap1]") {
    const auto spec = load_network(oracle::network_path("timemap1.json"));
    const RegularDomainIndex d1{{1}};
    const auto iv = entry_interval(spec, d1, 0, 1);
    REQUIRE(iv);
    const double xs = iv->hi;
    const std::vector<double> xs_list{0.5, 1.0, xs - 1e-7, xs + 1e-7, 2.0, 3.0};
    const auto prof = time_to_switch_profile(spec, d1, 0, 1, xs_list);
    REQUIRE(prof.size() == xs_list.size());
    for (const auto& p : prof) REQUIRE(p.exit);
    CHECK(prof[2].exit->level == 1);  // returns through theta_1
    CHECK(prof[3].exit->level == 2);  // escapes through theta_2
    CHECK(std::abs(prof[2].exit->t - prof[3].exit->t) > 0.1);
    // Oracle times from y = (3 x t + 1) e^{-t}
    for (std::size_t k = 0; k < prof.size(); ++k) {
        const double x = xs_list[k];
        const auto f1 = [&](double t) { return (3 * x * t + 1) * std::exp(-t) - 1.0; };
        const auto f2 = [&](double t) { return (3 * x * t + 1) * std::exp(-t) - 2.0; };
        const auto t2 = oracle::first_crossing(f2, 1e-12, 40.0, 400000);
        const auto t1 = oracle::first_crossing(f1, 1e-9, 40.0, 400000);
        const double ref = t2 ? *t2 : *t1;
        CHECK(prof[k].exit->t == Approx(ref).epsilon(1e-8));
    }
    const std::vector<double> bad{0.2};
    CHECK_THROWS_AS(time_to_switch_profile(spec, d1, 0, 1, bad), std::domain_error);
}

TEST_CASE("grazing curve points lie on one trajectory", "[grazing]") {
    const auto spec = load_network(oracle::network_path("grazing2.json"));
    const RegularDomainIndex h{{1, 1}};
    for (std::size_t i = 0; i < 2; ++i)
        for (auto side : {GrazingSide::Upper, GrazingSide::Lower}) {
            const auto c = grazing_curve(spec, h, i, side);
            if (!c) continue;
            const double s = 0.3;
            const double x0 = c->x_at(s), y0 = c->y_at(s);
            const auto& g = spec.genes[i];
            const double a = production_in(spec, h, i);
            CHECK(oracle::y_textbook(a, g.beta, g.gamma, g.kappa, x0, y0, s) == Approx(c->grazed_threshold).epsilon(1e-10));
            CHECK(oracle::x_textbook(a, g.beta, x0, s) == Approx(c->tangency_x).epsilon(1e-10));
        }
}

TEST_CASE("trapping region: inside starts never switch, boundary is excluded", "[grazing][trapping]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    int tested = 0;
    for (int k = 0; k < 60; ++k) {
        const auto spec = testgen::random_network(rng, 2);
        const auto h = testgen::domain_with_interior_focal(spec);
        if (!h) continue;
        State s;
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& g = spec.genes[i];
            const auto hi = static_cast<std::size_t>(h->h[i]);
            const double ylo = g.threshold(hi);
            const double yhi = hi < g.levels() ? g.threshold(hi + 1) : 2 * focal_point(spec, *h).y[i] + ylo;
            const double y = ylo + (yhi - ylo) * u(rng);
            const auto up = grazing_curve(spec, *h, i, GrazingSide::Upper);
            const auto lo = grazing_curve(spec, *h, i, GrazingSide::Lower);
            const double xl = lo ? std::max(0.0, *lo->abscissa_at(y)) : 0.0;
            const double xh = up ? *up->abscissa_at(y) : xl + 3.0;
            s.x.push_back(xl + (xh - xl) * u(rng));
            s.y.push_back(y);
        }
        REQUIRE(in_trapping_region(spec, *h, s).inside);
        const auto tr = simulate(spec, s);
        CHECK(tr.events().empty());
        CHECK(tr.status == TerminalStatus::ConvergedToFocalPoint);

        // Push gene 0 onto its upper curve: boundary, outside.
        if (auto up = grazing_curve(spec, *h, 0, GrazingSide::Upper)) {
            auto b = s;
            b.x[0] = *up->abscissa_at(b.y[0]);
            const auto r = in_trapping_region(spec, *h, b);
            CHECK_FALSE(r.inside);
            CHECK(r.on_boundary);
        }
        ++tested;
    }
    CHECK(tested > 10);
}
