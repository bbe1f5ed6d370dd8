#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/event_oracle.hpp"
#include "support/random_networks.hpp"
#include "ttnet/switching.hpp"

using namespace ttnet;

TEST_CASE("event engine matches the grid-scan oracle on random networks", "[oracle][switching]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 12; ++rep) {
        const auto spec = testgen::random_network(rng, 2 + rep % 2);
        State s0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            s0.x.push_back(3.0 * u(rng));
            s0.y.push_back(spec.genes[i].thresholds.back() * 1.3 * u(rng) + 1e-3);
        }
        SimulationOptions o;
        o.max_events = 15;
        const auto tr = simulate(spec, s0, o);
        const auto ev = tr.events();
        const auto ref = oracle::scan_events(spec, s0.x, s0.y, ev.size(), 50000);
        REQUIRE(ref.size() == ev.size());
        for (std::size_t k = 0; k < ev.size(); ++k) {
            INFO("network " << rep << " event " << k);
            CHECK(ev[k].gene == ref[k].gene);
            CHECK(ev[k].level == ref[k].level);
            CHECK((ev[k].direction == Direction::Up) == ref[k].up);
            CHECK(std::abs(ev[k].time - ref[k].t) <= 1e-6);
        }
    }
}
