// Two-gene negative loop: step-limit orbit through the pseudo-state cycle, then the
// spectral certificate of the smooth system.

#include <cmath>
#include <string>

#include <fmt/core.h>

#include "ttnet/ttnet.hpp"

int main(int argc, char** argv) {
    using namespace ttnet;
    const std::string path = argc > 1 ? argv[1] : std::string(TTNET_NETWORK_DIR) + "/oscillator2.json";
    const auto spec = load_network(path);

    SimulationOptions opt;
    opt.max_events = 16;
    const auto tr = simulate(spec, {{1.0, 1.0}, {0.5, 0.5}}, opt);
    // Each row: a threshold crossing and the pseudo-state word on entry to the next domain.
    fmt::print("{:>3} {:>12} {:>5} {:>5}  word\n", "#", "t", "gene", "dir");
    for (std::size_t k = 0; k + 1 < tr.segments.size(); ++k) {
        const auto& e = *tr.segments[k].exit;
        const auto& next = tr.segments[k + 1];
        fmt::print("{:>3} {:>12.6f} {:>5} {:>5}  {}\n", k, e.time, e.gene + 1, to_string(e.direction),
                   pseudo_state_word(pseudo_state_of(spec, next.domain, next.start.x)));
    }

    const auto pc = periodic_certificate(recognize_loop(spec));
    fmt::print("\nfixed point:");
    for (double v : pc.fixed_point) fmt::print(" {:.6g}", v);
    fmt::print("\nspectrum:");
    for (const auto& z : pc.spectrum) fmt::print(" {:.5f}{:+.5f}i", z.real(), z.imag());
    fmt::print("\nverdict: {}\n", to_string(pc.verdict));
}
