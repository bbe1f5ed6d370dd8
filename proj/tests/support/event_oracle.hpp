#pragma once

// Brute-force event sequence: textbook closed form per gene, uniform-grid sign
// scan for the first wall crossing, bisection refinement. Domain bookkeeping is
// redone here from scratch.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "ttnet/model.hpp"

namespace oracle {

struct Event {
    std::size_t gene;
    std::size_t level;
    bool up;
    double t;
};

/// Production of gene i in band vector h, evaluated at a representative protein vector.
inline double production_in_band(const ttnet::NetworkSpec& spec, std::size_t i, const std::vector<int>& h) {
    std::vector<double> y(spec.size());
    for (std::size_t g = 0; g < spec.size(); ++g) {
        const auto& th = spec.genes[g].thresholds;
        const auto k = static_cast<std::size_t>(h[g]);
        const double lo = k == 0 ? 0.0 : th[k - 1];
        const double hi = k == th.size() ? lo + 1.0 : th[k];
        y[g] = 0.5 * (lo + hi);
    }
    return production_at(spec, i, y);
}

inline std::vector<Event> scan_events(const ttnet::NetworkSpec& spec, std::vector<double> x, std::vector<double> y,
                                      std::size_t max_events, std::size_t grid = 100000) {
    const auto n = spec.size();
    std::vector<int> h(n, 0);
    for (std::size_t g = 0; g < n; ++g)
        for (double th : spec.genes[g].thresholds)
            if (y[g] > th) ++h[g];
    std::vector<Event> out;
    double now = 0.0;
    while (out.size() < max_events) {
        std::optional<Event> best;
        std::vector<double> alpha(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& g = spec.genes[i];
            alpha[i] = production_in_band(spec, i, h);
            const double T = 40.0 / std::min(g.beta, g.gamma);
            // Exact at t = 0: after a crossing y sits on the threshold, and rounding in the
            // closed form would otherwise fake an immediate return through the same wall.
            const auto yi = [&, i](double t) {
                return t == 0.0 ? y[i] : y_textbook(alpha[i], g.beta, g.gamma, g.kappa, x[i], y[i], t);
            };
            const auto k = static_cast<std::size_t>(h[i]);
            if (k >= 1) {
                const double th = g.thresholds[k - 1];
                const auto t = first_crossing([&](double s) { return yi(s) - th; }, 0.0, T, grid);
                if (t && (!best || *t < best->t)) best = Event{i, k, false, *t};
            }
            if (k < g.thresholds.size()) {
                const double th = g.thresholds[k];
                const auto t = first_crossing([&](double s) { return yi(s) - th; }, 0.0, T, grid);
                if (t && (!best || *t < best->t)) best = Event{i, k + 1, true, *t};
            }
        }
        if (!best) break;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& g = spec.genes[i];
            const double nx = x_textbook(alpha[i], g.beta, x[i], best->t);
            y[i] = y_textbook(alpha[i], g.beta, g.gamma, g.kappa, x[i], y[i], best->t);
            x[i] = nx;
        }
        y[best->gene] = spec.genes[best->gene].thresholds[best->level - 1];
        h[best->gene] += best->up ? 1 : -1;
        now += best->t;
        out.push_back({best->gene, best->level, best->up, now});
    }
    return out;
}

}  // namespace oracle
