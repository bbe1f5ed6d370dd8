#pragma once

// Independent reference computations used only by the tests. Nothing here calls
// the library's flow, root or grazing code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ttnet/model.hpp"

namespace oracle {

inline std::string network_path(const std::string& name) { return std::string(TTNET_NETWORK_DIR) + "/" + name; }

/// Textbook form y = y* + B e^{-beta t} + (y0 - y* - B) e^{-gamma t}, or the resonant form.
inline double y_textbook(double alpha, double beta, double gamma, double kappa, double x0, double y0, double t) {
    const double xs = alpha / beta, ys = kappa * alpha / (gamma * beta);
    if (beta == gamma) {
        return ys + kappa * (x0 - xs) * t * std::exp(-gamma * t) + (y0 - ys) * std::exp(-gamma * t);
    }
    const double B = kappa * (x0 - xs) / (gamma - beta);
    return ys + B * std::exp(-beta * t) + (y0 - ys - B) * std::exp(-gamma * t);
}

inline double x_textbook(double alpha, double beta, double x0, double t) {
    return alpha / beta + (x0 - alpha / beta) * std::exp(-beta * t);
}

/// Plain bisection (no derivative), to full resolution.
inline double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 400; ++i) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// First sign change of f on a uniform grid of `points` nodes over [t0, t1], refined by bisection.
/// A grid node landing exactly on zero at t0 is skipped.
inline std::optional<double> first_crossing(const std::function<double(double)>& f, double t0, double t1,
                                            std::size_t points) {
    double prev_t = t0, prev = f(t0);
    for (std::size_t k = 1; k < points; ++k) {
        const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(points - 1);
        const double v = f(t);
        if (prev != 0.0 && ((v < 0) != (prev < 0) || v == 0.0)) {
            if (v == 0.0) return t;
            return bisect(f, prev_t, t);
        }
        prev_t = t;
        prev = v;
    }
    return std::nullopt;
}

/// Classical RK4 with a fixed step.
template <class F>
std::vector<double> rk4(F&& f, std::vector<double> y, double t0, double t1, std::size_t steps) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    const auto n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = t0;
    for (std::size_t s = 0; s < steps; ++s) {
        f(y, k1, t);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        f(tmp, k2, t + 0.5 * h);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        f(tmp, k3, t + 0.5 * h);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        f(tmp, k4, t + h);
        for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t += h;
    }
    return y;
}

/// Step-model production evaluated by brute force from the protein vector.
inline double production_at(const ttnet::NetworkSpec& spec, std::size_t i, const std::vector<double>& y) {
    double total = 0.0;
    for (const auto& term : spec.productions[i].terms) {
        double v = term.coeff;
        for (const auto& lit : term.literals)
            v *= y[lit.gene] > spec.genes[lit.gene].thresholds[lit.threshold - 1] ? 1.0 : 0.0;
        total += v;
    }
    return total;
}

}  // namespace oracle
