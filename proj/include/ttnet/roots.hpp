#pragma once

#include <cmath>
#include <limits>

#include "ttnet/errors.hpp"

namespace ttnet {

/// Safeguarded Newton on a sign-changing bracket [a, b].
/// Newton steps that leave the bracket or fail to halve |f| fall back to bisection.
/// Stops when |f| <= ftol or the bracket collapses to adjacent doubles.
template <class F, class DF>
[[nodiscard]] double refine_root(F&& f, DF&& df, double a, double b, double ftol, int max_iter = 300) {
    double fa = f(a);
    double fb = f(b);
    if (std::abs(fa) <= ftol) return a;
    if (std::abs(fb) <= ftol) return b;
    if ((fa < 0.0) == (fb < 0.0)) throw NumericalError("refine_root: interval does not bracket a root");
    double t = 0.5 * (a + b);
    double ft = f(t);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(ft) <= ftol) return t;
        if ((ft < 0.0) == (fa < 0.0)) {
            a = t;
            fa = ft;
        } else {
            b = t;
            fb = ft;
        }
        if (std::nextafter(a, b) == b) return std::abs(fa) < std::abs(fb) ? a : b;
        const double d = df(t);
        double next = (d != 0.0 && std::isfinite(d)) ? t - ft / d : std::numeric_limits<double>::quiet_NaN();
        const bool inside = next > a && next < b;
        const double prev = std::abs(ft);
        if (inside) {
            const double fn = f(next);
            if (std::abs(fn) <= 0.5 * prev) {
                t = next;
                ft = fn;
                continue;
            }
            // Keep the evaluation: it tightens the bracket for free.
            if ((fn < 0.0) == (fa < 0.0)) {
                a = next;
                fa = fn;
            } else {
                b = next;
                fb = fn;
            }
        }
        t = 0.5 * (a + b);
        ft = f(t);
    }
    if (std::abs(ft) <= ftol) return t;
    throw NumericalError("refine_root: no convergence");
}

/// Plain bisection to full double resolution on a sign-changing bracket.
template <class F>
[[nodiscard]] double bisect_root(F&& f, double a, double b, int max_iter = 2000) {
    double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0)) throw NumericalError("bisect_root: interval does not bracket a root");
    for (int it = 0; it < max_iter; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace ttnet
