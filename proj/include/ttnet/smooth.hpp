#pragma once

// Hill-smoothed model (Z_{g,k} = H(y_g, theta_{g,k}, q)) integrated with an adaptive
// Dormand-Prince 5(4) pair; threshold crossings located on the dense interpolant.
// Also the smooth fixed point near a threshold and the step-vs-smooth comparison.

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttnet/model.hpp"
#include "ttnet/roots.hpp"
#include "ttnet/switching.hpp"

namespace ttnet {

// =============================================================================
// Smooth vector field
// =============================================================================

/// (x, y) packed as [x_0..x_{n-1}, y_0..y_{n-1}].
[[nodiscard]] inline std::vector<double> pack(const State& s) {
    std::vector<double> v(s.x);
    v.insert(v.end(), s.y.begin(), s.y.end());
    return v;
}

[[nodiscard]] inline State unpack(std::span<const double> v) {
    const auto n = v.size() / 2;
    return {std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)),
            std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(n), v.end())};
}

struct SmoothField {
    const NetworkSpec* spec;
    double q;

    void operator()(const std::vector<double>& v, std::vector<double>& dv, double /*t*/) const {
        const auto n = spec->size();
        dv.resize(2 * n);
        const auto z = [&](const Literal& lit) {
            return hill(v[n + lit.gene], spec->genes[lit.gene].threshold(lit.threshold), q);
        };
        for (std::size_t i = 0; i < n; ++i) {
            const auto& g = spec->genes[i];
            dv[i] = spec->productions[i].evaluate(z) - g.beta * v[i];
            dv[n + i] = g.kappa * v[i] - g.gamma * v[n + i];
        }
    }
};

// =============================================================================
// Integration
// =============================================================================

struct SmoothConfig {
    double q = 0.01;
    double t_end = 10.0;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 0.05;   // also bounds how many crossings one step may hide
    double initial_step = 1e-4;
    double min_step = 1e-13;  // relative to max(1, t)
};

struct SmoothCrossing {
    std::size_t gene = 0;
    std::size_t level = 0;
    Direction direction = Direction::Up;
    double time = 0.0;
    State state;
};

struct SmoothTrajectory {
    std::vector<double> times;   // accepted step ends
    std::vector<State> states;
    std::vector<SmoothCrossing> crossings;
};

[[nodiscard]] inline SmoothTrajectory integrate_smooth(const NetworkSpec& spec, const SmoothConfig& cfg, const State& s0) {
    namespace odeint = boost::numeric::odeint;
    using state_type = std::vector<double>;
    if (!(cfg.q > 0.0)) throw std::invalid_argument("integrate_smooth: q must be positive");
    if (s0.x.size() != spec.size() || s0.y.size() != spec.size())
        throw std::invalid_argument("integrate_smooth: state dimension mismatch");
    const auto n = spec.size();
    const SmoothField field{&spec, cfg.q};
    auto stepper = odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, cfg.max_step, odeint::runge_kutta_dopri5<state_type>());

    SmoothTrajectory out;
    state_type v = pack(s0);
    stepper.initialize(v, 0.0, std::min(cfg.initial_step, cfg.t_end));
    out.times.push_back(0.0);
    out.states.push_back(s0);
    state_type prev = v, probe(2 * n);

    while (stepper.current_time() < cfg.t_end) {
        std::pair<double, double> span;
        try {
            span = stepper.do_step(field);
        } catch (const odeint::step_adjustment_error& e) {
            throw SmoothIntegrationError(stepper.current_time(), std::string("step size adjustment failed: ") + e.what());
        }
        const auto [ta, tb] = span;
        if (tb - ta < cfg.min_step * std::max(1.0, std::abs(ta)) && tb < cfg.t_end)
            throw SmoothIntegrationError(ta, "step size underflow at t = " + std::to_string(ta));
        const state_type& cur = stepper.current_state();
        if (!std::all_of(cur.begin(), cur.end(), [](double z) { return std::isfinite(z); }))
            throw SmoothIntegrationError(ta, "non-finite state");

        std::vector<SmoothCrossing> found;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& g = spec.genes[i];
            for (std::size_t k = 1; k <= g.levels(); ++k) {
                const double th = g.threshold(k);
                const double fa = prev[n + i] - th, fb = cur[n + i] - th;
                if (fa == 0.0 || (fa < 0.0) == (fb < 0.0)) continue;
                const auto G = [&](double t) {
                    stepper.calc_state(t, probe);
                    return probe[n + i] - th;
                };
                const double tc = bisect_root(G, ta, tb, 200);
                stepper.calc_state(tc, probe);
                auto st = unpack(probe);
                st.y[i] = th;
                found.push_back({i, k, fa < 0.0 ? Direction::Up : Direction::Down, tc, std::move(st)});
            }
        }
        std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
        for (auto& c : found)
            if (c.time <= cfg.t_end) out.crossings.push_back(std::move(c));

        if (tb >= cfg.t_end) {
            stepper.calc_state(cfg.t_end, probe);
            out.times.push_back(cfg.t_end);
            out.states.push_back(unpack(probe));
            break;
        }
        out.times.push_back(tb);
        out.states.push_back(unpack(cur));
        prev = cur;
    }
    return out;
}

// =============================================================================
// Fixed point at a threshold in the smooth limit
// =============================================================================

struct NearThresholdFixedPoint {
    double x = 0.0;
    double y = 0.0;
    double y_from_ratio = 0.0;  // ((beta x - b) / ((a+b) - beta x))^q theta
    std::complex<double> lambda_plus;
    std::complex<double> lambda_minus;
    double loop_gain = 0.0;  // kappa a H'(y)
    bool saddle = false;
};

/// Middle fixed point of x' = b + a H(y) - beta x, y' = kappa x - gamma y, close to
/// ((gamma/kappa) theta, theta). Solves (1/q) ln(kappa x / (gamma theta)) = ln((beta x - b)/((a+b) - beta x)).
[[nodiscard]] inline NearThresholdFixedPoint near_threshold_fixed_point(double a, double b, double beta, double gamma,
                                                                        double kappa, double theta, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("near_threshold_fixed_point: q must be positive");
    if (a < 0.0 || !threshold_fixed_point_condition(a, b, beta, gamma, kappa, theta))
        throw NumericalError("near_threshold_fixed_point: no fixed point near the threshold");
    const double xc = gamma * theta / kappa;
    const double lo_edge = b / beta, hi_edge = (a + b) / beta;
    const auto phi = [&](double x) {
        return std::log(kappa * x / (gamma * theta)) / q - std::log((beta * x - b) / ((a + b) - beta * x));
    };
    double lo = xc, hi = xc;
    bool bracketed = false;
    for (double m = 1.0; m < 1e6; m *= 2.0) {
        lo = xc * std::exp(-q * m);
        hi = xc * std::exp(q * m);
        if (lo <= lo_edge || hi >= hi_edge) break;
        if ((phi(lo) < 0.0) != (phi(hi) < 0.0)) {
            bracketed = true;
            break;
        }
    }
    if (!bracketed) throw NumericalError("near_threshold_fixed_point: bracket around the threshold failed");
    NearThresholdFixedPoint fp;
    fp.x = bisect_root(phi, lo, hi);
    fp.y = kappa * fp.x / gamma;
    fp.y_from_ratio = std::pow((beta * fp.x - b) / ((a + b) - beta * fp.x), q) * theta;
    fp.loop_gain = kappa * a * hill_derivative(fp.y, theta, q);
    const std::complex<double> disc = 0.25 * (beta + gamma) * (beta + gamma) + fp.loop_gain - beta * gamma;
    const auto root = std::sqrt(disc);
    fp.lambda_plus = -0.5 * (beta + gamma) + root;
    fp.lambda_minus = -0.5 * (beta + gamma) - root;
    fp.saddle = fp.loop_gain > beta * gamma;
    return fp;
}

// =============================================================================
// Step engine vs smooth engine
// =============================================================================

struct CompareOptions {
    std::size_t max_events = 30;
    double grazing_margin = 1e-3;  // relative distance to a grazing abscissa that raises the flag
    double time_tolerance = 1e-2;
    SmoothConfig smooth;           // q and t_end are set per run
};

struct EventPair {
    std::size_t index = 0;
    std::size_t gene = 0;
    std::size_t level = 0;
    Direction direction = Direction::Up;
    double step_time = 0.0;
    std::optional<double> smooth_time;
    double state_gap = 0.0;  // max-norm between the two event states
    bool same_switch = false;
};

struct QComparison {
    double q = 0.0;
    std::vector<EventPair> pairs;
    std::size_t matched = 0;  // leading events that agree in switch and time
    std::size_t smooth_crossings = 0;
};

struct EngineComparison {
    Trajectory step;
    std::vector<QComparison> runs;
    bool near_grazing = false;
    std::vector<std::string> grazing_notes;
};

/// Whether any segment start lies within `margin` (relative) of a grazing abscissa.
[[nodiscard]] inline std::vector<std::string> near_grazing_starts(const NetworkSpec& spec, const Trajectory& tr,
                                                                  double margin) {
    std::vector<std::string> notes;
    for (std::size_t s = 0; s < tr.segments.size(); ++s) {
        const auto& seg = tr.segments[s];
        for (std::size_t i = 0; i < spec.size(); ++i) {
            for (auto side : {GrazingSide::Upper, GrazingSide::Lower}) {
                const auto c = grazing_curve(spec, seg.domain, i, side);
                if (!c) continue;
                const auto gx = c->abscissa_at(seg.start.y[i]);
                if (!gx) continue;
                if (std::abs(seg.start.x[i] - *gx) <= margin * std::max(1.0, std::abs(*gx)))
                    notes.push_back("segment " + std::to_string(s) + ", gene " + std::to_string(i + 1) + ": start within " +
                                    std::to_string(margin) + " of a grazing curve");
            }
        }
    }
    return notes;
}

[[nodiscard]] inline EngineComparison compare_engines(const NetworkSpec& spec, const State& s0,
                                                      std::span<const double> q_list, const CompareOptions& opt = {}) {
    EngineComparison cmp;
    SimulationOptions so;
    so.max_events = opt.max_events;
    cmp.step = simulate(spec, s0, so);
    cmp.grazing_notes = near_grazing_starts(spec, cmp.step, opt.grazing_margin);
    cmp.near_grazing = !cmp.grazing_notes.empty();

    std::vector<HittingEvent> crossings;
    for (const auto& e : cmp.step.events())
        if (!e.tangential) crossings.push_back(e);
    const double t_last = crossings.empty() ? 10.0 : crossings.back().time;

    for (double q : q_list) {
        QComparison qc;
        qc.q = q;
        auto cfg = opt.smooth;
        cfg.q = q;
        cfg.t_end = t_last + std::max(1.0, 0.1 * t_last);
        const auto sm = integrate_smooth(spec, cfg, s0);
        qc.smooth_crossings = sm.crossings.size();
        bool run_ok = true;
        for (std::size_t k = 0; k < crossings.size(); ++k) {
            const auto& e = crossings[k];
            EventPair p{k, e.gene, e.level, e.direction, e.time, std::nullopt, 0.0, false};
            if (k < sm.crossings.size()) {
                const auto& c = sm.crossings[k];
                p.smooth_time = c.time;
                p.same_switch = c.gene == e.gene && c.level == e.level && c.direction == e.direction;
                for (std::size_t i = 0; i < spec.size(); ++i)
                    p.state_gap = std::max({p.state_gap, std::abs(c.state.x[i] - e.state.x[i]),
                                            std::abs(c.state.y[i] - e.state.y[i])});
            }
            run_ok = run_ok && p.smooth_time && p.same_switch && std::abs(*p.smooth_time - e.time) <= opt.time_tolerance;
            if (run_ok) ++qc.matched;
            qc.pairs.push_back(p);
        }
        cmp.runs.push_back(std::move(qc));
    }
    return cmp;
}

}  // namespace ttnet
