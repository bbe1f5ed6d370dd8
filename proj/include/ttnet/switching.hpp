#pragma once

// Event-driven integration of the step model: exact hitting times of protein
// thresholds, switching between regular domains, tangential (grazing) events,
// grazing curves and trapping regions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttnet/flow.hpp"
#include "ttnet/model.hpp"
#include "ttnet/roots.hpp"

namespace ttnet {

// =============================================================================
// Hitting times
// =============================================================================

struct HittingRoot {
    double t = 0.0;
    std::size_t level = 0;  // threshold index that is reached
    Direction direction = Direction::Up;
    bool tangential = false;
};

namespace detail {

struct Wall {
    double theta;
    std::size_t level;
    Direction crossing;  // the only admissible way to leave through this wall
};

/// Beyond this time y stays within eps of y*: |y - y*| <= A e^{-m t / 2}.
[[nodiscard]] inline double settle_horizon(const GeneFlow& g, double x0, double y0, double eps) {
    const double m = std::min(g.x_rate(), g.gamma);
    const double a = std::abs(y0 - g.y_focal()) + 2.0 * g.kappa * std::abs(x0 - g.x_focal()) / (std::numbers::e * m);
    if (!(a > eps)) return 0.0;
    return 2.0 * std::log(a / eps) / m;
}

[[nodiscard]] inline std::vector<HittingRoot> gene_roots(const GeneFlow& g, double x0, double y0,
                                                         std::span<const Wall> walls, const Tolerances& tol) {
    std::vector<HittingRoot> out;
    if (walls.empty()) return out;
    double min_theta = std::numeric_limits<double>::infinity();
    for (const auto& w : walls) min_theta = std::min(min_theta, w.theta);
    const double horizon = settle_horizon(g, x0, y0, 1e-13 * min_theta);
    const auto tc = g.y_extremum_time(x0, y0);

    std::vector<std::pair<double, double>> pieces;  // y is monotone on each
    if (tc && *tc < horizon) {
        pieces.emplace_back(0.0, *tc);
        pieces.emplace_back(*tc, horizon);
    } else if (horizon > 0.0) {
        pieces.emplace_back(0.0, horizon);
    }

    for (const auto& w : walls) {
        const double ftol = tol.root * std::max(1.0, w.theta);
        const auto G = [&](double t) { return g.y(x0, y0, t) - w.theta; };
        const auto dG = [&](double t) { return g.dy(x0, y0, t); };
        const bool starts_on_wall = (y0 == w.theta);

        if (tc && !starts_on_wall && std::abs(G(*tc)) <= ftol) {
            out.push_back({*tc, w.level, w.crossing, true});
            continue;
        }
        for (auto [a, b] : pieces) {
            const double ga = G(a);
            const double gb = G(b);
            if (ga == 0.0 || (ga < 0.0) == (gb < 0.0)) continue;
            const Direction dir = ga < 0.0 ? Direction::Up : Direction::Down;
            if (dir != w.crossing) continue;  // already outside: not a way out of this domain
            const double t = refine_root(G, dG, a, b, ftol);
            const double slope = std::abs(dG(t));
            const bool tangential = slope <= tol.tangency * g.gamma * w.theta;
            out.push_back({t, w.level, dir, tangential});
            break;  // first admissible crossing only
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.t < r.t; });
    return out;
}

[[nodiscard]] inline std::vector<Wall> walls_of(const NetworkSpec& spec, const RegularDomainIndex& h, std::size_t i) {
    const auto& g = spec.genes.at(i);
    const auto hi = static_cast<std::size_t>(h.h.at(i));
    std::vector<Wall> w;
    if (hi >= 1) w.push_back({g.threshold(hi), hi, Direction::Down});
    if (hi < g.levels()) w.push_back({g.threshold(hi + 1), hi + 1, Direction::Up});
    return w;
}

}  // namespace detail

/// Positive times at which protein i reaches a wall of domain h, earliest first.
[[nodiscard]] inline std::vector<HittingRoot> hitting_times(const NetworkSpec& spec, const RegularDomainIndex& h,
                                                            std::size_t i, const State& s0) {
    const auto walls = detail::walls_of(spec, h, i);
    return detail::gene_roots(gene_flow(spec, h, i), s0.x.at(i), s0.y.at(i), walls, spec.tol);
}

// =============================================================================
// Next event
// =============================================================================

struct HittingEvent {
    std::size_t gene = 0;
    std::size_t level = 0;
    Direction direction = Direction::Up;
    double elapsed = 0.0;  // since the segment started
    double time = 0.0;     // absolute
    State state;           // y[gene] is exactly the threshold
    bool tangential = false;
};

enum class NextEventKind { Event, Converged, Simultaneous };

struct NextEvent {
    NextEventKind kind = NextEventKind::Converged;
    std::vector<HittingEvent> events;  // one for Event, all tied ones for Simultaneous
};

[[nodiscard]] inline NextEvent next_event(const NetworkSpec& spec, const RegularDomainIndex& h, const State& s0,
                                          double t_now = 0.0) {
    struct Candidate {
        std::size_t gene;
        HittingRoot root;
    };
    std::vector<Candidate> firsts;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto roots = hitting_times(spec, h, i, s0);
        if (!roots.empty()) firsts.push_back({i, roots.front()});
    }
    NextEvent out;
    if (firsts.empty()) return out;
    std::sort(firsts.begin(), firsts.end(), [](const auto& a, const auto& b) { return a.root.t < b.root.t; });

    const auto make = [&](const Candidate& c) {
        HittingEvent e;
        e.gene = c.gene;
        e.level = c.root.level;
        e.direction = c.root.direction;
        e.elapsed = c.root.t;
        e.time = t_now + c.root.t;
        e.state = flow(spec, h, s0, c.root.t);
        e.state.y[c.gene] = spec.genes[c.gene].threshold(c.root.level);
        e.tangential = c.root.tangential;
        return e;
    };
    const double t0 = firsts.front().root.t;
    std::size_t tied = 1;
    while (tied < firsts.size() &&
           std::abs(firsts[tied].root.t - t0) <= spec.tol.simultaneous * std::max(firsts[tied].root.t, t0))
        ++tied;
    out.kind = tied > 1 ? NextEventKind::Simultaneous : NextEventKind::Event;
    for (std::size_t k = 0; k < tied; ++k) out.events.push_back(make(firsts[k]));
    return out;
}

// =============================================================================
// Simulation
// =============================================================================

enum class TerminalStatus {
    ConvergedToFocalPoint,
    MaxEventsReached,
    MaxTimeReached,
    NonUniquePointReached,
    SimultaneousSwitching,
};

[[nodiscard]] inline const char* to_string(TerminalStatus s) noexcept {
    switch (s) {
        case TerminalStatus::ConvergedToFocalPoint: return "ConvergedToFocalPoint";
        case TerminalStatus::MaxEventsReached: return "MaxEventsReached";
        case TerminalStatus::MaxTimeReached: return "MaxTimeReached";
        case TerminalStatus::NonUniquePointReached: return "NonUniquePointReached";
        case TerminalStatus::SimultaneousSwitching: return "SimultaneousSwitching";
    }
    return "unknown";
}

struct SimulationOptions {
    std::size_t max_events = 1000;
    double max_time = std::numeric_limits<double>::infinity();
    bool allow_invalid = false;  // simulate even if validate() reports violations
};

/// Piece of trajectory inside one regular domain; `exit` is absent for the last one.
struct Segment {
    RegularDomainIndex domain;
    double start_time = 0.0;
    State start;
    std::optional<HittingEvent> exit;
};

struct Continuation {
    std::string label;
    std::optional<RegularDomainIndex> domain;  // none: stay on the threshold point
};

/// Tangential arrival at a threshold point that carries a fixed point in the smooth limit.
struct NonUniquePoint {
    std::size_t gene = 0;
    std::size_t level = 0;
    double time = 0.0;
    State state;
    LocalSwitch local;
    std::vector<Continuation> continuations;
};

struct Trajectory {
    std::vector<Segment> segments;
    TerminalStatus status = TerminalStatus::ConvergedToFocalPoint;
    double end_time = 0.0;
    State end_state;
    RegularDomainIndex end_domain;
    std::optional<NonUniquePoint> non_unique;
    std::vector<HittingEvent> simultaneous;

    /// All events in order (crossings and touches).
    [[nodiscard]] std::vector<HittingEvent> events() const {
        std::vector<HittingEvent> out;
        for (const auto& s : segments)
            if (s.exit) out.push_back(*s.exit);
        return out;
    }

    /// State at absolute time t (closed form inside the relevant segment).
    [[nodiscard]] State state_at(const NetworkSpec& spec, double t) const {
        if (segments.empty()) throw std::logic_error("state_at: empty trajectory");
        for (const auto& s : segments) {
            const double t_end = s.exit ? s.exit->time : std::numeric_limits<double>::infinity();
            if (t <= t_end) return flow(spec, s.domain, s.start, std::max(0.0, t - s.start_time));
        }
        const auto& last = segments.back();
        return flow(spec, last.domain, last.start, t - last.start_time);
    }
};

[[nodiscard]] inline Trajectory simulate(const NetworkSpec& spec, const State& s0, const SimulationOptions& opt = {}) {
    if (!opt.allow_invalid) {
        auto v = validate(spec);
        if (!v.empty()) throw InvalidNetworkError(std::move(v));
    }
    if (s0.x.size() != spec.size() || s0.y.size() != spec.size())
        throw std::invalid_argument("simulate: state dimension mismatch");
    Trajectory tr;
    RegularDomainIndex h = regular_domain_of(spec, s0.y);
    State state = s0;
    double t = 0.0;
    std::size_t n_events = 0;

    const auto finish = [&](TerminalStatus st, double t_end, State s_end) {
        tr.status = st;
        tr.end_time = t_end;
        tr.end_state = std::move(s_end);
        tr.end_domain = h;
    };

    while (true) {
        Segment seg{h, t, state, std::nullopt};
        if (n_events >= opt.max_events) {
            tr.segments.push_back(seg);
            finish(TerminalStatus::MaxEventsReached, t, state);
            return tr;
        }
        auto ne = next_event(spec, h, state, t);
        if (ne.kind == NextEventKind::Converged) {
            tr.segments.push_back(seg);
            if (std::isfinite(opt.max_time))
                finish(TerminalStatus::ConvergedToFocalPoint, opt.max_time, flow(spec, h, state, opt.max_time - t));
            else
                finish(TerminalStatus::ConvergedToFocalPoint, std::numeric_limits<double>::infinity(),
                       focal_point(spec, h));
            return tr;
        }
        const auto& ev = ne.events.front();
        if (ev.time > opt.max_time) {
            tr.segments.push_back(seg);
            finish(TerminalStatus::MaxTimeReached, opt.max_time, flow(spec, h, state, opt.max_time - t));
            return tr;
        }
        if (ne.kind == NextEventKind::Simultaneous) {
            tr.segments.push_back(seg);
            tr.simultaneous = ne.events;
            finish(TerminalStatus::SimultaneousSwitching, ev.time, flow(spec, h, state, ev.elapsed));
            return tr;
        }
        seg.exit = ev;
        tr.segments.push_back(seg);
        ++n_events;
        t = ev.time;
        state = ev.state;

        if (ev.tangential) {
            const auto loc = local_switch_constants(spec, h, ev.gene, ev.level);
            const auto& g = spec.genes[ev.gene];
            const double theta = g.threshold(ev.level);
            if (loc.a >= 0.0 && threshold_fixed_point_condition(loc.a, loc.b, g.beta, g.gamma, g.kappa, theta)) {
                NonUniquePoint np{ev.gene, ev.level, ev.time, ev.state, loc, {}};
                auto lower = h;
                lower.h[ev.gene] = static_cast<int>(ev.level) - 1;
                auto upper = h;
                upper.h[ev.gene] = static_cast<int>(ev.level);
                np.continuations.push_back({"remain at the threshold point", std::nullopt});
                np.continuations.push_back({"leave along the unstable manifold downward", lower});
                np.continuations.push_back({"leave along the unstable manifold upward", upper});
                tr.non_unique = std::move(np);
                tr.segments.push_back({h, t, state, std::nullopt});
                finish(TerminalStatus::NonUniquePointReached, t, state);
                return tr;
            }
            continue;  // touch: same domain
        }
        h.h[ev.gene] += ev.direction == Direction::Up ? 1 : -1;
    }
}

// =============================================================================
// Grazing curves
// =============================================================================

enum class GrazingSide { Upper, Lower };

/// Set of starts in one band whose y-trajectory is tangent to a threshold.
/// Parametrized by backward time s >= 0 from the tangency point P = ((gamma/kappa) theta, theta).
struct GrazingCurve {
    std::size_t gene = 0;
    GrazingSide side = GrazingSide::Upper;
    GeneFlow flow;
    std::size_t grazed_level = 0;
    double grazed_threshold = 0.0;
    double tangency_x = 0.0;
    std::optional<double> entry_threshold;   // the opposite wall; none for the unbounded top band
    std::optional<double> entry_abscissa;    // x0 where the curve meets that wall
    std::optional<double> duration;          // t*: time from the entry wall to tangency
    std::optional<double> y_axis_intercept;  // y where the curve meets x = 0, if it does

    [[nodiscard]] double x_at(double s) const { return flow.x(tangency_x, -s); }
    [[nodiscard]] double y_at(double s) const { return flow.y(tangency_x, grazed_threshold, -s); }

    /// Backward time s at which the curve reaches height y, if y lies on the curve.
    [[nodiscard]] std::optional<double> time_at(double y) const {
        if (y == grazed_threshold) return 0.0;
        const bool above = y > grazed_threshold;
        // Backward in time y decreases along the upper curve and increases along the lower one.
        if (above != (side == GrazingSide::Lower)) return std::nullopt;
        if (entry_threshold && (above ? y > *entry_threshold : y < *entry_threshold)) return std::nullopt;
        const auto G = [&](double s) { return y_at(s) - y; };
        const double m = std::min(flow.x_rate(), flow.gamma);
        double hi = 1.0 / m;
        for (int k = 0; k < 200; ++k) {
            const double g = G(hi);
            if (!std::isfinite(g)) return std::nullopt;
            if ((g < 0.0) != above) break;
            hi *= 2.0;
        }
        const double ghi = G(hi);
        if ((ghi < 0.0) == above) return std::nullopt;
        return bisect_root(G, 0.0, hi);
    }

    [[nodiscard]] std::optional<double> abscissa_at(double y) const {
        const auto s = time_at(y);
        if (!s) return std::nullopt;
        return x_at(*s);
    }
};

[[nodiscard]] inline std::optional<GrazingCurve> grazing_curve(const NetworkSpec& spec, const RegularDomainIndex& h,
                                                               std::size_t i, GrazingSide side) {
    const auto& g = spec.genes.at(i);
    const auto hi = static_cast<std::size_t>(h.h.at(i));
    const auto p = g.levels();
    GrazingCurve c;
    c.gene = i;
    c.side = side;
    c.flow = gene_flow(spec, h, i);
    const double xs = c.flow.x_focal();
    if (side == GrazingSide::Upper) {
        if (hi >= p || !(xs < g.pseudo_threshold(hi + 1))) return std::nullopt;
        c.grazed_level = hi + 1;
        c.entry_threshold = g.threshold(hi);
    } else {
        if (hi < 1 || !(xs > g.pseudo_threshold(hi))) return std::nullopt;
        c.grazed_level = hi;
        if (hi < p) c.entry_threshold = g.threshold(hi + 1);
    }
    c.grazed_threshold = g.threshold(c.grazed_level);
    c.tangency_x = g.pseudo_threshold(c.grazed_level);

    double s_axis = std::numeric_limits<double>::infinity();
    if (c.tangency_x < xs) {  // x decreases backward and eventually reaches 0
        const double r = c.flow.x_rate();
        s_axis = std::log(xs / (xs - c.tangency_x)) / r;
    }
    if (c.entry_threshold) {
        const auto s = c.time_at(*c.entry_threshold);
        if (!s) throw NumericalError("grazing_curve: backward flow never reaches the entry wall");
        c.duration = *s;
        c.entry_abscissa = c.x_at(*s);
    }
    if (s_axis < c.duration.value_or(std::numeric_limits<double>::infinity())) c.y_axis_intercept = c.y_at(s_axis);
    return c;
}

// =============================================================================
// Trapping regions
// =============================================================================

struct GeneTrapping {
    bool inside = false;
    bool on_boundary = false;
    std::optional<double> lower_x;  // open bounds on x at the current y
    std::optional<double> upper_x;
    std::string note;
};

struct TrappingResult {
    bool inside = false;
    bool on_boundary = false;
    std::vector<GeneTrapping> genes;
};

/// Whether a state lies in the region bounded by the grazing curves, from which
/// the trajectory converges to the focal point without switching. The region is open.
[[nodiscard]] inline TrappingResult in_trapping_region(const NetworkSpec& spec, const RegularDomainIndex& h,
                                                       const State& s, double boundary_tol = 1e-12) {
    TrappingResult res;
    res.inside = true;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        GeneTrapping gt;
        const auto& g = spec.genes[i];
        const auto hi = static_cast<std::size_t>(h.h.at(i));
        const auto p = g.levels();
        const double x = s.x.at(i), y = s.y.at(i);
        const auto near = [&](double a, double b) { return std::abs(a - b) <= boundary_tol * std::max(1.0, std::abs(b)); };

        if (p == 0) {
            gt.inside = true;
            gt.note = "no thresholds";
        } else if (y < g.threshold(hi) || (hi < p && y > g.threshold(hi + 1))) {
            gt.note = "protein outside the band";
        } else if ((hi >= 1 && y == g.threshold(hi)) || (hi < p && y == g.threshold(hi + 1))) {
            gt.on_boundary = true;
            gt.note = "protein on a threshold";
        } else {
            const auto up = grazing_curve(spec, h, i, GrazingSide::Upper);
            const auto lo = grazing_curve(spec, h, i, GrazingSide::Lower);
            const bool need_up = hi < p, need_lo = hi >= 1;
            if ((need_up && !up) || (need_lo && !lo)) {
                gt.note = "focal point outside the band";
            } else {
                if (need_up) gt.upper_x = up->abscissa_at(y);
                if (need_lo) gt.lower_x = lo->abscissa_at(y);
                if ((need_up && !gt.upper_x) || (need_lo && !gt.lower_x))
                    throw NumericalError("in_trapping_region: grazing curve not defined at this height");
                bool ok = true;
                if (gt.upper_x) {
                    if (near(x, *gt.upper_x)) gt.on_boundary = true;
                    ok = ok && x < *gt.upper_x;
                }
                if (gt.lower_x) {
                    // Interior bands use max(lower, 0); the top band uses the curve alone.
                    const double bound = need_up ? std::max(*gt.lower_x, 0.0) : *gt.lower_x;
                    if (near(x, bound)) gt.on_boundary = true;
                    ok = ok && x > bound;
                } else {
                    ok = ok && x > 0.0;
                }
                gt.inside = ok && !gt.on_boundary;
            }
        }
        res.inside = res.inside && gt.inside;
        res.on_boundary = res.on_boundary || gt.on_boundary;
        res.genes.push_back(std::move(gt));
    }
    return res;
}

// =============================================================================
// Entry intervals and time-to-switch profiles
// =============================================================================

struct OpenInterval {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] bool contains(double v) const noexcept { return v > lo && v < hi; }
};

/// Entry abscissas on wall `level` of domain h from which gene i's trajectory grazes the
/// opposite wall's side and returns: lower wall ((gamma/kappa) theta_h, Gamma_u(theta_h)),
/// upper wall (Gamma_l(theta_{h+1}), (gamma/kappa) theta_{h+1}).
[[nodiscard]] inline std::optional<OpenInterval> entry_interval(const NetworkSpec& spec, const RegularDomainIndex& h,
                                                                std::size_t i, std::size_t level) {
    const auto& g = spec.genes.at(i);
    const auto hi = static_cast<std::size_t>(h.h.at(i));
    const double xs = gene_flow(spec, h, i).x_focal();
    if (level == hi && hi >= 1) {
        if (!(xs < g.pseudo_threshold(hi))) return std::nullopt;
        const auto up = grazing_curve(spec, h, i, GrazingSide::Upper);
        if (!up || !up->entry_abscissa) return std::nullopt;
        return OpenInterval{g.pseudo_threshold(hi), *up->entry_abscissa};
    }
    if (level == hi + 1 && hi + 1 <= g.levels()) {
        if (!(xs > g.pseudo_threshold(hi + 1))) return std::nullopt;
        const auto lo = grazing_curve(spec, h, i, GrazingSide::Lower);
        if (!lo || !lo->entry_abscissa) return std::nullopt;
        return OpenInterval{*lo->entry_abscissa, g.pseudo_threshold(hi + 1)};
    }
    return std::nullopt;
}

struct ProfilePoint {
    double x0 = 0.0;
    std::optional<HittingRoot> exit;  // none: converges inside the band
};

/// Exit time and wall of gene i alone, started at (x0, theta_entry) for each abscissa.
[[nodiscard]] inline std::vector<ProfilePoint> time_to_switch_profile(const NetworkSpec& spec,
                                                                      const RegularDomainIndex& h, std::size_t i,
                                                                      std::size_t entry_level,
                                                                      std::span<const double> abscissas) {
    const auto& g = spec.genes.at(i);
    const auto hi = static_cast<std::size_t>(h.h.at(i));
    if (entry_level != hi && entry_level != hi + 1) throw std::invalid_argument("time_to_switch_profile: not a wall");
    if (entry_level == 0 || entry_level > g.levels()) throw std::invalid_argument("time_to_switch_profile: no such threshold");
    const bool from_below = entry_level == hi;
    const double theta = g.threshold(entry_level);
    const double xp = g.pseudo_threshold(entry_level);
    const auto gf = gene_flow(spec, h, i);
    const auto walls = detail::walls_of(spec, h, i);
    std::vector<ProfilePoint> out;
    for (double x0 : abscissas) {
        if (from_below ? x0 < xp : x0 > xp)
            throw std::domain_error("time_to_switch_profile: abscissa does not enter the band");
        ProfilePoint pp{x0, std::nullopt};
        if (x0 == xp) {
            pp.exit = HittingRoot{0.0, entry_level, from_below ? Direction::Down : Direction::Up, true};
        } else {
            auto roots = detail::gene_roots(gf, x0, theta, walls, spec.tol);
            if (!roots.empty()) pp.exit = roots.front();
        }
        out.push_back(pp);
    }
    return out;
}

}  // namespace ttnet
