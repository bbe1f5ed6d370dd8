#pragma once

// Network description for the transcription-translation step model:
//   x_i' = F_i(Z) - beta_i x_i,   y_i' = kappa_i x_i - gamma_i y_i
// with Z_{g,k} = step(y_g - theta_{g,k}), plus the Hill-function smoothing
// used by the smooth engine and the feedback-loop analysis.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ttnet/errors.hpp"

namespace ttnet {

// =============================================================================
// Hill function
// =============================================================================

/// H(y, theta, q) = y^(1/q) / (y^(1/q) + theta^(1/q)), evaluated in log space.
/// Negative y is clamped to the y = 0 limit.
[[nodiscard]] inline double hill(double y, double theta, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("hill: steepness q must be positive");
    if (!(theta > 0.0)) throw std::invalid_argument("hill: threshold must be positive");
    if (y <= 0.0) return 0.0;
    if (std::isinf(y)) return 1.0;
    const double r = (std::log(theta) - std::log(y)) / q;
    // Same denominator on both branches keeps H(y,t) + H(t,y) within an ulp of 1.
    if (r >= 0.0) {
        const double s = std::exp(-r);
        return s / (1.0 + s);
    }
    return 1.0 / (1.0 + std::exp(r));
}

/// dH/dy = H (1 - H) / (q y) = 1 / (4 q y cosh^2(r/2)).
[[nodiscard]] inline double hill_derivative(double y, double theta, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("hill_derivative: steepness q must be positive");
    if (!(theta > 0.0)) throw std::invalid_argument("hill_derivative: threshold must be positive");
    if (y <= 0.0) {
        if (q < 1.0) return 0.0;
        if (q == 1.0) return 1.0 / theta;
        return std::numeric_limits<double>::infinity();
    }
    const double r = (std::log(theta) - std::log(y)) / q;
    const double c = std::cosh(0.5 * r);
    return 1.0 / (4.0 * q * y * c * c);
}

// =============================================================================
// Production functions
// =============================================================================

/// Z_{gene, threshold}; gene is 0-based, threshold is 1-based.
struct Literal {
    std::size_t gene = 0;
    std::size_t threshold = 1;
    auto operator<=>(const Literal&) const = default;
};

struct Term {
    double coeff = 0.0;
    std::vector<Literal> literals;
};

/// Multilinear polynomial in the switching literals.
struct ProductionFunction {
    std::vector<Term> terms;

    /// `z(lit)` returns the value of one literal (0/1 in the step model, Hill value when smooth).
    template <class ZFn>
    [[nodiscard]] double evaluate(ZFn&& z) const {
        double total = 0.0;
        for (const auto& term : terms) {
            double v = term.coeff;
            for (const auto& lit : term.literals) v *= z(lit);
            total += v;
        }
        return total;
    }

    /// Distinct literals, sorted.
    [[nodiscard]] std::vector<Literal> literals() const {
        std::vector<Literal> out;
        for (const auto& term : terms) out.insert(out.end(), term.literals.begin(), term.literals.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Genes that regulate this production, sorted.
    [[nodiscard]] std::vector<std::size_t> regulators() const {
        std::vector<std::size_t> out;
        for (const auto& lit : literals()) out.push_back(lit.gene);
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

// =============================================================================
// Network specification
// =============================================================================

struct GeneSpec {
    std::string name;
    double beta = 1.0;   // transcript degradation
    double gamma = 1.0;  // protein degradation
    double kappa = 1.0;  // translation rate
    std::vector<double> thresholds;  // strictly increasing, > 0

    [[nodiscard]] std::size_t levels() const noexcept { return thresholds.size(); }
    /// theta_{k}, with theta_0 = 0 as a convenience lower wall.
    [[nodiscard]] double threshold(std::size_t k) const { return k == 0 ? 0.0 : thresholds.at(k - 1); }
    /// Pseudo-threshold (gamma/kappa) theta_k: the x-value where y' vanishes on y = theta_k.
    [[nodiscard]] double pseudo_threshold(std::size_t k) const { return gamma / kappa * threshold(k); }
};

struct Tolerances {
    double on_threshold = 1e-12;  // relative gap required between focal values and thresholds
    double degeneracy = 1e-9;     // |beta - gamma| below this (relative) switches to the resonant formula
    double root = 1e-12;          // |y - theta| <= root * max(1, theta) at an accepted hitting time
    double simultaneous = 1e-9;   // relative gap under which two switchings are declared simultaneous
    double tangency = 1e-9;       // relative |y'| at a crossing below which it is flagged tangential
};

struct NetworkSpec {
    std::vector<GeneSpec> genes;
    std::vector<ProductionFunction> productions;
    double q = 0.0;  // Hill steepness; 0 means the step limit
    Tolerances tol;

    [[nodiscard]] std::size_t size() const noexcept { return genes.size(); }
};

/// Continuous state: transcripts x, proteins y.
struct State {
    std::vector<double> x;
    std::vector<double> y;
    bool operator==(const State&) const = default;
};

/// h_i in {0..p_i}: gene i protein lies in (theta_{i,h_i}, theta_{i,h_i+1}).
struct RegularDomainIndex {
    std::vector<int> h;
    auto operator<=>(const RegularDomainIndex&) const = default;
};

/// Regular-domain index h refined by the count j of pseudo-thresholds below x.
struct PseudoStateIndex {
    std::vector<int> h;
    std::vector<int> j;
    auto operator<=>(const PseudoStateIndex&) const = default;
};

enum class Direction { Up, Down };

[[nodiscard]] inline const char* to_string(Direction d) noexcept { return d == Direction::Up ? "up" : "down"; }

// =============================================================================
// Domain helpers
// =============================================================================

/// Literal value inside regular domain h.
[[nodiscard]] inline double literal_in(const RegularDomainIndex& h, const Literal& lit) {
    return h.h.at(lit.gene) >= static_cast<int>(lit.threshold) ? 1.0 : 0.0;
}

/// Production of gene i inside regular domain h.
[[nodiscard]] inline double production_in(const NetworkSpec& spec, const RegularDomainIndex& h, std::size_t i) {
    return spec.productions.at(i).evaluate([&](const Literal& lit) { return literal_in(h, lit); });
}

/// Focal point of gene i in domain h: (alpha/beta, kappa alpha / (gamma beta)).
[[nodiscard]] inline std::pair<double, double> focal_point(const NetworkSpec& spec, const RegularDomainIndex& h,
                                                           std::size_t i) {
    const auto& g = spec.genes.at(i);
    const double xs = production_in(spec, h, i) / g.beta;
    return {xs, g.kappa * xs / g.gamma};
}

[[nodiscard]] inline State focal_point(const NetworkSpec& spec, const RegularDomainIndex& h) {
    State s;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto [xs, ys] = focal_point(spec, h, i);
        s.x.push_back(xs);
        s.y.push_back(ys);
    }
    return s;
}

/// Regular domain containing y; throws OnThresholdError when a protein sits on a threshold.
[[nodiscard]] inline RegularDomainIndex regular_domain_of(const NetworkSpec& spec, std::span<const double> y) {
    if (y.size() != spec.size()) throw std::invalid_argument("regular_domain_of: dimension mismatch");
    RegularDomainIndex h;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto& th = spec.genes[i].thresholds;
        int level = 0;
        for (std::size_t k = 0; k < th.size(); ++k) {
            if (y[i] == th[k])
                throw OnThresholdError(i, k + 1,
                                       "protein " + std::to_string(i + 1) + " lies on threshold " +
                                           std::to_string(k + 1));
            if (y[i] > th[k]) level = static_cast<int>(k + 1);
        }
        h.h.push_back(level);
    }
    return h;
}

/// Calls fn(h) for every regular domain restricted to `genes` (others left at 0), in
/// lexicographic order.
template <class Fn>
void for_each_domain(const NetworkSpec& spec, std::span<const std::size_t> genes, Fn&& fn) {
    RegularDomainIndex h{std::vector<int>(spec.size(), 0)};
    while (true) {
        fn(std::as_const(h));
        std::size_t k = genes.size();
        while (k > 0) {
            const auto g = genes[k - 1];
            if (h.h[g] < static_cast<int>(spec.genes[g].levels())) {
                ++h.h[g];
                break;
            }
            h.h[g] = 0;
            --k;
        }
        if (k == 0) return;
    }
}

template <class Fn>
void for_each_domain(const NetworkSpec& spec, Fn&& fn) {
    std::vector<std::size_t> all(spec.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for_each_domain(spec, std::span<const std::size_t>(all), std::forward<Fn>(fn));
}

// =============================================================================
// Validation
// =============================================================================

struct Violation {
    enum class Kind {
        SizeMismatch,
        NonPositiveRate,
        ThresholdOrder,
        LiteralOutOfRange,
        RepeatedLiteral,
        NegativeProduction,
        FocalOnThreshold,       // kappa F / (gamma beta) == theta
        FocalOnPseudoThreshold, // F / beta == (gamma/kappa) theta
        BadSteepness,
    };
    Kind kind;
    std::size_t gene = 0;       // 0-based
    std::size_t threshold = 0;  // 1-based, 0 if not applicable
    std::string message;
};

[[nodiscard]] inline const char* to_string(Violation::Kind k) noexcept {
    switch (k) {
        case Violation::Kind::SizeMismatch: return "size_mismatch";
        case Violation::Kind::NonPositiveRate: return "non_positive_rate";
        case Violation::Kind::ThresholdOrder: return "threshold_order";
        case Violation::Kind::LiteralOutOfRange: return "literal_out_of_range";
        case Violation::Kind::RepeatedLiteral: return "repeated_literal";
        case Violation::Kind::NegativeProduction: return "negative_production";
        case Violation::Kind::FocalOnThreshold: return "focal_on_threshold";
        case Violation::Kind::FocalOnPseudoThreshold: return "focal_on_pseudo_threshold";
        case Violation::Kind::BadSteepness: return "bad_steepness";
    }
    return "unknown";
}

class InvalidNetworkError : public Error {
public:
    explicit InvalidNetworkError(std::vector<Violation> v)
        : Error(v.empty() ? std::string("invalid network") : v.front().message), violations_(std::move(v)) {}
    [[nodiscard]] const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

namespace detail {

inline std::string gene_label(std::size_t i) { return "gene " + std::to_string(i + 1); }

}  // namespace detail

/// Checks rates, threshold ordering, literal ranges, non-negative production over every
/// realizable switching pattern, and that no focal value coincides with a threshold.
[[nodiscard]] inline std::vector<Violation> validate(const NetworkSpec& spec) {
    using K = Violation::Kind;
    std::vector<Violation> out;
    const auto n = spec.size();
    if (spec.productions.size() != n) {
        out.push_back({K::SizeMismatch, 0, 0, "number of production functions differs from number of genes"});
        return out;
    }
    if (!(spec.q >= 0.0) || !std::isfinite(spec.q)) out.push_back({K::BadSteepness, 0, 0, "q must be finite and >= 0"});

    bool structural_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = spec.genes[i];
        const std::pair<double, const char*> rates[] = {{g.beta, "beta"}, {g.gamma, "gamma"}, {g.kappa, "kappa"}};
        for (auto [v, nm] : rates) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                out.push_back({K::NonPositiveRate, i, 0, detail::gene_label(i) + ": " + nm + " must be positive"});
                structural_ok = false;
            }
        }
        for (std::size_t k = 0; k < g.thresholds.size(); ++k) {
            const double t = g.thresholds[k];
            const bool bad = !(t > 0.0) || !std::isfinite(t) || (k > 0 && !(t > g.thresholds[k - 1]));
            if (bad) {
                out.push_back({K::ThresholdOrder, i, k + 1,
                               detail::gene_label(i) + ": thresholds must be positive and strictly increasing"});
                structural_ok = false;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& term : spec.productions[i].terms) {
            if (!std::isfinite(term.coeff)) {
                out.push_back({K::NegativeProduction, i, 0, detail::gene_label(i) + ": non-finite coefficient"});
                structural_ok = false;
            }
            auto lits = term.literals;
            for (const auto& lit : lits) {
                if (lit.gene >= n || lit.threshold == 0 || lit.threshold > spec.genes[lit.gene].levels()) {
                    out.push_back({K::LiteralOutOfRange, i, lit.threshold,
                                   detail::gene_label(i) + ": literal Z(" + std::to_string(lit.gene + 1) + "," +
                                       std::to_string(lit.threshold) + ") is out of range"});
                    structural_ok = false;
                }
            }
            std::sort(lits.begin(), lits.end());
            if (std::adjacent_find(lits.begin(), lits.end()) != lits.end()) {
                out.push_back({K::RepeatedLiteral, i, 0, detail::gene_label(i) + ": a term repeats a literal"});
                structural_ok = false;
            }
        }
    }
    if (!structural_ok) return out;

    // Only patterns realizable by some protein vector matter: Z_{g,j} is monotone in j.
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = spec.genes[i];
        const auto regs = spec.productions[i].regulators();
        bool negative = false;
        std::vector<std::pair<std::size_t, K>> focal_hits;
        for_each_domain(spec, std::span<const std::size_t>(regs), [&](const RegularDomainIndex& h) {
            const double f = production_in(spec, h, i);
            if (f < 0.0) negative = true;
            const double yfocal = g.kappa * f / (g.gamma * g.beta);
            for (std::size_t k = 1; k <= g.levels(); ++k) {
                const double th = g.threshold(k);
                if (std::abs(yfocal - th) <= spec.tol.on_threshold * th) focal_hits.emplace_back(k, K::FocalOnThreshold);
            }
        });
        if (negative)
            out.push_back({K::NegativeProduction, i, 0,
                           detail::gene_label(i) + ": production is negative for some switching pattern"});
        std::sort(focal_hits.begin(), focal_hits.end());
        focal_hits.erase(std::unique(focal_hits.begin(), focal_hits.end()), focal_hits.end());
        for (auto [k, kind] : focal_hits) {
            const auto where = detail::gene_label(i) + ", threshold " + std::to_string(k);
            out.push_back({K::FocalOnThreshold, i, k, where + ": a focal protein level equals the threshold"});
            // Same coincidence seen on the transcript axis.
            out.push_back({K::FocalOnPseudoThreshold, i, k,
                           where + ": a focal transcript level equals the pseudo-threshold"});
        }
    }
    return out;
}

// =============================================================================
// Threshold-local analysis
// =============================================================================

/// Production of gene s near y_s = theta_{s,k}, as b + a Z_{s,k}, other genes fixed at domain h.
struct LocalSwitch {
    double a = 0.0;
    double b = 0.0;
};

[[nodiscard]] inline LocalSwitch local_switch_constants(const NetworkSpec& spec, const RegularDomainIndex& h,
                                                        std::size_t s, std::size_t k) {
    if (k == 0 || k > spec.genes.at(s).levels()) throw std::invalid_argument("local_switch_constants: bad level");
    auto below = h;
    below.h[s] = static_cast<int>(k) - 1;
    auto above = h;
    above.h[s] = static_cast<int>(k);
    const double b = production_in(spec, below, s);
    return {production_in(spec, above, s) - b, b};
}

/// Strict inequality a < beta gamma theta / kappa < a + b. simulate() classifies tangential
/// arrivals with threshold_fixed_point_condition instead.
[[nodiscard]] inline bool saddle_condition(double a, double b, double beta, double gamma, double kappa,
                                           double theta) {
    if (a < 0.0) throw std::invalid_argument("saddle_condition: requires a >= 0");
    const double c = beta * gamma * theta / kappa;
    return a < c && c < a + b;
}

/// Existence of a fixed point on the threshold in the smooth limit: b < beta gamma theta / kappa < a + b.
[[nodiscard]] inline bool threshold_fixed_point_condition(double a, double b, double beta, double gamma,
                                                          double kappa, double theta) {
    if (a < 0.0) throw std::invalid_argument("threshold_fixed_point_condition: requires a >= 0");
    const double c = beta * gamma * theta / kappa;
    return b < c && c < a + b;
}

}  // namespace ttnet
