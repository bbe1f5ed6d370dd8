#pragma once

// Single-loop networks in Hill form: w_{2k-1}' = a_k f_k(w_{2k-2}) - b_k w_{2k-1},
// w_{2k}' = c_k w_{2k-1} - d_k w_{2k}, indices modulo 2n. Sign normalization by
// reflections, the qualitative-cycle test, the unique fixed point and the
// spectral certificate for a periodic orbit.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttnet/linalg.hpp"
#include "ttnet/model.hpp"
#include "ttnet/roots.hpp"

namespace ttnet {

/// f(w) = low + (high - low) H(u, theta, q), u = w or (bound - w) when reflected.
/// q == 0 is the step limit.
struct Regulation {
    double threshold = 1.0;
    double q = 0.0;
    double low = 0.0;
    double high = 1.0;
    bool reflected = false;
    double bound = 0.0;  // reflection axis W (upper end of the regulator's range)

    [[nodiscard]] double argument(double w) const noexcept { return reflected ? bound - w : w; }

    [[nodiscard]] double switch_value(double u) const {
        if (q == 0.0) return u > threshold ? 1.0 : (u < threshold ? 0.0 : 0.5);
        return hill(u, threshold, q);
    }

    [[nodiscard]] double operator()(double w) const { return low + (high - low) * switch_value(argument(w)); }

    [[nodiscard]] double derivative(double w) const {
        if (q == 0.0) return 0.0;
        const double d = (high - low) * hill_derivative(argument(w), threshold, q);
        return reflected ? -d : d;
    }

    /// Threshold expressed in the regulator's current coordinate.
    [[nodiscard]] double current_threshold() const noexcept { return reflected ? bound - threshold : threshold; }

    /// +1 activation, -1 repression, 0 constant.
    [[nodiscard]] int sign() const noexcept {
        const int s = high > low ? 1 : (high < low ? -1 : 0);
        return reflected ? -s : s;
    }

    [[nodiscard]] double min_value() const noexcept { return std::min(low, high); }
    [[nodiscard]] double max_value() const noexcept { return std::max(low, high); }
};

struct LoopGene {
    double a = 1.0;  // maximal production
    double b = 1.0;  // transcript decay
    double c = 1.0;  // translation
    double d = 1.0;  // protein decay
    Regulation f;    // reads the previous gene's protein
    std::size_t network_gene = 0;
};

struct FeedbackLoop {
    std::vector<LoopGene> genes;  // genes[k] is regulated by genes[k-1]'s protein (cyclically)

    [[nodiscard]] std::size_t size() const noexcept { return genes.size(); }
    [[nodiscard]] std::size_t dimension() const noexcept { return 2 * genes.size(); }

    /// Sign of the edge into w_i, i in 1..2n.
    [[nodiscard]] int edge_sign(std::size_t i) const {
        if (i == 0 || i > dimension()) throw std::out_of_range("edge_sign: index");
        return i % 2 == 1 ? genes[(i - 1) / 2].f.sign() : 1;
    }

    [[nodiscard]] std::size_t negative_edges() const {
        std::size_t k = 0;
        for (const auto& g : genes) k += g.f.sign() < 0;
        return k;
    }

    [[nodiscard]] int loop_sign() const { return negative_edges() % 2 == 0 ? 1 : -1; }

    [[nodiscard]] std::vector<double> rhs(std::span<const double> w) const {
        const auto n = size();
        if (w.size() != 2 * n) throw std::invalid_argument("rhs: dimension mismatch");
        std::vector<double> out(2 * n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& g = genes[k];
            const double reg = w[(2 * k + 2 * n - 1) % (2 * n)];
            out[2 * k] = g.a * g.f(reg) - g.b * w[2 * k];
            out[2 * k + 1] = g.c * w[2 * k] - g.d * w[2 * k + 1];
        }
        return out;
    }
};

/// Upper end of the invariant range of w_i (1-based): a/b for transcripts, c a / (d b) for proteins.
[[nodiscard]] inline double wmax(const FeedbackLoop& loop, std::size_t i) {
    if (i == 0 || i > loop.dimension()) throw std::out_of_range("wmax: index");
    const auto& g = loop.genes[(i - 1) / 2];
    return i % 2 == 1 ? g.a / g.b : g.c * g.a / (g.d * g.b);
}

/// Reads a network whose interaction graph is a single cycle with one threshold per gene
/// and productions affine in one literal. The loop starts at network gene 0.
[[nodiscard]] inline FeedbackLoop recognize_loop(const NetworkSpec& spec) {
    const auto n = spec.size();
    if (n == 0) throw NotALoopError(0, "empty network");
    std::vector<std::size_t> regulator(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto lits = spec.productions[i].literals();
        if (lits.size() != 1)
            throw NotALoopError(i, "gene " + std::to_string(i + 1) + " must be regulated by exactly one literal");
        regulator[i] = lits.front().gene;
        if (spec.genes[regulator[i]].levels() != 1 || lits.front().threshold != 1)
            throw NotALoopError(i, "gene " + std::to_string(regulator[i] + 1) + " must have exactly one threshold");
    }
    std::vector<std::size_t> downstream(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (downstream[regulator[i]] != n)
            throw NotALoopError(regulator[i], "gene " + std::to_string(regulator[i] + 1) + " regulates several genes");
        downstream[regulator[i]] = i;
    }
    FeedbackLoop loop;
    std::vector<bool> seen(n, false);
    std::size_t g = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (seen[g]) throw NotALoopError(g, "interaction graph is not a single cycle");
        seen[g] = true;
        const auto& gs = spec.genes[g];
        const auto& prod = spec.productions[g];
        const Literal lit{regulator[g], 1};
        const double off = prod.evaluate([&](const Literal&) { return 0.0; });
        const double on = prod.evaluate([&](const Literal&) { return 1.0; });
        if (off < 0.0 || on < 0.0 || std::max(off, on) <= 0.0)
            throw NotALoopError(g, "gene " + std::to_string(g + 1) + " has no positive production");
        LoopGene lg;
        lg.a = std::max(off, on);
        lg.b = gs.beta;
        lg.c = gs.kappa;
        lg.d = gs.gamma;
        lg.network_gene = g;
        lg.f.threshold = spec.genes[lit.gene].thresholds.front();
        lg.f.q = spec.q;
        lg.f.low = off / lg.a;
        lg.f.high = on / lg.a;
        loop.genes.push_back(lg);
        g = downstream[g];
    }
    if (g != 0) throw NotALoopError(g, "interaction graph is not a single cycle");
    return loop;
}

// =============================================================================
// Sign normalization
// =============================================================================

struct CancelResult {
    FeedbackLoop loop;                 // at most the edge y_n -> x_1 negative
    std::vector<bool> reflected;       // per coordinate w_i (0-based here)
    std::vector<double> bounds;        // reflection axis per coordinate

    [[nodiscard]] std::vector<double> to_transformed(std::span<const double> w) const {
        std::vector<double> out(w.begin(), w.end());
        for (std::size_t i = 0; i < out.size(); ++i)
            if (reflected[i]) out[i] = bounds[i] - out[i];
        return out;
    }
    // The map is an involution.
    [[nodiscard]] std::vector<double> from_transformed(std::span<const double> w) const { return to_transformed(w); }
};

/// Reflect gene g (x -> a/b - x, y -> W - y) for every negative edge out of a protein other
/// than the last one, largest index first, so that only the closing edge can stay negative.
[[nodiscard]] inline CancelResult cancel(const FeedbackLoop& input) {
    CancelResult res{input, std::vector<bool>(input.dimension(), false), std::vector<double>(input.dimension(), 0.0)};
    auto& loop = res.loop;
    const auto n = loop.size();
    for (std::size_t k = 0; k < res.bounds.size(); ++k) res.bounds[k] = wmax(input, k + 1);
    for (std::size_t g = n - 1; g-- > 0;) {  // gene g (0-based) feeds gene g+1
        if (loop.genes[g + 1].f.sign() >= 0) continue;
        res.reflected[2 * g] = !res.reflected[2 * g];
        res.reflected[2 * g + 1] = !res.reflected[2 * g + 1];
        auto& own = loop.genes[g].f;  // x~' = a (1 - f) - b x~
        own.low = 1.0 - own.low;
        own.high = 1.0 - own.high;
        auto& next = loop.genes[g + 1].f;  // reads y = W - y~
        next.reflected = !next.reflected;
        next.bound = res.bounds[2 * g + 1];
    }
    return res;
}

// =============================================================================
// Qualitative cycle, fixed point, spectrum
// =============================================================================

struct CycleInequality {
    std::size_t gene = 0;  // loop position of the protein, 0-based
    double lower = 0.0;
    double threshold = 0.0;
    double upper = 0.0;
    [[nodiscard]] bool holds() const noexcept { return lower < threshold && threshold < upper; }
};

/// Each protein's invariant range must straddle the threshold it acts through.
[[nodiscard]] inline std::vector<CycleInequality> cycle_inequalities(const FeedbackLoop& loop) {
    std::vector<CycleInequality> out;
    const auto n = loop.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& g = loop.genes[k];
        const auto& reader = loop.genes[(k + 1) % n].f;
        const double scale = g.c * g.a / (g.d * g.b);
        double lo = scale * g.f.min_value(), hi = scale * g.f.max_value();
        if (reader.reflected) {
            const double l2 = reader.bound - hi, h2 = reader.bound - lo;
            lo = l2;
            hi = h2;
        }
        out.push_back({k, lo, reader.current_threshold(), hi});
    }
    return out;
}

[[nodiscard]] inline bool qualitative_cycle_exists(const FeedbackLoop& loop) {
    if (loop.loop_sign() > 0) return false;
    const auto ineq = cycle_inequalities(loop);
    return std::all_of(ineq.begin(), ineq.end(), [](const auto& c) { return c.holds(); });
}

/// Boolean words visited by the cycle: each protein/transcript flips in turn, 4n words.
[[nodiscard]] inline std::vector<std::string> cycle_word_sequence(std::size_t n) {
    std::vector<std::string> out;
    std::string w(2 * n, '0');
    for (char bit : {'1', '0'})
        for (std::size_t i = 0; i < 2 * n; ++i) {
            out.push_back(w);
            w[i] = bit;
        }
    return out;
}

/// The unique equilibrium of a negative loop (q > 0): bisection on w_1 over the composed chain.
[[nodiscard]] inline std::vector<double> unique_fixed_point(const FeedbackLoop& loop) {
    const auto n = loop.size();
    if (n == 0) throw std::invalid_argument("unique_fixed_point: empty loop");
    if (loop.loop_sign() > 0) throw std::invalid_argument("unique_fixed_point: loop must be negative");
    for (const auto& g : loop.genes)
        if (!(g.f.q > 0.0)) throw std::invalid_argument("unique_fixed_point: requires q > 0");
    const auto chain = [&](double x1, std::vector<double>* w) {
        double x = x1;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& g = loop.genes[k];
            const double y = g.c / g.d * x;
            if (w) {
                (*w)[2 * k] = x;
                (*w)[2 * k + 1] = y;
            }
            const auto& nxt = loop.genes[(k + 1) % n];
            x = nxt.a / nxt.b * nxt.f(y);
        }
        return x;  // image of x1 after a full turn
    };
    const auto G = [&](double x1) { return x1 - chain(x1, nullptr); };
    const double top = loop.genes[0].a / loop.genes[0].b;
    const double x1 = bisect_root(G, 0.0, top);
    std::vector<double> w(2 * n);
    chain(x1, &w);
    return w;
}

[[nodiscard]] inline Eigen::MatrixXd jacobian_at(const FeedbackLoop& loop, std::span<const double> w) {
    const auto n = loop.size();
    const auto m = static_cast<Eigen::Index>(2 * n);
    if (w.size() != 2 * n) throw std::invalid_argument("jacobian_at: dimension mismatch");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& g = loop.genes[k];
        const auto xi = static_cast<Eigen::Index>(2 * k), yi = xi + 1;
        const auto ri = static_cast<Eigen::Index>((2 * k + 2 * n - 1) % (2 * n));
        j(xi, xi) = -g.b;
        j(yi, yi) = -g.d;
        j(yi, xi) = g.c;
        j(xi, ri) += g.a * g.f.derivative(w[static_cast<std::size_t>(ri)]);
    }
    return j;
}

// =============================================================================
// Certificate
// =============================================================================

enum class Verdict { NoQualitativeCycle, PeriodicOrbitExists, Inconclusive };
enum class InconclusiveReason { None, RepeatedEigenvalues, NoPositiveRealPart, StepLimit };

[[nodiscard]] inline const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::NoQualitativeCycle: return "NoQualitativeCycle";
        case Verdict::PeriodicOrbitExists: return "PeriodicOrbitExists";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "unknown";
}

[[nodiscard]] inline const char* to_string(InconclusiveReason r) noexcept {
    switch (r) {
        case InconclusiveReason::None: return "none";
        case InconclusiveReason::RepeatedEigenvalues: return "repeated eigenvalues";
        case InconclusiveReason::NoPositiveRealPart: return "no eigenvalue with positive real part";
        case InconclusiveReason::StepLimit: return "step limit (q = 0) has no smooth fixed point";
    }
    return "unknown";
}

[[nodiscard]] inline bool has_repeated(const std::vector<Complex>& s, double rel = 1e-6) {
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            if (std::abs(s[i] - s[j]) <= rel * std::max({std::abs(s[i]), std::abs(s[j]), 1e-300})) return true;
    return false;
}

/// Verdict from a spectrum: unstable and simple means a periodic orbit.
[[nodiscard]] inline std::pair<Verdict, InconclusiveReason> spectral_verdict(const std::vector<Complex>& s) {
    const bool unstable = std::any_of(s.begin(), s.end(), [](const Complex& z) { return z.real() > 0.0; });
    if (!unstable) return {Verdict::Inconclusive, InconclusiveReason::NoPositiveRealPart};
    if (has_repeated(s)) return {Verdict::Inconclusive, InconclusiveReason::RepeatedEigenvalues};
    return {Verdict::PeriodicOrbitExists, InconclusiveReason::None};
}

struct PeriodicCertificate {
    Verdict verdict = Verdict::Inconclusive;
    InconclusiveReason reason = InconclusiveReason::None;
    std::vector<CycleInequality> inequalities;
    std::vector<double> fixed_point;
    Eigen::MatrixXd jacobian;
    std::vector<Complex> spectrum;
    double trace = 0.0;
};

[[nodiscard]] inline PeriodicCertificate periodic_certificate(const FeedbackLoop& loop) {
    PeriodicCertificate pc;
    pc.inequalities = cycle_inequalities(loop);
    if (!qualitative_cycle_exists(loop)) {
        pc.verdict = Verdict::NoQualitativeCycle;
        return pc;
    }
    if (std::any_of(loop.genes.begin(), loop.genes.end(), [](const auto& g) { return g.f.q == 0.0; })) {
        pc.verdict = Verdict::Inconclusive;
        pc.reason = InconclusiveReason::StepLimit;
        return pc;
    }
    pc.fixed_point = unique_fixed_point(loop);
    pc.jacobian = jacobian_at(loop, pc.fixed_point);
    pc.spectrum = eigenvalues(pc.jacobian);
    pc.trace = pc.jacobian.trace();
    Complex sum = 0.0;
    for (const auto& z : pc.spectrum) sum += z;
    if (std::abs(sum.real() - pc.trace) > 1e-8 * std::max(1.0, std::abs(pc.trace)))
        throw NumericalError("periodic_certificate: eigenvalue sum does not match the trace");
    std::tie(pc.verdict, pc.reason) = spectral_verdict(pc.spectrum);
    return pc;
}

}  // namespace ttnet
