#pragma once

// Pseudo-state transition diagram: regular domains refined by the transcript
// pseudo-thresholds (gamma/kappa) theta, with the direction of the flow across
// each shared boundary.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttnet/flow.hpp"
#include "ttnet/model.hpp"
#include "ttnet/switching.hpp"

namespace ttnet {

enum class BoundaryKind { Transcript, Protein };  // x-type and y-type boundaries

[[nodiscard]] inline const char* to_string(BoundaryKind k) noexcept {
    return k == BoundaryKind::Transcript ? "x" : "y";
}

struct PtdEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    std::size_t gene = 0;    // 0-based
    BoundaryKind kind = BoundaryKind::Protein;
    std::size_t level = 0;   // index k of the threshold (or pseudo-threshold) crossed
    auto operator<=>(const PtdEdge&) const = default;
};

class PtdGraph {
public:
    PtdGraph(std::vector<PseudoStateIndex> nodes, std::vector<std::string> words, std::vector<PtdEdge> edges)
        : nodes_(std::move(nodes)), words_(std::move(words)), edges_(std::move(edges)), out_(nodes_.size()) {
        for (std::size_t e = 0; e < edges_.size(); ++e) out_[edges_[e].source].push_back(e);
    }

    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] const std::vector<PseudoStateIndex>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<std::string>& words() const noexcept { return words_; }
    [[nodiscard]] const std::vector<PtdEdge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::string& word(std::size_t v) const { return words_.at(v); }
    /// Indices into edges() leaving v.
    [[nodiscard]] const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_.at(v); }

    [[nodiscard]] std::optional<std::size_t> find(const std::string& w) const {
        const auto it = std::lower_bound(words_.begin(), words_.end(), w);
        if (it == words_.end() || *it != w) return std::nullopt;
        return static_cast<std::size_t>(it - words_.begin());
    }

    [[nodiscard]] std::vector<std::size_t> successors(std::size_t v) const {
        std::vector<std::size_t> s;
        for (auto e : out_.at(v)) s.push_back(edges_[e].target);
        return s;
    }

private:
    std::vector<PseudoStateIndex> nodes_;
    std::vector<std::string> words_;  // sorted; node index == position
    std::vector<PtdEdge> edges_;      // sorted by (source, target)
    std::vector<std::vector<std::size_t>> out_;
};

/// Word: for each gene, digit j_i then digit h_i.
[[nodiscard]] inline std::string pseudo_state_word(const PseudoStateIndex& ps) {
    std::string w;
    for (std::size_t i = 0; i < ps.h.size(); ++i) {
        w.push_back(static_cast<char>('0' + ps.j[i]));
        w.push_back(static_cast<char>('0' + ps.h[i]));
    }
    return w;
}

/// Pseudo-state containing a point (boundaries count as below only when strictly passed).
[[nodiscard]] inline PseudoStateIndex pseudo_state_of(const NetworkSpec& spec, const RegularDomainIndex& h,
                                                      std::span<const double> x) {
    PseudoStateIndex ps{h.h, std::vector<int>(spec.size(), 0)};
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto& g = spec.genes[i];
        for (std::size_t k = 1; k <= g.levels(); ++k)
            if (x[i] > g.pseudo_threshold(k)) ps.j[i] = static_cast<int>(k);
    }
    return ps;
}

[[nodiscard]] inline PtdGraph build_ptd(const NetworkSpec& spec) {
    for (const auto& g : spec.genes)
        if (g.levels() > 9) throw std::invalid_argument("build_ptd: words need at most 9 thresholds per gene");
    const auto n = spec.size();

    std::vector<PseudoStateIndex> nodes;
    {
        PseudoStateIndex ps{std::vector<int>(n, 0), std::vector<int>(n, 0)};
        // odometer over (j_0, h_0, j_1, h_1, ...)
        while (true) {
            nodes.push_back(ps);
            std::size_t pos = 2 * n;
            while (pos > 0) {
                const auto i = (pos - 1) / 2;
                auto& digit = (pos - 1) % 2 == 0 ? ps.j[i] : ps.h[i];
                if (digit < static_cast<int>(spec.genes[i].levels())) {
                    ++digit;
                    break;
                }
                digit = 0;
                --pos;
            }
            if (pos == 0) break;
        }
    }
    std::vector<std::string> words;
    for (const auto& v : nodes) words.push_back(pseudo_state_word(v));
    // The odometer already runs in word order; keep the invariant explicit.
    if (!std::is_sorted(words.begin(), words.end())) throw std::logic_error("build_ptd: node order");

    const auto index_of = [&](const PseudoStateIndex& ps) {
        const auto it = std::lower_bound(words.begin(), words.end(), pseudo_state_word(ps));
        return static_cast<std::size_t>(it - words.begin());
    };

    std::vector<PtdEdge> edges;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        const auto& ps = nodes[v];
        const RegularDomainIndex h{ps.h};
        for (std::size_t i = 0; i < n; ++i) {
            const auto& g = spec.genes[i];
            const int p = static_cast<int>(g.levels());
            if (ps.h[i] < p) {  // protein boundary y = theta_{h+1}
                auto nb = ps;
                ++nb.h[i];
                const auto w = index_of(nb);
                const auto k = static_cast<std::size_t>(ps.h[i] + 1);
                const bool up = ps.j[i] >= ps.h[i] + 1;
                edges.push_back({up ? v : w, up ? w : v, i, BoundaryKind::Protein, k});
            }
            if (ps.j[i] < p) {  // transcript boundary x = (gamma/kappa) theta_{j+1}
                auto nb = ps;
                ++nb.j[i];
                const auto w = index_of(nb);
                const auto k = static_cast<std::size_t>(ps.j[i] + 1);
                const double xs = production_in(spec, h, i) / g.beta;
                const double b = g.pseudo_threshold(k);
                if (xs == b)
                    throw UndirectedEdgeError(i, k, "transcript boundary " + std::to_string(k) + " of gene " +
                                                        std::to_string(i + 1) + " is not crossed in either direction");
                const bool up = xs > b;
                edges.push_back({up ? v : w, up ? w : v, i, BoundaryKind::Transcript, k});
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    return PtdGraph(std::move(nodes), std::move(words), std::move(edges));
}

/// Elementary cycles, each starting at its smallest node; ordered by length, then node sequence.
[[nodiscard]] inline std::vector<std::vector<std::size_t>> find_cycles(const PtdGraph& g,
                                                                       std::size_t max_partial_paths = 1'000'000) {
    std::vector<std::vector<std::size_t>> cycles;
    std::vector<std::size_t> path;
    std::vector<bool> on_path(g.node_count(), false);
    std::size_t partial = 0;

    // Iterative DFS over successors > start.
    struct Frame {
        std::size_t v;
        std::size_t next;
    };
    for (std::size_t s = 0; s < g.node_count(); ++s) {
        std::vector<Frame> stack{{s, 0}};
        path.assign(1, s);
        on_path[s] = true;
        while (!stack.empty()) {
            auto& f = stack.back();
            const auto& outs = g.out_edges(f.v);
            if (f.next == outs.size()) {
                on_path[f.v] = false;
                path.pop_back();
                stack.pop_back();
                continue;
            }
            const auto w = g.edges()[outs[f.next++]].target;
            if (w == s) {
                cycles.push_back(path);
            } else if (w > s && !on_path[w]) {
                if (++partial > max_partial_paths)
                    throw Error("find_cycles: more than " + std::to_string(max_partial_paths) + " partial paths");
                on_path[w] = true;
                path.push_back(w);
                stack.push_back({w, 0});
            }
        }
    }
    std::sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return cycles;
}

/// How a cycle sits in the graph: edges from outside into its nodes, and edges leaving them.
/// A cycle with no entering edge cannot be reached from any other pseudo-state; one with no
/// leaving edge traps every trajectory that reaches it.
struct CycleClass {
    std::vector<std::size_t> nodes;
    std::size_t entering = 0;
    std::size_t leaving = 0;
    [[nodiscard]] bool enterable() const noexcept { return entering > 0; }
    [[nodiscard]] bool trapping() const noexcept { return leaving == 0; }
};

[[nodiscard]] inline CycleClass classify_cycle(const PtdGraph& g, std::vector<std::size_t> cycle) {
    std::vector<bool> in(g.node_count(), false);
    for (auto v : cycle) in.at(v) = true;
    CycleClass c{std::move(cycle), 0, 0};
    for (const auto& e : g.edges()) {
        c.entering += !in[e.source] && in[e.target];
        c.leaving += in[e.source] && !in[e.target];
    }
    return c;
}

/// Elementary cycles that some trajectory from outside can enter (a cycle through every
/// node counts trivially).
[[nodiscard]] inline std::vector<std::vector<std::size_t>> enterable_cycles(const PtdGraph& g) {
    std::vector<std::vector<std::size_t>> out;
    for (auto& c : find_cycles(g))
        if (c.size() == g.node_count() || classify_cycle(g, c).enterable()) out.push_back(std::move(c));
    return out;
}

/// Nodes from which `target` is reachable (target included).
[[nodiscard]] inline std::vector<bool> can_reach(const PtdGraph& g, std::size_t target) {
    std::vector<std::vector<std::size_t>> pred(g.node_count());
    for (const auto& e : g.edges()) pred[e.target].push_back(e.source);
    std::vector<bool> seen(g.node_count(), false);
    std::vector<std::size_t> todo{target};
    seen.at(target) = true;
    while (!todo.empty()) {
        const auto v = todo.back();
        todo.pop_back();
        for (auto u : pred[v])
            if (!seen[u]) {
                seen[u] = true;
                todo.push_back(u);
            }
    }
    return seen;
}

/// Graphviz rendering; edges along `highlight` (a closed node cycle) are drawn red and thick.
[[nodiscard]] inline std::string export_dot(const PtdGraph& g, std::span<const std::size_t> highlight = {}) {
    std::vector<std::pair<std::size_t, std::size_t>> hl;
    for (std::size_t k = 0; k < highlight.size(); ++k)
        hl.emplace_back(highlight[k], highlight[(k + 1) % highlight.size()]);
    std::sort(hl.begin(), hl.end());
    std::ostringstream os;
    os << "digraph ptd {\n  node [shape=box, fontname=\"monospace\"];\n";
    for (const auto& w : g.words()) os << "  \"" << w << "\";\n";
    for (const auto& e : g.edges()) {
        os << "  \"" << g.word(e.source) << "\" -> \"" << g.word(e.target) << "\" [label=\"" << to_string(e.kind)
           << e.gene + 1 << "\"";
        if (std::binary_search(hl.begin(), hl.end(), std::pair{e.source, e.target})) os << ", color=red, penwidth=2";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

/// CSV: source,target,gene,boundary
[[nodiscard]] inline std::string export_adjacency(const PtdGraph& g) {
    std::ostringstream os;
    os << "source,target,gene,boundary\n";
    for (const auto& e : g.edges())
        os << g.word(e.source) << ',' << g.word(e.target) << ',' << e.gene + 1 << ',' << to_string(e.kind) << '\n';
    return os.str();
}

/// Pseudo-state words visited by a simulated trajectory, consecutive duplicates removed.
/// Transcript crossings inside a segment use x(t) = x* + (x0 - x*) e^{-r t}.
[[nodiscard]] inline std::vector<std::string> visited_words(const NetworkSpec& spec, const Trajectory& tr) {
    std::vector<std::string> out;
    const auto push = [&](std::string w) {
        if (out.empty() || out.back() != w) out.push_back(std::move(w));
    };
    for (const auto& seg : tr.segments) {
        const double dur = seg.exit ? seg.exit->elapsed : std::numeric_limits<double>::infinity();
        std::vector<double> times;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const auto gf = gene_flow(spec, seg.domain, i);
            const double x0 = seg.start.x[i], xs = gf.x_focal();
            for (std::size_t k = 1; k <= spec.genes[i].levels(); ++k) {
                const double b = spec.genes[i].pseudo_threshold(k);
                if ((x0 - b) * (xs - b) < 0.0) {
                    const double t = std::log((x0 - xs) / (b - xs)) / gf.x_rate();
                    if (t > 0.0 && t < dur) times.push_back(t);
                }
            }
        }
        std::sort(times.begin(), times.end());
        push(pseudo_state_word(pseudo_state_of(spec, seg.domain, seg.start.x)));
        // Sample just past each crossing to avoid landing on the boundary itself.
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double next = k + 1 < times.size() ? times[k + 1] : std::min(dur, times[k] + 1.0);
            const double t = 0.5 * (times[k] + next);
            const auto s = flow(spec, seg.domain, seg.start, t);
            push(pseudo_state_word(pseudo_state_of(spec, seg.domain, s.x)));
        }
    }
    return out;
}

}  // namespace ttnet
