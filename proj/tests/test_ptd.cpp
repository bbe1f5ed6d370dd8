#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "ttnet/io.hpp"
#include "ttnet/ptd.hpp"

using namespace ttnet;

namespace {

std::vector<std::string> words_of(const PtdGraph& g, const std::vector<std::size_t>& cyc) {
    std::vector<std::string> out;
    for (auto v : cyc) out.push_back(g.word(v));
    return out;
}

bool has_edge(const PtdGraph& g, const std::string& a, const std::string& b) {
    const auto s = g.find(a), t = g.find(b);
    if (!s || !t) return false;
    for (auto w : g.successors(*s))
        if (w == *t) return true;
    return false;
}

}  // namespace

TEST_CASE("oscillator2 diagram has one enterable 8-cycle", "[ptd][oscillator2]") {
    const auto spec = load_network(oracle::network_path("oscillator2.json"));
    const auto g = build_ptd(spec);
    CHECK(g.node_count() == 16);
    CHECK(g.edges().size() == 32);
    const std::vector<std::string> expected{"0000", "1000", "1100", "1110", "1111", "0111", "0011", "0001"};
    const auto entered = enterable_cycles(g);
    REQUIRE(entered.size() == 1);
    CHECK(words_of(g, entered[0]) == expected);
    const auto c = classify_cycle(g, entered[0]);
    CHECK(c.trapping());
    CHECK(c.entering == 16);

    // The complementary 8-cycle runs through the other eight nodes; every boundary
    // edge points out of it, so no trajectory reaches it from elsewhere.
    const auto all = find_cycles(g);
    REQUIRE(all.size() == 2);
    const std::vector<std::string> repelling{"0010", "1010", "1011", "1001", "1101", "0101", "0100", "0110"};
    CHECK(words_of(g, all[0]) == expected);
    CHECK(words_of(g, all[1]) == repelling);
    const auto r = classify_cycle(g, all[1]);
    CHECK_FALSE(r.enterable());
    CHECK(r.leaving == 16);
}

TEST_CASE("a cycle through every node counts as enterable", "[ptd]") {
    // One gene, focal point above the pseudo-threshold in band 0, below it in band 1.
    NetworkSpec spec;
    spec.genes.push_back({"g", 1.0, 1.0, 1.0, {1.0}});
    spec.productions.push_back({{{2.0, {}}, {-1.5, {{0, 1}}}}});
    const auto g = build_ptd(spec);
    REQUIRE(find_cycles(g).size() == 1);
    CHECK(find_cycles(g)[0].size() == 4);
    CHECK(enterable_cycles(g).size() == 1);
}

TEST_CASE("funnel2 diagram funnels into 0000", "[ptd][funnel2]") {
    const auto spec = load_network(oracle::network_path("funnel2.json"));
    const auto g = build_ptd(spec);
    CHECK(g.node_count() == 16);
    CHECK(find_cycles(g).empty());
    const auto sink = g.find("0000");
    REQUIRE(sink);
    CHECK(g.out_edges(*sink).empty());
    const auto reach = can_reach(g, *sink);
    CHECK(std::all_of(reach.begin(), reach.end(), [](bool b) { return b; }));
}

TEST_CASE("edge directions follow the sign of the flow on each boundary", "[ptd]") {
    const auto spec = load_network(oracle::network_path("oscillator2.json"));
    const auto g = build_ptd(spec);
    // y-type: x above the pseudo-threshold drives y up.
    CHECK(has_edge(g, "1000", "1100"));
    CHECK(has_edge(g, "0100", "0000"));
    // x-type: in 0000, alpha_1/beta_1 = 20/7 > 2 pushes x1 up.
    CHECK(has_edge(g, "0000", "1000"));
    // sorted by (source, target)
    CHECK(std::is_sorted(g.edges().begin(), g.edges().end()));
    CHECK(std::is_sorted(g.words().begin(), g.words().end()));
}

TEST_CASE("an undirected boundary is an error", "[ptd]") {
    NetworkSpec spec;
    spec.genes.push_back({"g", 1.0, 1.0, 1.0, {1.0}});
    spec.productions.push_back({{{1.0, {}}}});  // alpha/beta == (gamma/kappa) theta
    CHECK_THROWS_AS(build_ptd(spec), UndirectedEdgeError);
}

TEST_CASE("DOT and CSV exports", "[ptd]") {
    const auto spec = load_network(oracle::network_path("oscillator2.json"));
    const auto g = build_ptd(spec);
    const auto cyc = find_cycles(g).front();
    const auto dot = export_dot(g, cyc);
    CHECK(dot.find("digraph") == 0);
    std::size_t red = 0;
    for (std::size_t p = dot.find("color=red"); p != std::string::npos; p = dot.find("color=red", p + 1)) ++red;
    CHECK(red == 8);
    CHECK(dot.find("penwidth=2") != std::string::npos);
    const auto csv = export_adjacency(g);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 33);
    CHECK(csv.rfind("source,target,gene,boundary\n", 0) == 0);
}

TEST_CASE("simulated trajectories only take diagram edges", "[ptd]") {
    for (const char* name : {"funnel2.json", "oscillator2.json"}) {
        INFO(name);
        const auto spec = load_network(oracle::network_path(name));
        const auto g = build_ptd(spec);
        SimulationOptions o;
        o.max_events = 30;
        const auto tr = simulate(spec, {{0.3, 2.7}, {2.6, 0.4}}, o);
        const auto words = visited_words(spec, tr);
        REQUIRE(words.size() >= 2);
        for (std::size_t k = 0; k + 1 < words.size(); ++k) {
            INFO(words[k] << " -> " << words[k + 1]);
            CHECK(has_edge(g, words[k], words[k + 1]));
        }
    }
}

TEST_CASE("cycle enumeration respects the partial-path cap", "[ptd]") {
    const auto spec = load_network(oracle::network_path("oscillator2.json"));
    const auto g = build_ptd(spec);
    CHECK_THROWS_AS(find_cycles(g, 3), Error);
}
