#pragma once

// Network files (JSON) and result serialization. Gene and threshold indices are
// 1-based on disk and 0-based for genes in memory.
//
// {
//   "n": 2, "q": 0.01,
//   "tolerances": {"on_threshold": 1e-12, ...},            (optional)
//   "genes": [
//     {"name": "A", "beta": 0.875, "gamma": 1, "kappa": 1, "thresholds": [2],
//      "production": [{"coeff": 2.5},
//                     {"coeff": -1.5, "literals": [{"gene": 2, "threshold_index": 1}]}]}
//   ]
// }

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ttnet/feedback.hpp"
#include "ttnet/model.hpp"
#include "ttnet/ptd.hpp"
#include "ttnet/smooth.hpp"
#include "ttnet/switching.hpp"

namespace ttnet {

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                           const std::string& where) {
    if (!j.is_object()) throw SpecParseError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) throw SpecParseError(where + ": unknown key \"" + it.key() + "\"");
    }
}

inline double number(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw SpecParseError(where + ": missing \"" + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_number()) throw SpecParseError(where + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

inline std::size_t index1(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw SpecParseError(where + ": missing \"" + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw SpecParseError(where + ": \"" + key + "\" must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace detail

[[nodiscard]] inline NetworkSpec parse_network(const nlohmann::json& j) {
    detail::reject_unknown(j, {"n", "q", "genes", "tolerances"}, "network");
    NetworkSpec spec;
    if (!j.contains("genes") || !j.at("genes").is_array()) throw SpecParseError("network: \"genes\" must be an array");
    const auto& genes = j.at("genes");
    if (j.contains("n") && detail::index1(j, "n", "network") != genes.size())
        throw SpecParseError("network: \"n\" does not match the number of genes");
    if (j.contains("q")) spec.q = detail::number(j, "q", "network");
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        detail::reject_unknown(t, {"on_threshold", "degeneracy", "root", "simultaneous", "tangency"}, "tolerances");
        const auto opt = [&](const char* k, double& dst) {
            if (t.contains(k)) dst = detail::number(t, k, "tolerances");
        };
        opt("on_threshold", spec.tol.on_threshold);
        opt("degeneracy", spec.tol.degeneracy);
        opt("root", spec.tol.root);
        opt("simultaneous", spec.tol.simultaneous);
        opt("tangency", spec.tol.tangency);
    }
    for (std::size_t i = 0; i < genes.size(); ++i) {
        const auto where = "gene " + std::to_string(i + 1);
        const auto& gj = genes[i];
        detail::reject_unknown(gj, {"name", "beta", "gamma", "kappa", "thresholds", "production"}, where);
        GeneSpec g;
        g.name = gj.value("name", "g" + std::to_string(i + 1));
        g.beta = detail::number(gj, "beta", where);
        g.gamma = detail::number(gj, "gamma", where);
        g.kappa = detail::number(gj, "kappa", where);
        if (gj.contains("thresholds")) {
            if (!gj.at("thresholds").is_array()) throw SpecParseError(where + ": \"thresholds\" must be an array");
            for (const auto& t : gj.at("thresholds")) {
                if (!t.is_number()) throw SpecParseError(where + ": thresholds must be numbers");
                g.thresholds.push_back(t.get<double>());
            }
        }
        ProductionFunction pf;
        if (!gj.contains("production") || !gj.at("production").is_array())
            throw SpecParseError(where + ": \"production\" must be an array of terms");
        for (const auto& tj : gj.at("production")) {
            detail::reject_unknown(tj, {"coeff", "literals"}, where + " term");
            Term term;
            term.coeff = detail::number(tj, "coeff", where + " term");
            if (tj.contains("literals")) {
                if (!tj.at("literals").is_array()) throw SpecParseError(where + ": \"literals\" must be an array");
                for (const auto& lj : tj.at("literals")) {
                    detail::reject_unknown(lj, {"gene", "threshold_index"}, where + " literal");
                    term.literals.push_back({detail::index1(lj, "gene", where) - 1,
                                             detail::index1(lj, "threshold_index", where)});
                }
            }
            pf.terms.push_back(std::move(term));
        }
        spec.genes.push_back(std::move(g));
        spec.productions.push_back(std::move(pf));
    }
    return spec;
}

[[nodiscard]] inline NetworkSpec load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecParseError(path + ": " + e.what());
    }
    return parse_network(j);
}

[[nodiscard]] inline nlohmann::json to_json(const NetworkSpec& spec) {
    nlohmann::json j;
    j["n"] = spec.size();
    j["q"] = spec.q;
    auto& genes = j["genes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto& g = spec.genes[i];
        nlohmann::json gj{{"name", g.name}, {"beta", g.beta}, {"gamma", g.gamma}, {"kappa", g.kappa},
                          {"thresholds", g.thresholds}};
        auto& prod = gj["production"] = nlohmann::json::array();
        for (const auto& t : spec.productions[i].terms) {
            nlohmann::json tj{{"coeff", t.coeff}};
            if (!t.literals.empty()) {
                auto& lits = tj["literals"] = nlohmann::json::array();
                for (const auto& l : t.literals) lits.push_back({{"gene", l.gene + 1}, {"threshold_index", l.threshold}});
            }
            prod.push_back(std::move(tj));
        }
        genes.push_back(std::move(gj));
    }
    return j;
}

// =============================================================================
// Outputs
// =============================================================================

[[nodiscard]] inline nlohmann::json to_json(const HittingEvent& e, std::size_t index) {
    return {{"index", index},       {"gene", e.gene + 1}, {"threshold", e.level},
            {"direction", to_string(e.direction)},     {"t", e.time},
            {"x", e.state.x},       {"y", e.state.y},     {"tangential", e.tangential}};
}

/// One JSON object per event, then a terminal record.
[[nodiscard]] inline std::string events_jsonl(const Trajectory& tr) {
    std::ostringstream os;
    std::size_t k = 0;
    for (const auto& e : tr.events()) os << to_json(e, k++).dump() << '\n';
    nlohmann::json term{{"terminal", to_string(tr.status)},
                        {"t", std::isfinite(tr.end_time) ? nlohmann::json(tr.end_time) : nlohmann::json("inf")},
                        {"x", tr.end_state.x},
                        {"y", tr.end_state.y}};
    if (tr.non_unique) {
        nlohmann::json cont = nlohmann::json::array();
        for (const auto& c : tr.non_unique->continuations) cont.push_back(c.label);
        term["non_unique"] = {{"gene", tr.non_unique->gene + 1},
                              {"threshold", tr.non_unique->level},
                              {"a", tr.non_unique->local.a},
                              {"b", tr.non_unique->local.b},
                              {"continuations", cont}};
    }
    if (!tr.simultaneous.empty()) {
        nlohmann::json tied = nlohmann::json::array();
        for (const auto& e : tr.simultaneous) tied.push_back({{"gene", e.gene + 1}, {"threshold", e.level}, {"t", e.time}});
        term["simultaneous"] = tied;
    }
    os << term.dump() << '\n';
    return os.str();
}

namespace detail {
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

/// CSV t,x1..xn,y1..yn,word sampled every dt plus every event point.
[[nodiscard]] inline std::string trajectory_csv(const NetworkSpec& spec, const Trajectory& tr, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("trajectory_csv: dt must be positive");
    const auto n = spec.size();
    std::ostringstream os;
    os << 't';
    for (std::size_t i = 0; i < n; ++i) os << ",x" << i + 1;
    for (std::size_t i = 0; i < n; ++i) os << ",y" << i + 1;
    os << ",word\n";
    const auto row = [&](double t, const RegularDomainIndex& h, const State& s) {
        os << detail::fmt_double(t);
        for (double v : s.x) os << ',' << detail::fmt_double(v);
        for (double v : s.y) os << ',' << detail::fmt_double(v);
        os << ',' << pseudo_state_word(pseudo_state_of(spec, h, s.x)) << '\n';
    };
    const double t_final = std::isfinite(tr.end_time) ? tr.end_time : (tr.segments.empty() ? 0.0 : tr.segments.back().start_time + 20.0);
    for (const auto& seg : tr.segments) {
        const double t_end = seg.exit ? seg.exit->time : t_final;
        row(seg.start_time, seg.domain, seg.start);
        const auto steps = static_cast<long long>(std::floor((t_end - seg.start_time) / dt));
        for (long long k = 1; k <= steps; ++k) {
            const double t = seg.start_time + static_cast<double>(k) * dt;
            if (t >= t_end) break;
            row(t, seg.domain, flow(spec, seg.domain, seg.start, t - seg.start_time));
        }
        if (!seg.exit && t_end > seg.start_time) row(t_end, seg.domain, flow(spec, seg.domain, seg.start, t_end - seg.start_time));
    }
    return os.str();
}

/// CSV q,event,gene,threshold,direction,step_time,smooth_time,abs_dt,state_gap
[[nodiscard]] inline std::string sweep_csv(const EngineComparison& cmp) {
    std::ostringstream os;
    os << "q,event,gene,threshold,direction,step_time,smooth_time,abs_dt,state_gap\n";
    for (const auto& run : cmp.runs)
        for (const auto& p : run.pairs) {
            os << detail::fmt_double(run.q) << ',' << p.index << ',' << p.gene + 1 << ',' << p.level << ','
               << to_string(p.direction) << ',' << detail::fmt_double(p.step_time) << ',';
            if (p.smooth_time)
                os << detail::fmt_double(*p.smooth_time) << ',' << detail::fmt_double(std::abs(*p.smooth_time - p.step_time));
            else
                os << ",";
            os << ',' << detail::fmt_double(p.state_gap) << '\n';
        }
    return os.str();
}

}  // namespace ttnet
