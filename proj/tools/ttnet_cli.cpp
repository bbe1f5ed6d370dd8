// ttnet: batch analysis of transcription-translation networks.
//
// Exit codes: 0 ok, 1 domain violation, 2 input error, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ranges.h>

#include "ttnet/ttnet.hpp"

namespace fs = std::filesystem;
using namespace ttnet;

namespace {

enum Exit : int { kOk = 0, kDomain = 1, kInput = 2, kNumerical = 3 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Manifest {
    std::string subcommand;
    std::string spec_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::vector<double> x0, y0;
    std::size_t max_events = 1000;
    double max_time = std::numeric_limits<double>::infinity();
    bool allow_invalid = false;
    double dt = 0.05;
    std::vector<double> q_list{1e-2, 1e-3};
    // tolerance overrides; negative means keep the default
    double tol_root = -1, tol_simultaneous = -1, tol_tangency = -1, tol_on_threshold = -1;
    // graze
    std::vector<int> domain;
    std::size_t gene = 1;
    std::string side = "upper";
    // feedback
    std::optional<double> q_override;
};

NetworkSpec load(const Manifest& m) {
    auto spec = load_network(m.spec_path);
    if (m.tol_root > 0) spec.tol.root = m.tol_root;
    if (m.tol_simultaneous > 0) spec.tol.simultaneous = m.tol_simultaneous;
    if (m.tol_tangency > 0) spec.tol.tangency = m.tol_tangency;
    if (m.tol_on_threshold > 0) spec.tol.on_threshold = m.tol_on_threshold;
    return spec;
}

State initial_state(const Manifest& m, const NetworkSpec& spec) {
    if (m.x0.size() != spec.size() || m.y0.size() != spec.size())
        throw InputError(fmt::format("--x0 and --y0 need {} values each", spec.size()));
    return {m.x0, m.y0};
}

std::optional<fs::path> out_dir(const Manifest& m) {
    if (m.out_dir.empty()) return std::nullopt;
    fs::path p(m.out_dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw InputError(fmt::format("cannot create {}: {}", m.out_dir, ec.message()));
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot write " + p.string());
    f << text;
}

std::string manifest_header(const Manifest& m) {
    return fmt::format("subcommand: {}\nspec: {}\nseed: {}\n", m.subcommand, m.spec_path, m.seed);
}

/// Prints to stdout, and to report.txt when an output directory is set.
void emit_report(const Manifest& m, const std::string& body) {
    std::cout << body;
    if (auto dir = out_dir(m)) write_file(*dir / "report.txt", manifest_header(m) + body);
}

std::string violations_text(const std::vector<Violation>& v) {
    std::string s;
    for (const auto& x : v) s += fmt::format("{}: {}\n", to_string(x.kind), x.message);
    return s;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Manifest& m) {
    const auto spec = load(m);
    const auto v = validate(spec);
    if (v.empty()) {
        emit_report(m, fmt::format("valid: {} genes\n", spec.size()));
        return kOk;
    }
    emit_report(m, violations_text(v));
    return kDomain;
}

int cmd_simulate(const Manifest& m) {
    const auto spec = load(m);
    const auto s0 = initial_state(m, spec);
    SimulationOptions o;
    o.max_events = m.max_events;
    o.max_time = m.max_time;
    o.allow_invalid = m.allow_invalid;
    const auto tr = simulate(spec, s0, o);
    std::string body = fmt::format("events: {}\nterminal: {}\nt_end: {:.17g}\nx_end: {}\ny_end: {}\n",
                                   tr.events().size(), to_string(tr.status), tr.end_time, tr.end_state.x,
                                   tr.end_state.y);
    if (tr.non_unique) {
        std::vector<std::string> labels;
        for (const auto& c : tr.non_unique->continuations) labels.push_back(c.label);
        body += fmt::format("non_unique: gene {} threshold {} at t={:.17g}; continuations: {}\n",
                            tr.non_unique->gene + 1, tr.non_unique->level, tr.non_unique->time,
                            fmt::join(labels, ", "));
    }
    if (auto dir = out_dir(m)) {
        write_file(*dir / "events.jsonl", events_jsonl(tr));
        write_file(*dir / "trajectory.csv", trajectory_csv(spec, tr, m.dt));
    } else {
        std::cout << events_jsonl(tr);
    }
    emit_report(m, body);
    return kOk;
}

int cmd_ptd(const Manifest& m) {
    const auto spec = load(m);
    const auto g = build_ptd(spec);
    const auto cycles = find_cycles(g);
    std::string body = fmt::format("nodes: {}\nedges: {}\ncycles: {}\n", g.node_count(), g.edges().size(), cycles.size());
    std::vector<std::size_t> highlight;
    for (const auto& c : cycles) {
        const auto cls = classify_cycle(g, c);
        std::vector<std::string> w;
        for (auto v : c) w.push_back(g.word(v));
        body += fmt::format("  {}  (entering {}, leaving {})\n", fmt::join(w, " -> "), cls.entering, cls.leaving);
        if (highlight.empty() && (cls.enterable() || c.size() == g.node_count())) highlight = c;
    }
    if (auto dir = out_dir(m)) {
        write_file(*dir / "ptd.dot", export_dot(g, highlight));
        write_file(*dir / "adjacency.csv", export_adjacency(g));
    } else {
        std::cout << export_dot(g, highlight);
    }
    emit_report(m, body);
    return kOk;
}

int cmd_graze(const Manifest& m) {
    const auto spec = load(m);
    if (m.domain.size() != spec.size()) throw InputError(fmt::format("--domain needs {} values", spec.size()));
    if (m.gene < 1 || m.gene > spec.size()) throw InputError("--gene out of range");
    RegularDomainIndex h{m.domain};
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (h.h[i] < 0 || static_cast<std::size_t>(h.h[i]) > spec.genes[i].levels())
            throw InputError(fmt::format("--domain entry {} out of range", i + 1));
    const auto side = m.side == "lower" ? GrazingSide::Lower : GrazingSide::Upper;
    const auto c = grazing_curve(spec, h, m.gene - 1, side);
    if (!c) {
        emit_report(m, "no grazing curve on this side\n");
        return kOk;
    }
    std::string body = fmt::format("gene: {}\nside: {}\ngrazed_threshold: {:.12g}\ntangency_x: {:.12g}\n", m.gene,
                                   m.side, c->grazed_threshold, c->tangency_x);
    if (c->entry_threshold) body += fmt::format("entry_threshold: {:.12g}\n", *c->entry_threshold);
    if (c->entry_abscissa) body += fmt::format("entry_abscissa: {:.12g}\n", *c->entry_abscissa);
    if (c->duration) body += fmt::format("duration: {:.12g}\n", *c->duration);
    if (c->y_axis_intercept) body += fmt::format("y_axis_intercept: {:.12g}\n", *c->y_axis_intercept);
    emit_report(m, body);
    return kOk;
}

int cmd_feedback(const Manifest& m) {
    const auto spec = load(m);
    auto loop = recognize_loop(spec);
    if (m.q_override)
        for (auto& g : loop.genes) g.f.q = *m.q_override;
    const auto pc = periodic_certificate(loop);
    std::string body = fmt::format("genes: {}\nloop_sign: {}\nqualitative_cycle: {}\n", loop.size(),
                                   loop.loop_sign() < 0 ? "negative" : "positive", qualitative_cycle_exists(loop));
    for (const auto& iq : pc.inequalities)
        body += fmt::format("  protein {}: {:.6g} < {:.6g} < {:.6g} {}\n", iq.gene + 1, iq.lower, iq.threshold, iq.upper,
                            iq.holds() ? "holds" : "fails");
    if (!pc.fixed_point.empty()) {
        std::vector<std::string> fp;
        for (double v : pc.fixed_point) fp.push_back(fmt::format("{:.12g}", v));
        body += fmt::format("fixed_point: {}\n", fmt::join(fp, ", "));
    }
    for (const auto& z : pc.spectrum) body += fmt::format("eigenvalue: {:.6f} {:+.6f}i\n", z.real(), z.imag());
    body += fmt::format("verdict: {}\n", to_string(pc.verdict));
    if (pc.reason != InconclusiveReason::None) body += fmt::format("reason: {}\n", to_string(pc.reason));
    body += fmt::format("words: {}\n", fmt::join(cycle_word_sequence(loop.size()), " "));
    emit_report(m, body);
    return kOk;
}

int cmd_smooth_compare(const Manifest& m) {
    const auto spec = load(m);
    const auto s0 = initial_state(m, spec);
    CompareOptions opt;
    opt.max_events = std::min<std::size_t>(m.max_events, 200);
    const auto cmp = compare_engines(spec, s0, m.q_list, opt);
    std::string body = fmt::format("step_events: {}\nterminal: {}\n", cmp.step.events().size(), to_string(cmp.step.status));
    for (const auto& r : cmp.runs)
        body += fmt::format("q={:.3g}: matched {} of {} step events, {} smooth crossings\n", r.q, r.matched,
                            r.pairs.size(), r.smooth_crossings);
    for (const auto& n : cmp.grazing_notes) body += fmt::format("near grazing: {}\n", n);
    if (auto dir = out_dir(m))
        write_file(*dir / "sweep.csv", sweep_csv(cmp));
    else
        std::cout << sweep_csv(cmp);
    emit_report(m, body);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ttnet: piecewise-linear transcription-translation network analysis"};
    app.require_subcommand(1);
    Manifest m;

    const auto common = [&](CLI::App* sc) {
        sc->add_option("--spec", m.spec_path, "network JSON file")->required();
        sc->add_option("--out", m.out_dir, "output directory");
        sc->add_option("--seed", m.seed, "seed recorded in the report");
        sc->add_option("--tol-root", m.tol_root, "root tolerance override");
        sc->add_option("--tol-simultaneous", m.tol_simultaneous, "simultaneity tolerance override");
        sc->add_option("--tol-tangency", m.tol_tangency, "tangency tolerance override");
        sc->add_option("--tol-on-threshold", m.tol_on_threshold, "focal-on-threshold tolerance override");
    };
    const auto state_opts = [&](CLI::App* sc) {
        sc->add_option("--x0", m.x0, "transcript concentrations (comma list)")->delimiter(',')->required();
        sc->add_option("--y0", m.y0, "protein concentrations (comma list)")->delimiter(',')->required();
        sc->add_option("--max-events", m.max_events, "event limit");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check the network assumptions");
    common(validate_cmd);

    auto* simulate_cmd = app.add_subcommand("simulate", "event-driven step-limit simulation");
    common(simulate_cmd);
    state_opts(simulate_cmd);
    simulate_cmd->add_option("--max-time", m.max_time, "time limit");
    simulate_cmd->add_option("--dt", m.dt, "trajectory.csv sampling step")->check(CLI::PositiveNumber);
    simulate_cmd->add_flag("--allow-invalid", m.allow_invalid, "simulate despite validation failures");

    auto* ptd_cmd = app.add_subcommand("ptd", "pseudo-state transition diagram");
    common(ptd_cmd);

    auto* graze_cmd = app.add_subcommand("graze", "grazing curve of one gene in one domain");
    common(graze_cmd);
    graze_cmd->add_option("--domain", m.domain, "band index per gene (comma list)")->delimiter(',')->required();
    graze_cmd->add_option("--gene", m.gene, "gene (1-based)")->required();
    graze_cmd->add_option("--side", m.side, "upper or lower")->check(CLI::IsMember({"upper", "lower"}));

    auto* feedback_cmd = app.add_subcommand("feedback", "feedback-loop certificate");
    common(feedback_cmd);
    feedback_cmd->add_option("--q", m.q_override, "steepness override");

    auto* smooth_cmd = app.add_subcommand("smooth-compare", "step engine vs smooth integration");
    common(smooth_cmd);
    state_opts(smooth_cmd);
    smooth_cmd->add_option("--q-list", m.q_list, "steepness values (comma list)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInput;
    }

    try {
        const auto* sc = app.get_subcommands().front();
        m.subcommand = sc->get_name();
        if (sc == validate_cmd) return cmd_validate(m);
        if (sc == simulate_cmd) return cmd_simulate(m);
        if (sc == ptd_cmd) return cmd_ptd(m);
        if (sc == graze_cmd) return cmd_graze(m);
        if (sc == feedback_cmd) return cmd_feedback(m);
        if (sc == smooth_cmd) return cmd_smooth_compare(m);
    } catch (const InvalidNetworkError& e) {
        std::cerr << violations_text(e.violations());
        return kDomain;
    } catch (const OnThresholdError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomain;
    } catch (const NotALoopError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomain;
    } catch (const UndirectedEdgeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomain;
    } catch (const SpecParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
