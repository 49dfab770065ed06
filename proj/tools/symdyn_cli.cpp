// symdyn command-line front end. Every subcommand prints one JSON document
// (or writes it to --out). Exit codes: 0 pass, 1 check failure, 2 usage or input error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "symdyn/fixtures.hpp"
#include "symdyn/suite.hpp"
#include "symdyn/torus_checks.hpp"

using nlohmann::json;
using namespace symdyn;

namespace {

struct Globals {
    std::string out;
    std::uint64_t seed = 7;
    double tol = -1;  // negative: each command's own default

    double tol_or(double fallback) const { return tol > 0 ? tol : fallback; }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput("malformed JSON in " + what + ": " + e.what());
    }
}

// A fixture name, inline JSON, or a path to a graph file.
ShiftGraph resolve_graph(const std::string& arg) {
    if (is_fixture(arg)) return fixture_graph(arg);
    if (!arg.empty() && arg.front() == '{') return build_graph(parse_json(arg, "--graph"));
    return build_graph(parse_json(read_file(arg), arg));
}

// A fixture name, or a JSON file {"graph": ..., "h": ..., "psi": {state: value}};
// without "psi" the Perron vector of the (finite) graph is used.
ConformalFamily resolve_family(const std::string& arg) {
    if (is_fixture(arg)) return fixture_family(arg);
    json j = parse_json(arg.front() == '{' ? arg : read_file(arg), "--family");
    if (!j.contains("graph")) throw InvalidInput("family file needs a \"graph\" key");
    ShiftGraph g = build_graph(j["graph"]);
    if (!j.contains("psi")) {
        auto psi = harmonic_finite(g);
        return make_family(g, psi.h, psi);
    }
    if (!j.contains("h")) throw InvalidInput("family file with \"psi\" needs \"h\"");
    HarmonicFunction psi;
    psi.h = j["h"].get<double>();
    for (auto& [k, v] : j["psi"].items()) {
        StateId s(k);
        g.require(s);
        psi.values[s] = v.get<long double>();
    }
    psi.base = g.base();
    psi.residual = harmonic_residual(g, psi.values, psi.h);
    return make_family(g, psi.h, psi);
}

json counts_json(const std::vector<BigInt>& counts) {
    json a = json::array();
    for (const auto& c : counts) a.push_back(c.str());
    return a;
}

json series_json(const std::vector<long double>& xs) {
    json a = json::array();
    for (auto x : xs) a.push_back(static_cast<double>(x));
    return a;
}

json harmonic_json(const HarmonicFunction& hf) {
    json values = json::object();
    for (const auto& [s, v] : hf.values) values[s.label] = static_cast<double>(v);
    return {{"method", method_name(hf.method)}, {"h", hf.h}, {"base", hf.base.label}, {"residual", hf.residual},
            {"values", values}, {"diagnostics", hf.diagnostics}};
}

json tail_json(const TailFit& f) {
    return {{"model", f.model},         {"exponent", f.exponent},
            {"rate", f.rate},           {"rms", f.rms},
            {"summable", f.summable},   {"tail_estimate", f.tail_estimate},
            {"limit_estimate", f.limit_estimate}};
}

json check_json(const CheckReport& c) {
    return {{"max_discrepancy", c.max_discrepancy}, {"tolerance", c.tolerance}, {"pass", c.pass},
            {"cylinders", c.cylinders.str()}, {"roots", c.roots}};
}

void output(const Globals& g, const json& j) {
    const std::string text = j.dump(2) + "\n";
    if (g.out.empty())
        std::cout << text;
    else
        write_text(g.out, text);
}

void output(const Globals& g, const Report& r) {
    if (g.out.empty())
        std::cout << r.dump();
    else
        emit(r, g.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Countable Markov shifts, conformal measure families and the cat-map model"};
    // "--h" is the entropy option, so help is only available as --help.
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    // Global flags may follow the subcommand (`suite run ... --seed 7`).
    app.fallthrough();
    Globals G;
    app.add_option("--out", G.out, "Write the JSON result to this path instead of stdout");
    app.add_option("--seed", G.seed, "Seed for every sampled check")->capture_default_str();
    app.add_option("--tol", G.tol, "Override the pass tolerance of the command's check");

    int rc = 0;

    // ---- shift ----
    auto* shift = app.add_subcommand("shift", "Graph construction and exact counting");
    shift->require_subcommand(1);
    std::string graph_arg, center, from, to, word, base, csv;
    int radius = 2, n = 20;
    double h = -1;
    bool periodic = false;

    auto* s_build = shift->add_subcommand("build", "Describe a graph (fixture name, inline JSON or file)");
    s_build->add_option("--graph", graph_arg)->required();
    s_build->callback([&] { output(G, resolve_graph(graph_arg).description()); });

    auto* s_ball = shift->add_subcommand("ball", "States reachable from or reaching CENTER within RADIUS edges");
    s_ball->add_option("--graph", graph_arg)->required();
    s_ball->add_option("--center", center)->required();
    s_ball->add_option("--radius", radius)->capture_default_str();
    s_ball->callback([&] {
        auto g = resolve_graph(graph_arg);
        json states = json::array();
        for (const auto& s : ball(g, StateId(center), radius)) states.push_back(s.label);
        output(G, json{{"center", center}, {"radius", radius}, {"states", states}});
    });

    auto* s_val = shift->add_subcommand("validate", "Degree bounds and transitivity on a ball");
    s_val->add_option("--graph", graph_arg)->required();
    s_val->add_option("--radius", radius)->capture_default_str();
    s_val->callback([&] {
        auto g = resolve_graph(graph_arg);
        auto r = validate_graph(g, radius);
        output(G, json{{"max_out_degree", r.max_out_degree}, {"max_in_degree", r.max_in_degree},
                       {"transitive_on_ball", r.transitive_on_ball}, {"states_checked", r.states_checked}});
        if (!r.transitive_on_ball) rc = 1;
    });

    auto* s_adm = shift->add_subcommand("admissible", "Whether consecutive symbols are edges");
    s_adm->add_option("--graph", graph_arg)->required();
    s_adm->add_option("--word", word, "Comma-separated states")->required();
    s_adm->callback([&] {
        auto g = resolve_graph(graph_arg);
        output(G, json{{"word", word}, {"admissible", is_admissible(g, parse_state_list(word))}});
    });

    auto* s_count = shift->add_subcommand("count", "Exact word counts Z_n(from, to) for n = 0..N");
    s_count->add_option("--graph", graph_arg)->required();
    s_count->add_option("--from", from)->required();
    s_count->add_option("--to", to, "Defaults to --from");
    s_count->add_option("--n", n)->capture_default_str();
    s_count->add_flag("--periodic", periodic, "Loops at --from (P_n)");
    s_count->callback([&] {
        auto g = resolve_graph(graph_arg);
        auto t = periodic || to.empty() ? count_periodic(g, StateId(from), n)
                                        : count_words(g, StateId(from), StateId(to), n);
        output(G, json{{"origin", t.origin.label}, {"target", t.target.label}, {"counts", counts_json(t.counts)}});
    });

    auto* s_sum = shift->add_subcommand("loopsum", "Partial sums of e^{-nh} Z_n(a,a)");
    s_sum->add_option("--graph", graph_arg)->required();
    s_sum->add_option("--base", base)->required();
    s_sum->add_option("--h", h)->required();
    s_sum->add_option("--n", n)->capture_default_str();
    s_sum->add_option("--csv", csv, "Also write the trace as CSV");
    s_sum->callback([&] {
        auto g = resolve_graph(graph_arg);
        auto tr = weighted_loop_sum(g, StateId(base), h, n);
        if (!csv.empty()) emit_trace_csv(tr.partial_sums, csv);
        output(G, json{{"h", tr.h}, {"n_max", tr.n_max}, {"partial_sums", series_json(tr.partial_sums)}});
    });

    // ---- thermo ----
    auto* thermo = app.add_subcommand("thermo", "Entropy, recurrence and harmonic functions");
    thermo->require_subcommand(1);
    std::string method = "ratio", hmethod = "eigen", ray_arg;
    double threshold = 100;
    int k_max = 40;

    auto entropy_of = [&](const ShiftGraph& g, const std::string& b, int nn) {
        return gurevich_entropy(g, b.empty() ? g.base() : StateId(b), nn,
                                method == "limsup" ? EntropyMethod::limsup : EntropyMethod::ratio);
    };

    auto* t_ent = thermo->add_subcommand("entropy", "Gurevich entropy from loop counts");
    t_ent->add_option("--graph", graph_arg)->required();
    t_ent->add_option("--base", base, "Defaults to the graph's base state");
    t_ent->add_option("--n", n)->capture_default_str();
    t_ent->add_option("--method", method)->check(CLI::IsMember({"ratio", "limsup"}))->capture_default_str();
    t_ent->callback([&] {
        auto g = resolve_graph(graph_arg);
        auto e = entropy_of(g, base, n);
        output(G, json{{"value", e.value}, {"method", method_name(e.method)}, {"n_max", e.n_max},
                       {"period", e.period}, {"diagnostics", e.diagnostics}});
    });

    auto* t_cls = thermo->add_subcommand("classify", "Recurrent / TransientEvidence / Undecided");
    t_cls->add_option("--graph", graph_arg)->required();
    t_cls->add_option("--base", base);
    t_cls->add_option("--h", h, "Defaults to the ratio entropy estimate at the same n");
    t_cls->add_option("--n", n)->capture_default_str();
    t_cls->add_option("--threshold", threshold)->capture_default_str();
    t_cls->add_option("--csv", csv, "Also write the partial-sum trace as CSV");
    t_cls->callback([&] {
        auto g = resolve_graph(graph_arg);
        const StateId b = base.empty() ? g.base() : StateId(base);
        const double hh = h > 0 ? h : entropy_of(g, b.label, n).value;
        auto v = classify_recurrence(g, b, hh, n, threshold);
        if (!csv.empty()) emit_trace_csv(v.trace.partial_sums, csv);
        output(G, json{{"verdict", verdict_name(v.verdict)}, {"h", hh}, {"threshold", v.threshold},
                       {"period", v.period}, {"partial_sums", series_json(v.trace.partial_sums)},
                       {"fit", tail_json(v.fit)}});
    });

    auto* t_harm = thermo->add_subcommand("harmonic", "Positive L0-eigenfunction");
    t_harm->add_option("--graph", graph_arg)->required();
    t_harm->add_option("--method", hmethod)->check(CLI::IsMember({"eigen", "sarig", "cyr"}))->capture_default_str();
    t_harm->add_option("--ray", ray_arg, "Comma-separated injective ray (cyr)");
    t_harm->add_option("--base", base);
    t_harm->add_option("--h", h, "Defaults to the ratio entropy estimate");
    t_harm->add_option("--n", n, "Series length (sarig) or ray index (cyr)")->capture_default_str();
    t_harm->add_option("--radius", radius)->capture_default_str();
    t_harm->callback([&] {
        auto g = resolve_graph(graph_arg);
        HarmonicFunction hf;
        if (hmethod == "eigen") {
            hf = harmonic_finite(g);
        } else {
            const StateId b = base.empty() ? g.base() : StateId(base);
            const double hh = h > 0 ? h : entropy_of(g, b.label, std::max(n, 40)).value;
            if (hmethod == "sarig") {
                hf = harmonic_sarig(g, b, hh, n, SarigOptions{radius, SarigEstimator::block});
            } else {
                if (ray_arg.empty()) throw InvalidInput("--ray is required for --method cyr");
                auto ray = parse_state_list(ray_arg);
                CyrOptions opts;
                opts.radius = radius;
                hf = harmonic_cyr(g, b, ray, hh, std::min<int>(n, static_cast<int>(ray.size()) - 1), opts);
            }
        }
        json j = harmonic_json(hf);
        const double tol = G.tol_or(hmethod == "eigen" ? 1e-10 : 1e-3);
        j["tolerance"] = tol;
        j["pass"] = hf.residual < tol;
        output(G, j);
        if (!(hf.residual < tol)) rc = 1;
    });

    // ---- measure ----
    auto* measure = app.add_subcommand("measure", "Conformal cylinder measures");
    measure->require_subcommand(1);
    std::string family_arg, root, future;
    int depth = 8;

    auto* m_cyl = measure->add_subcommand("cylinder", "e^{-Nh} psi(w_N) for the cylinder [root, w_1..w_N]");
    m_cyl->add_option("--family", family_arg)->required();
    m_cyl->add_option("--root", root)->required();
    m_cyl->add_option("--future", future, "Comma-separated; empty for the whole fiber");
    m_cyl->callback([&] {
        auto fam = resolve_family(family_arg);
        auto w = future.empty() ? std::vector<StateId>{} : parse_state_list(future);
        auto v = cylinder_measure(fam, StateId(root), w);
        output(G, json{{"root", root}, {"future", future}, {"value", static_cast<double>(v.value)},
                       {"probability", static_cast<double>(cylinder_probability(fam, StateId(root), w))},
                       {"depth", v.depth}, {"error_bound", v.error_bound}});
    });

    auto* m_ver = measure->add_subcommand("verify", "Conformality, consistency and support up to a depth");
    m_ver->add_option("--family", family_arg)->required();
    m_ver->add_option("--depth", depth)->capture_default_str();
    m_ver->callback([&] {
        auto fam = resolve_family(family_arg);
        const double tol = G.tol_or(std::max(1e-12, 10 * fam.psi.residual));
        auto r = verify_family(fam, depth, tol);
        const bool pass = r.conformality.pass && r.consistency.pass && r.support_ok && r.roots_checked > 0;
        output(G, json{{"conformality_max_err", r.conformality.max_discrepancy},
                       {"consistency_max_err", r.consistency.max_discrepancy},
                       {"support_ok", r.support_ok},
                       {"roots_checked", r.roots_checked},
                       {"tolerance", tol},
                       {"pass", pass},
                       {"conformality", check_json(r.conformality)},
                       {"consistency", check_json(r.consistency)}});
        if (!pass) rc = 1;
    });

    // ---- torus ----
    auto* torus = app.add_subcommand("torus", "Cat-map model");
    torus->require_subcommand(1);
    std::string map_name = "cat", partition_file;
    std::size_t samples = 10000;
    auto* t_ver = torus->add_subcommand("verify", "Partition, coding, intersection, holonomy and leaf checks");
    t_ver->add_option("--map", map_name)->check(CLI::IsMember({"cat"}))->capture_default_str();
    t_ver->add_option("--partition", partition_file, "Partition JSON file instead of the built-in one");
    t_ver->add_option("--depth", depth, "Leaf-measure depth for holonomy")->capture_default_str();
    t_ver->add_option("--samples", samples)->capture_default_str();
    t_ver->callback([&] {
        SuiteConfig cfg;
        cfg.depth = depth;
        cfg.samples = samples;
        cfg.seed = G.seed;
        cfg.tol = G.tol_or(1e-9);
        Report r;
        r.suite = "torus-" + map_name;
        r.environment = {{"seed", cfg.seed}, {"depth", cfg.depth}, {"samples", cfg.samples}, {"tol", cfg.tol}};
        auto p = partition_file.empty() ? builtin_partition("cat-adler-weiss")
                                        : partition_from_json(parse_json(read_file(partition_file), partition_file));
        run_torus_checks(r, "", p, cfg);
        output(G, r);
        rc = r.exit_code();
    });

    // ---- suite ----
    auto* suite = app.add_subcommand("suite", "End-to-end verification suite");
    suite->require_subcommand(1);
    std::string fixture = "all", csv_dir;
    SuiteConfig scfg;
    auto* s_run = suite->add_subcommand("run", "Run every check for a fixture (or all)");
    s_run->add_option("--fixture", fixture, "golden-mean, full-2, three-cycle, renewal, ladder, cat or all")
        ->capture_default_str();
    s_run->add_option("--n-max", scfg.n_max)->capture_default_str();
    s_run->add_option("--depth", scfg.depth)->capture_default_str();
    s_run->add_option("--samples", scfg.samples)->capture_default_str();
    s_run->add_option("--csv-dir", csv_dir, "Write loop-sum traces as CSV files here");
    s_run->callback([&] {
        scfg.seed = G.seed;
        scfg.tol = G.tol_or(1e-9);
        TraceMap traces;
        auto r = run_suite(fixture, scfg, &traces);
        output(G, r);
        if (!csv_dir.empty()) {
            std::filesystem::create_directories(csv_dir);
            for (const auto& [name, tr] : traces) {
                std::string file = name;
                for (auto& c : file)
                    if (c == '/') c = '_';
                emit_trace_csv(tr, (std::filesystem::path(csv_dir) / (file + ".csv")).string());
            }
        }
        rc = r.exit_code();
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
