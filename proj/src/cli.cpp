#include "walklab/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "walklab/experiments.hpp"

namespace walklab {

namespace {

using nlohmann::json;

const std::set<std::string> kBoolFlags = {"exact"};

// Per-subcommand accepted flags. Common names follow the external contract;
// the handful of extras (--v, --u, --exact, ...) are documented in the README.
const std::map<std::string, std::set<std::string>> kAllowedFlags = {
    {"gen", {"gnp", "kind", "n", "c", "seed", "out", "config", "threads"}},
    {"audit", {"in", "gnp", "kind", "n", "c", "eps", "budget", "seed", "threads", "json", "config"}},
    {"stationary", {"in", "gnp", "kind", "n", "c", "seed", "policy", "json", "csv", "config", "threads"}},
    {"mix",
     {"in", "gnp", "kind", "n", "c", "seed", "policy", "eps", "t-grid", "json", "config", "threads"}},
    {"returns",
     {"in", "gnp", "kind", "n", "c", "seed", "policy", "v", "T", "K", "exact", "replicas", "json",
      "config", "threads"}},
    {"cover",
     {"in", "gnp", "kind", "n", "c", "seed", "policy", "replicas", "cap-mult", "start",
      "start-rule", "threads", "json", "csv", "config"}},
    {"compare",
     {"in", "gnp", "kind", "n", "c", "seed", "policy", "replicas", "cap-mult", "graphs",
      "threads", "json", "csv", "config"}},
    {"firstvisit",
     {"in", "gnp", "kind", "n", "c", "seed", "policy", "replicas", "t-grid", "T", "vertices",
      "threads", "json", "csv", "config"}},
    {"contract",
     {"in", "gnp", "kind", "n", "c", "seed", "policy", "u", "v", "pairs", "t-grid", "T",
      "threads", "json", "csv", "config"}},
    {"lowerbound",
     {"gnp", "n", "c", "seed", "policy", "eps", "delta", "replicas", "T", "budget", "start",
      "threads", "json", "config"}},
};

struct Invocation {
    std::string subcommand;
    std::map<std::string, std::string> values;
};

Invocation parse_args(const std::vector<std::string>& args) {
    if (args.empty()) throw PreconditionError("usage: walklab <subcommand> [--flags]");
    Invocation inv;
    inv.subcommand = args[0];
    const auto allowed = kAllowedFlags.find(inv.subcommand);
    if (allowed == kAllowedFlags.end())
        throw PreconditionError("unknown subcommand: " + inv.subcommand);
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& token = args[i];
        if (token.rfind("--", 0) != 0)
            throw PreconditionError("expected a --flag, got: " + token);
        const std::string name = token.substr(2);
        if (!allowed->second.count(name))
            throw PreconditionError("unknown flag for '" + inv.subcommand + "': --" + name);
        if (kBoolFlags.count(name)) {
            inv.values[name] = "1";
        } else {
            if (i + 1 >= args.size())
                throw PreconditionError("flag --" + name + " needs a value");
            inv.values[name] = args[++i];
        }
    }
    // config file supplies defaults; explicit flags win
    const auto cfg = inv.values.find("config");
    if (cfg != inv.values.end()) {
        std::ifstream in(cfg->second);
        if (!in) throw PreconditionError("cannot open config file: " + cfg->second);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw PreconditionError("config file parse error: " + std::string(e.what()));
        }
        for (const auto& [key, value] : j.items()) {
            if (!allowed->second.count(key))
                throw PreconditionError("unknown config key for '" + inv.subcommand + "': " + key);
            if (inv.values.count(key)) continue; // flags win
            if (value.is_string()) inv.values[key] = value.get<std::string>();
            else inv.values[key] = value.dump();
        }
    }
    return inv;
}

class Options {
  public:
    Options(Invocation inv, std::ostream& out) : inv_(std::move(inv)), out_(out) {
        if (!inv_.values.count("seed")) {
            std::random_device rd;
            std::uint64_t generated = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
            inv_.values["seed"] = std::to_string(generated);
            generated_seed_ = true;
        }
    }

    bool has(const std::string& name) const { return inv_.values.count(name) > 0; }

    std::string str(const std::string& name, const std::string& fallback = "") const {
        const auto it = inv_.values.find(name);
        return it == inv_.values.end() ? fallback : it->second;
    }

    std::uint64_t u64(const std::string& name, std::uint64_t fallback) const {
        const auto it = inv_.values.find(name);
        if (it == inv_.values.end()) return fallback;
        try {
            return std::stoull(it->second);
        } catch (...) {
            throw PreconditionError("flag --" + name + ": expected an integer, got '" +
                                    it->second + "'");
        }
    }

    double real(const std::string& name, double fallback) const {
        const auto it = inv_.values.find(name);
        if (it == inv_.values.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (...) {
            throw PreconditionError("flag --" + name + ": expected a number, got '" + it->second +
                                    "'");
        }
    }

    std::uint64_t seed() const { return u64("seed", 1); }
    int threads() const { return static_cast<int>(u64("threads", 0)); }

    std::vector<std::uint64_t> t_grid() const {
        std::vector<std::uint64_t> grid;
        std::istringstream in(str("t-grid"));
        std::string tok;
        while (std::getline(in, tok, ','))
            if (!tok.empty()) grid.push_back(std::stoull(tok));
        return grid;
    }

    std::vector<WalkPolicy> policies() const {
        std::vector<WalkPolicy> out;
        std::istringstream in(str("policy", "min_degree"));
        std::string tok;
        while (std::getline(in, tok, ','))
            if (!tok.empty()) out.push_back(parse_policy(tok));
        if (out.empty()) out.push_back(WalkPolicy::min_degree);
        return out;
    }

    // "n=1000,c=2,seed=1"
    GnpParams gnp_spec() const {
        GnpParams params;
        params.seed = seed();
        std::istringstream in(str("gnp"));
        std::string tok;
        while (std::getline(in, tok, ',')) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw PreconditionError("--gnp expects k=v pairs, got '" + tok + "'");
            const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
            if (key == "n") params.n = static_cast<Vertex>(std::stoull(value));
            else if (key == "c") params.c = std::stod(value);
            else if (key == "seed") params.seed = std::stoull(value);
            else throw PreconditionError("--gnp: unknown key '" + key + "'");
        }
        if (params.n == 0) params.n = static_cast<Vertex>(u64("n", 0));
        if (params.c == 0.0) params.c = real("c", 0.0);
        return params;
    }

    // Materializes the graph source and records it in the resolved config.
    Graph graph(json& resolved) const {
        if (has("in")) {
            resolved["in"] = str("in");
            return load_edge_list(str("in"));
        }
        if (has("gnp")) {
            GnpParams params = gnp_spec();
            resolved["gnp"] = {{"n", params.n}, {"c", params.c}, {"seed", params.seed}};
            return gnp_sample(params);
        }
        if (has("kind")) {
            const GraphKind kind = parse_graph_kind(str("kind"));
            const Vertex n = static_cast<Vertex>(u64("n", 0));
            resolved["kind"] = graph_kind_name(kind);
            resolved["n"] = n;
            return structured_graph(kind, n);
        }
        throw PreconditionError("no graph source: use --in, --gnp, or --kind with --n");
    }

    void print_resolved(json resolved) const {
        resolved["subcommand"] = inv_.subcommand;
        resolved["seed"] = seed();
        if (generated_seed_) out_ << "seed " << seed() << " (generated)\n";
        out_ << "config " << resolved.dump() << "\n";
    }

    const std::string& subcommand() const { return inv_.subcommand; }

  private:
    Invocation inv_;
    std::ostream& out_;
    bool generated_seed_ = false;
};

void atomic_write(const std::string& path, const std::string& content) {
    if (path.empty()) return;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw PreconditionError("cannot open for writing: " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void write_outputs(const Options& opt, const json& report, const std::string& csv = "") {
    if (opt.has("json")) atomic_write(opt.str("json"), report.dump(2) + "\n");
    if (opt.has("csv") && !csv.empty()) atomic_write(opt.str("csv"), csv);
}

json policy_json(const std::vector<WalkPolicy>& policies) {
    json j = json::array();
    for (WalkPolicy p : policies) j.push_back(policy_name(p));
    return j;
}

int cmd_gen(const Options& opt, std::ostream& out) {
    json resolved;
    if (!opt.has("out")) throw PreconditionError("gen: --out is required");
    resolved["out"] = opt.str("out");
    Graph g = opt.graph(resolved);
    opt.print_resolved(resolved);
    std::ostringstream text;
    save_edge_list(g, text);
    atomic_write(opt.str("out"), text.str());
    out << "wrote " << g.num_vertices() << " vertices, " << g.num_edges() << " edges to "
        << opt.str("out") << "\n";
    return 0;
}

int cmd_audit(const Options& opt, std::ostream& out) {
    json resolved;
    Graph g = opt.graph(resolved);
    double c = opt.real("c", 0.0);
    if (opt.has("gnp") && c == 0.0) c = opt.gnp_spec().c;
    if (c <= 0.0) throw PreconditionError("audit: --c is required for this graph source");
    const double eps = opt.real("eps", 0.3);
    const std::uint64_t budget = opt.u64("budget", 10000);
    resolved["eps"] = eps;
    resolved["c"] = c;
    resolved["budget"] = budget;
    opt.print_resolved(resolved);
    const TypicalityReport report = audit(g, eps, c, budget, opt.seed(), opt.threads());
    write_outputs(opt, typicality_to_json(report));
    out << "audit " << (report.passed_all() ? "pass" : "fail") << " (a-g "
        << (report.passed_exact() ? "pass" : "fail") << ", h/i "
        << (report.passed_sampled() ? "pass" : "fail") << ")\n";
    return 0;
}

int cmd_stationary(const Options& opt, std::ostream& out) {
    json resolved;
    Graph g = opt.graph(resolved);
    const WalkPolicy policy = opt.policies().front();
    resolved["policy"] = policy_name(policy);
    opt.print_resolved(resolved);
    const StationaryDist sd = stationary(g, policy);
    json report;
    report["pi"] = std::vector<double>(sd.pi.data(), sd.pi.data() + sd.pi.size());
    report["psi_sum"] = sd.psi_sum;
    std::ostringstream csv;
    csv << "v,pi\n";
    for (Vertex v = 0; v < g.num_vertices(); ++v) csv << v << ',' << sd.pi[v] << '\n';
    write_outputs(opt, report, csv.str());
    out << "pi computed for " << g.num_vertices() << " vertices (sum psi = " << sd.psi_sum
        << ")\n";
    return 0;
}

int cmd_mix(const Options& opt, std::ostream& out) {
    json resolved;
    Graph g = opt.graph(resolved);
    const WalkPolicy policy = opt.policies().front();
    const double eps = opt.real("eps", 0.3);
    resolved["policy"] = policy_name(policy);
    resolved["eps"] = eps;
    opt.print_resolved(resolved);

    const ConductanceMode mode =
        g.num_vertices() <= 20 ? ConductanceMode::exhaustive : ConductanceMode::sampled;
    SpectralReport report = spectral_report(g, policy, mode, opt.t_grid(), 0, eps, 1000,
                                            opt.seed());
    MixingResult mixing = empirical_mixing_time(g, policy);
    json j;
    j["lambda2"] = report.lambda2;
    j["phi"] = report.phi;
    j["phi_mode"] = report.phi_mode == ConductanceMode::exhaustive ? "exhaustive" : "sampled";
    j["phi_upper_bound_only"] = report.phi_upper_bound_only;
    j["cheeger_ok"] = report.cheeger_ok;
    j["periodic"] = report.periodic;
    j["mixing_steps"] = mixing.steps;
    j["mixing_reached"] = mixing.reached;
    j["mixing_threshold"] = mixing.threshold;
    j["b1"] = report.b1;
    j["b2"] = report.b2;
    j["L"] = report.paper_L;
    json curve = json::array();
    for (const auto& [t, d] : report.tv_curve) curve.push_back({{"t", t}, {"dev", d}});
    j["tv_curve"] = curve;
    write_outputs(opt, j);
    out << "lambda2 " << report.lambda2 << ", phi " << report.phi << ", mixing "
        << mixing.steps << (mixing.reached ? "" : " (cap, not reached)")
        << (report.periodic ? " [periodic]" : "") << "\n";
    return 0;
}

int cmd_returns(const Options& opt, std::ostream& out) {
    json resolved;
    Graph g = opt.graph(resolved);
    const WalkPolicy policy = opt.policies().front();
    const Vertex v = static_cast<Vertex>(opt.u64("v", 0));
    std::uint64_t horizon = opt.u64("T", 0);
    if (horizon == 0) {
        MixingResult mixing = empirical_mixing_time(g, policy);
        horizon = mixing.reached ? std::max<std::uint64_t>(2, mixing.steps) : mixing.cap;
    }
    ReturnProfileOptions options;
    options.k_constant = opt.real("K", 0.0);
    options.seed = opt.seed();
    options.threads = opt.threads();
    if (!opt.has("exact")) {
        if (opt.has("replicas")) options.monte_carlo_replicas = opt.u64("replicas", 10000);
        else if (g.num_vertices() > kDenseLimit) options.monte_carlo_replicas = 10000;
    }
    resolved["policy"] = policy_name(policy);
    resolved["v"] = v;
    resolved["T"] = horizon;
    resolved["exact"] = !options.monte_carlo_replicas.has_value();
    opt.print_resolved(resolved);

    const ReturnProfile profile = return_profile(g, policy, v, horizon, options);
    json j;
    j["vertex"] = profile.vertex;
    j["T"] = profile.horizon;
    j["r"] = profile.r;
    j["R1"] = profile.r1;
    j["min_modulus"] = profile.min_modulus;
    j["K"] = profile.k_constant;
    j["theta"] = profile.theta;
    j["theta_ok"] = profile.theta_ok;
    j["exact"] = profile.exact;
    j["grid"] = {{"angles", profile.grid_angles}, {"radii", profile.grid_radii}};
    write_outputs(opt, j);
    out << "R(T,1) = " << profile.r1 << ", min |R(T,z)| = " << profile.min_modulus
        << (profile.theta_ok ? " (>= 1/4)" : " (< 1/4)") << "\n";
    return 0;
}

int cmd_cover(const Options& opt, std::ostream& out) {
    json resolved;
    Graph g = opt.graph(resolved);
    const WalkPolicy policy = opt.policies().front();
    const std::uint64_t replicas = opt.u64("replicas", 100);
    const double cap_mult = opt.real("cap-mult", 200.0);
    const StartRule rule = parse_start_rule(opt.str("start-rule", "fixed"));
    const Vertex start = static_cast<Vertex>(opt.u64("start", 0));
    resolved["policy"] = policy_name(policy);
    resolved["replicas"] = replicas;
    resolved["cap_mult"] = cap_mult;
    resolved["start"] = start;
    resolved["start_rule"] = rule == StartRule::fixed ? "fixed" : "worst-of-sampled";
    opt.print_resolved(resolved);

    const CoverStats stats =
        estimate_cover_time(g, policy, replicas, rule, start, opt.seed(), cap_mult, opt.threads());
    json j;
    j["mean"] = stats.mean;
    j["stddev"] = stats.stddev;
    j["min"] = stats.min;
    j["max"] = stats.max;
    j["replicas"] = stats.replicas;
    j["censored"] = stats.censored_count;
    j["cap"] = stats.cap;
    j["start_vertex"] = stats.start_vertex;
    j["times"] = stats.times;
    std::ostringstream csv;
    csv << "replica,steps,censored\n";
    for (std::uint64_t i = 0; i < stats.replicas; ++i)
        csv << i << ',' << stats.times[i] << ',' << int(stats.censored[i]) << '\n';
    write_outputs(opt, j, csv.str());
    out << "mean cover " << stats.mean << " +- " << stats.stddev << " over " << stats.replicas
        << " replicas (censored " << stats.censored_count << ")\n";
    return 0;
}

ExperimentConfig base_config(const Options& opt, json& resolved) {
    ExperimentConfig config;
    config.experiment = opt.subcommand();
    if (opt.has("in")) config.input_path = opt.str("in");
    else if (opt.has("gnp")) config.gnp = opt.gnp_spec();
    else if (opt.has("kind")) {
        config.kind = parse_graph_kind(opt.str("kind"));
        config.n = static_cast<Vertex>(opt.u64("n", 0));
    }
    config.policies = opt.policies();
    config.replicas = opt.u64("replicas", 100);
    config.t_grid = opt.t_grid();
    config.seed = opt.seed();
    config.cap_mult = opt.real("cap-mult", 200.0);
    config.horizon = opt.u64("T", 0);
    config.k_constant = opt.real("K", 0.0);
    config.eps = opt.real("eps", 0.3);
    config.delta = opt.real("delta", -1.0);
    config.sample_budget = opt.u64("budget", 10000);
    config.graphs_per_point = static_cast<Vertex>(opt.u64("graphs", 1));
    config.sample_vertices = static_cast<Vertex>(opt.u64("vertices", 50));
    config.pair_count = static_cast<Vertex>(opt.u64("pairs", 20));
    config.start = static_cast<Vertex>(opt.u64("start", 0));
    config.threads = opt.threads();
    resolved = config.to_json();
    return config;
}

int cmd_compare(const Options& opt, std::ostream& out) {
    json resolved;
    ExperimentConfig config = base_config(opt, resolved);
    opt.print_resolved(resolved);
    const PolicyComparisonOutput result = policy_comparison(config);
    json j;
    j["policies"] = policy_json(result.policies);
    j["means"] = result.means;
    j["stddevs"] = result.stddevs;
    j["paired_diff_vs_first"] = result.paired_diff_mean;
    j["radzik_floor"] = result.radzik_floor;
    j["radzik_ok"] = result.radzik_ok;
    j["config_hash"] = config.config_hash();
    write_outputs(opt, j, policy_comparison_csv(result));
    for (std::size_t pi = 0; pi < result.policies.size(); ++pi)
        out << policy_name(result.policies[pi]) << " mean " << result.means[pi] << "\n";
    return 0;
}

int cmd_firstvisit(const Options& opt, std::ostream& out) {
    json resolved;
    ExperimentConfig config = base_config(opt, resolved);
    opt.print_resolved(resolved);
    const FirstVisitOutput result = first_visit_experiment(config);
    json j;
    j["T"] = result.mixing_horizon;
    j["start"] = result.start;
    j["max_abs_error"] = result.max_abs_error;
    j["config_hash"] = config.config_hash();
    json rows = json::array();
    for (const auto& r : result.rows)
        rows.push_back({{"v", r.v},
                        {"t", r.t},
                        {"empirical", r.empirical},
                        {"predicted", r.predicted},
                        {"abs_error", r.abs_error},
                        {"pi_v", r.pi_v},
                        {"r_v", r.r_v}});
    j["rows"] = rows;
    write_outputs(opt, j, first_visit_csv(result));
    out << "max |empirical - predicted| = " << result.max_abs_error << " over "
        << result.rows.size() << " rows (T = " << result.mixing_horizon << ")\n";
    return 0;
}

int cmd_contract(const Options& opt, std::ostream& out) {
    json resolved;
    ExperimentConfig config = base_config(opt, resolved);
    opt.print_resolved(resolved);

    ContractionOutput result;
    if (opt.has("u") && opt.has("v")) {
        Graph g = make_graph(config);
        std::vector<std::uint64_t> grid = config.t_grid;
        if (grid.empty()) grid = {1, 2, 5, 10, 20, 50};
        result.horizon = config.horizon ? config.horizon : 16;
        result.rows.push_back(contraction_check_pair(
            g, config.policies.front(), static_cast<Vertex>(opt.u64("u", 0)),
            static_cast<Vertex>(opt.u64("v", 0)), grid, result.horizon));
        result.evaluated = 1;
    } else {
        result = contraction_experiment(config);
    }
    json j;
    j["T"] = result.horizon;
    j["evaluated"] = result.evaluated;
    j["config_hash"] = config.config_hash();
    json rows = json::array();
    for (const auto& r : result.rows)
        rows.push_back({{"u", r.u},
                        {"v", r.v},
                        {"admissible", r.admissible},
                        {"p3", r.p3_ok},
                        {"max_avoidance_residual", r.max_avoidance_residual},
                        {"pi_residual", r.pi_residual},
                        {"r_residual", r.r_residual},
                        {"skip_reason", r.skip_reason}});
    j["rows"] = rows;
    write_outputs(opt, j, contraction_csv(result));
    double worst = 0.0;
    for (const auto& r : result.rows) worst = std::max(worst, r.max_avoidance_residual);
    out << result.evaluated << " pairs checked, worst avoidance residual " << worst << "\n";
    return 0;
}

int cmd_lowerbound(const Options& opt, std::ostream& out) {
    json resolved;
    ExperimentConfig config = base_config(opt, resolved);
    if (!config.gnp) {
        GnpParams params;
        params.n = static_cast<Vertex>(opt.u64("n", 0));
        params.c = opt.real("c", 0.0);
        params.seed = opt.seed();
        if (params.n && params.c > 0) config.gnp = params;
    }
    opt.print_resolved(resolved);
    const LowerBoundSets sets = lower_bound_experiment(config);
    json j = lower_bound_to_json(sets);
    j["config_hash"] = config.config_hash();
    write_outputs(opt, j);
    out << "|S0| = " << sets.s0.size() << " (threshold " << sets.claim_threshold
        << "), |S1| = " << sets.s1.size() << ", |S| = " << sets.s.size() << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        Invocation inv = parse_args(args);
        Options opt(std::move(inv), out);
        const std::string& cmd = opt.subcommand();
        if (cmd == "gen") return cmd_gen(opt, out);
        if (cmd == "audit") return cmd_audit(opt, out);
        if (cmd == "stationary") return cmd_stationary(opt, out);
        if (cmd == "mix") return cmd_mix(opt, out);
        if (cmd == "returns") return cmd_returns(opt, out);
        if (cmd == "cover") return cmd_cover(opt, out);
        if (cmd == "compare") return cmd_compare(opt, out);
        if (cmd == "firstvisit") return cmd_firstvisit(opt, out);
        if (cmd == "contract") return cmd_contract(opt, out);
        if (cmd == "lowerbound") return cmd_lowerbound(opt, out);
        throw PreconditionError("unknown subcommand: " + cmd);
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace walklab
