#include "walklab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "walklab/parallel.hpp"
#include "walklab/typicality.hpp"

namespace walklab {

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

double radzik_floor_for(Vertex n) {
    return (static_cast<double>(n) / 4.0) * std::log(static_cast<double>(n) / 2.0);
}

struct Moments {
    double mean = 0.0, stddev = 0.0;
    std::uint64_t count = 0;
};

Moments moments_of(const std::vector<double>& values) {
    Moments m;
    m.count = values.size();
    if (values.empty()) return m;
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - m.mean) * (v - m.mean);
        m.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
    }
    return m;
}

std::uint64_t resolve_horizon(const ExperimentConfig& config, const Graph& g) {
    if (config.horizon > 0) return config.horizon;
    if (g.num_vertices() <= kDenseLimit) {
        auto mix = empirical_mixing_time(g, config.policies.front());
        if (mix.reached) return std::max<std::uint64_t>(2, mix.steps);
        return mix.cap;
    }
    return static_cast<std::uint64_t>(
        std::ceil(10.0 * std::log(static_cast<double>(g.num_vertices()))));
}

} // namespace

void ExperimentConfig::validate() const {
    if (replicas < 1) throw PreconditionError("config: replicas must be >= 1");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1])
            throw PreconditionError("config: t grid must be strictly increasing");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw PreconditionError("config: n grid must be ascending");
    if (policies.empty()) throw PreconditionError("config: at least one policy required");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    if (gnp) j["gnp"] = {{"n", gnp->n}, {"c", gnp->c}, {"seed", gnp->seed}};
    if (kind) j["kind"] = graph_kind_name(*kind);
    if (n) j["n"] = n;
    if (!input_path.empty()) j["in"] = input_path;
    std::vector<std::string> pol;
    for (WalkPolicy p : policies) pol.push_back(policy_name(p));
    j["policy"] = pol;
    j["replicas"] = replicas;
    if (!t_grid.empty()) j["t_grid"] = t_grid;
    if (!n_grid.empty()) j["n_grid"] = n_grid;
    j["graphs"] = graphs_per_point;
    j["sample_vertices"] = sample_vertices;
    j["pairs"] = pair_count;
    j["eps"] = eps;
    j["delta"] = resolved_delta();
    j["seed"] = seed;
    j["cap_mult"] = cap_mult;
    j["T"] = horizon;
    j["K"] = k_constant;
    j["budget"] = sample_budget;
    j["start"] = start;
    j["start_rule"] = start_rule == StartRule::fixed ? "fixed" : "worst-of-sampled";
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    config.experiment = j.value("experiment", "");
    if (j.contains("gnp")) {
        GnpParams params;
        params.n = j["gnp"].value("n", 0u);
        params.c = j["gnp"].value("c", 0.0);
        params.seed = j["gnp"].value("seed", 0ull);
        config.gnp = params;
    }
    if (j.contains("kind")) config.kind = parse_graph_kind(j["kind"].get<std::string>());
    config.n = j.value("n", 0u);
    config.input_path = j.value("in", "");
    if (j.contains("policy")) {
        config.policies.clear();
        if (j["policy"].is_string()) {
            config.policies.push_back(parse_policy(j["policy"].get<std::string>()));
        } else {
            for (const auto& p : j["policy"])
                config.policies.push_back(parse_policy(p.get<std::string>()));
        }
    }
    config.replicas = j.value("replicas", 1ull);
    if (j.contains("t_grid")) config.t_grid = j["t_grid"].get<std::vector<std::uint64_t>>();
    if (j.contains("n_grid")) config.n_grid = j["n_grid"].get<std::vector<Vertex>>();
    config.graphs_per_point = j.value("graphs", 10u);
    config.sample_vertices = j.value("sample_vertices", 50u);
    config.pair_count = j.value("pairs", 20u);
    config.eps = j.value("eps", 0.3);
    config.delta = j.value("delta", -1.0);
    config.seed = j.value("seed", 1ull);
    config.cap_mult = j.value("cap_mult", 200.0);
    config.horizon = j.value("T", 0ull);
    config.k_constant = j.value("K", 0.0);
    config.sample_budget = j.value("budget", 10000ull);
    config.start = j.value("start", 0u);
    if (j.contains("start_rule"))
        config.start_rule = parse_start_rule(j["start_rule"].get<std::string>());
    config.threads = j.value("threads", 0);
    return config;
}

std::string ExperimentConfig::config_hash() const { return hex64(fnv1a(to_json().dump())); }

Graph make_graph(const ExperimentConfig& config) {
    int sources = (config.gnp ? 1 : 0) + (config.kind ? 1 : 0) + (config.input_path.empty() ? 0 : 1);
    if (sources != 1)
        throw PreconditionError("config: exactly one graph source (gnp, kind, or input) required");
    if (config.gnp) return gnp_sample(*config.gnp);
    if (config.kind) return structured_graph(*config.kind, config.n);
    return load_edge_list(config.input_path);
}

GraphDraw draw_connected_gnp(Vertex n, double c, std::uint64_t master_seed,
                             std::uint64_t graph_index) {
    const std::uint64_t base = Rng::mix(master_seed ^ (0x6E6Eull * n + 0x1234ull));
    for (Vertex attempt = 0; attempt < 10; ++attempt) {
        const std::uint64_t seed = Rng::stream(base, graph_index * 16 + attempt).next_u64();
        GnpParams params{n, c, seed};
        Graph g = gnp_sample(params);
        if (is_connected(g)) return {std::move(g), seed, static_cast<Vertex>(attempt + 1)};
    }
    throw PreconditionError("draw_connected_gnp: 10 consecutive disconnected samples at n=" +
                            std::to_string(n));
}

nlohmann::json ResultRecord::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    j["engine_version"] = engine_version;
    j["config"] = config;
    j["measurements"] = measurements;
    j["aggregates"] = aggregates;
    j["content_hash"] = content_hash();
    j["meta"] = {{"wall_clock_seconds", wall_clock_seconds}};
    return j;
}

std::string ResultRecord::content_hash() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    j["engine_version"] = engine_version;
    j["config"] = config;
    j["measurements"] = measurements;
    j["aggregates"] = aggregates;
    return hex64(fnv1a(j.dump()));
}

void append_jsonl(const ResultRecord& record, const std::string& path) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw PreconditionError("cannot open for append: " + path);
    out << record.to_json().dump() << '\n';
}

// ---- cover_scaling ---------------------------------------------------------

CoverScalingOutput cover_scaling(const ExperimentConfig& config) {
    config.validate();
    if (config.n_grid.empty()) throw PreconditionError("cover_scaling: n grid required");
    const WalkPolicy policy = config.policies.front();
    const bool use_gnp = config.gnp.has_value();
    const double c = use_gnp ? config.gnp->c : 0.0;

    CoverScalingOutput output;
    for (Vertex n : config.n_grid) {
        CoverScalingRow row;
        row.n = n;
        row.c = c;
        std::vector<double> all_times;
        std::uint64_t capped = 0, total = 0;
        for (Vertex gi = 0; gi < config.graphs_per_point; ++gi) {
            Graph g = [&] {
                if (use_gnp) {
                    GraphDraw draw = draw_connected_gnp(n, c, config.seed, gi);
                    row.disconnected_skipped += draw.attempts - 1;
                    return std::move(draw.graph);
                }
                return structured_graph(config.kind.value_or(GraphKind::complete), n);
            }();
            const std::uint64_t graph_seed = Rng::stream(config.seed, (std::uint64_t(n) << 20) + gi).next_u64();
            CoverStats stats = estimate_cover_time(g, policy, config.replicas, StartRule::fixed,
                                                   config.start, graph_seed, config.cap_mult,
                                                   config.threads);
            for (std::uint64_t i = 0; i < stats.replicas; ++i) {
                ++total;
                if (stats.censored[i]) ++capped;
                else all_times.push_back(static_cast<double>(stats.times[i]));
            }
            ++row.graphs_used;
        }
        const Moments m = moments_of(all_times);
        row.mean_cover = m.mean;
        row.stddev = m.stddev;
        row.ratio = m.mean / (static_cast<double>(n) * std::log(static_cast<double>(n)));
        row.radzik_floor = radzik_floor_for(n);
        row.radzik_ok = row.mean_cover > row.radzik_floor;
        row.capped_fraction = total ? static_cast<double>(capped) / static_cast<double>(total) : 0.0;
        row.flagged = row.capped_fraction > 0.10;
        output.rows.push_back(row);
    }
    for (std::size_t i = 1; i < output.rows.size(); ++i)
        if (output.rows[i].ratio > output.rows[i - 1].ratio) output.ratios_non_increasing = false;
    return output;
}

std::string cover_scaling_csv(const CoverScalingOutput& output) {
    std::ostringstream out;
    out << "n,c,graphs,disconnected_skipped,mean_cover,stddev,ratio,radzik_floor,radzik_ok,"
           "capped_fraction,flagged\n";
    for (const auto& r : output.rows)
        out << r.n << ',' << r.c << ',' << r.graphs_used << ',' << r.disconnected_skipped << ','
            << r.mean_cover << ',' << r.stddev << ',' << r.ratio << ',' << r.radzik_floor << ','
            << (r.radzik_ok ? 1 : 0) << ',' << r.capped_fraction << ',' << (r.flagged ? 1 : 0)
            << '\n';
    return out.str();
}

// ---- policy_comparison -----------------------------------------------------

PolicyComparisonOutput policy_comparison(const ExperimentConfig& config) {
    config.validate();
    if (config.policies.size() < 2)
        throw PreconditionError("policy_comparison: at least two policies required");

    PolicyComparisonOutput output;
    output.policies = config.policies;
    output.replicas = config.replicas;
    output.gnp_source = config.gnp.has_value();

    std::vector<Graph> graphs;
    std::vector<std::uint64_t> graph_seeds;
    if (config.gnp) {
        for (Vertex gi = 0; gi < config.graphs_per_point; ++gi) {
            GraphDraw draw = draw_connected_gnp(config.gnp->n, config.gnp->c, config.seed, gi);
            graphs.push_back(std::move(draw.graph));
            graph_seeds.push_back(Rng::stream(config.seed, 0xC0FFEEull + gi).next_u64());
        }
    } else {
        graphs.push_back(make_graph(config));
        graph_seeds.push_back(Rng::stream(config.seed, 0xC0FFEEull).next_u64());
    }
    output.graphs = static_cast<Vertex>(graphs.size());

    double n_for_radzik = 0.0;
    output.cover_times.assign(config.policies.size(), {});
    for (std::size_t pi = 0; pi < config.policies.size(); ++pi) {
        for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
            // identical (graph, replica) seeds across policies: paired design
            CoverStats stats =
                estimate_cover_time(graphs[gi], config.policies[pi], config.replicas,
                                    StartRule::fixed, config.start, graph_seeds[gi],
                                    config.cap_mult, config.threads);
            for (std::uint64_t r = 0; r < stats.replicas; ++r)
                output.cover_times[pi].push_back(static_cast<double>(stats.times[r]));
        }
        const Moments m = moments_of(output.cover_times[pi]);
        output.means.push_back(m.mean);
        output.stddevs.push_back(m.stddev);
        n_for_radzik = static_cast<double>(graphs.front().num_vertices());
    }
    output.paired_diff_mean.assign(config.policies.size(), 0.0);
    for (std::size_t pi = 1; pi < config.policies.size(); ++pi) {
        double acc = 0.0;
        for (std::size_t i = 0; i < output.cover_times[pi].size(); ++i)
            acc += output.cover_times[pi][i] - output.cover_times[0][i];
        output.paired_diff_mean[pi] = acc / static_cast<double>(output.cover_times[pi].size());
    }
    output.radzik_floor = radzik_floor_for(static_cast<Vertex>(n_for_radzik));
    if (output.gnp_source)
        for (double mean : output.means)
            if (mean <= output.radzik_floor) output.radzik_ok = false;
    return output;
}

std::string policy_comparison_csv(const PolicyComparisonOutput& output) {
    std::ostringstream out;
    out << "policy,mean_cover,stddev,paired_diff_vs_first\n";
    for (std::size_t pi = 0; pi < output.policies.size(); ++pi)
        out << policy_name(output.policies[pi]) << ',' << output.means[pi] << ','
            << output.stddevs[pi] << ',' << output.paired_diff_mean[pi] << '\n';
    return out.str();
}

// ---- first_visit -----------------------------------------------------------

FirstVisitOutput first_visit_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.t_grid.empty()) throw PreconditionError("first_visit: t grid required");
    Graph g = make_graph(config);
    const Vertex n = g.num_vertices();
    const WalkPolicy policy = config.policies.front();

    FirstVisitOutput output;
    output.mixing_horizon = resolve_horizon(config, g);
    if (config.t_grid.front() <= output.mixing_horizon)
        throw PreconditionError("first_visit: t grid must exceed the mixing horizon T=" +
                                std::to_string(output.mixing_horizon));

    // sampled targets plus a deterministic start outside the target set
    Rng pick = Rng::stream(config.seed, 0xFADEull);
    std::vector<Vertex> targets;
    std::vector<char> chosen(n, 0);
    const Vertex want = std::min<Vertex>(config.sample_vertices, n - 1);
    while (targets.size() < want) {
        Vertex v = static_cast<Vertex>(pick.next_below(n));
        if (!chosen[v]) {
            chosen[v] = 1;
            targets.push_back(v);
        }
    }
    Vertex start = 0;
    for (Vertex v = 0; v < n; ++v)
        if (!chosen[v] && (chosen[start] || g.degree(v) > g.degree(start))) start = v;
    output.start = start;

    const auto empirical = first_visit_tail_batch(g, policy, start, targets,
                                                  output.mixing_horizon, config.t_grid,
                                                  config.replicas, config.seed, config.threads);

    const StationaryDist sd = stationary(g, policy);
    std::vector<double> r_values(targets.size(), 0.0);
    ReturnProfileOptions profile_options;
    profile_options.grid_angles = 8; // R_v only; coarse grid keeps this cheap
    profile_options.grid_radii = 2;
    if (n > kDenseLimit) {
        profile_options.monte_carlo_replicas = 4000;
        profile_options.seed = config.seed ^ 0xF00Dull;
    }
    parallel_for(targets.size(), config.threads, [&](std::uint64_t k) {
        r_values[k] =
            return_profile(g, policy, targets[k], output.mixing_horizon, profile_options).r1;
    });

    for (std::size_t k = 0; k < targets.size(); ++k)
        for (std::size_t ti = 0; ti < config.t_grid.size(); ++ti) {
            FirstVisitRow row;
            row.v = targets[k];
            row.t = config.t_grid[ti];
            row.pi_v = sd.pi[targets[k]];
            row.r_v = r_values[k];
            row.empirical = empirical[k][ti];
            row.predicted =
                first_visit_prediction(row.pi_v, row.r_v, static_cast<double>(row.t));
            row.abs_error = std::abs(row.empirical - row.predicted);
            output.max_abs_error = std::max(output.max_abs_error, row.abs_error);
            output.rows.push_back(row);
        }
    return output;
}

std::string first_visit_csv(const FirstVisitOutput& output) {
    std::ostringstream out;
    out << "v,t,empirical,predicted,abs_error,pi_v,r_v\n";
    for (const auto& r : output.rows)
        out << r.v << ',' << r.t << ',' << r.empirical << ',' << r.predicted << ','
            << r.abs_error << ',' << r.pi_v << ',' << r.r_v << '\n';
    return out.str();
}

// ---- contraction -----------------------------------------------------------

namespace {

bool p3_at(const Graph& g, Vertex v) {
    for (Vertex w : g.neighbors(v))
        if (g.degree(w) > g.degree(v)) return false;
    return true;
}

} // namespace

ContractionRow contraction_check_pair(const Graph& g, WalkPolicy policy, Vertex u, Vertex v,
                                      const std::vector<std::uint64_t>& t_grid,
                                      std::uint64_t horizon) {
    ContractionRow row;
    row.u = u;
    row.v = v;
    row.admissible = contraction_admissible(g, u, v);
    row.p3_ok = row.admissible && p3_at(g, u) && p3_at(g, v);
    if (!row.admissible) {
        row.skip_reason = "not contractible (adjacent or shared neighbor)";
        return row;
    }

    const ContractionResult contracted = contract_pair(g, u, v);
    const Graph& gamma = contracted.graph;

    // start vertex for the avoidance runs: lowest id outside {u, v}
    Vertex w = 0;
    while (w == u || w == v) ++w;
    const Vertex w_mapped = contracted.old_to_new[w];
    const std::vector<Vertex> avoid_g{u, v};
    const std::vector<Vertex> avoid_gamma{contracted.z};
    for (std::uint64_t t : t_grid) {
        const double in_g = exact_avoidance(g, policy, w, avoid_g, t);
        const double in_gamma = exact_avoidance(gamma, policy, w_mapped, avoid_gamma, t);
        row.max_avoidance_residual =
            std::max(row.max_avoidance_residual, std::abs(in_g - in_gamma));
    }

    const StationaryDist pi_g = stationary(g, policy);
    const StationaryDist pi_gamma = stationary(gamma, policy);
    row.pi_residual = std::abs(pi_gamma.pi[contracted.z] - (pi_g.pi[u] + pi_g.pi[v]));

    if (horizon >= 2) {
        const double r_u = return_profile(g, policy, u, horizon).r1;
        const double r_v = return_profile(g, policy, v, horizon).r1;
        const double r_z = return_profile(gamma, policy, contracted.z, horizon).r1;
        row.r_residual = std::abs(r_z - 0.5 * (r_u + r_v));
    }
    return row;
}

ContractionOutput contraction_experiment(const ExperimentConfig& config) {
    config.validate();
    Graph g = make_graph(config);
    const Vertex n = g.num_vertices();
    if (n > kDenseLimit)
        throw InfeasibleError("contraction_experiment: exact checks need n <= " +
                              std::to_string(kDenseLimit));
    const WalkPolicy policy = config.policies.front();
    std::vector<std::uint64_t> t_grid = config.t_grid;
    if (t_grid.empty()) t_grid = {1, 2, 5, 10, 20, 50};

    ContractionOutput output;
    output.horizon = resolve_horizon(config, g);

    Rng rng = Rng::stream(config.seed, 0xC02ull);
    std::size_t attempts = 0;
    const std::size_t attempt_cap = 400ull * config.pair_count;
    while (output.evaluated < config.pair_count && attempts < attempt_cap) {
        ++attempts;
        const Vertex u = static_cast<Vertex>(rng.next_below(n));
        const Vertex v = static_cast<Vertex>(rng.next_below(n));
        if (u == v) continue;
        if (!contraction_admissible(g, u, v) || !p3_at(g, u) || !p3_at(g, v)) continue;
        output.rows.push_back(contraction_check_pair(g, policy, u, v, t_grid, output.horizon));
        ++output.evaluated;
    }
    return output;
}

std::string contraction_csv(const ContractionOutput& output) {
    std::ostringstream out;
    out << "u,v,admissible,p3,max_avoidance_residual,pi_residual,r_residual,skip_reason\n";
    for (const auto& r : output.rows)
        out << r.u << ',' << r.v << ',' << (r.admissible ? 1 : 0) << ',' << (r.p3_ok ? 1 : 0)
            << ',' << r.max_avoidance_residual << ',' << r.pi_residual << ',' << r.r_residual
            << ',' << r.skip_reason << '\n';
    return out.str();
}

// ---- lower bound -----------------------------------------------------------

LowerBoundPredicates lower_bound_predicates(const Graph& g, const VertexClassification& classes,
                                            double np, double eps, Vertex v) {
    LowerBoundPredicates p;
    const double lo = (1.0 - eps) * np, hi = (1.0 + eps) * np;
    auto in_interval = [&](Vertex x) {
        const double d = g.degree(x);
        return d >= lo && d <= hi;
    };
    p.p1 = in_interval(v);
    p.p2 = true;
    for (Vertex x : ball(g, v, 2))
        if (!in_interval(x)) {
            p.p2 = false;
            break;
        }
    p.p3 = p3_at(g, v);
    p.p4 = classes.labels[v] == VertexClass::b_class;
    return p;
}

LowerBoundSets lower_bound_experiment(const ExperimentConfig& config) {
    config.validate();
    if (!config.gnp)
        throw PreconditionError("lower_bound: requires a gnp graph source (np = c log n)");
    GraphDraw draw = draw_connected_gnp(config.gnp->n, config.gnp->c, config.seed, 0);
    const Graph& g = draw.graph;
    const Vertex n = g.num_vertices();
    const double nd = static_cast<double>(n);
    const double logn = std::log(nd);
    const double np = config.gnp->c * logn;
    const WalkPolicy policy = config.policies.front();

    const TypicalityReport report =
        audit(g, config.eps, config.gnp->c, config.sample_budget, config.seed, config.threads);
    if (!report.passed_exact()) {
        std::string failing;
        for (char id = 'a'; id <= 'g'; ++id)
            if (!report.condition(id).pass) failing += id;
        throw PreconditionError("lower_bound: typicality audit failed conditions (" + failing +
                                ")");
    }

    LowerBoundSets sets;
    sets.claim_threshold = nd / (5.0 * np);
    const VertexClassification classes = classify_vertices(g, np);
    for (Vertex v = 0; v < n; ++v)
        if (lower_bound_predicates(g, classes, np, config.eps, v).all()) sets.s0.push_back(v);
    if (sets.s0.empty())
        throw PreconditionError(
            "lower_bound: S0 is empty (P1-P4 left no vertices; audit passed a-g with b_size=" +
            std::to_string(report.b_size) + " of n=" + std::to_string(n) +
            "); widen eps or raise n");

    // measured R_v for the S0 candidates
    sets.horizon = config.horizon > 0
                       ? config.horizon
                       : (n <= kDenseLimit
                              ? resolve_horizon(config, g)
                              : static_cast<std::uint64_t>(std::ceil(10.0 * logn)));
    sets.r_values.assign(sets.s0.size(), 0.0);
    std::vector<double> r_se(sets.s0.size(), 0.0);
    const TransitionTable table = build_transitions(g, policy);
    const bool dense = n <= kDenseLimit;
    parallel_for(sets.s0.size(), config.threads, [&](std::uint64_t k) {
        const Vertex v = sets.s0[k];
        if (dense) {
            ReturnProfileOptions options;
            options.grid_angles = 8;
            options.grid_radii = 2;
            sets.r_values[k] = return_profile(g, policy, v, sets.horizon, options).r1;
        } else {
            const std::uint64_t reps = 4000;
            double sum = 0.0, sumsq = 0.0;
            for (std::uint64_t i = 0; i < reps; ++i) {
                Rng rng = Rng::stream(config.seed ^ (0x5052ull + v), i);
                Vertex x = v;
                std::uint64_t visits = 1;
                for (std::uint64_t t = 1; t < sets.horizon; ++t) {
                    x = table.step(x, rng);
                    if (x == v) ++visits;
                }
                sum += static_cast<double>(visits);
                sumsq += static_cast<double>(visits) * static_cast<double>(visits);
            }
            const double mean = sum / static_cast<double>(reps);
            const double var =
                std::max(0.0, (sumsq - sum * mean) / static_cast<double>(reps - 1));
            sets.r_values[k] = mean;
            r_se[k] = std::sqrt(var / static_cast<double>(reps));
        }
    });

    // S1: the fullest R_v bucket (pigeonhole step)
    double se_mean = 0.0;
    for (double se : r_se) se_mean += se;
    se_mean /= static_cast<double>(r_se.size());
    sets.bin_width = std::max(1.0 / (logn * logn), 3.0 * se_mean);
    double r_min = *std::min_element(sets.r_values.begin(), sets.r_values.end());
    std::vector<std::vector<std::size_t>> buckets;
    for (std::size_t k = 0; k < sets.s0.size(); ++k) {
        const std::size_t bi =
            static_cast<std::size_t>((sets.r_values[k] - r_min) / sets.bin_width);
        if (buckets.size() <= bi) buckets.resize(bi + 1);
        buckets[bi].push_back(k);
    }
    std::size_t best_bucket = 0;
    for (std::size_t bi = 1; bi < buckets.size(); ++bi)
        if (buckets[bi].size() > buckets[best_bucket].size()) best_bucket = bi;
    for (std::size_t k : buckets[best_bucket]) sets.s1.push_back(sets.s0[k]);

    // S: greedy 10-separated subset, descending R_v then vertex id
    std::vector<std::size_t> order = buckets[best_bucket];
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sets.r_values[a] != sets.r_values[b]) return sets.r_values[a] > sets.r_values[b];
        return sets.s0[a] < sets.s0[b];
    });
    std::vector<char> blocked(n, 0);
    for (std::size_t k : order) {
        const Vertex v = sets.s0[k];
        if (blocked[v]) continue;
        sets.s.push_back(v);
        for (Vertex x : ball(g, v, 10)) blocked[x] = 1;
    }

    sets.pairwise_separated = true;
    for (std::size_t i = 0; i < sets.s.size(); ++i)
        for (std::size_t j = i + 1; j < sets.s.size(); ++j)
            if (bfs_distance(g, sets.s[i], sets.s[j]) <= 10) sets.pairwise_separated = false;
    sets.predicates_reverified = true;
    for (Vertex v : sets.s0)
        if (!lower_bound_predicates(g, classes, np, config.eps, v).all())
            sets.predicates_reverified = false;

    // walk replicas: count S-vertices unvisited at t = (1 - delta) n ln n
    const double delta = config.resolved_delta();
    sets.t_steps = std::max(0.0, (1.0 - delta) * nd * logn);
    const std::uint64_t t_steps = static_cast<std::uint64_t>(sets.t_steps);
    std::vector<std::int32_t> s_index(n, -1);
    for (std::size_t k = 0; k < sets.s.size(); ++k) s_index[sets.s[k]] = static_cast<int>(k);
    sets.unvisited_per_replica.assign(config.replicas, 0);
    parallel_for(config.replicas, config.threads, [&](std::uint64_t i) {
        Rng rng = Rng::stream(config.seed ^ 0x10BBull, i);
        std::vector<char> visited(sets.s.size(), 0);
        Vertex x = config.start;
        if (s_index[x] >= 0) visited[s_index[x]] = 1;
        for (std::uint64_t t = 0; t < t_steps; ++t) {
            x = table.step(x, rng);
            if (s_index[x] >= 0) visited[s_index[x]] = 1;
        }
        std::uint64_t unvisited = 0;
        for (char flag : visited)
            if (!flag) ++unvisited;
        sets.unvisited_per_replica[i] = unvisited;
    });

    const StationaryDist sd = stationary(table);
    for (std::size_t k = 0; k < sets.s.size(); ++k) {
        const auto it = std::find(sets.s0.begin(), sets.s0.end(), sets.s[k]);
        const double r_v = sets.r_values[static_cast<std::size_t>(it - sets.s0.begin())];
        sets.predicted_unvisited +=
            first_visit_prediction(sd.pi[sets.s[k]], std::max(1.0, r_v), sets.t_steps);
    }
    return sets;
}

nlohmann::json lower_bound_to_json(const LowerBoundSets& sets) {
    nlohmann::json j;
    j["s0_size"] = sets.s0.size();
    j["s1_size"] = sets.s1.size();
    j["s_size"] = sets.s.size();
    j["s"] = sets.s;
    j["claim_threshold"] = sets.claim_threshold;
    j["bin_width"] = sets.bin_width;
    j["T"] = sets.horizon;
    j["t_steps"] = sets.t_steps;
    j["unvisited_per_replica"] = sets.unvisited_per_replica;
    j["predicted_unvisited"] = sets.predicted_unvisited;
    j["pairwise_separated"] = sets.pairwise_separated;
    j["predicates_reverified"] = sets.predicates_reverified;
    return j;
}

} // namespace walklab
