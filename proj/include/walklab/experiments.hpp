#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "walklab/chain.hpp"
#include "walklab/walk.hpp"

namespace walklab {

inline constexpr const char* kEngineVersion = "walklab 0.1.0";

// One experiment run, fully determined by its fields (the master seed derives
// every graph and replica stream).
struct ExperimentConfig {
    std::string experiment;

    // graph source: exactly one of gnp / kind / input_path
    std::optional<GnpParams> gnp;
    std::optional<GraphKind> kind;
    Vertex n = 0; // structured-graph size

    std::string input_path;

    std::vector<WalkPolicy> policies{WalkPolicy::min_degree};
    std::uint64_t replicas = 1;
    std::vector<std::uint64_t> t_grid;
    std::vector<Vertex> n_grid;       // cover_scaling
    Vertex graphs_per_point = 10;     // cover_scaling
    Vertex sample_vertices = 50;      // first_visit
    Vertex pair_count = 20;           // contraction
    double eps = 0.3;
    double delta = -1.0;              // < 0 resolves to 3*eps
    std::uint64_t seed = 1;
    double cap_mult = 200.0;
    std::uint64_t horizon = 0;        // T; 0 = empirical mixing time
    double k_constant = 0.0;          // K; 0 = automatic
    std::uint64_t sample_budget = 10000;
    Vertex start = 0;
    StartRule start_rule = StartRule::fixed;
    int threads = 0;

    double resolved_delta() const { return delta < 0.0 ? 3.0 * eps : delta; }
    void validate() const;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    std::string config_hash() const; // FNV-1a over the canonical serialization
};

// Graph materialization. Experiments that require connectivity resample a
// disconnected G(n,p) up to 10 times (seed-derived), recording the attempts.
struct GraphDraw {
    Graph graph;
    std::uint64_t seed_used = 0;
    Vertex attempts = 1;
};

Graph make_graph(const ExperimentConfig& config);
GraphDraw draw_connected_gnp(Vertex n, double c, std::uint64_t master_seed,
                             std::uint64_t graph_index);

// Append-only result line: everything outside "meta" is deterministic for a
// given config, and the content hash covers exactly that part.
struct ResultRecord {
    std::string experiment;
    std::string config_hash;
    std::string engine_version = kEngineVersion;
    nlohmann::json config;
    nlohmann::json measurements;
    nlohmann::json aggregates;
    double wall_clock_seconds = 0.0; // meta only

    nlohmann::json to_json() const;
    std::string content_hash() const;
};

void append_jsonl(const ResultRecord& record, const std::string& path);

// ---- cover_scaling ---------------------------------------------------------

struct CoverScalingRow {
    Vertex n = 0;
    double c = 0.0;
    Vertex graphs_used = 0;
    Vertex disconnected_skipped = 0;
    double mean_cover = 0.0;
    double stddev = 0.0;
    double ratio = 0.0;        // mean / (n ln n)
    double radzik_floor = 0.0; // (n/4) ln(n/2)
    bool radzik_ok = false;
    double capped_fraction = 0.0;
    bool flagged = false;      // capped fraction above 10%
};

struct CoverScalingOutput {
    std::vector<CoverScalingRow> rows;
    bool ratios_non_increasing = true;
};

CoverScalingOutput cover_scaling(const ExperimentConfig& config);
std::string cover_scaling_csv(const CoverScalingOutput& output);

// ---- policy_comparison -----------------------------------------------------

struct PolicyComparisonOutput {
    std::vector<WalkPolicy> policies;
    Vertex graphs = 0;
    std::uint64_t replicas = 0;
    bool gnp_source = false;
    // cover_times[policy][graph * replicas + replica], paired across policies
    std::vector<std::vector<double>> cover_times;
    std::vector<double> means;
    std::vector<double> stddevs;
    std::vector<double> paired_diff_mean; // policy minus first policy
    double radzik_floor = 0.0;
    bool radzik_ok = true; // only meaningful for gnp sources
};

PolicyComparisonOutput policy_comparison(const ExperimentConfig& config);
std::string policy_comparison_csv(const PolicyComparisonOutput& output);

// ---- first_visit -----------------------------------------------------------

struct FirstVisitRow {
    Vertex v = 0;
    std::uint64_t t = 0;
    double empirical = 0.0;
    double predicted = 0.0; // exp(-t pi_v / R_v)
    double abs_error = 0.0;
    double pi_v = 0.0;
    double r_v = 0.0;
};

struct FirstVisitOutput {
    std::uint64_t mixing_horizon = 0;
    Vertex start = 0;
    std::vector<FirstVisitRow> rows;
    double max_abs_error = 0.0;
};

FirstVisitOutput first_visit_experiment(const ExperimentConfig& config);
std::string first_visit_csv(const FirstVisitOutput& output);

// ---- contraction -----------------------------------------------------------

struct ContractionRow {
    Vertex u = 0, v = 0;
    bool admissible = false;
    bool p3_ok = false;
    std::string skip_reason;
    double max_avoidance_residual = 0.0; // G vs contracted graph, over t_grid
    double pi_residual = 0.0;            // |pi_z - (pi_u + pi_v)|
    double r_residual = 0.0;             // |R_z - (R_u + R_v)/2|
};

struct ContractionOutput {
    std::uint64_t horizon = 0;
    std::vector<ContractionRow> rows;
    std::size_t evaluated = 0;
};

ContractionOutput contraction_experiment(const ExperimentConfig& config);
std::string contraction_csv(const ContractionOutput& output);

// Single-pair variant used by the CLI and by targeted tests.
ContractionRow contraction_check_pair(const Graph& g, WalkPolicy policy, Vertex u, Vertex v,
                                      const std::vector<std::uint64_t>& t_grid,
                                      std::uint64_t horizon);

// ---- lower bound -----------------------------------------------------------

// P1..P4 of the lower-bound construction at one vertex; I = [(1-eps)np,
// (1+eps)np]. P2 ranges over the whole 2-ball (v included).
struct LowerBoundPredicates {
    bool p1 = false, p2 = false, p3 = false, p4 = false;
    bool all() const { return p1 && p2 && p3 && p4; }
};

LowerBoundPredicates lower_bound_predicates(const Graph& g, const VertexClassification& classes,
                                            double np, double eps, Vertex v);

struct LowerBoundSets {
    std::vector<Vertex> s0; // P1-P4 scan
    std::vector<Vertex> s1; // largest R_v bucket of width bin_width
    std::vector<Vertex> s;  // greedy 10-separated subset of s1
    double claim_threshold = 0.0; // n / (5 np)
    double bin_width = 0.0;
    std::uint64_t horizon = 0;
    double t_steps = 0.0; // (1 - delta) n ln n
    std::vector<double> r_values;               // aligned with s0
    std::vector<std::uint64_t> unvisited_per_replica;
    double predicted_unvisited = 0.0; // sum over S of exp(-t pi_v / R_v)
    bool pairwise_separated = false;
    bool predicates_reverified = false;
};

LowerBoundSets lower_bound_experiment(const ExperimentConfig& config);
nlohmann::json lower_bound_to_json(const LowerBoundSets& sets);

} // namespace walklab
