#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "walklab/policy.hpp"

namespace walklab {

enum class StartRule { fixed, worst_of_sampled };

StartRule parse_start_rule(const std::string& name);

// Cover-time sample statistics. Replica i always uses the RNG stream derived
// from (seed, i), so results do not depend on scheduling. Replicas that hit
// the step cap are recorded as censored and excluded from the moments.
struct CoverStats {
    StartRule start_rule = StartRule::fixed;
    Vertex start_vertex = 0;             // fixed rule only
    std::uint64_t replicas = 0;
    std::uint64_t cap = 0;
    std::vector<std::uint64_t> times;    // per replica; censored entries hold the cap
    std::vector<std::uint8_t> censored;
    std::uint64_t censored_count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    std::uint64_t min = 0;
    std::uint64_t max = 0;
};

// Steps until all vertices are visited, or nullopt if the cap is reached
// first. The start vertex counts as visited at step 0.
std::optional<std::uint64_t> cover_time_once(const TransitionTable& table, Vertex start,
                                             Rng& rng, std::uint64_t cap);

// Monte Carlo cover-time estimate over parallel replicas. cap_mult scales the
// default cap of cap_mult * n * ln(n) steps. Under worst_of_sampled, replicas
// are spread round-robin over sampled start vertices and the reported moments
// come from the start with the largest mean (matching max_u C_u).
CoverStats estimate_cover_time(const Graph& g, WalkPolicy policy, std::uint64_t replicas,
                               StartRule start_rule, Vertex start, std::uint64_t seed,
                               double cap_mult = 200.0, int threads = 0);

// Fraction of replica walks from u that avoid v at every step in [T, t].
double first_visit_tail(const Graph& g, WalkPolicy policy, Vertex u, Vertex v,
                        std::uint64_t T, std::uint64_t t, std::uint64_t replicas,
                        std::uint64_t seed, int threads = 0);

// Batched variant: one set of replica walks from u, measured against every
// target vertex and every horizon in t_grid (targets and horizons share the
// same walks). result[target][ti] is the avoidance frequency over [T, t_i].
std::vector<std::vector<double>> first_visit_tail_batch(
    const Graph& g, WalkPolicy policy, Vertex u, const std::vector<Vertex>& targets,
    std::uint64_t T, const std::vector<std::uint64_t>& t_grid, std::uint64_t replicas,
    std::uint64_t seed, int threads = 0);

// Visit frequencies of a single walk of the given length (occupancy of
// X_0 .. X_{steps-1}); used for stationary-distribution checks.
std::vector<double> occupancy(const TransitionTable& table, Vertex start,
                              std::uint64_t steps, Rng& rng);

} // namespace walklab
