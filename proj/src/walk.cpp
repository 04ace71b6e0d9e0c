#include "walklab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "walklab/parallel.hpp"

namespace walklab {

StartRule parse_start_rule(const std::string& name) {
    if (name == "fixed") return StartRule::fixed;
    if (name == "worst-of-sampled" || name == "worst_of_sampled")
        return StartRule::worst_of_sampled;
    throw PreconditionError("unknown start rule: " + name);
}

std::optional<std::uint64_t> cover_time_once(const TransitionTable& table, Vertex start,
                                             Rng& rng, std::uint64_t cap) {
    const Graph& g = table.graph();
    const Vertex n = g.num_vertices();
    if (start >= n) throw PreconditionError("cover_time_once: start out of range");
    std::vector<std::uint64_t> visited((n + 63) / 64, 0);
    visited[start >> 6] |= 1ULL << (start & 63);
    Vertex remaining = n - 1;
    Vertex v = start;
    for (std::uint64_t step = 1; step <= cap; ++step) {
        v = table.step(v, rng);
        std::uint64_t& word = visited[v >> 6];
        const std::uint64_t bit = 1ULL << (v & 63);
        if (!(word & bit)) {
            word |= bit;
            if (--remaining == 0) return step;
        }
    }
    return std::nullopt;
}

CoverStats estimate_cover_time(const Graph& g, WalkPolicy policy, std::uint64_t replicas,
                               StartRule start_rule, Vertex start, std::uint64_t seed,
                               double cap_mult, int threads) {
    if (replicas == 0) throw PreconditionError("estimate_cover_time: replicas must be >= 1");
    if (!is_connected(g))
        throw PreconditionError("estimate_cover_time: graph is disconnected, cover impossible");
    const TransitionTable table = build_transitions(g, policy);
    const Vertex n = g.num_vertices();
    const std::uint64_t cap = std::max<std::uint64_t>(
        n, static_cast<std::uint64_t>(cap_mult * n * std::log(static_cast<double>(n))));

    // Start vertices per replica, fixed before any walk runs.
    std::vector<Vertex> starts(replicas, start);
    std::size_t group_count = 1;
    if (start_rule == StartRule::worst_of_sampled) {
        Rng pick = Rng::stream(seed, 0x5741534bULL); // start-picker stream
        group_count = std::min<std::size_t>(n, 8);
        std::vector<Vertex> sampled;
        while (sampled.size() < group_count) {
            Vertex cand = static_cast<Vertex>(pick.next_below(n));
            if (std::find(sampled.begin(), sampled.end(), cand) == sampled.end())
                sampled.push_back(cand);
        }
        for (std::uint64_t i = 0; i < replicas; ++i) starts[i] = sampled[i % group_count];
    }

    CoverStats stats;
    stats.start_rule = start_rule;
    stats.start_vertex = start;
    stats.replicas = replicas;
    stats.cap = cap;
    stats.times.assign(replicas, 0);
    stats.censored.assign(replicas, 0);

    parallel_for(replicas, threads, [&](std::uint64_t i) {
        Rng rng = Rng::stream(seed, i);
        auto t = cover_time_once(table, starts[i], rng, cap);
        if (t) {
            stats.times[i] = *t;
        } else {
            stats.times[i] = cap;
            stats.censored[i] = 1;
        }
    });

    // Moments over the worst start group (or the single fixed group).
    double best_mean = -1.0;
    std::size_t best_group = 0;
    for (std::size_t gi = 0; gi < group_count; ++gi) {
        double sum = 0.0;
        std::uint64_t count = 0;
        for (std::uint64_t i = gi; i < replicas; i += group_count)
            if (!stats.censored[i]) {
                sum += static_cast<double>(stats.times[i]);
                ++count;
            }
        const double mean = count ? sum / static_cast<double>(count) : 0.0;
        if (mean > best_mean) {
            best_mean = mean;
            best_group = gi;
        }
    }
    const std::size_t stride = (start_rule == StartRule::worst_of_sampled) ? group_count : 1;
    const std::size_t first = (start_rule == StartRule::worst_of_sampled) ? best_group : 0;
    double sum = 0.0, sumsq = 0.0;
    std::uint64_t count = 0;
    stats.min = std::numeric_limits<std::uint64_t>::max();
    stats.max = 0;
    for (std::uint64_t i = first; i < replicas; i += stride) {
        if (stats.censored[i]) continue;
        const double x = static_cast<double>(stats.times[i]);
        sum += x;
        sumsq += x * x;
        ++count;
        stats.min = std::min(stats.min, stats.times[i]);
        stats.max = std::max(stats.max, stats.times[i]);
    }
    stats.censored_count =
        static_cast<std::uint64_t>(std::count(stats.censored.begin(), stats.censored.end(), 1));
    if (count > 0) {
        stats.mean = sum / static_cast<double>(count);
        if (count > 1)
            stats.stddev = std::sqrt(std::max(0.0, (sumsq - sum * sum / static_cast<double>(count)) /
                                                       static_cast<double>(count - 1)));
    } else {
        stats.min = stats.max = 0;
    }
    if (start_rule == StartRule::worst_of_sampled) stats.start_vertex = starts[first];
    return stats;
}

double first_visit_tail(const Graph& g, WalkPolicy policy, Vertex u, Vertex v,
                        std::uint64_t T, std::uint64_t t, std::uint64_t replicas,
                        std::uint64_t seed, int threads) {
    auto rows = first_visit_tail_batch(g, policy, u, {v}, T, {t}, replicas, seed, threads);
    return rows[0][0];
}

std::vector<std::vector<double>> first_visit_tail_batch(
    const Graph& g, WalkPolicy policy, Vertex u, const std::vector<Vertex>& targets,
    std::uint64_t T, const std::vector<std::uint64_t>& t_grid, std::uint64_t replicas,
    std::uint64_t seed, int threads) {
    if (t_grid.empty() || targets.empty())
        throw PreconditionError("first_visit_tail: empty target or horizon list");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1])
            throw PreconditionError("first_visit_tail: t grid must be strictly increasing");
    if (t_grid.front() <= T)
        throw PreconditionError("first_visit_tail: requires t > T");
    if (replicas == 0) throw PreconditionError("first_visit_tail: replicas must be >= 1");
    const Vertex n = g.num_vertices();
    if (u >= n) throw PreconditionError("first_visit_tail: start out of range");

    const TransitionTable table = build_transitions(g, policy);
    const std::uint64_t t_max = t_grid.back();
    const std::uint64_t no_visit = std::numeric_limits<std::uint64_t>::max();

    // target_index[v] >= 0 marks a watched vertex.
    std::vector<std::int32_t> target_index(n, -1);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        if (targets[k] >= n) throw PreconditionError("first_visit_tail: target out of range");
        target_index[targets[k]] = static_cast<std::int32_t>(k);
    }

    // counts[k][ti]: replicas whose walk avoided target k over [T, t_i].
    std::vector<std::vector<std::uint64_t>> counts(
        targets.size(), std::vector<std::uint64_t>(t_grid.size(), 0));
    std::mutex merge_mutex;

    const unsigned workers = resolve_threads(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            std::vector<std::uint64_t> first_hit(targets.size());
            std::vector<std::vector<std::uint64_t>> local(
                targets.size(), std::vector<std::uint64_t>(t_grid.size(), 0));
            for (std::uint64_t i = w; i < replicas; i += workers) {
                Rng rng = Rng::stream(seed, i);
                std::fill(first_hit.begin(), first_hit.end(), no_visit);
                Vertex x = u;
                if (T == 0 && target_index[x] >= 0) first_hit[target_index[x]] = 0;
                for (std::uint64_t s = 1; s <= t_max; ++s) {
                    x = table.step(x, rng);
                    const std::int32_t k = target_index[x];
                    if (k >= 0 && s >= T && first_hit[k] == no_visit) first_hit[k] = s;
                }
                for (std::size_t k = 0; k < targets.size(); ++k)
                    for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
                        if (first_hit[k] > t_grid[ti]) ++local[k][ti];
            }
            std::lock_guard<std::mutex> lock(merge_mutex);
            for (std::size_t k = 0; k < targets.size(); ++k)
                for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
                    counts[k][ti] += local[k][ti];
        });
    for (auto& th : pool) th.join();

    std::vector<std::vector<double>> result(targets.size(),
                                            std::vector<double>(t_grid.size(), 0.0));
    for (std::size_t k = 0; k < targets.size(); ++k)
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
            result[k][ti] =
                static_cast<double>(counts[k][ti]) / static_cast<double>(replicas);
    return result;
}

std::vector<double> occupancy(const TransitionTable& table, Vertex start,
                              std::uint64_t steps, Rng& rng) {
    const Vertex n = table.graph().num_vertices();
    if (start >= n) throw PreconditionError("occupancy: start out of range");
    if (steps == 0) throw PreconditionError("occupancy: steps must be >= 1");
    std::vector<std::uint64_t> counts(n, 0);
    Vertex v = start;
    counts[v]++;
    for (std::uint64_t s = 1; s < steps; ++s) {
        v = table.step(v, rng);
        counts[v]++;
    }
    std::vector<double> freq(n);
    for (Vertex x = 0; x < n; ++x)
        freq[x] = static_cast<double>(counts[x]) / static_cast<double>(steps);
    return freq;
}

} // namespace walklab
