#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "walklab/graph.hpp"
#include "walklab/rng.hpp"

namespace walklab {

// Edge-weight rule of the walk. Weights are symmetric and strictly positive:
//   uniform     1                      (simple random walk)
//   min_degree  1/min{d(v),d(w)}       (the degree-biased walk under study)
//   inv_sqrt    1/sqrt(d(v)*d(w))      (comparison policy)
enum class WalkPolicy { uniform, min_degree, inv_sqrt };

WalkPolicy parse_policy(const std::string& name);
std::string policy_name(WalkPolicy policy);

double edge_weight(WalkPolicy policy, Vertex deg_u, Vertex deg_v);

// Per-vertex transition distributions, precomputed once per (graph, policy).
// Rows are stored as normalized cumulative sums aligned with the graph's
// adjacency order; rows whose weights are all equal use an O(1) index fast
// path (this also makes all policies produce bit-identical tables on regular
// graphs). psi(v) is the unnormalized weight sum at v, the walk's normalizer
// and stationary weight.
class TransitionTable {
  public:
    static TransitionTable build(const Graph& g, WalkPolicy policy);

    Vertex step(Vertex v, Rng& rng) const {
        const std::uint64_t begin = g_->offset(v);
        const std::uint64_t end = g_->offset(v + 1);
        const double r = rng.next_double();
        if (uniform_row_[v]) {
            std::uint64_t idx = begin + static_cast<std::uint64_t>(r * static_cast<double>(end - begin));
            if (idx >= end) idx = end - 1;
            return g_->neighbor_at(idx);
        }
        std::uint64_t lo = begin, hi = end - 1;
        while (lo < hi) {
            const std::uint64_t mid = (lo + hi) / 2;
            if (cum_[mid] > r) hi = mid;
            else lo = mid + 1;
        }
        return g_->neighbor_at(lo);
    }

    double psi(Vertex v) const { return psi_[v]; }
    double psi_sum() const { return psi_sum_; }

    // Probability of the i-th neighbor in adjacency order.
    double prob(Vertex v, std::uint64_t neighbor_index) const {
        const std::uint64_t begin = g_->offset(v);
        if (uniform_row_[v]) return 1.0 / static_cast<double>(g_->degree(v));
        const std::uint64_t k = begin + neighbor_index;
        return k == begin ? cum_[k] : cum_[k] - cum_[k - 1];
    }

    // p(v,w), or 0 when w is not a neighbor of v.
    double transition_prob(Vertex v, Vertex w) const;

    const Graph& graph() const { return *g_; }
    WalkPolicy policy() const { return policy_; }

  private:
    const Graph* g_ = nullptr; // non-owning; table is valid while the graph lives
    WalkPolicy policy_ = WalkPolicy::uniform;
    std::vector<double> cum_;  // aligned with adjacency, last entry of each row == 1
    std::vector<double> psi_;
    std::vector<std::uint8_t> uniform_row_;
    double psi_sum_ = 0.0;
};

inline TransitionTable build_transitions(const Graph& g, WalkPolicy policy) {
    return TransitionTable::build(g, policy);
}

inline Vertex step(const TransitionTable& table, Vertex v, Rng& rng) {
    return table.step(v, rng);
}

} // namespace walklab
