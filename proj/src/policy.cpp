#include "walklab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace walklab {

WalkPolicy parse_policy(const std::string& name) {
    if (name == "uniform") return WalkPolicy::uniform;
    if (name == "min_degree") return WalkPolicy::min_degree;
    if (name == "inv_sqrt") return WalkPolicy::inv_sqrt;
    throw PreconditionError("unknown policy: " + name);
}

std::string policy_name(WalkPolicy policy) {
    switch (policy) {
        case WalkPolicy::uniform: return "uniform";
        case WalkPolicy::min_degree: return "min_degree";
        case WalkPolicy::inv_sqrt: return "inv_sqrt";
    }
    return "?";
}

double edge_weight(WalkPolicy policy, Vertex deg_u, Vertex deg_v) {
    switch (policy) {
        case WalkPolicy::uniform: return 1.0;
        case WalkPolicy::min_degree:
            return 1.0 / static_cast<double>(std::min(deg_u, deg_v));
        case WalkPolicy::inv_sqrt:
            return 1.0 / std::sqrt(static_cast<double>(deg_u) * static_cast<double>(deg_v));
    }
    return 0.0;
}

TransitionTable TransitionTable::build(const Graph& g, WalkPolicy policy) {
    const Vertex n = g.num_vertices();
    TransitionTable table;
    table.g_ = &g;
    table.policy_ = policy;
    table.cum_.resize(2 * g.num_edges());
    table.psi_.resize(n);
    table.uniform_row_.resize(n);

    for (Vertex v = 0; v < n; ++v) {
        const auto nb = g.neighbors(v);
        if (nb.empty())
            throw PreconditionError("isolated vertex " + std::to_string(v) +
                                    ": transition row cannot normalize");
        const std::uint64_t begin = g.offset(v);
        const Vertex dv = g.degree(v);
        double total = 0.0;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double w = edge_weight(policy, dv, g.degree(nb[i]));
            table.cum_[begin + i] = w;
            total += w;
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        table.psi_[v] = total;
        table.psi_sum_ += total;
        if (lo == hi) {
            table.uniform_row_[v] = 1;
            // cum_ entries unused on the fast path; fill the exact values anyway
            for (std::size_t i = 0; i < nb.size(); ++i)
                table.cum_[begin + i] = static_cast<double>(i + 1) / static_cast<double>(dv);
        } else {
            double running = 0.0;
            for (std::size_t i = 0; i < nb.size(); ++i) {
                running += table.cum_[begin + i];
                table.cum_[begin + i] = running / total;
            }
            table.cum_[begin + nb.size() - 1] = 1.0;
        }
    }
    return table;
}

double TransitionTable::transition_prob(Vertex v, Vertex w) const {
    const auto nb = g_->neighbors(v);
    const auto it = std::lower_bound(nb.begin(), nb.end(), w);
    if (it == nb.end() || *it != w) return 0.0;
    return prob(v, static_cast<std::uint64_t>(it - nb.begin()));
}

} // namespace walklab
