#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "walklab/errors.hpp"

namespace walklab {

using Vertex = std::uint32_t;

// Immutable undirected simple graph in compressed adjacency form.
// Vertex ids are dense integers 0..n-1; neighbor lists are sorted.
class Graph {
  public:
    // Builds from an edge list. Edges may be given in either orientation;
    // self-loops and duplicates are rejected.
    Graph(Vertex n, std::vector<std::pair<Vertex, Vertex>> edges);

    Vertex num_vertices() const { return n_; }
    std::uint64_t num_edges() const { return m_; }

    Vertex degree(Vertex v) const {
        return static_cast<Vertex>(offsets_[v + 1] - offsets_[v]);
    }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    bool has_edge(Vertex u, Vertex v) const;

    // Offset of v's neighbor block inside the shared adjacency array.
    std::uint64_t offset(Vertex v) const { return offsets_[v]; }

    Vertex neighbor_at(std::uint64_t adjacency_index) const {
        return adjacency_[adjacency_index];
    }

    // d(S) = sum of degrees over S.
    std::uint64_t degree_sum(std::span<const Vertex> s) const;

    std::vector<std::pair<Vertex, Vertex>> edge_list() const;

  private:
    Vertex n_ = 0;
    std::uint64_t m_ = 0;
    std::vector<std::uint64_t> offsets_; // size n+1
    std::vector<Vertex> adjacency_;      // size 2m, sorted per vertex
};

// G(n,p) parameters with p = c*log(n)/n. The derived omega = (c-1)*log n is
// reported by callers, not constrained here.
struct GnpParams {
    Vertex n = 0;
    double c = 0.0;
    std::uint64_t seed = 0;

    double p() const;
    void validate() const; // n >= 2, c > 0, p <= 1
};

// Samples G(n,p) by geometric skipping over the ordered pair sequence,
// O(n + m) expected time. Deterministic given the seed. Disconnected samples
// are returned as-is; callers that need connectivity filter explicitly.
Graph gnp_sample(const GnpParams& params);

// Same sampler with an explicit edge probability.
Graph gnp_sample_p(Vertex n, double p, std::uint64_t seed);

enum class GraphKind { cycle, path, complete, star, lollipop };

GraphKind parse_graph_kind(const std::string& name);
std::string graph_kind_name(GraphKind kind);

// Canonical labelings:
//   cycle     0-1-...-(n-1)-0
//   path      0-1-...-(n-1)
//   complete  all pairs
//   star      center 0, leaves 1..n-1
//   lollipop  clique on {0,...,2n/3-1}, path on {2n/3,...,n-1}, junction
//             2n/3-1 adjacent to 2n/3 (requires n divisible by 3)
Graph structured_graph(GraphKind kind, Vertex n);

bool is_connected(const Graph& g);
bool is_bipartite(const Graph& g);

// Vertices within the given hop count of v, including v itself; sorted.
std::vector<Vertex> ball(const Graph& g, Vertex v, Vertex radius);

// BFS distance from u to v, or UINT32_MAX if unreachable.
Vertex bfs_distance(const Graph& g, Vertex u, Vertex v);

struct ContractionResult {
    Graph graph;                     // n-1 vertices
    Vertex z;                        // the merged vertex
    std::vector<Vertex> old_to_new;  // size n; old_to_new[u] == old_to_new[v] == z
};

// Contracts non-adjacent u, v with disjoint neighborhoods into z. Surviving
// vertices keep their relative order with ids 0..n-3; z is n-2.
ContractionResult contract_pair(const Graph& g, Vertex u, Vertex v);

// True iff u != v, u and v non-adjacent, and N(u), N(v) disjoint.
bool contraction_admissible(const Graph& g, Vertex u, Vertex v);

struct CutCounts {
    std::uint64_t crossing = 0; // e(S, S-bar)
    std::uint64_t internal = 0; // e(S, S)
};

CutCounts cut_and_internal_edges(const Graph& g, std::span<const Vertex> s);

// Edge-list text format: first line "n m", then m lines "u v" with u < v.
void save_edge_list(const Graph& g, std::ostream& out);
void save_edge_list(const Graph& g, const std::string& path);
Graph load_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);

} // namespace walklab
