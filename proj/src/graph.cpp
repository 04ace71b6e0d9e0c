#include "walklab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "walklab/rng.hpp"

namespace walklab {

Graph::Graph(Vertex n, std::vector<std::pair<Vertex, Vertex>> edges) : n_(n) {
    for (auto& [u, v] : edges) {
        if (u >= n || v >= n)
            throw PreconditionError("edge endpoint out of range");
        if (u == v)
            throw PreconditionError("self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw PreconditionError("duplicate edge in input");
    m_ = edges.size();

    offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& [u, v] : edges) {
        ++offsets_[u + 1];
        ++offsets_[v + 1];
    }
    for (Vertex v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];

    adjacency_.resize(2 * m_);
    std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        adjacency_[cursor[u]++] = v;
        adjacency_[cursor[v]++] = u;
    }
    for (Vertex v = 0; v < n_; ++v)
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
}

bool Graph::has_edge(Vertex u, Vertex v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::uint64_t Graph::degree_sum(std::span<const Vertex> s) const {
    std::uint64_t total = 0;
    for (Vertex v : s) total += degree(v);
    return total;
}

std::vector<std::pair<Vertex, Vertex>> Graph::edge_list() const {
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(m_);
    for (Vertex u = 0; u < n_; ++u)
        for (Vertex v : neighbors(u))
            if (u < v) edges.emplace_back(u, v);
    return edges;
}

double GnpParams::p() const {
    return c * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

void GnpParams::validate() const {
    if (n < 2) throw PreconditionError("gnp: n must be at least 2");
    if (!(c > 0.0)) throw PreconditionError("gnp: c must be positive");
    if (p() > 1.0)
        throw PreconditionError("gnp: p = c*log(n)/n exceeds 1 (n=" + std::to_string(n) +
                                ", c=" + std::to_string(c) + ")");
}

Graph gnp_sample(const GnpParams& params) {
    params.validate();
    return gnp_sample_p(params.n, params.p(), params.seed);
}

Graph gnp_sample_p(Vertex n, double p, std::uint64_t seed) {
    if (n < 2) throw PreconditionError("gnp: n must be at least 2");
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("gnp: p must lie in [0,1]");

    std::vector<std::pair<Vertex, Vertex>> edges;
    if (p > 0.0) {
        edges.reserve(static_cast<std::size_t>(p * n * (n - 1.0) / 2.0 * 1.1) + 16);
        Rng rng(seed);
        if (p >= 1.0) {
            for (Vertex u = 0; u < n; ++u)
                for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
        } else {
            // Batagelj-Brandes skipping: the gap to the next present pair is
            // geometric with success probability p.
            const double log1mp = std::log1p(-p);
            std::uint64_t row = 1, col = std::numeric_limits<std::uint64_t>::max();
            while (row < n) {
                double u = rng.next_double();
                col += 1 + static_cast<std::uint64_t>(std::floor(std::log1p(-u) / log1mp));
                while (row < n && col >= row) {
                    col -= row;
                    ++row;
                }
                if (row < n)
                    edges.emplace_back(static_cast<Vertex>(col), static_cast<Vertex>(row));
            }
        }
    }
    return Graph(n, std::move(edges));
}

GraphKind parse_graph_kind(const std::string& name) {
    if (name == "cycle") return GraphKind::cycle;
    if (name == "path") return GraphKind::path;
    if (name == "complete") return GraphKind::complete;
    if (name == "star") return GraphKind::star;
    if (name == "lollipop") return GraphKind::lollipop;
    throw PreconditionError("unsupported graph kind: " + name);
}

std::string graph_kind_name(GraphKind kind) {
    switch (kind) {
        case GraphKind::cycle: return "cycle";
        case GraphKind::path: return "path";
        case GraphKind::complete: return "complete";
        case GraphKind::star: return "star";
        case GraphKind::lollipop: return "lollipop";
    }
    return "?";
}

Graph structured_graph(GraphKind kind, Vertex n) {
    if (n < 3) throw PreconditionError("structured_graph: n must be at least 3");
    std::vector<std::pair<Vertex, Vertex>> edges;
    switch (kind) {
        case GraphKind::cycle:
            for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
            edges.emplace_back(0, n - 1);
            break;
        case GraphKind::path:
            for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
            break;
        case GraphKind::complete:
            for (Vertex u = 0; u < n; ++u)
                for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
            break;
        case GraphKind::star:
            for (Vertex v = 1; v < n; ++v) edges.emplace_back(0, v);
            break;
        case GraphKind::lollipop: {
            if (n % 3 != 0)
                throw PreconditionError("lollipop: n must be divisible by 3");
            const Vertex clique = 2 * n / 3;
            for (Vertex u = 0; u < clique; ++u)
                for (Vertex v = u + 1; v < clique; ++v) edges.emplace_back(u, v);
            for (Vertex v = clique - 1; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
            break;
        }
    }
    return Graph(n, std::move(edges));
}

bool is_connected(const Graph& g) {
    const Vertex n = g.num_vertices();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    Vertex reached = 1;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w : g.neighbors(v))
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
    }
    return reached == n;
}

bool is_bipartite(const Graph& g) {
    const Vertex n = g.num_vertices();
    std::vector<std::int8_t> color(n, -1);
    std::vector<Vertex> queue;
    for (Vertex s = 0; s < n; ++s) {
        if (color[s] != -1) continue;
        color[s] = 0;
        queue.assign(1, s);
        for (std::size_t i = 0; i < queue.size(); ++i) {
            Vertex v = queue[i];
            for (Vertex w : g.neighbors(v)) {
                if (color[w] == -1) {
                    color[w] = static_cast<std::int8_t>(1 - color[v]);
                    queue.push_back(w);
                } else if (color[w] == color[v]) {
                    return false;
                }
            }
        }
    }
    return true;
}

std::vector<Vertex> ball(const Graph& g, Vertex v, Vertex radius) {
    if (v >= g.num_vertices()) throw PreconditionError("ball: vertex out of range");
    std::vector<Vertex> result{v};
    std::vector<char> seen(g.num_vertices(), 0);
    seen[v] = 1;
    std::size_t layer_begin = 0;
    for (Vertex depth = 0; depth < radius; ++depth) {
        const std::size_t layer_end = result.size();
        for (std::size_t i = layer_begin; i < layer_end; ++i)
            for (Vertex w : g.neighbors(result[i]))
                if (!seen[w]) {
                    seen[w] = 1;
                    result.push_back(w);
                }
        if (result.size() == layer_end) break;
        layer_begin = layer_end;
    }
    std::sort(result.begin(), result.end());
    return result;
}

Vertex bfs_distance(const Graph& g, Vertex u, Vertex v) {
    if (u == v) return 0;
    std::vector<Vertex> dist(g.num_vertices(), std::numeric_limits<Vertex>::max());
    std::vector<Vertex> queue{u};
    dist[u] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        Vertex x = queue[i];
        for (Vertex w : g.neighbors(x))
            if (dist[w] == std::numeric_limits<Vertex>::max()) {
                dist[w] = dist[x] + 1;
                if (w == v) return dist[w];
                queue.push_back(w);
            }
    }
    return std::numeric_limits<Vertex>::max();
}

bool contraction_admissible(const Graph& g, Vertex u, Vertex v) {
    if (u == v || u >= g.num_vertices() || v >= g.num_vertices()) return false;
    if (g.has_edge(u, v)) return false;
    auto nu = g.neighbors(u);
    auto nv = g.neighbors(v);
    std::size_t i = 0, j = 0; // both sorted
    while (i < nu.size() && j < nv.size()) {
        if (nu[i] == nv[j]) return false;
        if (nu[i] < nv[j]) ++i;
        else ++j;
    }
    return true;
}

ContractionResult contract_pair(const Graph& g, Vertex u, Vertex v) {
    if (u == v) throw PreconditionError("contract_pair: vertices must differ");
    if (u >= g.num_vertices() || v >= g.num_vertices())
        throw PreconditionError("contract_pair: vertex out of range");
    if (g.has_edge(u, v)) throw PreconditionError("contract_pair: vertices are adjacent");
    if (!contraction_admissible(g, u, v))
        throw PreconditionError("contract_pair: vertices share a neighbor");

    const Vertex n = g.num_vertices();
    const Vertex z = n - 2;
    std::vector<Vertex> old_to_new(n);
    Vertex next = 0;
    for (Vertex x = 0; x < n; ++x)
        old_to_new[x] = (x == u || x == v) ? z : next++;

    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(g.num_edges());
    for (const auto& [a, b] : g.edge_list())
        edges.emplace_back(old_to_new[a], old_to_new[b]);
    return {Graph(n - 1, std::move(edges)), z, std::move(old_to_new)};
}

CutCounts cut_and_internal_edges(const Graph& g, std::span<const Vertex> s) {
    std::vector<char> in_s(g.num_vertices(), 0);
    for (Vertex v : s) {
        if (v >= g.num_vertices())
            throw PreconditionError("cut_and_internal_edges: vertex out of range");
        in_s[v] = 1;
    }
    CutCounts counts;
    for (Vertex v : s)
        for (Vertex w : g.neighbors(v)) {
            if (in_s[w]) {
                if (v < w) ++counts.internal;
            } else {
                ++counts.crossing;
            }
        }
    return counts;
}

void save_edge_list(const Graph& g, std::ostream& out) {
    out << g.num_vertices() << ' ' << g.num_edges() << '\n';
    for (const auto& [u, v] : g.edge_list()) out << u << ' ' << v << '\n';
}

void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw PreconditionError("cannot open for writing: " + path);
    save_edge_list(g, out);
}

Graph load_edge_list(std::istream& in) {
    Vertex n = 0;
    std::uint64_t m = 0;
    if (!(in >> n >> m)) throw PreconditionError("edge list: malformed header");
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        Vertex u, v;
        if (!(in >> u >> v)) throw PreconditionError("edge list: truncated at edge " + std::to_string(i));
        if (u >= v) throw PreconditionError("edge list: edges must satisfy u < v");
        edges.emplace_back(u, v);
    }
    return Graph(n, std::move(edges));
}

Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open: " + path);
    return load_edge_list(in);
}

} // namespace walklab
