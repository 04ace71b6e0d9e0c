#include "walklab/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "walklab/parallel.hpp"
#include "walklab/rng.hpp"

namespace walklab {

namespace {

// Vertices surviving iterated removal of degree <= 1 vertices. Every cycle
// lives inside this core.
std::vector<char> two_core(const Graph& g) {
    const Vertex n = g.num_vertices();
    std::vector<Vertex> live_degree(n);
    std::vector<char> alive(n, 1);
    std::vector<Vertex> queue;
    for (Vertex v = 0; v < n; ++v) {
        live_degree[v] = g.degree(v);
        if (live_degree[v] <= 1) {
            alive[v] = 0;
            queue.push_back(v);
        }
    }
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (Vertex w : g.neighbors(queue[i]))
            if (alive[w] && --live_degree[w] <= 1) {
                alive[w] = 0;
                queue.push_back(w);
            }
    return alive;
}

// Length of the shortest cycle through x restricted to `allowed` vertices,
// or UINT32_MAX. BFS branches from x are vertex-disjoint, so the first edge
// joining two distinct branches closes a shortest simple cycle through x.
Vertex shortest_cycle_through(const Graph& g, Vertex x, const std::vector<char>& allowed) {
    const Vertex unset = std::numeric_limits<Vertex>::max();
    std::vector<Vertex> dist(g.num_vertices(), unset), branch(g.num_vertices(), unset);
    std::vector<Vertex> queue{x};
    dist[x] = 0;
    Vertex best = unset;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const Vertex v = queue[i];
        if (best != unset && 2 * dist[v] >= best) break;
        for (Vertex w : g.neighbors(v)) {
            if (!allowed[w]) continue;
            if (dist[w] == unset) {
                dist[w] = dist[v] + 1;
                branch[w] = (v == x) ? w : branch[v];
                queue.push_back(w);
            } else if (w != x && v != x && branch[v] != branch[w]) {
                best = std::min(best, dist[v] + dist[w] + 1);
            }
        }
    }
    return best;
}

// Multi-source BFS: distance <= depth from any source.
std::vector<char> within_distance(const Graph& g, const std::vector<Vertex>& sources,
                                  Vertex depth) {
    std::vector<Vertex> dist(g.num_vertices(), std::numeric_limits<Vertex>::max());
    std::vector<Vertex> queue;
    std::vector<char> mark(g.num_vertices(), 0);
    for (Vertex s : sources) {
        dist[s] = 0;
        mark[s] = 1;
        queue.push_back(s);
    }
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const Vertex v = queue[i];
        if (dist[v] == depth) continue;
        for (Vertex w : g.neighbors(v))
            if (!mark[w]) {
                mark[w] = 1;
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
    }
    return mark;
}

// Deflated power iteration on the simple walk, used only to order vertices
// for sweep-cut candidates. No dense-size gate; accuracy is uncritical.
std::vector<double> sweep_order_scores(const Graph& g) {
    const Vertex n = g.num_vertices();
    std::vector<double> f(n), next(n), pi(n);
    const double two_m = 2.0 * static_cast<double>(g.num_edges());
    for (Vertex v = 0; v < n; ++v) pi[v] = g.degree(v) / two_m;
    Rng rng(0x517eebULL);
    for (Vertex v = 0; v < n; ++v) f[v] = rng.next_double() - 0.5;
    for (int it = 0; it < 150; ++it) {
        double mean = 0.0;
        for (Vertex v = 0; v < n; ++v) mean += pi[v] * f[v];
        for (Vertex v = 0; v < n; ++v) f[v] -= mean;
        double norm = 0.0;
        for (Vertex v = 0; v < n; ++v) {
            double acc = 0.0;
            for (Vertex w : g.neighbors(v)) acc += f[w];
            next[v] = g.degree(v) ? acc / g.degree(v) : 0.0;
            norm += pi[v] * next[v] * next[v];
        }
        norm = std::sqrt(norm);
        if (norm < 1e-300) break;
        for (Vertex v = 0; v < n; ++v) f[v] = next[v] / norm;
    }
    return f;
}

struct SetCheckOutcome {
    bool violated = false;
    double worst_ratio = 0.0; // of the quantity against its bound
    std::vector<Vertex> witness;
};

} // namespace

bool TypicalityReport::passed_exact() const {
    for (char id = 'a'; id <= 'g'; ++id)
        if (!condition(id).pass) return false;
    return true;
}

bool TypicalityReport::passed_sampled() const {
    return condition('h').pass && condition('i').pass;
}

bool TypicalityReport::passed_all() const { return passed_exact() && passed_sampled(); }

TypicalityReport audit(const Graph& g, double eps, double c, std::uint64_t sample_budget,
                       std::uint64_t seed, int threads) {
    const Vertex n = g.num_vertices();
    if (n == 0) throw PreconditionError("audit: empty graph");
    if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("audit: eps must lie in (0,1)");
    if (!(c > 0.0)) throw PreconditionError("audit: c must be positive");

    TypicalityReport report;
    auto& params = report.params;
    params.n = n;
    params.eps = eps;
    params.c = c;
    const double nd = static_cast<double>(n);
    const double logn = std::log(nd);
    params.np = c * logn;
    params.p = params.np / nd;
    params.lambda = static_cast<Vertex>(std::max(1.0, std::ceil(std::log(std::max(1.01, logn)))));
    params.b1 = (1.0 - eps) / (1.0 + eps);
    params.b2 = 401.0 / (1.0 + eps);
    for (char id = 'a'; id <= 'i'; ++id) {
        report.condition(id).id = id;
        report.condition(id).mode = "exact";
    }

    // (a) connectivity
    {
        auto& rec = report.condition('a');
        std::vector<char> reach = within_distance(g, {0}, n);
        Vertex reached = 0;
        for (Vertex v = 0; v < n; ++v) reached += reach[v];
        rec.pass = reached == n;
        rec.observed = reached;
        rec.bound = n;
        if (!rec.pass) {
            for (Vertex v = 0; v < n && rec.witness_set.size() < 32; ++v)
                if (!reach[v]) rec.witness_set.push_back(v);
            rec.detail = "unreached component sample";
        }
    }

    // (b), (c) degree outliers vs n^(1 - eps^2 c / 4)
    {
        const double bound = std::pow(nd, 1.0 - eps * eps * c / 4.0);
        std::uint64_t low = 0, high = 0;
        for (Vertex v = 0; v < n; ++v) {
            if (g.degree(v) < (1.0 - eps) * params.np) ++low;
            if (g.degree(v) > (1.0 + eps) * params.np) ++high;
        }
        auto& b = report.condition('b');
        b.observed = static_cast<double>(low);
        b.bound = bound;
        b.pass = static_cast<double>(low) <= bound;
        auto& cc = report.condition('c');
        cc.observed = static_cast<double>(high);
        cc.bound = bound;
        cc.pass = static_cast<double>(high) <= bound;
    }

    // (d) max degree <= 4 np
    {
        auto& rec = report.condition('d');
        Vertex arg = 0;
        for (Vertex v = 1; v < n; ++v)
            if (g.degree(v) > g.degree(arg)) arg = v;
        rec.observed = g.degree(arg);
        rec.bound = 4.0 * params.np;
        rec.pass = rec.observed <= rec.bound;
        if (!rec.pass) {
            rec.witness_set = {arg};
            rec.detail = "max-degree vertex";
        }
    }

    // (e) |V_k| <= (3 log n)^(k+1) for k <= lambda
    {
        auto& rec = report.condition('e');
        report.vk_counts.assign(params.lambda + 1, 0);
        for (Vertex v = 0; v < n; ++v)
            if (g.degree(v) <= params.lambda) ++report.vk_counts[g.degree(v)];
        rec.pass = true;
        for (Vertex k = 0; k <= params.lambda; ++k) {
            const double bound = std::pow(3.0 * logn, static_cast<double>(k) + 1.0);
            if (static_cast<double>(report.vk_counts[k]) > bound) {
                rec.pass = false;
                rec.observed = static_cast<double>(report.vk_counts[k]);
                rec.bound = bound;
                rec.detail = "degree class k=" + std::to_string(k);
                break;
            }
        }
    }

    // (f) the low-degree set A
    {
        auto& rec = report.condition('f');
        for (Vertex v = 0; v < n; ++v)
            if (g.degree(v) < params.np / 100.0) report.set_a.push_back(v);
        const double raw_bound = std::pow(nd, 17.0 / 12.0 - c);
        const double size_bound = std::max(0.0, std::floor(raw_bound));
        rec.observed = static_cast<double>(report.set_a.size());
        rec.bound = size_bound;
        rec.pass = rec.observed <= size_bound;
        if (!rec.pass) {
            rec.detail = "|A| above size bound";
            rec.witness_set = report.set_a;
        }
        if (rec.pass && !report.set_a.empty()) {
            // (ii) no A-vertex within distance lambda of a cycle shorter
            // than lambda: scan cycle membership over the 2-core near A.
            std::vector<char> core = two_core(g);
            std::vector<char> near_a = within_distance(g, report.set_a, params.lambda);
            std::vector<char> all(n, 1);
            for (Vertex v = 0; v < n && rec.pass; ++v) {
                if (!near_a[v] || !core[v]) continue;
                const Vertex cycle_len = shortest_cycle_through(g, v, all);
                if (cycle_len < params.lambda) {
                    rec.pass = false;
                    rec.witness_set = {v};
                    rec.detail = "cycle of length " + std::to_string(cycle_len) +
                                 " within distance lambda of A";
                }
            }
            // (iii) pairwise distances in A exceed lambda
            for (std::size_t i = 0; i < report.set_a.size() && rec.pass; ++i) {
                std::vector<char> close = within_distance(g, {report.set_a[i]}, params.lambda);
                for (std::size_t j = i + 1; j < report.set_a.size() && rec.pass; ++j)
                    if (close[report.set_a[j]]) {
                        rec.pass = false;
                        rec.witness_set = {report.set_a[i], report.set_a[j]};
                        rec.detail = "A-pair within distance lambda";
                    }
            }
        }
    }

    // B = {v : N_10(v) cap A = empty}
    {
        std::vector<char> tainted =
            report.set_a.empty() ? std::vector<char>(n, 0) : within_distance(g, report.set_a, 10);
        report.b_size = 0;
        for (Vertex v = 0; v < n; ++v)
            if (!tainted[v]) ++report.b_size;
    }

    // (g) dense small subgraphs, guarded by np <= n^(1/100)
    {
        auto& rec = report.condition('g');
        if (params.np > std::pow(nd, 0.01)) {
            rec.pass = true;
            rec.mode = "vacuous";
            rec.detail = "guard np <= n^(1/100) not met; condition does not apply";
        } else {
            rec.mode = "scan";
            rec.pass = true;
            // A subgraph with e >= v+1 forces a connected bicyclic subgraph,
            // which lives inside a single 2-core component.
            std::vector<char> core = two_core(g);
            std::vector<char> comp_seen(n, 0);
            for (Vertex root = 0; root < n && rec.pass; ++root) {
                if (!core[root] || comp_seen[root]) continue;
                // collect the component and a BFS spanning tree
                std::vector<Vertex> comp{root};
                std::vector<Vertex> parent(n, std::numeric_limits<Vertex>::max());
                comp_seen[root] = 1;
                std::vector<std::pair<Vertex, Vertex>> extra_edges;
                for (std::size_t i = 0; i < comp.size(); ++i) {
                    const Vertex v = comp[i];
                    for (Vertex w : g.neighbors(v)) {
                        if (!core[w]) continue;
                        if (!comp_seen[w]) {
                            comp_seen[w] = 1;
                            parent[w] = v;
                            comp.push_back(w);
                        } else if (parent[v] != w && v < w) {
                            extra_edges.emplace_back(v, w);
                        }
                    }
                }
                if (extra_edges.size() < 2) continue;
                // union of the fundamental cycles of a pair of non-tree
                // edges plus the tree path between them
                auto root_path = [&](Vertex v, std::vector<char>& mark, std::vector<Vertex>& out) {
                    while (v != std::numeric_limits<Vertex>::max() && !mark[v]) {
                        mark[v] = 1;
                        out.push_back(v);
                        v = parent[v];
                    }
                };
                const std::size_t pair_cap = 200;
                std::size_t pairs = 0;
                for (std::size_t i = 0; i < extra_edges.size() && rec.pass; ++i)
                    for (std::size_t j = i + 1; j < extra_edges.size() && rec.pass; ++j) {
                        if (++pairs > pair_cap) break;
                        std::vector<char> mark(n, 0);
                        std::vector<Vertex> verts;
                        root_path(extra_edges[i].first, mark, verts);
                        root_path(extra_edges[i].second, mark, verts);
                        root_path(extra_edges[j].first, mark, verts);
                        root_path(extra_edges[j].second, mark, verts);
                        if (verts.size() <= 50) {
                            rec.pass = false;
                            std::sort(verts.begin(), verts.end());
                            rec.witness_set = verts;
                            rec.observed = static_cast<double>(verts.size());
                            rec.bound = 50.0;
                            rec.detail = "bicyclic subgraph on <= 50 vertices";
                        }
                    }
            }
        }
    }

    // (h) and (i): cut and internal-edge conditions over sampled sets
    const Vertex inv_p = static_cast<Vertex>(std::ceil(1.0 / params.p));
    if (n <= 20) {
        // exhaustive over all subsets
        auto check_all = [&](char id) {
            auto& rec = report.condition(id);
            rec.mode = "exact";
            rec.pass = true;
            std::vector<Vertex> members;
            for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
                members.clear();
                for (Vertex v = 0; v < n; ++v)
                    if (mask & (1ULL << v)) members.push_back(v);
                const Vertex s = static_cast<Vertex>(members.size());
                const auto counts = cut_and_internal_edges(g, members);
                if (id == 'h') {
                    if (s < inv_p || s > n / 2) continue;
                    const double bound = 0.5 * s * (nd - s) * params.p;
                    if (static_cast<double>(counts.crossing) < bound) {
                        rec.pass = false;
                        rec.witness_set = members;
                        rec.observed = static_cast<double>(counts.crossing);
                        rec.bound = bound;
                        return;
                    }
                } else {
                    if (s >= inv_p) continue;
                    const double bound = s * params.np / 1000.0;
                    if (static_cast<double>(counts.internal) >= bound) {
                        rec.pass = false;
                        rec.witness_set = members;
                        rec.observed = static_cast<double>(counts.internal);
                        rec.bound = bound;
                        return;
                    }
                }
            }
        };
        check_all('h');
        check_all('i');
    } else {
        const std::vector<double> sweep = sweep_order_scores(g);
        std::vector<Vertex> by_sweep(n), by_degree(n), bfs_order;
        for (Vertex v = 0; v < n; ++v) by_sweep[v] = by_degree[v] = v;
        std::sort(by_sweep.begin(), by_sweep.end(),
                  [&](Vertex a, Vertex b) { return sweep[a] < sweep[b]; });
        std::sort(by_degree.begin(), by_degree.end(),
                  [&](Vertex a, Vertex b) { return g.degree(a) < g.degree(b); });
        {
            std::vector<char> seen(n, 0);
            bfs_order.push_back(0);
            seen[0] = 1;
            for (std::size_t i = 0; i < bfs_order.size(); ++i)
                for (Vertex w : g.neighbors(bfs_order[i]))
                    if (!seen[w]) {
                        seen[w] = 1;
                        bfs_order.push_back(w);
                    }
        }

        auto sampled_condition = [&](char id) {
            auto& rec = report.condition(id);
            rec.mode = "sampled";
            rec.pass = true;

            // size buckets, geometric
            std::vector<Vertex> sizes;
            Vertex smin = (id == 'h') ? std::max<Vertex>(1, inv_p) : 2;
            Vertex smax = (id == 'h') ? n / 2 : std::min<Vertex>(n - 1, inv_p > 1 ? inv_p - 1 : 0);
            if (smin > smax) {
                rec.mode = "vacuous";
                rec.detail = "size range empty";
                return;
            }
            for (Vertex s = smin; s < smax; s = std::max(s + 1, 2 * s)) sizes.push_back(s);
            sizes.push_back(smax);

            struct Outcome {
                double ratio = 0.0;
                std::vector<Vertex> witness;
            };

            auto evaluate = [&](const std::vector<Vertex>& members) -> Outcome {
                const Vertex s = static_cast<Vertex>(members.size());
                const auto counts = cut_and_internal_edges(g, members);
                Outcome out;
                if (id == 'h') {
                    const double bound = 0.5 * s * (nd - s) * params.p;
                    out.ratio = bound > 0 ? static_cast<double>(counts.crossing) / bound
                                          : std::numeric_limits<double>::infinity();
                    if (static_cast<double>(counts.crossing) < bound) out.witness = members;
                } else {
                    const double bound = s * params.np / 1000.0;
                    out.ratio = bound > 0 ? static_cast<double>(counts.internal) / bound
                                          : std::numeric_limits<double>::infinity();
                    if (static_cast<double>(counts.internal) >= bound) out.witness = members;
                }
                return out;
            };

            Outcome worst;
            worst.ratio = (id == 'h') ? std::numeric_limits<double>::infinity() : 0.0;
            auto fold = [&](const Outcome& out) {
                const bool more_extreme =
                    (id == 'h') ? out.ratio < worst.ratio : out.ratio > worst.ratio;
                if (more_extreme) worst.ratio = out.ratio;
                if (!out.witness.empty() && worst.witness.empty()) worst.witness = out.witness;
            };

            // structured candidates: ordered prefixes of adversarial orders
            for (Vertex s : sizes) {
                fold(evaluate({by_degree.begin(), by_degree.begin() + s}));
                fold(evaluate({by_degree.rbegin(), by_degree.rbegin() + s}));
                fold(evaluate({by_sweep.begin(), by_sweep.begin() + s}));
                fold(evaluate({bfs_order.begin(), bfs_order.begin() + s}));
            }
            if (id == 'i' && smin <= 2 && g.num_edges() > 0) {
                // endpoint pairs are the smallest internal-edge candidates
                const auto edges = g.edge_list();
                for (std::size_t e = 0; e < std::min<std::size_t>(edges.size(), 16); ++e)
                    fold(evaluate({edges[e].first, edges[e].second}));
            }

            // random sets, budget split across buckets, deterministic per index
            const std::uint64_t per_bucket =
                std::max<std::uint64_t>(50, sample_budget / std::max<std::size_t>(1, sizes.size()));
            const std::uint64_t total = per_bucket * sizes.size();
            std::vector<Outcome> outcomes(total);
            const unsigned workers = resolve_threads(threads);
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    std::vector<char> in_set(n, 0);
                    std::vector<Vertex> members;
                    for (std::uint64_t k = w; k < total; k += workers) {
                        const Vertex size = sizes[k / per_bucket];
                        Rng rng = Rng::stream(seed + (id == 'h' ? 0x6800 : 0x6900), k);
                        members.clear();
                        while (members.size() < size) {
                            const Vertex v = static_cast<Vertex>(rng.next_below(n));
                            if (!in_set[v]) {
                                in_set[v] = 1;
                                members.push_back(v);
                            }
                        }
                        outcomes[k] = evaluate(members);
                        for (Vertex v : members) in_set[v] = 0;
                    }
                });
            for (auto& th : pool) th.join();
            for (const auto& out : outcomes) fold(out);

            rec.observed = worst.ratio;
            rec.bound = 1.0;
            if (!worst.witness.empty()) {
                rec.pass = false;
                rec.witness_set = worst.witness;
                rec.detail = (id == 'h') ? "sampled set with deficient cut"
                                         : "sampled set with excessive internal edges";
            }
        };
        sampled_condition('h');
        sampled_condition('i');
    }

    return report;
}

std::uint64_t VertexClassification::count(VertexClass c) const {
    std::uint64_t total = 0;
    for (VertexClass l : labels)
        if (l == c) ++total;
    return total;
}

VertexClassification classify_vertices(const Graph& g, double np) {
    const Vertex n = g.num_vertices();
    VertexClassification result;
    result.labels.assign(n, VertexClass::other);
    result.a_neighbor.assign(n, std::numeric_limits<Vertex>::max());
    result.a_multiplicity.assign(n, 0);

    std::vector<char> in_a(n, 0);
    for (Vertex v = 0; v < n; ++v)
        if (g.degree(v) <= np / 100.0) {
            in_a[v] = 1;
            result.set_a.push_back(v);
        }
    std::vector<char> tainted = result.set_a.empty() ? std::vector<char>(n, 0)
                                                     : within_distance(g, result.set_a, 10);

    for (Vertex v = 0; v < n; ++v) {
        Vertex count = 0, first = std::numeric_limits<Vertex>::max();
        for (Vertex w : g.neighbors(v))
            if (in_a[w]) {
                ++count;
                if (first == std::numeric_limits<Vertex>::max()) first = w;
            }
        result.a_multiplicity[v] = count;
        if (in_a[v]) {
            result.labels[v] = VertexClass::a_class;
        } else if (!tainted[v]) {
            result.labels[v] = VertexClass::b_class;
        } else if (count == 1) {
            result.labels[v] = VertexClass::neighbor_of_a;
            result.a_neighbor[v] = first;
        } else {
            result.labels[v] = VertexClass::other;
        }
    }
    return result;
}

std::vector<Vertex> u_set(const Graph& g, double eps, double c) {
    const Vertex n = g.num_vertices();
    const double target = c * std::log(static_cast<double>(n));
    const double lo = (1.0 - eps) * target, hi = (1.0 + eps) * target;
    auto in_range = [&](Vertex v) {
        const double d = g.degree(v);
        return d > lo && d < hi;
    };
    std::vector<Vertex> result;
    for (Vertex v = 0; v < n; ++v) {
        if (!in_range(v)) continue;
        bool ok = true;
        for (Vertex w : g.neighbors(v))
            if (!in_range(w)) {
                ok = false;
                break;
            }
        if (ok) result.push_back(v);
    }
    return result;
}

nlohmann::json typicality_to_json(const TypicalityReport& report) {
    nlohmann::json j;
    for (char id = 'a'; id <= 'i'; ++id) {
        const auto& rec = report.condition(id);
        nlohmann::json c;
        c["pass"] = rec.pass;
        c["mode"] = rec.mode;
        c["observed"] = rec.observed;
        c["bound"] = rec.bound;
        if (!rec.detail.empty()) c["detail"] = rec.detail;
        if (!rec.witness_set.empty()) c["witness"] = rec.witness_set;
        j[std::string(1, id)] = c;
    }
    j["params"] = {{"n", report.params.n},       {"eps", report.params.eps},
                   {"c", report.params.c},       {"p", report.params.p},
                   {"np", report.params.np},     {"lambda", report.params.lambda},
                   {"b1", report.params.b1},     {"b2", report.params.b2}};
    j["derived"] = {{"a_size", report.set_a.size()},
                    {"b_size", report.b_size},
                    {"vk_counts", report.vk_counts},
                    {"a", report.set_a}};
    j["pass_exact"] = report.passed_exact();
    j["pass_sampled"] = report.passed_sampled();
    j["pass_all"] = report.passed_all();
    return j;
}

} // namespace walklab
