#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "walklab/graph.hpp"

using namespace walklab;

namespace {

Graph from_edges(Vertex n, std::vector<std::pair<Vertex, Vertex>> edges) {
    return Graph(n, std::move(edges));
}

void check_structural_invariants(const Graph& g) {
    std::uint64_t degree_total = 0;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        const auto nb = g.neighbors(v);
        CHECK(g.degree(v) == nb.size());
        degree_total += nb.size();
        for (std::size_t i = 0; i < nb.size(); ++i) {
            CHECK(nb[i] != v);                         // no self-loops
            if (i > 0) CHECK(nb[i] > nb[i - 1]);       // sorted, no duplicates
            CHECK(g.has_edge(nb[i], v));               // symmetry
        }
    }
    CHECK(degree_total == 2 * g.num_edges());
}

} // namespace

TEST_CASE("gnp rejects p > 1") {
    GnpParams params{2, 50.0, 1}; // p = 50 log 2 / 2 > 1
    CHECK_THROWS_AS(gnp_sample(params), PreconditionError);
}

TEST_CASE("gnp edge count matches the binomial oracle at n=10^4, c=2") {
    GnpParams params{10000, 2.0, 1};
    Graph g = gnp_sample(params);
    check_structural_invariants(g);
    // binomial oracle: N = n(n-1)/2 pairs, each present with probability p
    const double p = params.p();
    const double pairs = 10000.0 * 9999.0 / 2.0;
    const double mean = pairs * p;
    const double sigma = std::sqrt(pairs * p * (1.0 - p));
    CHECK(std::abs(static_cast<double>(g.num_edges()) - mean) <= 3.0 * sigma);
}

TEST_CASE("gnp is deterministic given the seed") {
    GnpParams params{10000, 2.0, 1};
    Graph a = gnp_sample(params);
    Graph b = gnp_sample(params);
    CHECK(a.edge_list() == b.edge_list());
    Graph c = gnp_sample({10000, 2.0, 2});
    CHECK(a.edge_list() != c.edge_list());
}

TEST_CASE("gnp sample mean of m over 100 seeds is within 5 sigma") {
    GnpParams params{2000, 2.0, 0};
    const double p = params.p();
    const double pairs = 2000.0 * 1999.0 / 2.0;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        total += static_cast<double>(gnp_sample({2000, 2.0, seed}).num_edges());
    const double sample_mean = total / 100.0;
    const double sigma_of_mean = std::sqrt(pairs * p * (1.0 - p) / 100.0);
    CHECK(std::abs(sample_mean - pairs * p) <= 5.0 * sigma_of_mean);
}

TEST_CASE("structured graphs have the documented shapes") {
    SUBCASE("complete K4") {
        Graph g = structured_graph(GraphKind::complete, 4);
        check_structural_invariants(g);
        for (Vertex v = 0; v < 4; ++v) CHECK(g.degree(v) == 3);
    }
    SUBCASE("lollipop 9 = 6-clique plus 3-path") {
        Graph g = structured_graph(GraphKind::lollipop, 9);
        check_structural_invariants(g);
        std::multiset<Vertex> degrees;
        for (Vertex v = 0; v < 9; ++v) degrees.insert(g.degree(v));
        CHECK(degrees.count(6) == 1); // junction
        CHECK(degrees.count(1) == 1); // path end
        CHECK(g.num_edges() == 15 + 3);
        CHECK(is_connected(g));
    }
    SUBCASE("cycle C5") {
        Graph g = structured_graph(GraphKind::cycle, 5);
        for (Vertex v = 0; v < 5; ++v) CHECK(g.degree(v) == 2);
        CHECK(is_connected(g));
    }
    SUBCASE("size constraints") {
        CHECK_THROWS_AS(structured_graph(GraphKind::lollipop, 10), PreconditionError);
        CHECK_THROWS_AS(structured_graph(GraphKind::cycle, 2), PreconditionError);
        CHECK_THROWS_AS(parse_graph_kind("torus"), PreconditionError);
    }
}

TEST_CASE("is_connected") {
    Graph two_triangles = from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    CHECK_FALSE(is_connected(two_triangles));
    CHECK(is_connected(structured_graph(GraphKind::cycle, 5)));
    CHECK(is_connected(gnp_sample({10000, 2.0, 1})));
}

TEST_CASE("ball") {
    Graph c6 = structured_graph(GraphKind::cycle, 6);
    CHECK(ball(c6, 0, 1) == std::vector<Vertex>{0, 1, 5});
    CHECK(ball(c6, 0, 3) == std::vector<Vertex>{0, 1, 2, 3, 4, 5});
    Graph star = structured_graph(GraphKind::star, 4);
    CHECK(ball(star, 0, 1) == std::vector<Vertex>{0, 1, 2, 3});
    CHECK(ball(c6, 0, 0) == std::vector<Vertex>{0});
}

TEST_CASE("contract_pair on C6") {
    Graph c6 = structured_graph(GraphKind::cycle, 6);
    SUBCASE("opposite vertices contract cleanly") {
        auto result = contract_pair(c6, 0, 3);
        CHECK(result.graph.num_vertices() == 5);
        CHECK(result.graph.degree(result.z) == 4);
        for (Vertex v = 0; v < 5; ++v)
            if (v != result.z) CHECK(result.graph.degree(v) == 2);
        CHECK(result.old_to_new[0] == result.z);
        CHECK(result.old_to_new[3] == result.z);
        check_structural_invariants(result.graph);
    }
    SUBCASE("adjacent pair rejected") {
        CHECK_THROWS_AS(contract_pair(c6, 0, 1), PreconditionError);
    }
    SUBCASE("shared neighbor rejected") {
        CHECK_THROWS_AS(contract_pair(c6, 0, 2), PreconditionError);
    }
}

TEST_CASE("contract_pair preserves degrees: d(z) = d(u) + d(v)") {
    Graph g = gnp_sample({300, 2.0, 7});
    std::size_t checked = 0;
    for (Vertex u = 0; u < g.num_vertices() && checked < 10; ++u)
        for (Vertex v = u + 1; v < g.num_vertices() && checked < 10; ++v) {
            if (!contraction_admissible(g, u, v)) continue;
            auto result = contract_pair(g, u, v);
            CHECK(result.graph.degree(result.z) == g.degree(u) + g.degree(v));
            for (Vertex x = 0; x < g.num_vertices(); ++x)
                if (x != u && x != v)
                    CHECK(result.graph.degree(result.old_to_new[x]) == g.degree(x));
            ++checked;
        }
    CHECK(checked == 10);
}

TEST_CASE("cut_and_internal_edges") {
    Graph k4 = structured_graph(GraphKind::complete, 4);
    const std::vector<Vertex> s01{0, 1};
    auto counts = cut_and_internal_edges(k4, s01);
    CHECK(counts.crossing == 4);
    CHECK(counts.internal == 1);

    Graph c5 = structured_graph(GraphKind::cycle, 5);
    const std::vector<Vertex> s012{0, 1, 2};
    counts = cut_and_internal_edges(c5, s012);
    CHECK(counts.crossing == 2);
    CHECK(counts.internal == 2);

    counts = cut_and_internal_edges(c5, {});
    CHECK(counts.crossing == 0);
    CHECK(counts.internal == 0);
}

TEST_CASE("cut identity e(S,S-bar) + 2 e(S,S) = d(S) holds for every subset") {
    for (const Graph& g : {structured_graph(GraphKind::cycle, 7),
                           structured_graph(GraphKind::complete, 6),
                           gnp_sample_p(10, 0.4, 3)}) {
        const Vertex n = g.num_vertices();
        std::vector<Vertex> members;
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            members.clear();
            for (Vertex v = 0; v < n; ++v)
                if (mask & (1ULL << v)) members.push_back(v);
            const auto counts = cut_and_internal_edges(g, members);
            CHECK(counts.crossing + 2 * counts.internal == g.degree_sum(members));
        }
    }
}

TEST_CASE("edge list round trip and validation") {
    Graph g = gnp_sample({100, 1.5, 9});
    std::stringstream buffer;
    save_edge_list(g, buffer);
    std::string text = buffer.str();
    CHECK(text.rfind("100 ", 0) == 0); // header "n m"
    std::stringstream in(text);
    Graph loaded = load_edge_list(in);
    CHECK(loaded.edge_list() == g.edge_list());

    SUBCASE("rejects u >= v") {
        std::stringstream bad("2 1\n1 0\n");
        CHECK_THROWS_AS(load_edge_list(bad), PreconditionError);
    }
    SUBCASE("rejects self-loops") {
        std::stringstream bad("2 1\n0 0\n");
        CHECK_THROWS_AS(load_edge_list(bad), PreconditionError);
    }
    SUBCASE("rejects duplicates") {
        CHECK_THROWS_AS(from_edges(3, {{0, 1}, {0, 1}}), PreconditionError);
        CHECK_THROWS_AS(from_edges(3, {{0, 1}, {1, 0}}), PreconditionError);
    }
    SUBCASE("rejects truncated input") {
        std::stringstream bad("3 2\n0 1\n");
        CHECK_THROWS_AS(load_edge_list(bad), PreconditionError);
    }
}

TEST_CASE("bipartiteness detection") {
    CHECK(is_bipartite(structured_graph(GraphKind::cycle, 6)));
    CHECK_FALSE(is_bipartite(structured_graph(GraphKind::cycle, 5)));
    CHECK(is_bipartite(structured_graph(GraphKind::path, 5)));
    CHECK(is_bipartite(structured_graph(GraphKind::star, 7)));
    CHECK_FALSE(is_bipartite(structured_graph(GraphKind::complete, 4)));
}
