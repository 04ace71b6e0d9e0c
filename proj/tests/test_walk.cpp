#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "walklab/walk.hpp"

using namespace walklab;

namespace {

// Test-side oracle: dense transition matrix built directly from the weight
// definition, bypassing TransitionTable.
Eigen::MatrixXd dense_transition_oracle(const Graph& g, WalkPolicy policy) {
    const Vertex n = g.num_vertices();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (Vertex v = 0; v < n; ++v) {
        double psi = 0.0;
        for (Vertex w : g.neighbors(v)) psi += edge_weight(policy, g.degree(v), g.degree(w));
        for (Vertex w : g.neighbors(v))
            p(v, w) = edge_weight(policy, g.degree(v), g.degree(w)) / psi;
    }
    return p;
}

double harmonic(int n) {
    double h = 0.0;
    for (int k = 1; k <= n; ++k) h += 1.0 / k;
    return h;
}

} // namespace

TEST_CASE("build_transitions on K4 with min_degree: all rows uniform 1/3, Psi = 1") {
    Graph k4 = structured_graph(GraphKind::complete, 4);
    TransitionTable table = build_transitions(k4, WalkPolicy::min_degree);
    for (Vertex v = 0; v < 4; ++v) {
        CHECK(table.psi(v) == doctest::Approx(1.0));
        for (std::uint64_t i = 0; i < 3; ++i)
            CHECK(table.prob(v, i) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
}

TEST_CASE("build_transitions on the star K_{1,3} with min_degree") {
    Graph star = structured_graph(GraphKind::star, 4);
    TransitionTable table = build_transitions(star, WalkPolicy::min_degree);
    CHECK(table.psi(0) == doctest::Approx(3.0)); // psi(center,leaf) = 1 each
    for (std::uint64_t i = 0; i < 3; ++i)
        CHECK(table.prob(0, i) == doctest::Approx(1.0 / 3.0));
    for (Vertex leaf = 1; leaf <= 3; ++leaf) {
        CHECK(table.psi(leaf) == doctest::Approx(1.0));
        CHECK(table.prob(leaf, 0) == doctest::Approx(1.0));
    }
}

TEST_CASE("build_transitions on the path P3 with min_degree") {
    Graph p3 = structured_graph(GraphKind::path, 3);
    TransitionTable table = build_transitions(p3, WalkPolicy::min_degree);
    CHECK(table.psi(0) == doctest::Approx(1.0));
    CHECK(table.psi(1) == doctest::Approx(2.0));
    CHECK(table.psi(2) == doctest::Approx(1.0));
    CHECK(table.prob(1, 0) == doctest::Approx(0.5));
    CHECK(table.prob(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("isolated vertices are rejected by name") {
    Graph g(3, {{0, 1}}); // vertex 2 isolated
    try {
        build_transitions(g, WalkPolicy::uniform);
        FAIL("expected an error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("rows are stochastic to 1e-12 and match the dense oracle") {
    for (WalkPolicy policy : {WalkPolicy::uniform, WalkPolicy::min_degree, WalkPolicy::inv_sqrt}) {
        Graph g = gnp_sample_p(60, 0.12, 11);
        // gnp may leave isolated vertices at this density; patch connectivity
        std::vector<std::pair<Vertex, Vertex>> edges = g.edge_list();
        for (Vertex v = 0; v + 1 < g.num_vertices(); ++v)
            if (!g.has_edge(v, v + 1)) edges.emplace_back(v, v + 1);
        Graph connected(g.num_vertices(), std::move(edges));
        TransitionTable table = build_transitions(connected, policy);
        Eigen::MatrixXd oracle = dense_transition_oracle(connected, policy);
        for (Vertex v = 0; v < connected.num_vertices(); ++v) {
            double row_sum = 0.0;
            const auto nb = connected.neighbors(v);
            for (std::uint64_t i = 0; i < nb.size(); ++i) {
                row_sum += table.prob(v, i);
                CHECK(table.prob(v, i) == doctest::Approx(oracle(v, nb[i])).epsilon(1e-12));
            }
            CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("policies are exactly identical on regular graphs") {
    for (const Graph& g : {structured_graph(GraphKind::complete, 7),
                           structured_graph(GraphKind::cycle, 9)}) {
        TransitionTable uniform = build_transitions(g, WalkPolicy::uniform);
        TransitionTable min_deg = build_transitions(g, WalkPolicy::min_degree);
        TransitionTable inv_sqrt = build_transitions(g, WalkPolicy::inv_sqrt);
        for (Vertex v = 0; v < g.num_vertices(); ++v)
            for (std::uint64_t i = 0; i < g.degree(v); ++i) {
                CHECK(uniform.prob(v, i) == min_deg.prob(v, i)); // bit-exact
                CHECK(uniform.prob(v, i) == inv_sqrt.prob(v, i));
            }
    }
}

TEST_CASE("step is deterministic and leaf always moves to center") {
    Graph star = structured_graph(GraphKind::star, 4);
    TransitionTable table = build_transitions(star, WalkPolicy::min_degree);
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(table.step(0, a) == table.step(0, b));
    Rng rng(7);
    for (int i = 0; i < 50; ++i) CHECK(table.step(2, rng) == 0);
}

TEST_CASE("step frequencies from the star center match 1/3 within 0.01") {
    Graph star = structured_graph(GraphKind::star, 4);
    TransitionTable table = build_transitions(star, WalkPolicy::min_degree);
    Rng rng(123);
    std::array<std::uint64_t, 4> counts{};
    const std::uint64_t samples = 300000;
    for (std::uint64_t i = 0; i < samples; ++i) counts[table.step(0, rng)]++;
    for (Vertex leaf = 1; leaf <= 3; ++leaf) {
        const double freq = static_cast<double>(counts[leaf]) / samples;
        CHECK(std::abs(freq - 1.0 / 3.0) <= 0.01); // multinomial concentration
    }
}

TEST_CASE("cover_time_once on P2 is always 1") {
    Graph p2 = Graph(2, {{0, 1}});
    TransitionTable table = build_transitions(p2, WalkPolicy::min_degree);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) CHECK(cover_time_once(table, 0, rng, 1000) == 1);
}

TEST_CASE("K50 cover matches the coupon-collector closed form within 2%") {
    Graph k50 = structured_graph(GraphKind::complete, 50);
    CoverStats stats =
        estimate_cover_time(k50, WalkPolicy::min_degree, 10000, StartRule::fixed, 0, 77);
    const double expected = 49.0 * harmonic(49); // 219.28
    CHECK(expected == doctest::Approx(219.28).epsilon(1e-3));
    CHECK(std::abs(stats.mean - expected) / expected <= 0.02);
}

TEST_CASE("C10 cover matches the exact n(n-1)/2 cycle value within 3%") {
    Graph c10 = structured_graph(GraphKind::cycle, 10);
    CoverStats stats =
        estimate_cover_time(c10, WalkPolicy::min_degree, 10000, StartRule::fixed, 0, 78);
    CHECK(std::abs(stats.mean - 45.0) / 45.0 <= 0.03);
}

TEST_CASE("estimate_cover_time on K2: mean 1, stddev 0") {
    Graph p2 = Graph(2, {{0, 1}});
    CoverStats stats = estimate_cover_time(p2, WalkPolicy::uniform, 10, StartRule::fixed, 0, 3);
    CHECK(stats.mean == doctest::Approx(1.0));
    CHECK(stats.stddev == doctest::Approx(0.0));
    CHECK(stats.min == 1);
    CHECK(stats.max == 1);
}

TEST_CASE("G(4096, c=3, seed=7) cover lands near n log n") {
    Graph g = gnp_sample({4096, 3.0, 7});
    REQUIRE(is_connected(g));
    CoverStats stats =
        estimate_cover_time(g, WalkPolicy::min_degree, 20, StartRule::fixed, 0, 99);
    const double ratio = stats.mean / (4096.0 * std::log(4096.0));
    CHECK(ratio >= 0.8);
    CHECK(ratio <= 1.4);
    CHECK(stats.censored_count == 0);
    // every cover time needs at least n-1 steps
    for (std::uint64_t t : stats.times) CHECK(t >= 4095);
    CHECK(stats.mean >= static_cast<double>(stats.min));
    CHECK(stats.mean <= static_cast<double>(stats.max));
}

TEST_CASE("estimate_cover_time is deterministic given the seed") {
    Graph g = gnp_sample({512, 3.0, 4});
    REQUIRE(is_connected(g));
    CoverStats a = estimate_cover_time(g, WalkPolicy::min_degree, 16, StartRule::fixed, 0, 5, 200, 2);
    CoverStats b = estimate_cover_time(g, WalkPolicy::min_degree, 16, StartRule::fixed, 0, 5, 200, 1);
    CHECK(a.times == b.times); // independent of thread count as well
    CHECK(a.mean == b.mean);
    CoverStats w1 =
        estimate_cover_time(g, WalkPolicy::min_degree, 24, StartRule::worst_of_sampled, 0, 5);
    CoverStats w2 =
        estimate_cover_time(g, WalkPolicy::min_degree, 24, StartRule::worst_of_sampled, 0, 5);
    CHECK(w1.times == w2.times);
    CHECK(w1.start_vertex == w2.start_vertex);
    CHECK(w1.mean >= w1.min);
}

TEST_CASE("disconnected graphs cannot be covered") {
    Graph g(4, {{0, 1}, {2, 3}});
    CHECK_THROWS_AS(estimate_cover_time(g, WalkPolicy::uniform, 4, StartRule::fixed, 0, 1),
                    PreconditionError);
}

TEST_CASE("first_visit_tail trivial cases") {
    Graph k4 = structured_graph(GraphKind::complete, 4);
    // the walk starts at v, so [0, t] avoidance is impossible
    CHECK(first_visit_tail(k4, WalkPolicy::uniform, 2, 2, 0, 5, 100, 1) == 0.0);
    Graph p2 = Graph(2, {{0, 1}});
    // forced move: X_1 = 1
    CHECK(first_visit_tail(p2, WalkPolicy::uniform, 0, 1, 0, 1, 100, 1) == 0.0);
}

TEST_CASE("first_visit_tail on K100 matches the restricted matrix-power oracle") {
    Graph k100 = structured_graph(GraphKind::complete, 100);
    const Vertex u = 0, v = 17;
    const std::uint64_t T = 10, t = 500;

    // oracle: propagate 10 free steps, then kill the v column each step
    Eigen::MatrixXd p = dense_transition_oracle(k100, WalkPolicy::min_degree);
    Eigen::RowVectorXd dist = Eigen::RowVectorXd::Zero(100);
    dist[u] = 1.0;
    for (std::uint64_t s = 1; s <= t; ++s) {
        dist = dist * p;
        if (s >= T) dist[v] = 0.0;
    }
    const double exact = dist.sum();

    const double empirical =
        first_visit_tail(k100, WalkPolicy::min_degree, u, v, T, t, 100000, 2024);
    CHECK(std::abs(empirical - exact) <= 0.01);
}

TEST_CASE("walk traces are bit-identical for identical (graph, policy, seed)") {
    Graph g = gnp_sample({256, 3.0, 21});
    TransitionTable table = build_transitions(g, WalkPolicy::min_degree);
    Rng a = Rng::stream(9, 4), b = Rng::stream(9, 4);
    Vertex x = 0, y = 0;
    for (int i = 0; i < 5000; ++i) {
        x = table.step(x, a);
        y = table.step(y, b);
        REQUIRE(x == y);
    }
}

TEST_CASE("occupancy of a long walk approaches pi on K4") {
    Graph k4 = structured_graph(GraphKind::complete, 4);
    TransitionTable table = build_transitions(k4, WalkPolicy::min_degree);
    Rng rng(31);
    const auto freq = occupancy(table, 0, 1000000, rng);
    double tv = 0.0;
    for (Vertex v = 0; v < 4; ++v) tv += std::abs(freq[v] - 0.25);
    CHECK(tv / 2.0 <= 0.01);
}
