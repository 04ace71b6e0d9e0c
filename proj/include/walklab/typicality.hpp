#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "walklab/graph.hpp"

namespace walklab {

// One audited condition, id 'a'..'i'. Witnesses carry enough structure to
// re-evaluate the violated predicate (vertex ids, set members, counts).
struct ConditionRecord {
    char id = '?';
    bool pass = false;
    std::string mode;     // "exact", "sampled", or "vacuous"
    std::string detail;   // human-readable summary
    std::vector<Vertex> witness_set;
    double observed = 0.0;
    double bound = 0.0;
};

struct TypicalityParams {
    Vertex n = 0;
    double eps = 0.0;
    double c = 0.0;
    double p = 0.0;   // c*log(n)/n
    double np = 0.0;
    Vertex lambda = 0; // ceil(log log n)
    double b1 = 0.0;  // (1-eps)/(1+eps)
    double b2 = 0.0;  // 401/(1+eps)
};

struct TypicalityReport {
    TypicalityParams params;
    std::array<ConditionRecord, 9> conditions; // indexed a..i
    std::vector<Vertex> set_a;                 // degree < np/100
    std::uint64_t b_size = 0;                  // |{v : N_10(v) cap A empty}|
    std::vector<std::uint64_t> vk_counts;      // |V_k| for k = 0..lambda

    const ConditionRecord& condition(char id) const { return conditions[id - 'a']; }
    ConditionRecord& condition(char id) { return conditions[id - 'a']; }

    // Conditions (a)-(g), the exactly checkable ones at desk scale.
    bool passed_exact() const;
    bool passed_sampled() const; // (h) and (i)
    bool passed_all() const;
};

// Evaluates the typicality checklist for the degree regime np = c*log(n).
// (a)-(g) are exact; (h)/(i) are sampled over sample_budget random sets per
// condition plus structured candidates, mode recorded.
TypicalityReport audit(const Graph& g, double eps, double c,
                       std::uint64_t sample_budget = 10000, std::uint64_t seed = 1,
                       int threads = 0);

enum class VertexClass : std::uint8_t { a_class, b_class, neighbor_of_a, other };

struct VertexClassification {
    std::vector<VertexClass> labels;     // one per vertex; a partition of V
    std::vector<Vertex> a_neighbor;      // for neighbor_of_a: the single v1
    std::vector<Vertex> a_multiplicity;  // |N(v) cap A| for every vertex
    std::vector<Vertex> set_a;

    std::uint64_t count(VertexClass c) const;
};

// A = {v : d(v) <= np/100}; B = {v : N_10(v) cap A empty}; neighbor-of-A has
// exactly one A-neighbor; everything else is "other".
VertexClassification classify_vertices(const Graph& g, double np);

// U: vertices whose own degree and all neighbor degrees lie inside
// ((1-eps) c log n, (1+eps) c log n).
std::vector<Vertex> u_set(const Graph& g, double eps, double c);

nlohmann::json typicality_to_json(const TypicalityReport& report);

} // namespace walklab
