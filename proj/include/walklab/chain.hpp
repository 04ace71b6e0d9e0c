#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "walklab/policy.hpp"
#include "walklab/typicality.hpp"

namespace walklab {

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

// Exact operations materialize O(n) distributions and propagate them t times;
// above this size only the Monte Carlo estimators are offered.
inline constexpr Vertex kDenseLimit = 4096;

// pi_v = Psi(v) / sum_u Psi(u); exact for every symmetric-weight walk.
struct StationaryDist {
    VectorXd pi;
    double psi_sum = 0.0;
};

StationaryDist stationary(const Graph& g, WalkPolicy policy);
StationaryDist stationary(const TransitionTable& table);

// One step of the chain acting on a distribution: next = dist * P.
void propagate(const TransitionTable& table, const VectorXd& dist, VectorXd& next);

// Dense transition matrix P with P(v,w) = p(v,w); n is capped by kDenseLimit.
MatrixXd transition_matrix(const TransitionTable& table);

// max_x |P_u^(t)(x) - pi_x|, by t vector-matrix products over the adjacency.
double tv_distance(const Graph& g, WalkPolicy policy, Vertex start, std::uint64_t t);

struct MixingResult {
    std::uint64_t steps = 0; // smallest t reaching the threshold (worst start)
    bool reached = false;
    bool periodic = false;   // bipartite chain; threshold unreachable
    double threshold = 0.0;
    std::uint64_t cap = 0;
    Vertex worst_start = 0;
};

// Smallest t with tv_distance <= threshold over a worst sampled start
// (extreme-degree vertices plus seeded random picks). threshold < 0 selects
// the default n^-3.
MixingResult empirical_mixing_time(const Graph& g, WalkPolicy policy, double threshold = -1.0,
                                   std::uint64_t cap = 0, std::size_t start_samples = 8,
                                   std::uint64_t seed = 1);

// The astronomically conservative horizon constant L = 10*(8000*b2)^2/b1^2
// with b1 = (1-eps)/(1+eps), b2 = 401/(1+eps); kept for traceability next to
// the operational empirical mixing time.
double paper_mixing_constant(double eps);

// |lambda_2|: second largest absolute eigenvalue of P, by power iteration on
// P^2 in the pi-weighted inner product with the top eigenvector deflated.
// Converges for every reversible chain, including periodic ones (returns 1).
double second_eigenvalue(const Graph& g, WalkPolicy policy, double tol = 1e-10,
                         std::uint64_t max_iters = 500000);

// Signed second eigenvector estimate used for sweep cuts.
VectorXd second_eigenvector_estimate(const Graph& g, WalkPolicy policy);

enum class ConductanceMode { exhaustive, sampled };

struct ConductanceResult {
    double phi = 1.0;
    ConductanceMode mode = ConductanceMode::exhaustive;
    bool upper_bound_only = false;      // sampled mode never certifies the minimum
    std::vector<Vertex> best_set;
    std::uint64_t sets_examined = 0;
};

// Phi(G) = min over S with pi(S) <= 1/2 of Q(S, S-bar) / pi(S). Exhaustive
// mode enumerates all subsets (n <= 20); sampled mode takes the min over
// random sets, all singletons, and sweep cuts of the second eigenvector.
ConductanceResult conductance(const Graph& g, WalkPolicy policy, ConductanceMode mode,
                              std::uint64_t samples = 1000, std::uint64_t seed = 1);

// Phi(S) for one set (infinity when pi(S) > 1/2 or S is empty).
double cut_conductance(const Graph& g, WalkPolicy policy, std::span<const Vertex> s);

struct SpectralReport {
    double lambda2 = 0.0;
    double phi = 1.0;
    ConductanceMode phi_mode = ConductanceMode::exhaustive;
    bool phi_upper_bound_only = false;
    bool cheeger_ok = false;  // lambda2 <= 1 - phi^2/2
    bool periodic = false;
    std::vector<std::pair<std::uint64_t, double>> tv_curve;
    double b1 = 0.0, b2 = 0.0, paper_L = 0.0; // report metadata
};

SpectralReport spectral_report(const Graph& g, WalkPolicy policy, ConductanceMode mode,
                               const std::vector<std::uint64_t>& tv_times = {},
                               Vertex tv_start = 0, double eps = 0.3,
                               std::uint64_t samples = 1000, std::uint64_t seed = 1);

bool cheeger_check(const SpectralReport& report);

// Return probabilities r_0..r_{T-1} of the walk started at v, their partial
// generating polynomial R(T,z), and the minimum of |R(T,z)| over a radial
// grid of the disk |z| <= 1 + 1/(KT). theta_ok records min >= 1/4.
struct ReturnProfile {
    Vertex vertex = 0;
    std::uint64_t horizon = 0;       // T
    std::vector<double> r;           // r[0] == 1
    double r1 = 0.0;                 // R(T,1), a.k.a. R_v
    double min_modulus = 0.0;
    double k_constant = 0.0;         // K actually used
    double theta = 0.25;
    bool theta_ok = false;
    int grid_angles = 64, grid_radii = 8;
    bool exact = true;
    std::uint64_t mc_replicas = 0;
};

struct ReturnProfileOptions {
    double k_constant = 0.0;         // <= 0: use max(3, 3*R_v) after measuring
    int grid_angles = 64, grid_radii = 8;
    std::optional<std::uint64_t> monte_carlo_replicas; // unset: exact
    std::uint64_t seed = 1;
    int threads = 0;
};

ReturnProfile return_profile(const Graph& g, WalkPolicy policy, Vertex v, std::uint64_t T,
                             const ReturnProfileOptions& options = {});

// Pr[vertex with stationary mass pi_v and return weight R_v is unvisited over
// a window of length t] ~ exp(-t*pi_v/R_v); p_v = pi_v/R_v.
double first_visit_prediction(double pi_v, double r_v, double t);

// Probability the walk from start avoids every vertex of `avoid` at steps
// 1..t, by sub-stochastic propagation restricted to V minus avoid.
double exact_avoidance(const Graph& g, WalkPolicy policy, Vertex start,
                       std::span<const Vertex> avoid, std::uint64_t t);

// As above but for the window [T, t]: unrestricted for the first T steps
// (with the step-T state itself required to miss the set), restricted after.
double exact_avoidance_window(const Graph& g, WalkPolicy policy, Vertex start,
                              std::span<const Vertex> avoid, std::uint64_t T, std::uint64_t t);

// Parameters of the 5-state birth-death projection: left-move bound alpha,
// stay bound rho, right residual beta = 1 - alpha - rho. The coupling needs
// rho >= alpha and the closed-form bound needs alpha < beta, rho <= 1/2.
struct BirthDeathParams {
    double alpha = 0.0;
    double rho = 0.0;
    std::uint64_t horizon = 0; // T

    double beta() const { return 1.0 - alpha - rho; }
    void validate() const;
};

struct BirthDeathResult {
    double simulated_e0 = 0.0; // mean visits to 0 within T steps, started at 0
    double bound = 0.0;        // (1 + 2 rho + 2 alpha^2 T) / (1 - alpha/beta)
    double e4_estimate = 0.0;  // 2 T alpha^3: the 6-state-variant order bound
    std::uint64_t replicas = 0;
};

BirthDeathResult birth_death_e0(const BirthDeathParams& params, std::uint64_t replicas,
                                std::uint64_t seed, int threads = 0);

// Per-class comparison of measured R_v against the class bounds with C = 402.
struct RvClassReport {
    std::uint64_t horizon = 0;
    std::vector<double> r_values;                 // per vertex
    VertexClassification classes;
    bool all_at_least_one = false;                // R_v >= 1 everywhere
    bool a_class_ok = false;                      // R_v <= 1 + 402/d(v)
    bool neighbor_class_ok = false;               // R_v <= 1 + 402/d(v1)
    double b_class_median_excess = 0.0;           // median of R_v - 1 over B
    bool b_class_ok = false;                      // median <= 5/ln(n)
    std::vector<Vertex> violations;
};

RvClassReport r_v_bound_check(const Graph& g, WalkPolicy policy, const TypicalityReport& audit,
                              std::uint64_t T, int threads = 0);

} // namespace walklab
