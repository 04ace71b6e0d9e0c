#include "walklab/chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "walklab/parallel.hpp"

namespace walklab {

namespace {

void require_dense(const Graph& g, const char* op) {
    if (g.num_vertices() > kDenseLimit)
        throw InfeasibleError(std::string(op) + ": n = " + std::to_string(g.num_vertices()) +
                              " exceeds the dense-matrix limit " + std::to_string(kDenseLimit));
}

// next = dist * P (distribution propagation along the adjacency).
void propagate_row(const TransitionTable& table, const double* dist, double* next) {
    const Graph& g = table.graph();
    const Vertex n = g.num_vertices();
    std::fill(next, next + n, 0.0);
    for (Vertex v = 0; v < n; ++v) {
        const double mass = dist[v];
        if (mass == 0.0) continue;
        const auto nb = g.neighbors(v);
        for (std::size_t i = 0; i < nb.size(); ++i)
            next[nb[i]] += mass * table.prob(v, i);
    }
}

// out = P f (action on functions, the adjoint picture).
void apply_column(const TransitionTable& table, const double* f, double* out) {
    const Graph& g = table.graph();
    const Vertex n = g.num_vertices();
    for (Vertex v = 0; v < n; ++v) {
        const auto nb = g.neighbors(v);
        double acc = 0.0;
        for (std::size_t i = 0; i < nb.size(); ++i) acc += table.prob(v, i) * f[nb[i]];
        out[v] = acc;
    }
}

// r_t = Pr[W_v(t) = v] for t = 0..T-1.
std::vector<double> return_probabilities(const TransitionTable& table, Vertex v,
                                         std::uint64_t horizon) {
    const Vertex n = table.graph().num_vertices();
    std::vector<double> r(horizon, 0.0);
    r[0] = 1.0;
    VectorXd dist = VectorXd::Zero(n), next(n);
    dist[v] = 1.0;
    for (std::uint64_t t = 1; t < horizon; ++t) {
        propagate_row(table, dist.data(), next.data());
        dist.swap(next);
        r[t] = dist[v];
    }
    return r;
}

double max_abs_deviation(const VectorXd& dist, const VectorXd& pi) {
    return (dist - pi).cwiseAbs().maxCoeff();
}

} // namespace

StationaryDist stationary(const Graph& g, WalkPolicy policy) {
    return stationary(build_transitions(g, policy));
}

StationaryDist stationary(const TransitionTable& table) {
    const Vertex n = table.graph().num_vertices();
    StationaryDist dist;
    dist.psi_sum = table.psi_sum();
    dist.pi.resize(n);
    for (Vertex v = 0; v < n; ++v) dist.pi[v] = table.psi(v) / dist.psi_sum;
    return dist;
}

void propagate(const TransitionTable& table, const VectorXd& dist, VectorXd& next) {
    next.resize(dist.size());
    propagate_row(table, dist.data(), next.data());
}

MatrixXd transition_matrix(const TransitionTable& table) {
    const Graph& g = table.graph();
    require_dense(g, "transition_matrix");
    const Vertex n = g.num_vertices();
    MatrixXd p = MatrixXd::Zero(n, n);
    for (Vertex v = 0; v < n; ++v) {
        const auto nb = g.neighbors(v);
        for (std::size_t i = 0; i < nb.size(); ++i) p(v, nb[i]) = table.prob(v, i);
    }
    return p;
}

double tv_distance(const Graph& g, WalkPolicy policy, Vertex start, std::uint64_t t) {
    require_dense(g, "tv_distance");
    if (start >= g.num_vertices()) throw PreconditionError("tv_distance: start out of range");
    const TransitionTable table = build_transitions(g, policy);
    const StationaryDist sd = stationary(table);
    VectorXd dist = VectorXd::Zero(g.num_vertices()), next(g.num_vertices());
    dist[start] = 1.0;
    for (std::uint64_t s = 0; s < t; ++s) {
        propagate_row(table, dist.data(), next.data());
        dist.swap(next);
    }
    return max_abs_deviation(dist, sd.pi);
}

MixingResult empirical_mixing_time(const Graph& g, WalkPolicy policy, double threshold,
                                   std::uint64_t cap, std::size_t start_samples,
                                   std::uint64_t seed) {
    require_dense(g, "empirical_mixing_time");
    const Vertex n = g.num_vertices();
    const double nd = static_cast<double>(n);
    MixingResult result;
    result.threshold = threshold > 0 ? threshold : 1.0 / (nd * nd * nd);
    result.cap = cap > 0 ? cap : std::max<std::uint64_t>(
                                     200, static_cast<std::uint64_t>(200.0 * std::log(nd)));
    result.periodic = is_bipartite(g);

    const TransitionTable table = build_transitions(g, policy);
    const StationaryDist sd = stationary(table);

    // Worst sampled start: degree extremes plus seeded random picks.
    std::vector<Vertex> starts;
    Vertex lo = 0, hi = 0;
    for (Vertex v = 1; v < n; ++v) {
        if (g.degree(v) < g.degree(lo)) lo = v;
        if (g.degree(v) > g.degree(hi)) hi = v;
    }
    starts.push_back(lo);
    if (hi != lo) starts.push_back(hi);
    Rng rng(seed);
    while (starts.size() < std::min<std::size_t>(start_samples, n)) {
        Vertex cand = static_cast<Vertex>(rng.next_below(n));
        if (std::find(starts.begin(), starts.end(), cand) == starts.end())
            starts.push_back(cand);
    }

    result.reached = true;
    VectorXd dist(n), next(n);
    for (Vertex start : starts) {
        dist.setZero();
        dist[start] = 1.0;
        std::uint64_t t = 0;
        bool ok = max_abs_deviation(dist, sd.pi) <= result.threshold;
        while (!ok && t < result.cap) {
            propagate_row(table, dist.data(), next.data());
            dist.swap(next);
            ++t;
            ok = max_abs_deviation(dist, sd.pi) <= result.threshold;
        }
        if (!ok) {
            result.reached = false;
            result.steps = result.cap;
            result.worst_start = start;
            return result;
        }
        if (t >= result.steps) {
            result.steps = t;
            result.worst_start = start;
        }
    }
    return result;
}

double paper_mixing_constant(double eps) {
    const double b1 = (1.0 - eps) / (1.0 + eps);
    const double b2 = 401.0 / (1.0 + eps);
    return 10.0 * (8000.0 * b2) * (8000.0 * b2) / (b1 * b1);
}

namespace {

// Power iteration on P^2 in the pi-weighted inner product with the constant
// eigenvector deflated. P^2 keeps the iteration stable when the extreme
// eigenvalue is negative or when +a/-a pairs coexist; the limit value is
// max(|lambda|^2) over the non-top spectrum.
struct PowerIterationResult {
    double lambda_abs = 0.0;
    VectorXd vector;
    bool converged = false;
};

PowerIterationResult deflated_power_iteration(const TransitionTable& table, double tol,
                                              std::uint64_t max_iters) {
    const Vertex n = table.graph().num_vertices();
    const StationaryDist sd = stationary(table);
    const VectorXd& pi = sd.pi;

    Rng rng(0x5eedb06fULL);
    VectorXd f(n), tmp(n), pf(n);
    for (Vertex v = 0; v < n; ++v) f[v] = rng.next_double() - 0.5;

    auto deflate = [&](VectorXd& x) {
        const double mean = pi.dot(x); // <x, 1>_pi
        x.array() -= mean;
    };
    auto pi_norm = [&](const VectorXd& x) { return std::sqrt(pi.dot(x.cwiseProduct(x))); };

    deflate(f);
    double norm = pi_norm(f);
    if (norm == 0.0) return {0.0, f, true};
    f /= norm;

    PowerIterationResult result;
    for (std::uint64_t it = 0; it < max_iters; ++it) {
        apply_column(table, f.data(), tmp.data());
        apply_column(table, tmp.data(), pf.data()); // pf = P^2 f
        deflate(pf);
        const double mu = pi.dot(f.cwiseProduct(pf)); // Rayleigh quotient of P^2
        tmp = pf - mu * f;
        const double residual = pi_norm(tmp);
        const double out_norm = pi_norm(pf);
        if (out_norm <= tol) {
            // deflated spectrum is (numerically) zero
            result.lambda_abs = 0.0;
            result.vector = f;
            result.converged = true;
            return result;
        }
        f = pf / out_norm;
        if (residual <= tol) {
            result.lambda_abs = std::sqrt(std::max(0.0, mu));
            result.vector = f;
            result.converged = true;
            return result;
        }
    }
    return result;
}

} // namespace

double second_eigenvalue(const Graph& g, WalkPolicy policy, double tol,
                         std::uint64_t max_iters) {
    require_dense(g, "second_eigenvalue");
    const TransitionTable table = build_transitions(g, policy);
    auto r = deflated_power_iteration(table, tol, max_iters);
    if (!r.converged)
        throw InfeasibleError("second_eigenvalue: power iteration did not converge");
    return r.lambda_abs;
}

VectorXd second_eigenvector_estimate(const Graph& g, WalkPolicy policy) {
    const TransitionTable table = build_transitions(g, policy);
    auto r = deflated_power_iteration(table, 1e-9, 2000);
    return r.vector;
}

namespace {

struct CutFlow {
    double q = 0.0;   // sum over x in S, y not in S of pi_x p(x,y)
    double pi_s = 0.0;
};

double phi_of(const CutFlow& flow, double pi_total_half) {
    if (flow.pi_s <= 0.0 || flow.pi_s > pi_total_half) return std::numeric_limits<double>::infinity();
    return flow.q / flow.pi_s;
}

CutFlow evaluate_cut(const TransitionTable& table, const VectorXd& pi,
                     const std::vector<char>& in_s, const std::vector<Vertex>& members) {
    const Graph& g = table.graph();
    CutFlow flow;
    for (Vertex v : members) {
        flow.pi_s += pi[v];
        const auto nb = g.neighbors(v);
        for (std::size_t i = 0; i < nb.size(); ++i)
            if (!in_s[nb[i]]) flow.q += pi[v] * table.prob(v, i);
    }
    return flow;
}

} // namespace

ConductanceResult conductance(const Graph& g, WalkPolicy policy, ConductanceMode mode,
                              std::uint64_t samples, std::uint64_t seed) {
    const Vertex n = g.num_vertices();
    const TransitionTable table = build_transitions(g, policy);
    const StationaryDist sd = stationary(table);
    const VectorXd& pi = sd.pi;
    const double half = 0.5 + 1e-12;

    ConductanceResult result;
    result.mode = mode;
    result.phi = std::numeric_limits<double>::infinity();

    if (mode == ConductanceMode::exhaustive) {
        if (n > 20)
            throw InfeasibleError("conductance: exhaustive mode requires n <= 20, got n = " +
                                  std::to_string(n));
        // Gray-code sweep: exactly one vertex membership flips per step.
        const std::uint64_t total = 1ULL << n;
        std::vector<char> in_s(n, 0);
        CutFlow flow;
        std::uint64_t best_mask = 0;
        std::uint64_t gray_prev = 0;
        for (std::uint64_t i = 1; i < total; ++i) {
            const std::uint64_t gray = i ^ (i >> 1);
            const std::uint64_t diff = gray ^ gray_prev;
            gray_prev = gray;
            const Vertex v = static_cast<Vertex>(std::countr_zero(diff));
            const auto nb = g.neighbors(v);
            if (!in_s[v]) {
                in_s[v] = 1;
                flow.pi_s += pi[v];
                for (std::size_t k = 0; k < nb.size(); ++k) {
                    const Vertex w = nb[k];
                    if (in_s[w]) flow.q -= pi[w] * table.transition_prob(w, v);
                    else flow.q += pi[v] * table.prob(v, k);
                }
            } else {
                in_s[v] = 0;
                flow.pi_s -= pi[v];
                for (std::size_t k = 0; k < nb.size(); ++k) {
                    const Vertex w = nb[k];
                    if (in_s[w]) flow.q += pi[w] * table.transition_prob(w, v);
                    else flow.q -= pi[v] * table.prob(v, k);
                }
            }
            ++result.sets_examined;
            if (gray == total - 1) continue; // full set
            const double phi = phi_of(flow, half);
            if (phi < result.phi) {
                result.phi = phi;
                best_mask = gray;
            }
        }
        result.best_set.clear();
        for (Vertex v = 0; v < n; ++v)
            if (best_mask & (1ULL << v)) result.best_set.push_back(v);
        // Recompute the winner from scratch; the sweep accumulates float drift.
        std::fill(in_s.begin(), in_s.end(), 0);
        for (Vertex v : result.best_set) in_s[v] = 1;
        result.phi = phi_of(evaluate_cut(table, pi, in_s, result.best_set), half);
        result.upper_bound_only = false;
        return result;
    }

    // Sampled mode: min over candidate cuts; an upper bound on Phi(G).
    result.upper_bound_only = true;
    std::vector<char> in_s(n, 0);
    std::vector<Vertex> members;
    auto consider = [&](const std::vector<Vertex>& set) {
        for (Vertex v : set) in_s[v] = 1;
        CutFlow flow = evaluate_cut(table, pi, in_s, set);
        double phi = phi_of(flow, half);
        if (phi < result.phi) {
            result.phi = phi;
            result.best_set = set;
        }
        ++result.sets_examined;
        for (Vertex v : set) in_s[v] = 0;
    };

    for (Vertex v = 0; v < n; ++v) consider({v});

    Rng rng(seed);
    std::vector<Vertex> shuffle(n);
    for (Vertex v = 0; v < n; ++v) shuffle[v] = v;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const std::size_t size = 1 + static_cast<std::size_t>(rng.next_below(std::max<Vertex>(1, n / 2)));
        for (std::size_t i = 0; i < size; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
            std::swap(shuffle[i], shuffle[j]);
        }
        members.assign(shuffle.begin(), shuffle.begin() + static_cast<std::ptrdiff_t>(size));
        consider(members);
    }

    // Sweep cuts of the second eigenvector, both orientations.
    VectorXd f = second_eigenvector_estimate(g, policy);
    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return f[a] < f[b]; });
    for (int dir = 0; dir < 2; ++dir) {
        CutFlow flow;
        std::fill(in_s.begin(), in_s.end(), 0);
        members.clear();
        for (Vertex k = 0; k + 1 < n; ++k) {
            const Vertex v = dir == 0 ? order[k] : order[n - 1 - k];
            in_s[v] = 1;
            flow.pi_s += pi[v];
            const auto nb = g.neighbors(v);
            for (std::size_t i = 0; i < nb.size(); ++i) {
                const Vertex w = nb[i];
                if (in_s[w]) flow.q -= pi[w] * table.transition_prob(w, v);
                else flow.q += pi[v] * table.prob(v, i);
            }
            members.push_back(v);
            ++result.sets_examined;
            const double phi = phi_of(flow, half);
            if (phi < result.phi) {
                result.phi = phi;
                result.best_set = members;
            }
        }
    }
    return result;
}

double cut_conductance(const Graph& g, WalkPolicy policy, std::span<const Vertex> s) {
    const TransitionTable table = build_transitions(g, policy);
    const StationaryDist sd = stationary(table);
    std::vector<char> in_s(g.num_vertices(), 0);
    std::vector<Vertex> members(s.begin(), s.end());
    for (Vertex v : members) in_s[v] = 1;
    return phi_of(evaluate_cut(table, sd.pi, in_s, members), 0.5 + 1e-12);
}

SpectralReport spectral_report(const Graph& g, WalkPolicy policy, ConductanceMode mode,
                               const std::vector<std::uint64_t>& tv_times, Vertex tv_start,
                               double eps, std::uint64_t samples, std::uint64_t seed) {
    SpectralReport report;
    report.lambda2 = second_eigenvalue(g, policy);
    auto phi = conductance(g, policy, mode, samples, seed);
    report.phi = phi.phi;
    report.phi_mode = phi.mode;
    report.phi_upper_bound_only = phi.upper_bound_only;
    report.periodic = is_bipartite(g);
    report.cheeger_ok = cheeger_check(report);
    for (std::uint64_t t : tv_times)
        report.tv_curve.emplace_back(t, tv_distance(g, policy, tv_start, t));
    report.b1 = (1.0 - eps) / (1.0 + eps);
    report.b2 = 401.0 / (1.0 + eps);
    report.paper_L = paper_mixing_constant(eps);
    return report;
}

bool cheeger_check(const SpectralReport& report) {
    // 1e-9 absorbs the eigenvalue solver tolerance.
    return report.lambda2 <= 1.0 - report.phi * report.phi / 2.0 + 1e-9;
}

ReturnProfile return_profile(const Graph& g, WalkPolicy policy, Vertex v, std::uint64_t T,
                             const ReturnProfileOptions& options) {
    if (v >= g.num_vertices()) throw PreconditionError("return_profile: vertex out of range");
    if (T == 0) throw PreconditionError("return_profile: horizon must be >= 1");

    ReturnProfile profile;
    profile.vertex = v;
    profile.horizon = T;
    profile.grid_angles = options.grid_angles;
    profile.grid_radii = options.grid_radii;

    const TransitionTable table = build_transitions(g, policy);
    if (options.monte_carlo_replicas) {
        const std::uint64_t reps = *options.monte_carlo_replicas;
        if (reps < 1000)
            throw PreconditionError("return_profile: monte_carlo requires at least 10^3 replicas");
        profile.exact = false;
        profile.mc_replicas = reps;
        std::vector<std::uint64_t> hits(T, 0);
        std::mutex merge;
        const unsigned workers = resolve_threads(options.threads);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                std::vector<std::uint64_t> local(T, 0);
                for (std::uint64_t i = w; i < reps; i += workers) {
                    Rng rng = Rng::stream(options.seed, i);
                    Vertex x = v;
                    local[0]++;
                    for (std::uint64_t t = 1; t < T; ++t) {
                        x = table.step(x, rng);
                        if (x == v) local[t]++;
                    }
                }
                std::lock_guard<std::mutex> lock(merge);
                for (std::uint64_t t = 0; t < T; ++t) hits[t] += local[t];
            });
        for (auto& th : pool) th.join();
        profile.r.resize(T);
        for (std::uint64_t t = 0; t < T; ++t)
            profile.r[t] = static_cast<double>(hits[t]) / static_cast<double>(reps);
    } else {
        require_dense(g, "return_profile (exact)");
        profile.r = return_probabilities(table, v, T);
    }

    profile.r1 = 0.0;
    for (double rt : profile.r) profile.r1 += rt;

    profile.k_constant =
        options.k_constant > 0 ? options.k_constant : std::max(3.0, 3.0 * profile.r1);

    // min |R(T,z)| over a radial grid of the disk of radius 1 + 1/(KT).
    const double rmax = 1.0 + 1.0 / (profile.k_constant * static_cast<double>(T));
    double min_mod = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= profile.grid_radii; ++j) {
        const double radius = rmax * static_cast<double>(j) / profile.grid_radii;
        for (int a = 0; a < profile.grid_angles; ++a) {
            const double angle = 2.0 * std::numbers::pi * a / profile.grid_angles;
            const std::complex<double> z = std::polar(radius, angle);
            std::complex<double> acc = 0.0;
            for (std::size_t t = profile.r.size(); t-- > 0;) acc = acc * z + profile.r[t];
            min_mod = std::min(min_mod, std::abs(acc));
        }
    }
    profile.min_modulus = min_mod;
    profile.theta = 0.25;
    profile.theta_ok = min_mod >= profile.theta;
    return profile;
}

double first_visit_prediction(double pi_v, double r_v, double t) {
    if (!(pi_v > 0.0 && pi_v < 1.0))
        throw PreconditionError("first_visit_prediction: pi_v must lie in (0,1)");
    if (!(r_v >= 1.0)) throw PreconditionError("first_visit_prediction: R_v must be >= 1");
    if (t < 0.0) throw PreconditionError("first_visit_prediction: t must be >= 0");
    return std::exp(-t * pi_v / r_v);
}

double exact_avoidance(const Graph& g, WalkPolicy policy, Vertex start,
                       std::span<const Vertex> avoid, std::uint64_t t) {
    for (Vertex a : avoid)
        if (a == start) throw PreconditionError("exact_avoidance: start lies in the avoided set");
    if (t == 0 || avoid.empty()) return 1.0;
    return exact_avoidance_window(g, policy, start, avoid, 1, t);
}

double exact_avoidance_window(const Graph& g, WalkPolicy policy, Vertex start,
                              std::span<const Vertex> avoid, std::uint64_t T, std::uint64_t t) {
    require_dense(g, "exact_avoidance");
    const Vertex n = g.num_vertices();
    if (start >= n) throw PreconditionError("exact_avoidance: start out of range");
    for (Vertex a : avoid)
        if (a >= n) throw PreconditionError("exact_avoidance: avoided vertex out of range");
    if (t < T) throw PreconditionError("exact_avoidance: window end below start");
    if (avoid.empty()) return 1.0;

    const TransitionTable table = build_transitions(g, policy);
    VectorXd dist = VectorXd::Zero(n), next(n);
    dist[start] = 1.0;
    if (T == 0)
        for (Vertex a : avoid) dist[a] = 0.0; // X_0 itself must miss the set
    for (std::uint64_t s = 1; s <= t; ++s) {
        propagate_row(table, dist.data(), next.data());
        dist.swap(next);
        if (s >= T)
            for (Vertex a : avoid) dist[a] = 0.0;
    }
    return dist.sum();
}

void BirthDeathParams::validate() const {
    if (alpha < 0.0 || rho < 0.0 || alpha + rho > 1.0)
        throw PreconditionError("birth_death: need alpha, rho >= 0 and alpha + rho <= 1");
    if (rho < alpha) throw PreconditionError("birth_death: coupling requires rho >= alpha");
    if (rho > 0.5) throw PreconditionError("birth_death: requires rho <= 1/2");
    if (horizon == 0) throw PreconditionError("birth_death: horizon must be >= 1");
    if (alpha >= beta())
        throw PreconditionError("birth_death: bound undefined for alpha >= beta");
}

BirthDeathResult birth_death_e0(const BirthDeathParams& params, std::uint64_t replicas,
                                std::uint64_t seed, int threads) {
    params.validate();
    if (replicas == 0) throw PreconditionError("birth_death: replicas must be >= 1");
    const double alpha = params.alpha, rho = params.rho;
    const std::uint64_t T = params.horizon;

    BirthDeathResult result;
    result.replicas = replicas;
    result.bound = (1.0 + 2.0 * rho + 2.0 * alpha * alpha * static_cast<double>(T)) /
                   (1.0 - alpha / params.beta());
    result.e4_estimate = 2.0 * static_cast<double>(T) * alpha * alpha * alpha;

    std::vector<std::uint64_t> visit_sum_per_worker;
    const unsigned workers = resolve_threads(threads);
    visit_sum_per_worker.assign(workers, 0);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            std::uint64_t local = 0;
            for (std::uint64_t i = w; i < replicas; i += workers) {
                Rng rng = Rng::stream(seed, i);
                int state = 0;
                std::uint64_t visits = 0;
                for (std::uint64_t t = 0; t < T; ++t) {
                    if (state == 0) ++visits;
                    // reflection at 4; interior states move left/stay/right
                    if (state == 4) {
                        state = 3;
                    } else if (state == 0) {
                        if (!rng.bernoulli(rho)) state = 1;
                    } else {
                        const double u = rng.next_double();
                        if (u < alpha) --state;
                        else if (u >= alpha + rho) ++state;
                    }
                }
                local += visits;
            }
            visit_sum_per_worker[w] = local;
        });
    for (auto& th : pool) th.join();
    std::uint64_t total = 0;
    for (std::uint64_t s : visit_sum_per_worker) total += s;
    result.simulated_e0 = static_cast<double>(total) / static_cast<double>(replicas);
    return result;
}

RvClassReport r_v_bound_check(const Graph& g, WalkPolicy policy, const TypicalityReport& audit,
                              std::uint64_t T, int threads) {
    const Vertex n = g.num_vertices();
    RvClassReport report;
    report.horizon = T;
    report.classes = classify_vertices(g, audit.params.np);
    report.r_values.assign(n, 0.0);

    const TransitionTable table = build_transitions(g, policy);
    const bool dense = n <= kDenseLimit;
    parallel_for(n, threads, [&](std::uint64_t vi) {
        const Vertex v = static_cast<Vertex>(vi);
        double r1 = 0.0;
        if (dense) {
            for (double rt : return_probabilities(table, v, T)) r1 += rt;
        } else {
            // Monte Carlo fallback above the dense limit.
            const std::uint64_t reps = 4000;
            std::uint64_t hits = 0;
            for (std::uint64_t i = 0; i < reps; ++i) {
                Rng rng = Rng::stream(0xabcd1234ULL + v, i);
                Vertex x = v;
                ++hits;
                for (std::uint64_t t = 1; t < T; ++t) {
                    x = table.step(x, rng);
                    if (x == v) ++hits;
                }
            }
            r1 = static_cast<double>(hits) / static_cast<double>(reps);
        }
        report.r_values[vi] = r1;
    });

    report.all_at_least_one = true;
    report.a_class_ok = true;
    report.neighbor_class_ok = true;
    std::vector<double> b_excess;
    for (Vertex v = 0; v < n; ++v) {
        const double rv = report.r_values[v];
        if (rv < 1.0 - 1e-9) {
            report.all_at_least_one = false;
            report.violations.push_back(v);
        }
        switch (report.classes.labels[v]) {
            case VertexClass::a_class:
                if (rv > 1.0 + 402.0 / g.degree(v)) {
                    report.a_class_ok = false;
                    report.violations.push_back(v);
                }
                break;
            case VertexClass::neighbor_of_a:
                if (rv > 1.0 + 402.0 / g.degree(report.classes.a_neighbor[v])) {
                    report.neighbor_class_ok = false;
                    report.violations.push_back(v);
                }
                break;
            case VertexClass::b_class:
                b_excess.push_back(rv - 1.0);
                break;
            case VertexClass::other:
                break;
        }
    }
    if (!b_excess.empty()) {
        std::sort(b_excess.begin(), b_excess.end());
        report.b_class_median_excess = b_excess[b_excess.size() / 2];
    }
    report.b_class_ok =
        b_excess.empty() ||
        report.b_class_median_excess <= 5.0 / std::log(static_cast<double>(n));
    return report;
}

} // namespace walklab
