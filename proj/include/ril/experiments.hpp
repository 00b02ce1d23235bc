#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "ril/interlace.hpp"
#include "ril/lattice.hpp"
#include "ril/stats.hpp"
#include "ril/tilt.hpp"

namespace ril {

struct ExperimentConfig {
    TiltParams tilt;
    // window B_inf(0, R) for the Monte Carlo drivers; <= 0 picks the smallest radius covering the tilt
    int window_radius = 0;
    // extra radii reported by disconnect_direct so the proxy bias of the window is visible
    std::vector<int> window_radii;
    std::vector<int> N_list;
    long long replicas = 10000;
    std::uint64_t seed = 1;
    double escape_tol = 1e-5;
    double r1 = 0.1, r2 = 0.3, r3 = 0.4, r4 = 0.6;
    int gamma_samples = 4;  // points of the fence used by domination_report and scan_alpha_beta
    int threads = 1;
    long long beta_walks = 0;  // Monte Carlo cross-check of beta(N); 0 disables

    void validate() const;
    // window radius used at the current tilt.N (explicit or automatic); throws if it misses the tilt
    int window_for(const TiltProfile& prof) const;
};

// Runs body(i, rng) for i in [0, n) on `threads` workers, stream i of `seed`, results in index order.
template <class T>
std::vector<T> run_replicas(long long n, int threads, std::uint64_t seed, std::uint64_t stream_offset,
                            const std::function<T(long long, RngStream&)>& body);

// Disconnection of K_N from the inner boundary of the window, grid form.
class DisconnectionProbe {
public:
    DisconnectionProbe(const BoxIndex& window, const SiteSet& K);
    bool operator()(const std::vector<char>& occupied) const;

private:
    BoxIndex box_;
    std::vector<long long> sources_;
    std::vector<char> target_;
};

struct DirectRow {
    int window_radius = 0;
    double u = 0.0;
    EstimatorResult result;
};

// Standard interlacements at level u; rows for cfg.window_radius and every extra radius.
std::vector<DirectRow> disconnect_direct(const ExperimentConfig& cfg, double u, int N);
// Several levels from one thinning-coupled run per replica, so the estimates are monotone in u.
std::vector<DirectRow> disconnect_direct_levels(const ExperimentConfig& cfg, const std::vector<double>& levels, int N);

struct TiltedRow {
    int N = 0;
    int window_radius = 0;
    EstimatorResult result;
};
struct TiltedTrend {
    std::vector<TiltedRow> rows;
    bool nondecreasing = true;  // no point decrease
    bool violation = false;     // some decrease larger than 3 s.e.
    bool inconclusive = false;  // some point decrease within 3 s.e.
};
TiltedTrend disconnect_tilted(const ExperimentConfig& cfg, const std::vector<int>& N_list);

struct ImportanceReport {
    EstimatorResult log_result;     // log P_u[A_N], delta-method s.e.
    EstimatorResult linear;         // P_u[A_N] itself
    EstimatorResult tilted_frequency;
    double entropy = 0.0;           // H(P~_N | P_u), shared with tilt::entropy
    double entropy_bound = 0.0;     // log P~[A] - (H + 1/e) / P~[A]
    double asymptotic_target = 0.0; // -(1/d)(sqrt(u_**) - sqrt(u))^2 cap(K) N^{d-2}
    double ess = 0.0;
    bool unreliable = false;        // ess < 30
    int window_radius = 0;
};
ImportanceReport disconnect_is(const ExperimentConfig& cfg, int N);

struct DominationPoint {
    Site x;
    double cap_B3 = 0.0, tilted_cap_B3 = 0.0;
    double capacity_margin = 0.0;   // u cap~(B3) - (u_** + eps/2) cap(B3)
    double equilibrium_margin = 0.0;   // min_z u e~_{B1}(z) - (u_** + eps/4) e_{B1}(z)
    double entrance_ratio = 0.0;  // min_z min_y h_{B1,B4}(y,z) / max_y h_{B1}(y,z)
    double entrance_margin = 0.0;  // entrance_ratio - (1 - eps')
    double certificate = 0.0;     // largest discretisation change seen in the tilted capacities
};
struct DominationReport {
    int N = 0;
    double eps_prime = 0.0;
    int radius_B1 = 0;
    double radius_B3 = 0.0, radius_B4 = 0.0;
    std::size_t gamma_size = 0;
    std::vector<DominationPoint> points;
    double occupation_residual = 0.0;
    double min_capacity_margin = 0.0, min_equilibrium_margin = 0.0, min_entrance_margin = 0.0;
};
DominationReport domination_report(const ExperimentConfig& cfg, int N);

struct AlphaBetaRow {
    int N = 0;
    double alpha = 0.0;
    Site alpha_argmax;
    double beta = 0.0;         // exact, from the tilted escape potential of B3
    double beta_mc = -1.0;     // Monte Carlo cross-check, < 0 when skipped
    double beta_mc_se = 0.0;
    double beta_plain = 0.0;   // same quantity for the simple walk
};
struct AlphaBetaScan {
    std::vector<AlphaBetaRow> rows;
    bool alpha_decreasing = true;
    bool beta_decreasing = true;
};
// alpha(N) = sup_{x in inner boundary of B(0,N)} |sum_{y in B(0,N)} g(x,y) / (c1 N^2) - 1|
double alpha_N(int N, double c1, Site* argmax = nullptr);
AlphaBetaScan scan_alpha_beta(const ExperimentConfig& cfg, const std::vector<int>& N_list, double c1 = 2.0);

struct PanelEvent {
    std::string name;
    EstimatorResult tilted, standard;
    bool violation = false;  // tilted + 3 s.e. < standard
};
struct CouplingReport {
    Site center;
    double comparison_level = 0.0;
    std::vector<PanelEvent> panel;
    EstimatorResult tilted_trace_mean, standard_trace_mean;
    int violations = 0;
    bool trace_mean_dominates = false;
};
CouplingReport coupling_check(const ExperimentConfig& cfg, int N, double comparison_level = -1.0);

// Fence points used by the section-3 drivers: one representative per symmetry class when the shape is
// centred, then a seeded subsample of `count` of them (sorted, reproducible).
std::vector<Site> fence_sample(const TiltProfile& prof, int count, std::uint64_t seed);

template <class T>
std::vector<T> run_replicas(long long n, int threads, std::uint64_t seed, std::uint64_t stream_offset,
                            const std::function<T(long long, RngStream&)>& body) {
    std::vector<T> out(static_cast<std::size_t>(n));
    const int w = std::max(1, std::min<int>(threads, static_cast<int>(std::max<long long>(n, 1))));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    auto work = [&](int t) {
        try {
            for (long long i = t; i < n; i += w) {
                RngStream rng(seed, stream_offset + static_cast<std::uint64_t>(i));
                out[static_cast<std::size_t>(i)] = body(i, rng);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
    };
    if (w == 1) {
        work(0);
        if (errors[0]) std::rethrow_exception(errors[0]);
        return out;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace ril

