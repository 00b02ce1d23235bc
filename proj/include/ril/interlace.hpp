#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ril/lattice.hpp"
#include "ril/rng.hpp"
#include "ril/tilt.hpp"
#include "ril/walk.hpp"

namespace ril {

struct InterlacementSample {
    BoxIndex window;          // B_inf(0, R), the simulation window
    double level = 0.0;
    bool tilted = false;
    long long count = 0;      // Poisson draw = number of trajectories
    std::vector<char> trace;  // visited flag per window site
    std::vector<Trajectory> trajectories;  // only when requested
    double F = 0.0;           // sum of potential integrals over the trajectories
    double escape_tol = 0.0;  // per-trajectory truncation bias bound
    std::uint64_t seed = 0, stream = 0;

    SiteSet trace_set() const;
    long long trace_size() const;
    bool occupied(const Site& x) const { return window.contains(x) && trace[window.index(x)]; }
    double bias_bound() const { return count * escape_tol; }
};

struct SampleOptions {
    bool keep_trajectories = false;
    bool record_times = true;  // needed for F; skipped automatically when V = 0
};

// Standard or tilted interlacements seen from a set M inside a box window B_inf(0,R).
// Entrance points follow e_M (standard) or e~_M (tilted); forward parts run with the exact exit kernel
// of the window. The window must contain M and the tilt closure, so F is fully observed.
class InterlacementSampler {
public:
    InterlacementSampler(const SiteSet& M, std::shared_ptr<const TiltProfile> profile, bool tilted,
                         double escape_tol, int window_radius = -1);

    InterlacementSample sample(double u, RngStream& rng, const SampleOptions& opt = {}) const;
    // thinning coupling of the standard cloud: one draw at max(levels), trace(u) increasing in u
    std::vector<std::vector<char>> sample_levels(const std::vector<double>& levels, RngStream& rng) const;

    const BoxIndex& window() const { return box_; }
    int window_radius() const { return R_; }
    double capacity() const { return cap_; }
    double escape_tol() const { return kernel_->bias_bound(); }
    bool tilted() const { return tilted_; }
    const TiltProfile& profile() const { return *prof_; }

private:
    int d_, R_;
    bool tilted_;
    std::shared_ptr<const TiltProfile> prof_;
    std::shared_ptr<const ExitKernel> kernel_;
    BoxIndex box_;
    double cap_ = 0.0;
    std::vector<long long> entry_index_;
    std::vector<double> entry_cum_;
    bool need_time_ = false;
    bool walk_tilted_ = false;  // the uniform walk draws one integer per jump, the tilted one a uniform
    std::vector<double> rate_, V_, cum_;  // per window site; cum_ holds 2d cumulative jump weights
    std::vector<std::uint16_t> leaves_;   // bit k set when direction k leaves the window
    std::vector<long long> delta_;

    void run_trajectory(RngStream& rng, std::vector<char>& trace, double& F, Trajectory* keep,
                        bool record_times) const;
};

InterlacementSample sample_interlacement(const SiteSet& M, double u, RngStream& rng, double escape_tol);
InterlacementSample sample_tilted_interlacement(const SiteSet& M, std::shared_ptr<const TiltProfile> profile,
                                                RngStream& rng, double escape_tol);

SiteSet vacant(const InterlacementSample& s, const SiteSet& region);

// exp(-F) for tilted samples, exp(+F) for standard ones
double importance_weight(const InterlacementSample& s, const TiltProfile& profile);

// {seed, stream, count, trace_size, weight, bias_bound}
std::string sample_summary_json(const InterlacementSample& s, double weight);

}  // namespace ril
