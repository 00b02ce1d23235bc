#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ril/lattice.hpp"
#include "ril/rng.hpp"
#include "ril/tilt.hpp"

namespace ril {

enum class Terminal { hit_target, exited_domain, escape_declared, time_reached };
const char* to_string(Terminal t);

struct Step {
    Site site;
    double holding = 0.0;
    // the walk reached this site through an excursion outside the window, not by a single jump
    bool after_excursion = false;
};

struct Trajectory {
    std::vector<Step> steps;
    Terminal terminal_reason = Terminal::hit_target;
    double escape_bias = 0.0;  // bound on the probability that a declared escape was wrong
    long long jumps = 0;
};

struct StopRule {
    enum class Kind { enter, exit, enter_or_exit, escape };
    Kind kind = Kind::exit;
    SiteSet target;  // entered set (enter, enter_or_exit) or escape target
    SiteSet domain;  // exited set (exit, enter_or_exit)
    double tolerance = 1e-4;
    double time_limit = -1.0;  // optional deterministic stop time, < 0 for none

    static StopRule enter(SiteSet A);
    static StopRule exit(SiteSet U);
    static StopRule enter_or_exit(SiteSet A, SiteSet U);
    static StopRule escape(SiteSet W, double tolerance);
    StopRule& until(double t) {
        time_limit = t;
        return *this;
    }
    void validate() const;
};

// Exit kernel of the simple walk from the outer boundary of the box W = B_inf(center, R):
// P_y[H_W < infinity] and the entrance law on the inner boundary, computed from the free Green
// function (return probability sum_z g(y,z) e_W(z)). Rows are stored for one representative per
// orbit of the cube symmetries.
class ExitKernel {
public:
    static std::shared_ptr<const ExitKernel> get(int d, int R);

    int dim() const { return d_; }
    int radius() const { return R_; }
    double capacity() const { return cap_; }
    // inner boundary of B_inf(0, R), with e_W over it
    const std::vector<Site>& inner() const { return inner_; }
    const std::vector<double>& equilibrium() const { return eq_; }
    // sample an entrance point of B_inf(0,R) for the walk at y (outside, adjacent); false means escape
    bool sample_return(const Site& y, RngStream& rng, Site& z) const;
    double return_probability(const Site& y) const;
    // sample from e_W / cap(W)
    Site sample_entry(RngStream& rng) const;
    // certified bound on the error of any return probability
    double bias_bound() const { return bias_; }

private:
    ExitKernel(int d, int R);
    int d_, R_;
    double cap_ = 0.0, bias_ = 0.0;
    std::vector<Site> inner_;
    std::vector<double> eq_, eq_cum_;
    std::vector<std::vector<double>> rows_cum_;  // cumulative entrance law per canonical y
    std::vector<double> ret_;                    // return probability per canonical y
    std::unordered_map<Site, int, SiteHash> canon_index_;
    int row_of(const Site& ycanon) const;
};

struct WalkOptions {
    bool record_holding = true;  // false skips clock sampling when no time functional is needed
    long long max_jumps = 100'000'000LL;
    // window for escape rules: B_inf(center, R) must contain the escape target and the tilt closure
    int escape_radius = -1;
    Site escape_center;
};

// Uniform walk when profile is null or trivial, tilted walk otherwise.
Trajectory sample_walk(const Site& start, const TiltProfile* profile, const StopRule& stop, RngStream& rng,
                       const WalkOptions& opt = {});

// sum of V(site) * holding from the first entrance into U~_N
double potential_integral(const Trajectory& traj, const TiltProfile& profile);
// (f(last)/f(first)) exp(int_0^t V(X_s) ds)
double martingale_weight(const Trajectory& traj, const TiltProfile& profile);
// (1/2d) sum_e [ (f'/f) log(f'/f) - (f' - f)/f ]
double psi(const TiltProfile& profile, const Site& x);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace ril
