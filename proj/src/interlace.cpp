#include "ril/interlace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ril/potential.hpp"

namespace ril {

SiteSet InterlacementSample::trace_set() const {
    SiteSet s(window.dim());
    for (long long k = 0; k < window.size(); ++k)
        if (trace[k]) s.insert(window.site(k));
    return s;
}

long long InterlacementSample::trace_size() const {
    return std::count(trace.begin(), trace.end(), 1);
}

InterlacementSampler::InterlacementSampler(const SiteSet& M, std::shared_ptr<const TiltProfile> profile, bool tilted,
                                           double escape_tol, int window_radius)
    : d_(M.dim()), R_(window_radius), tilted_(tilted), prof_(std::move(profile)) {
    if (M.size() == 0) throw std::invalid_argument("InterlacementSampler: empty set M");
    if (!prof_) prof_ = TiltProfile::trivial(d_);
    if (prof_->dim() != d_) throw std::invalid_argument("InterlacementSampler: profile dimension mismatch");
    const bool tilt_on = !prof_->is_trivial();
    int need = 1;
    for (const auto& s : M) need = std::max(need, s.norm_inf());
    if (tilt_on) need = std::max(need, prof_->support_radius() + 1);
    if (R_ < 0) R_ = need;
    if (R_ < need)
        throw std::invalid_argument("InterlacementSampler: window radius " + std::to_string(R_) +
                                    " must cover M and the tilt closure (needs " + std::to_string(need) + ")");
    kernel_ = ExitKernel::get(d_, R_);
    if (kernel_->bias_bound() > escape_tol)
        throw std::runtime_error("InterlacementSampler: exit kernel bias " + std::to_string(kernel_->bias_bound()) +
                                 " above escape_tol");
    box_ = BoxIndex::cube(d_, R_);

    // entrance law: the window itself uses the kernel's equilibrium measure, which is also the tilted one
    // because the tilt vanishes on the window's inner boundary and outside
    const SiteSet inner = boundaries(sup_ball(d_, R_)).inner;
    const bool whole_window = M.size() == static_cast<std::size_t>(box_.size()) || M == inner;
    double acc = 0.0;
    auto push = [&](const Site& s, double w) {
        if (w <= 0) return;
        acc += w;
        entry_index_.push_back(box_.index(s));
        entry_cum_.push_back(acc);
    };
    if (whole_window) {
        for (std::size_t i = 0; i < kernel_->inner().size(); ++i) push(kernel_->inner()[i], kernel_->equilibrium()[i]);
    } else if (tilted_ && tilt_on) {
        const TiltedCapacity tc = tilted_equilibrium_and_capacity(M, *prof_);
        for (std::size_t i = 0; i < M.size(); ++i) push(M[i], tc.measure.weights[i]);
    } else {
        const EquilibriumMeasure em = equilibrium_and_capacity(M);
        for (std::size_t i = 0; i < M.size(); ++i) push(M[i], em.weights[i]);
    }
    cap_ = acc;

    const long long n = box_.size();
    const int nd = 2 * d_;
    need_time_ = tilt_on;
    walk_tilted_ = tilted_ && tilt_on;
    rate_.assign(n, 1.0);
    V_.assign(n, 0.0);
    cum_.assign(n * nd, 0.0);
    leaves_.assign(n, 0);
    delta_.resize(nd);
    for (int k = 0; k < nd; ++k) delta_[k] = (k & 1 ? -1 : 1) * box_.stride(k >> 1);
    for (long long k = 0; k < n; ++k) {
        const Site x = box_.site(k);
        double acc_f = 0.0;
        for (int j = 0; j < nd; ++j) {
            const Site y = x.neighbor(j);
            if (!box_.contains(y)) leaves_[k] |= static_cast<std::uint16_t>(1u << j);
            acc_f += tilted_ ? prof_->f(y) : 1.0;
            cum_[k * nd + j] = acc_f;
        }
        for (int j = 0; j < nd; ++j) cum_[k * nd + j] /= acc_f;
        if (tilted_) rate_[k] = acc_f / (nd * prof_->f(x));
        V_[k] = tilt_on ? prof_->V(x) : 0.0;
    }
}

void InterlacementSampler::run_trajectory(RngStream& rng, std::vector<char>& trace, double& F, Trajectory* keep,
                                          bool record_times) const {
    const int nd = 2 * d_;
    const double x0 = rng.uniform() * cap_;
    std::size_t e = static_cast<std::size_t>(std::upper_bound(entry_cum_.begin(), entry_cum_.end(), x0) - entry_cum_.begin());
    long long k = entry_index_[std::min(e, entry_index_.size() - 1)];
    bool excursion = false;
    long double f_acc = 0.0L;
    long long jumps = 0;
    while (true) {
        trace[k] = 1;
        double hold = 0.0;
        if (record_times) {
            hold = rng.exponential(rate_[k]);
            f_acc += V_[k] * hold;
        }
        if (keep) keep->steps.push_back({box_.site(k), hold, excursion});
        excursion = false;
        int dir;
        if (walk_tilted_) {
            const double v = rng.uniform();
            const double* c = &cum_[k * nd];
            dir = nd - 1;
            for (int j = 0; j < nd - 1; ++j)
                if (v <= c[j]) {
                    dir = j;
                    break;
                }
        } else {
            dir = static_cast<int>(rng.below(nd));
        }
        if (++jumps > 100'000'000LL) throw std::runtime_error("interlacement trajectory exceeded the jump cap");
        if ((leaves_[k] >> dir) & 1u) {
            const Site y = box_.site(k).neighbor(dir);
            Site z;
            if (!kernel_->sample_return(y, rng, z)) {
                if (keep) {
                    keep->steps.push_back({y, 0.0, false});
                    keep->terminal_reason = Terminal::escape_declared;
                    keep->escape_bias = kernel_->bias_bound();
                }
                break;
            }
            k = box_.index(z);
            excursion = true;
        } else {
            k += delta_[dir];
        }
    }
    if (keep) keep->jumps = jumps;
    F += static_cast<double>(f_acc);
}

InterlacementSample InterlacementSampler::sample(double u, RngStream& rng, const SampleOptions& opt) const {
    if (u < 0) throw std::invalid_argument("interlacement level must be nonnegative");
    InterlacementSample s;
    s.window = box_;
    s.level = u;
    s.tilted = tilted_;
    s.trace.assign(box_.size(), 0);
    s.escape_tol = kernel_->bias_bound();
    s.seed = rng.seed();
    s.stream = rng.stream_id();
    s.count = rng.poisson(u * cap_);
    const bool times = opt.record_times && need_time_;
    for (long long i = 0; i < s.count; ++i) {
        if (opt.keep_trajectories) {
            s.trajectories.emplace_back();
            run_trajectory(rng, s.trace, s.F, &s.trajectories.back(), times);
        } else {
            run_trajectory(rng, s.trace, s.F, nullptr, times);
        }
    }
    return s;
}

std::vector<std::vector<char>> InterlacementSampler::sample_levels(const std::vector<double>& levels, RngStream& rng) const {
    if (tilted_) throw std::logic_error("sample_levels couples the standard cloud only");
    double umax = 0.0;
    for (double u : levels) {
        if (u < 0) throw std::invalid_argument("interlacement level must be nonnegative");
        umax = std::max(umax, u);
    }
    std::vector<std::vector<char>> traces(levels.size(), std::vector<char>(box_.size(), 0));
    const long long count = rng.poisson(umax * cap_);
    std::vector<char> visited(box_.size());
    double F = 0.0;
    for (long long i = 0; i < count; ++i) {
        const double label = rng.uniform() * umax;
        std::fill(visited.begin(), visited.end(), 0);
        run_trajectory(rng, visited, F, nullptr, false);
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (label > levels[l]) continue;
            auto& t = traces[l];
            for (long long k = 0; k < box_.size(); ++k) t[k] |= visited[k];
        }
    }
    return traces;
}

InterlacementSample sample_interlacement(const SiteSet& M, double u, RngStream& rng, double escape_tol) {
    InterlacementSampler s(M, nullptr, false, escape_tol);
    return s.sample(u, rng);
}

InterlacementSample sample_tilted_interlacement(const SiteSet& M, std::shared_ptr<const TiltProfile> profile,
                                                RngStream& rng, double escape_tol) {
    const double u = profile->params().u;
    InterlacementSampler s(M, std::move(profile), true, escape_tol);
    return s.sample(u, rng);
}

SiteSet vacant(const InterlacementSample& s, const SiteSet& region) {
    SiteSet out(region.dim());
    for (const auto& x : region) {
        if (!s.window.contains(x)) throw std::invalid_argument("vacant: region must lie in the window");
        if (!s.trace[s.window.index(x)]) out.insert(x);
    }
    return out;
}

double importance_weight(const InterlacementSample& s, const TiltProfile& profile) {
    if (profile.is_trivial()) return 1.0;
    double F = s.F;
    if (!s.trajectories.empty()) {
        F = 0.0;
        for (const auto& t : s.trajectories) F += potential_integral(t, profile);
    }
    return std::exp(s.tilted ? -F : F);
}

std::string sample_summary_json(const InterlacementSample& s, double weight) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"seed\":" << s.seed << ",\"stream\":" << s.stream << ",\"count\":" << s.count
       << ",\"trace_size\":" << s.trace_size() << ",\"weight\":" << weight << ",\"bias_bound\":" << s.bias_bound() << "}";
    return os.str();
}

}  // namespace ril
