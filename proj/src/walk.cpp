#include "ril/walk.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "ril/green.hpp"
#include "ril/potential.hpp"

namespace ril {

const char* to_string(Terminal t) {
    switch (t) {
        case Terminal::hit_target: return "hit_target";
        case Terminal::exited_domain: return "exited_domain";
        case Terminal::escape_declared: return "escape_declared";
        case Terminal::time_reached: return "time_reached";
    }
    return "?";
}

StopRule StopRule::enter(SiteSet A) {
    StopRule r;
    r.kind = Kind::enter;
    r.target = std::move(A);
    return r;
}

StopRule StopRule::exit(SiteSet U) {
    StopRule r;
    r.kind = Kind::exit;
    r.domain = std::move(U);
    return r;
}

StopRule StopRule::enter_or_exit(SiteSet A, SiteSet U) {
    StopRule r;
    r.kind = Kind::enter_or_exit;
    r.target = std::move(A);
    r.domain = std::move(U);
    return r;
}

StopRule StopRule::escape(SiteSet W, double tolerance) {
    StopRule r;
    r.kind = Kind::escape;
    r.target = std::move(W);
    r.tolerance = tolerance;
    return r;
}

void StopRule::validate() const {
    if (kind == Kind::escape && !(tolerance > 0.0 && tolerance < 1.0))
        throw std::invalid_argument("escape tolerance must lie in (0,1)");
    if ((kind == Kind::exit || kind == Kind::enter_or_exit) && domain.size() == 0)
        throw std::invalid_argument("exit rule needs a nonempty domain");
    if ((kind == Kind::enter || kind == Kind::enter_or_exit || kind == Kind::escape) && target.size() == 0)
        throw std::invalid_argument("stop rule target set is empty");
}

namespace {

// Map y to its representative (coordinates |y_i| sorted decreasingly) and remember how to undo it.
struct Orbit {
    std::array<int, kMaxDim> perm{};  // canonical slot j holds original axis perm[j]
    std::array<int, kMaxDim> sign{};
};

Site canonical(const Site& y, Orbit& o) {
    const int d = y.d;
    std::iota(o.perm.begin(), o.perm.begin() + d, 0);
    std::stable_sort(o.perm.begin(), o.perm.begin() + d, [&](int a, int b) { return std::abs(y[a]) > std::abs(y[b]); });
    Site c = Site::zero(d);
    for (int j = 0; j < d; ++j) {
        c[j] = std::abs(y[o.perm[j]]);
        o.sign[o.perm[j]] = y[o.perm[j]] < 0 ? -1 : 1;
    }
    return c;
}

Site uncanonical(const Site& zc, const Orbit& o) {
    Site z = Site::zero(zc.d);
    for (int j = 0; j < zc.d; ++j) z[o.perm[j]] = o.sign[o.perm[j]] * zc[j];
    return z;
}

std::size_t sample_cumulative(const std::vector<double>& cum, double x) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), x);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

}  // namespace

ExitKernel::ExitKernel(int d, int R) : d_(d), R_(R) {
    if (R < 1) throw std::invalid_argument("ExitKernel: radius must be >= 1");
    const FreeGreen& g = FreeGreen::get(d);
    if (2 * R + 1 > g.table_radius())
        throw std::invalid_argument("ExitKernel: window radius " + std::to_string(R) + " exceeds the tabulated Green range");
    inner_ = boundaries(sup_ball(d, R)).inner.sorted().sites();
    const int n = static_cast<int>(inner_.size());
    const Eigen::MatrixXd G = free_green_matrix(inner_, inner_);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw std::runtime_error("ExitKernel: Green matrix not positive definite");
    const Eigen::VectorXd e = llt.solve(Eigen::VectorXd::Ones(n));
    eq_.resize(n);
    eq_cum_.resize(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (e[i] < 0) throw std::runtime_error("ExitKernel: negative equilibrium weight");
        eq_[i] = e[i];
        acc += e[i];
        eq_cum_[i] = acc;
    }
    cap_ = acc;

    // canonical outer sites (R+1, a_2, ..., a_d) with R >= a_2 >= ... >= a_d >= 0
    std::vector<Site> canon;
    Site y = Site::zero(d);
    y[0] = R + 1;
    auto rec = [&](auto&& self, int i, int maxv) -> void {
        if (i == d) {
            canon.push_back(y);
            return;
        }
        for (int v = 0; v <= maxv; ++v) {
            y[i] = v;
            self(self, i + 1, v);
        }
    };
    rec(rec, 1, R);
    Eigen::MatrixXd rhs = free_green_matrix(inner_, canon);
    const Eigen::MatrixXd H = llt.solve(rhs);
    rows_cum_.resize(canon.size());
    ret_.resize(canon.size());
    double worst = 0.0;
    for (std::size_t r = 0; r < canon.size(); ++r) {
        canon_index_[canon[r]] = static_cast<int>(r);
        auto& cum = rows_cum_[r];
        cum.resize(n);
        double s = 0.0, neg = 0.0;
        for (int i = 0; i < n; ++i) {
            const double h = H(i, r);
            if (h < 0) neg += -h;
            s += std::max(0.0, h);
            cum[i] = s;
        }
        ret_[r] = s;
        worst = std::max(worst, neg);
        if (s >= 1.0) throw std::runtime_error("ExitKernel: return probability >= 1 at " + canon[r].str());
    }
    // first-order error of G^{-1} g with a perturbed Green table, plus clipped negative mass
    const double ginv = 1.0 / (llt.rcond() * G.cwiseAbs().rowwise().sum().maxCoeff());
    bias_ = g.certified_tol() * ginv * (1.0 + n * H.cwiseAbs().maxCoeff()) + worst;
}

std::shared_ptr<const ExitKernel> ExitKernel::get(int d, int R) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const ExitKernel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(d, R);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::shared_ptr<const ExitKernel>(new ExitKernel(d, R))).first;
    return it->second;
}

int ExitKernel::row_of(const Site& yc) const {
    const auto it = canon_index_.find(yc);
    if (it == canon_index_.end()) throw std::invalid_argument("ExitKernel: site " + yc.str() + " is not on the outer boundary");
    return it->second;
}

double ExitKernel::return_probability(const Site& y) const {
    Orbit o;
    return ret_[row_of(canonical(y, o))];
}

bool ExitKernel::sample_return(const Site& y, RngStream& rng, Site& z) const {
    Orbit o;
    const int r = row_of(canonical(y, o));
    const auto& cum = rows_cum_[r];
    const double x = rng.uniform();
    if (x > ret_[r]) return false;
    z = uncanonical(inner_[sample_cumulative(cum, x)], o);
    return true;
}

Site ExitKernel::sample_entry(RngStream& rng) const {
    return inner_[sample_cumulative(eq_cum_, rng.uniform() * cap_)];
}

namespace {

bool inside_box(const Site& x, const Site& c, int R) {
    for (int i = 0; i < x.d; ++i)
        if (std::abs(x[i] - c[i]) > R) return false;
    return true;
}

}  // namespace

Trajectory sample_walk(const Site& start, const TiltProfile* profile, const StopRule& stop, RngStream& rng,
                       const WalkOptions& opt) {
    stop.validate();
    const int d = start.d;
    const bool tilted = profile && !profile->is_trivial();
    if (profile && profile->dim() != d) throw std::invalid_argument("sample_walk: profile dimension mismatch");
    using K = StopRule::Kind;
    const bool has_target = stop.kind == K::enter || stop.kind == K::enter_or_exit;
    const bool has_domain = stop.kind == K::exit || stop.kind == K::enter_or_exit;

    std::shared_ptr<const ExitKernel> kernel;
    Site center = opt.escape_center.d == d ? opt.escape_center : Site::zero(d);
    if (stop.kind == K::escape) {
        if (stop.time_limit >= 0) throw std::invalid_argument("escape rules cannot carry a time limit");
        int R = opt.escape_radius;
        if (R < 0) {
            R = 1;
            for (const auto& s : stop.target) R = std::max(R, (s - center).norm_inf());
        }
        if (tilted) {
            const int need = profile->support_radius() + 1;
            for (int i = 0; i < d; ++i)
                if (std::abs(center[i]) + need > R)
                    throw std::invalid_argument("sample_walk: escape window must contain the tilt closure");
        }
        for (const auto& s : stop.target)
            if (!inside_box(s, center, R)) throw std::invalid_argument("sample_walk: escape window must contain the target");
        if (!inside_box(start, center, R)) throw std::invalid_argument("sample_walk: start outside the escape window");
        kernel = ExitKernel::get(d, R);
        if (kernel->bias_bound() > stop.tolerance)
            throw std::runtime_error("sample_walk: escape kernel accuracy worse than the tolerance");
    }

    Trajectory tr;
    Site x = start;
    double t = 0.0;
    bool excursion = false;
    auto stopped_at = [&](const Site& s) -> bool {
        if (has_target && stop.target.contains(s)) {
            tr.terminal_reason = Terminal::hit_target;
            return true;
        }
        if (has_domain && !stop.domain.contains(s)) {
            tr.terminal_reason = Terminal::exited_domain;
            return true;
        }
        return false;
    };
    double nb[2 * kMaxDim];
    while (true) {
        if (stopped_at(x)) {
            tr.steps.push_back({x, 0.0, excursion});
            break;
        }
        double rate = 1.0, total = 2.0 * d;
        if (tilted) {
            const double fx = profile->f(x);
            total = 0.0;
            for (int k = 0; k < 2 * d; ++k) {
                nb[k] = profile->f(x.neighbor(k));
                total += nb[k];
            }
            rate = total / (2.0 * d * fx);
        }
        double hold = opt.record_holding || stop.time_limit >= 0 ? rng.exponential(rate) : 0.0;
        if (stop.time_limit >= 0 && t + hold >= stop.time_limit) {
            tr.steps.push_back({x, stop.time_limit - t, excursion});
            tr.terminal_reason = Terminal::time_reached;
            break;
        }
        t += hold;
        tr.steps.push_back({x, hold, excursion});
        excursion = false;
        if (++tr.jumps > opt.max_jumps)
            throw std::runtime_error("sample_walk: stop rule not reached within " + std::to_string(opt.max_jumps) + " jumps");
        int k;
        if (tilted) {
            const double v = rng.uniform() * total;
            double acc = 0.0;
            k = 2 * d - 1;
            for (int j = 0; j < 2 * d; ++j) {
                acc += nb[j];
                if (v <= acc) {
                    k = j;
                    break;
                }
            }
        } else {
            k = static_cast<int>(rng.below(2 * d));
        }
        Site y = x.neighbor(k);
        if (kernel && !inside_box(y, center, kernel->radius())) {
            Site z;
            if (!kernel->sample_return(y - center, rng, z)) {
                tr.steps.push_back({y, 0.0, false});
                tr.terminal_reason = Terminal::escape_declared;
                tr.escape_bias = kernel->bias_bound();
                break;
            }
            y = z + center;
            excursion = true;
        }
        x = y;
    }
    return tr;
}

double potential_integral(const Trajectory& traj, const TiltProfile& profile) {
    if (profile.is_trivial()) return 0.0;
    long double s = 0.0L;
    bool entered = false;
    for (const auto& st : traj.steps) {
        if (!entered) entered = profile.in_Utilde_N(st.site);
        if (entered) s += profile.V(st.site) * st.holding;
    }
    return static_cast<double>(s);
}

double martingale_weight(const Trajectory& traj, const TiltProfile& profile) {
    if (traj.steps.empty()) throw std::invalid_argument("martingale_weight: empty trajectory");
    if (profile.is_trivial()) return 1.0;
    long double s = 0.0L;
    for (const auto& st : traj.steps) s += profile.V(st.site) * st.holding;
    return profile.f(traj.steps.back().site) / profile.f(traj.steps.front().site) * std::exp(static_cast<double>(s));
}

double psi(const TiltProfile& profile, const Site& x) {
    const int d = profile.dim();
    const double fx = profile.f(x);
    double s = 0.0;
    for (int k = 0; k < 2 * d; ++k) {
        const double q = profile.f(x.neighbor(k)) / fx;
        s += q * std::log(q) - (q - 1.0);
    }
    return s / (2.0 * d);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "# terminal=" << to_string(traj.terminal_reason) << " escape_bias=" << traj.escape_bias << " units=holding_in_process_time\n";
    os << "step_index";
    const int d = traj.steps.empty() ? 0 : traj.steps[0].site.d;
    for (int i = 1; i <= d; ++i) os << ",x" << i;
    os << ",holding\n";
    os.precision(17);
    for (std::size_t n = 0; n < traj.steps.size(); ++n) {
        os << n;
        for (int i = 0; i < d; ++i) os << ',' << traj.steps[n].site[i];
        os << ',' << traj.steps[n].holding << '\n';
    }
}

}  // namespace ril
