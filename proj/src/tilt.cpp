#include "ril/tilt.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ril/green.hpp"
#include "ril/grid_solver.hpp"

namespace ril {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

struct RadialTable {
    double lo_a, hi_a, lo_u, hi_u;
    std::unique_ptr<Spline> inner, outer;
};

double TiltParams::plateau() const { return std::sqrt((u_star2 + epsilon) / u); }

double TiltParams::entropy_prefactor() const {
    const double s = std::sqrt(u_star2 + epsilon) - std::sqrt(u);
    return s * s;
}

namespace {

// farthest distance from the origin of the closed 2delta-neighbourhood of K
double reach(const ShapeSpec& s, double extra) {
    double c2 = 0.0;
    if (s.kind == ShapeKind::box) {
        for (double c : s.center) c2 += (std::abs(c) + s.size) * (std::abs(c) + s.size);
        return std::sqrt(c2) + extra;
    }
    for (double c : s.center) c2 += c * c;
    return std::sqrt(c2) + (s.kind == ShapeKind::ball ? s.size : 0.0) + extra;
}

}  // namespace

void TiltParams::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    if (d < 3 || d > kMaxDim) fail("dimension d must satisfy 3 <= d <= " + std::to_string(kMaxDim));
    if (!(u > 0)) fail("interlacement level u must be positive");
    if (!(u_star2 > 0)) fail("u_** must be positive");
    if (!(epsilon > 0)) fail("epsilon must be positive");
    if (u > u_star2 + epsilon) fail("plateau requires u <= u_** + epsilon");
    if (!(delta > 0 && delta < 1)) fail("delta must lie in (0,1)");
    if (!(eta > 0 && eta < delta)) fail("eta must lie in (0, delta)");
    if (N < 1) fail("N must be >= 1");
    if (shape.dim() != d) fail("shape center dimension does not match d");
    shape.validate();
    if (!(reach(shape, 2 * delta) < r_U)) fail("K^{2 delta} must lie inside the ball U of radius r_U");
}

std::string TiltParams::describe() const {
    std::ostringstream os;
    os.precision(10);
    os << "d=" << d << " u=" << u << " u_star2=" << u_star2 << " epsilon=" << epsilon << " delta=" << delta
       << " eta=" << eta << " r_U=" << r_U << " N=" << N;
    return os.str();
}

ShapeSpec fattened(const ShapeSpec& s, double r) {
    ShapeSpec t = s;
    t.fatten += r;
    return t;
}

double relative_capacity(int d, double a, double R) {
    if (!(a > 0 && a < R)) throw std::invalid_argument("relative_capacity needs 0 < a < R");
    return 1.0 / ((std::pow(a, 2.0 - d) - std::pow(R, 2.0 - d)) * brownian_c0(d));
}

double bump_normalization(int d, double eta) {
    // int_{|z|<eta} (1-|z/eta|^2)^4 dz = eta^d |S^{d-1}| B(d/2, 5) / 2
    const double sphere = 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
    return std::pow(eta, d) * sphere * boost::math::beta(d / 2.0, 5.0) / 2.0;
}

double bump(const double* z, int d, double eta) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += z[i] * z[i];
    s /= eta * eta;
    if (s >= 1.0) return 0.0;
    const double t = 1.0 - s;
    return t * t * t * t / bump_normalization(d, eta);
}

MollifierRule::MollifierRule(int d, double eta, int per_eta) {
    const double hq = eta / per_eta;
    const double vol = std::pow(hq, d);
    std::vector<double> z(d);
    std::vector<int> idx(d, 0);
    const int n = 2 * per_eta;
    double total = 0.0;
    for (;;) {
        for (int i = 0; i < d; ++i) z[i] = -eta + (idx[i] + 0.5) * hq;
        const double w = bump(z.data(), d, eta) * vol;
        if (w > 0) {
            offsets.push_back(z);
            weights.push_back(w);
            total += w;
        }
        int i = 0;
        while (i < d && ++idx[i] == n) idx[i++] = 0;
        if (i == d) break;
    }
    raw_mass = total;
    for (double& w : weights) w /= total;
}

double MollifierRule::apply(const std::function<double(const double*)>& h, const double* z) const {
    const int d = offsets.empty() ? 0 : static_cast<int>(offsets[0].size());
    std::vector<double> y(d);
    double acc = 0.0;
    for (std::size_t q = 0; q < weights.size(); ++q) {
        for (int i = 0; i < d; ++i) y[i] = z[i] - offsets[q][i];
        acc += weights[q] * h(y.data());
    }
    return acc;
}

RadialMollified::RadialMollified(double a, double rU, double eta) : a_(a), rU_(rU), eta_(eta) {
    C_ = 1.0 / (1.0 / a - 1.0 / rU);
}

double RadialMollified::h(double r) const {
    if (r <= a_) return 1.0;
    if (r >= rU_) return 0.0;
    return std::clamp(C_ * (1.0 / r - 1.0 / rU_), 0.0, 1.0);
}

double RadialMollified::Phi(double t) const {
    // int_0^t h(s) s ds
    if (t <= a_) return 0.5 * t * t;
    const double tt = std::min(t, rU_);
    return 0.5 * a_ * a_ + C_ * ((tt - a_) - (tt * tt - a_ * a_) / (2.0 * rU_));
}

double RadialMollified::value(double r) const {
    using boost::math::quadrature::gauss;
    const double Z = bump_normalization(3, eta_);
    auto phi = [&](double s) {
        const double t = 1.0 - (s * s) / (eta_ * eta_);
        return t > 0 ? t * t * t * t / Z : 0.0;
    };
    std::vector<double> cuts = {0.0, eta_};
    for (double c : {a_ - r, r - a_, rU_ - r, r - rU_, r, r + a_, r + rU_})
        if (c > 0 && c < eta_) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    if (r < 1e-12) {
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            acc += gauss<double, 20>::integrate([&](double s) { return phi(s) * 4.0 * M_PI * s * s * h(s); }, cuts[i], cuts[i + 1]);
        return acc;
    }
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0) continue;
        acc += gauss<double, 20>::integrate(
            [&](double s) { return phi(s) * s * (Phi(r + s) - Phi(std::abs(r - s))); }, cuts[i], cuts[i + 1]);
    }
    return std::clamp(2.0 * M_PI / r * acc, 0.0, 1.0);
}

TiltProfile::~TiltProfile() = default;

std::shared_ptr<const TiltProfile> TiltProfile::trivial(int d) {
    auto p = std::shared_ptr<TiltProfile>(new TiltProfile());
    p->p_.d = d;
    p->p_.shape.center.assign(d, 0.0);
    p->trivial_ = true;
    p->plateau_ = 1.0;
    p->support_radius_ = 0;
    return p;
}

double TiltProfile::radial_h_eta(double r) const {
    const RadialTable& t = *table_;
    if (r <= t.lo_a) return 1.0;
    if (r >= t.hi_u) return 0.0;
    if (r < t.hi_a) return std::clamp((*t.inner)(r), 0.0, 1.0);
    if (r <= t.lo_u) return radial_q_->h(r);  // mean value property inside the annulus
    return std::clamp((*t.outer)(r), 0.0, 1.0);
}

double TiltProfile::grid_h(const double* z) const {
    const BoxIndex& b = *cgrid_box_;
    const int d = p_.d;
    std::array<double, kMaxDim> frac{};
    long long k0 = 0;
    for (int i = 0; i < d; ++i) {
        const double g = z[i] / cgrid_h_;
        const int lo = static_cast<int>(std::floor(g));
        if (lo < b.lo()[i] || lo + 1 > b.hi()[i]) return 0.0;
        k0 += (lo - b.lo()[i]) * b.stride(i);
        frac[i] = g - lo;
    }
    double acc = 0.0;
    for (int m = 0; m < (1 << d); ++m) {
        double w = 1.0;
        long long k = k0;
        for (int i = 0; i < d; ++i) {
            if ((m >> i) & 1) {
                w *= frac[i];
                k += b.stride(i);
            } else {
                w *= 1.0 - frac[i];
            }
        }
        if (w != 0.0) acc += w * cgrid_[k];
    }
    return acc;
}

double TiltProfile::h_continuum(const double* z) const {
    if (trivial_) return 0.0;
    if (radial_) {
        double r2 = 0.0;
        for (int i = 0; i < p_.d; ++i) r2 += z[i] * z[i];
        return radial_q_->h(std::sqrt(r2));
    }
    return grid_h(z);
}

double TiltProfile::h_eta(const double* z) const {
    if (trivial_) return 0.0;
    if (radial_) {
        double r2 = 0.0;
        for (int i = 0; i < p_.d; ++i) r2 += z[i] * z[i];
        return radial_h_eta(std::sqrt(r2));
    }
    return std::clamp(rule_->apply([this](const double* y) { return h_continuum(y); }, z), 0.0, 1.0);
}

double TiltProfile::hN(const Site& x) const {
    if (trivial_) return 0.0;
    if (x.norm_inf() > support_radius_) return 0.0;
    if (grid_) return grid_->h[grid_->box.index(x)];
    if (radial_) return radial_h_eta(std::sqrt(static_cast<double>(x.norm2_sq())) / p_.N);
    std::array<double, kMaxDim> z{};
    for (int i = 0; i < p_.d; ++i) z[i] = static_cast<double>(x[i]) / p_.N;
    return h_eta(z.data());
}

double TiltProfile::f(const Site& x) const {
    if (trivial_) return 1.0;
    if (grid_) return grid_->f_at(x);
    return 1.0 + (plateau_ - 1.0) * hN(x);
}

double TiltProfile::V(const Site& x) const {
    if (trivial_) return 0.0;
    if (grid_) return grid_->V_at(x);
    const int d = p_.d;
    const double fx = f(x);
    double s = 0.0;
    for (int k = 0; k < 2 * d; ++k) s += f(x.neighbor(k));
    return -(s / (2.0 * d) - fx) / fx;
}

void TiltProfile::fill_grid() {
    const int d = p_.d;
    auto g = std::make_unique<ProfileGrid>();
    g->box = BoxIndex::cube(d, support_radius_ + 1);
    const long long n = g->box.size();
    g->h.assign(n, 0.0);
    g->f.assign(n, 1.0);
    g->V.assign(n, 0.0);
    for (long long k = 0; k < n; ++k) {
        g->h[k] = hN(g->box.site(k));
        g->f[k] = 1.0 + (plateau_ - 1.0) * g->h[k];
    }
    max_abs_V_ = 0.0;
    for (long long k = 0; k < n; ++k) {
        Site x = g->box.site(k);
        double s = 0.0;
        for (int j = 0; j < 2 * d; ++j) s += g->f_at(x.neighbor(j));
        const double fx = g->f[k];
        g->V[k] = -(s / (2.0 * d) - fx) / fx;
        max_abs_V_ = std::max(max_abs_V_, std::abs(g->V[k]));
        if (fx < 1.0 - 1e-12 || fx > plateau_ + 1e-12)
            throw std::runtime_error("tilt invariant f in [1, plateau] violated at " + x.str());
    }
    grid_ = std::move(g);
}

std::shared_ptr<const TiltProfile> TiltProfile::build(const TiltParams& p, bool materialize) {
    p.validate();
    auto prof = std::shared_ptr<TiltProfile>(new TiltProfile());
    TiltProfile& t = *prof;
    t.p_ = p;
    t.plateau_ = p.plateau();
    t.trivial_ = t.plateau_ == 1.0;
    if (t.trivial_) return prof;
    const int d = p.d;
    t.radial_ = d == 3 && p.shape.centered() && p.shape.kind != ShapeKind::box && p.shape.fatten == 0.0;
    t.support_radius_ = static_cast<int>(std::floor((p.r_U + p.eta) * p.N)) + 1;
    t.rule_ = std::make_unique<MollifierRule>(d, p.eta);
    t.moll_mass_err_ = std::abs(t.rule_->raw_mass - 1.0);

    if (t.radial_) {
        const double a = (p.shape.kind == ShapeKind::ball ? p.shape.size : 0.0) + 2.0 * p.delta;
        t.radial_q_ = std::make_unique<RadialMollified>(a, p.r_U, p.eta);
        auto tab = std::make_unique<RadialTable>();
        const int M = 4096;
        auto make = [&](double lo, double hi) {
            std::vector<double> v(M + 1);
            const double step = (hi - lo) / M;
            for (int i = 0; i <= M; ++i) v[i] = t.radial_q_->value(lo + i * step);
            return std::make_unique<Spline>(v.begin(), v.end(), lo, step, 0.0, 0.0);
        };
        tab->lo_a = a - p.eta;
        tab->hi_a = a + p.eta;
        tab->lo_u = p.r_U - p.eta;
        tab->hi_u = p.r_U + p.eta;
        tab->inner = make(tab->lo_a, tab->hi_a);
        tab->outer = make(tab->lo_u, tab->hi_u);
        t.table_ = std::move(tab);
    } else {
        double hg = p.grid_spacing > 0 ? p.grid_spacing : std::min(p.eta / 4.0, p.delta / 8.0);
        // power-of-two half width keeps every multigrid level odd; the spacing is stretched to fit
        int half = 8;
        while (2 * half * hg < p.r_U) half <<= 1;
        hg = p.r_U * (1.0 + 1.0 / half) / half;
        const long long nodes = static_cast<long long>(std::pow(2.0 * half + 1, d));
        if (nodes > 60'000'000LL)
            throw std::invalid_argument("continuum grid for the general-shape potential is too large; increase grid_spacing");
        t.cgrid_h_ = hg;
        t.h_grid_spacing_ = hg;
        t.cgrid_box_ = std::make_unique<BoxIndex>(BoxIndex::cube(d, half));
        GridSystem sys(*t.cgrid_box_);
        const ShapeSpec K2 = fattened(p.shape, 2.0 * p.delta);
        std::vector<double> z(d);
        for (long long k = 0; k < sys.box.size(); ++k) {
            Site s = sys.box.site(k);
            double r2 = 0.0;
            for (int i = 0; i < d; ++i) {
                z[i] = s[i] * hg;
                r2 += z[i] * z[i];
            }
            if (core_distance(p.shape, z.data()) <= K2.fatten) {
                sys.fixed[k] = 1;
                sys.u[k] = 1.0;
            } else if (r2 >= p.r_U * p.r_U) {
                sys.fixed[k] = 1;
                sys.u[k] = 0.0;
            }
        }
        solve(sys, 1e-10);
        t.cgrid_ = std::move(sys.u);
    }

    // plateau on K_N^delta: radial profiles are checked at the farthest site, others site by site
    if (t.radial_) {
        const double rmax = p.N * (reach(p.shape, p.delta)) + std::sqrt(static_cast<double>(d));
        if (t.radial_h_eta(rmax / p.N) < 1.0)
            throw std::invalid_argument("N too small: f falls below the plateau on K_N^delta at radius " + std::to_string(rmax));
    }
    const long long box_sites = static_cast<long long>(std::pow(2.0 * (t.support_radius_ + 2) + 1, d));
    if (materialize && box_sites <= 12'000'000LL) t.fill_grid();
    if (!t.radial_) {
        for (const auto& x : t.K_N_delta(1.0))
            if (std::abs(t.f(x) - t.plateau_) > 1e-9)
                throw std::invalid_argument("N too small: f = " + std::to_string(t.f(x)) + " below the plateau at " + x.str() + " in K_N^delta");
    }
    return prof;
}

SiteSet TiltProfile::tilt_closure() const {
    const int d = p_.d;
    SiteSet out(d);
    if (trivial_) return out;
    BoxIndex box = BoxIndex::cube(d, support_radius_);
    for (long long k = 0; k < box.size(); ++k) {
        Site x = box.site(k);
        if (f(x) == 1.0) continue;
        out.insert(x);
        for (int j = 0; j < 2 * d; ++j) out.insert(x.neighbor(j));
    }
    return out;
}

bool TiltProfile::in_Utilde_N(const Site& x) const {
    ShapeSpec ball;
    ball.kind = ShapeKind::ball;
    ball.size = p_.r_Utilde();
    ball.center.assign(p_.d, 0.0);
    return within_sup_distance(ball, p_.N, x, 1.0);
}

SiteSet TiltProfile::K_N() const { return blow_up(p_.shape, p_.N); }

SiteSet TiltProfile::K_N_delta(double frac) const { return blow_up(fattened(p_.shape, frac * p_.delta), p_.N); }

SiteSet TiltProfile::Gamma_N() const { return boundaries(K_N_delta(0.5)).outer; }

namespace {

// Sum of a per-site quantity over the support box, using the cube symmetry when available.
template <class F>
long double support_sum(const TiltProfile& prof, F&& per_site) {
    const int d = prof.dim();
    const int R = prof.support_radius() + 1;
    long double acc = 0.0L;
    if (prof.radial()) {
        const long long r2max = static_cast<long long>(R + 1) * (R + 1);
        for_each_orbit(d, R, [&](const Site& x, long long mult) { acc += static_cast<long double>(mult) * per_site(x); }, r2max);
        return acc;
    }
    BoxIndex box = BoxIndex::cube(d, R);
    for (long long k = 0; k < box.size(); ++k) acc += per_site(box.site(k));
    return acc;
}

}  // namespace

EntropyResult entropy(const TiltProfile& prof) {
    EntropyResult r;
    if (prof.is_trivial()) return r;
    const int d = prof.dim();
    const double p1 = prof.plateau() - 1.0;
    const long double direct = support_sum(prof, [&](const Site& x) -> long double {
        const double h0 = prof.hN(x);
        double sum = 0.0;
        for (int k = 0; k < 2 * d; ++k) sum += prof.hN(x.neighbor(k));
        if (sum == 2 * d * h0) return 0.0L;
        const long double f0 = 1.0L + p1 * static_cast<long double>(h0);
        return f0 * p1 * (static_cast<long double>(sum) / (2 * d) - h0);
    });
    r.dirichlet = dirichlet_hN(prof);
    r.H_direct = static_cast<double>(-static_cast<long double>(prof.params().u) * direct);
    r.H_formula = prof.params().entropy_prefactor() * r.dirichlet;
    return r;
}

double dirichlet_hN(const TiltProfile& prof) {
    if (prof.is_trivial()) return 0.0;
    const int d = prof.dim();
    return static_cast<double>(support_sum(prof, [&](const Site& x) -> long double {
        const double h0 = prof.hN(x);
        long double e = 0.0L;
        for (int k = 0; k < 2 * d; ++k) {
            const long double g = static_cast<long double>(prof.hN(x.neighbor(k))) - h0;
            e += g * g;
        }
        return e / (4.0L * d);
    }));
}

double scan_max_abs_V(const TiltProfile& prof) {
    if (prof.is_trivial()) return 0.0;
    if (prof.grid()) return prof.max_abs_V();
    const int d = prof.dim();
    const int R = prof.support_radius() + 1;
    double m = 0.0;
    auto visit = [&](const Site& x, long long) {
        const double h0 = prof.hN(x);
        double s = 0.0;
        for (int k = 0; k < 2 * d; ++k) s += prof.hN(x.neighbor(k));
        if (s == 2 * d * h0) return;
        m = std::max(m, std::abs(prof.V(x)));
    };
    if (prof.radial()) {
        for_each_orbit(d, R, visit, static_cast<long long>(R + 1) * (R + 1));
    } else {
        BoxIndex box = BoxIndex::cube(d, R);
        for (long long k = 0; k < box.size(); ++k) visit(box.site(k), 1);
    }
    return m;
}

std::vector<DirichletScanRow> dirichlet_scan(const TiltParams& p, const std::vector<int>& N_list) {
    for (std::size_t i = 1; i < N_list.size(); ++i)
        if (N_list[i] <= N_list[i - 1]) throw std::invalid_argument("dirichlet_scan: N_list must be increasing");
    double target = std::nan("");
    if (p.shape.kind != ShapeKind::box && p.shape.centered()) {
        const double a = (p.shape.kind == ShapeKind::ball ? p.shape.size : 0.0) + 2 * p.delta;
        target = relative_capacity(p.d, a, p.r_U) / p.d;
    }
    std::vector<DirichletScanRow> rows;
    for (int N : N_list) {
        TiltParams q = p;
        q.N = N;
        auto prof = TiltProfile::build(q, false);
        rows.push_back({N, dirichlet_hN(*prof) / std::pow(static_cast<double>(N), p.d - 2), target});
    }
    return rows;
}

}  // namespace ril
