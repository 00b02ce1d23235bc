// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include <array>
#include <cstdarg>
#include <set>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "ril/experiments.hpp"
#include "ril/green.hpp"
#include "ril/interlace.hpp"
#include "ril/potential.hpp"
#include "ril/stats.hpp"
#include "ril/tilt.hpp"
#include "ril/walk.hpp"

using namespace ril;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

TiltParams point_fixture(int N) {
    TiltParams p;
    p.d = 3;
    p.u = 0.4;
    p.u_star2 = 0.4;
    p.epsilon = 0.2;
    p.delta = 0.3;
    p.eta = 0.05;
    p.r_U = 0.85;
    p.shape.center = {0, 0, 0};
    p.N = N;
    return p;
}

TiltParams annulus(int N) {
    TiltParams p;
    p.d = 3;
    p.u = 1.0;
    p.u_star2 = 2.0;
    p.epsilon = 0.5;
    p.delta = 0.1;
    p.eta = 0.05;
    p.r_U = 10.0;
    p.shape.kind = ShapeKind::ball;
    p.shape.size = 1.0;
    p.shape.center = {0, 0, 0};
    p.N = N;
    return p;
}

SiteSet origin() {
    SiteSet s(3);
    s.insert(Site{0, 0, 0});
    return s;
}

Verdict c1_green_exactness() {
    const FreeGreen& g = FreeGreen::get(3);
    double worst_eq = 0.0, worst_sweep = 0.0;
    for (int r = 0; r <= 3; ++r) {
        const SiteSet M = sup_ball(3, r);
        const EquilibriumMeasure em = equilibrium_and_capacity(M);
        for (const auto& x : M) {
            long double s = 0.0L;
            for (std::size_t i = 0; i < M.size(); ++i) s += g(x, M[i]) * em.weights[i];
            worst_eq = std::max(worst_eq, std::abs(static_cast<double>(s) - 1.0));
        }
    }
    worst_sweep = std::max(worst_sweep, sweeping_residual(origin(), sup_ball(3, 1)));
    for (int r = 0; r < 3; ++r) worst_sweep = std::max(worst_sweep, sweeping_residual(sup_ball(3, r), sup_ball(3, r + 1)));
    worst_sweep = std::max(worst_sweep, sweeping_residual(origin(), sup_ball(3, 3)));
    return {worst_eq <= 1e-6 && worst_sweep <= 1e-6,
            fmt("max |sum g e - 1| = %.2e, max sweeping residual = %.2e (boxes of side 1..7)", worst_eq, worst_sweep)};
}

Verdict c2_capacities() {
    const double cap0 = equilibrium_and_capacity(origin()).total;
    const ExtrapolatedGreen ex = green_extrapolated(Site{0, 0, 0}, Site{0, 0, 0});
    SiteSet pair = origin();
    pair.insert(Site{1, 0, 0});
    const double cap2 = equilibrium_and_capacity(pair).total;
    const bool ok = std::abs(cap0 - 0.659463) <= 1e-4 && std::abs(ex.value - 1.516386) <= 1e-5 &&
                    std::abs(cap2 - 0.983886) <= 1e-4 && std::abs(1.0 / ex.value - cap0) <= 1e-4;
    return {ok, fmt("cap({0}) = %.6f, g(0,0) = %.7f (killed-cube extrapolation, est. error %.1e), pair capacity = %.6f", cap0,
                    ex.value, ex.error, cap2)};
}

Verdict c3_alpha() {
    double a[3];
    const int Ns[3] = {16, 32, 64};
    for (int i = 0; i < 3; ++i) a[i] = alpha_N(Ns[i], 2.0);
    return {a[0] > a[1] && a[1] > a[2] && a[2] < 0.25,
            fmt("alpha(16) = %.5f, alpha(32) = %.5f, alpha(64) = %.5f with c1 = 2", a[0], a[1], a[2])};
}

Verdict c4_martingale() {
    const auto prof = TiltProfile::build(point_fixture(10));
    StopRule st = StopRule::exit(sup_ball(3, 60));
    st.until(20.0);
    auto w = run_replicas<double>(100000, workers(), 404, 0, [&](long long, RngStream& rng) {
        return martingale_weight(sample_walk(Site{3, 0, 0}, nullptr, st, rng), *prof);
    });
    MeanAccumulator acc;
    for (double x : w) acc.add(x);
    double min_psi = INFINITY;
    for (const auto& x : sup_ball(3, 12)) min_psi = std::min(min_psi, psi(*prof, x));
    const double z = (acc.mean() - 1.0) / acc.std_error();
    return {std::abs(z) <= 3.0 && min_psi >= 0.0,
            fmt("E[M_20] = %.5f +- %.5f (%.2f s.e., 1e5 walks), min psi over the window = %.3e", acc.mean(), acc.std_error(), z,
                min_psi)};
}

Verdict c5_entropy() {
    std::string d;
    bool ok = true;
    for (int N : {50, 100}) {
        const EntropyResult e = entropy(*TiltProfile::build(annulus(N)));
        const double rel = std::abs(e.H_direct - e.H_formula) / std::abs(e.H_formula);
        ok = ok && rel <= 1e-8;
        d += fmt("N=%d: H_direct = %.10f, H_formula = %.10f, rel = %.1e; ", N, e.H_direct, e.H_formula, rel);
    }
    return {ok, d};
}

Verdict c6_capacity_limit() {
    const auto rows = dirichlet_scan(annulus(1), {50, 100, 200});
    const double target = (1.0 / 3.0) * 2.0 * M_PI / (1.0 / 1.2 - 1.0 / 10.0);
    double err[3];
    for (int i = 0; i < 3; ++i) err[i] = std::abs(rows[i].scaled - target) / target;
    return {err[2] <= 0.05 && err[0] > err[1] && err[1] > err[2],
            fmt("(1/N) E(h_N,h_N) = %.4f, %.4f, %.4f at N = 50, 100, 200 against %.4f; rel errors %.4f, %.4f, %.4f",
                rows[0].scaled, rows[1].scaled, rows[2].scaled, target, err[0], err[1], err[2])};
}

Verdict c7_interlacement_law() {
    InterlacementSampler s(origin(), nullptr, false, 1e-5, 4);
    struct Draw {
        char vacant;
        long long count;
    };
    const long long n = 100000;
    auto draws = run_replicas<Draw>(n, workers(), 707, 0, [&](long long, RngStream& rng) {
        const auto smp = s.sample(1.0, rng, {false, false});
        return Draw{static_cast<char>(smp.occupied(Site{0, 0, 0}) ? 0 : 1), smp.count};
    });
    long long vac = 0;
    MeanAccumulator cnt;
    for (const auto& d : draws) {
        vac += d.vacant;
        cnt.add(static_cast<double>(d.count));
    }
    const double lam = 0.659463, p = std::exp(-lam), f = static_cast<double>(vac) / n;
    const double ref = 0.51716;
    const double zv = (f - ref) / std::sqrt(ref * (1 - ref) / n), zx = (f - p) / std::sqrt(p * (1 - p) / n);
    const double zm = (cnt.mean() - lam) / std::sqrt(lam / n);
    const double zs = (cnt.variance() - lam) / std::sqrt((lam + 2 * lam * lam) / n);
    return {std::abs(zv) <= 3 && std::abs(zx) <= 3 && std::abs(zm) <= 4 && std::abs(zs) <= 4,
            fmt("vacancy = %.5f vs %.5f (%.2f s.e.) and exp(-cap) = %.5f (%.2f s.e.); count mean %.5f (%.2f s.e.), "
                "variance %.5f (%.2f s.e.)",
                f, ref, zv, p, zx, cnt.mean(), zm, cnt.variance(), zs)};
}

Verdict c8_change_of_measure() {
    const auto prof = TiltProfile::build(point_fixture(8));
    const int R = prof->support_radius() + 1;
    InterlacementSampler st(sup_ball(3, R), prof, false, 1e-5, R), tt(sup_ball(3, R), prof, true, 1e-5, R);
    const long long n = 100000;
    auto a = run_replicas<double>(n, workers(), 808, 0,
                                  [&](long long, RngStream& rng) { return importance_weight(st.sample(0.4, rng), *prof); });
    auto b = run_replicas<double>(n, workers(), 809, 0,
                                  [&](long long, RngStream& rng) { return importance_weight(tt.sample(0.4, rng), *prof); });
    MeanAccumulator ma, mb;
    for (double x : a) ma.add(x);
    for (double x : b) mb.add(x);
    const double za = (ma.mean() - 1) / ma.std_error(), zb = (mb.mean() - 1) / mb.std_error();
    return {std::abs(za) <= 3 && std::abs(zb) <= 3,
            fmt("E[e^F] standard = %.5f +- %.5f (%.2f s.e.), E[e^-F] tilted = %.5f +- %.5f (%.2f s.e.), window %d", ma.mean(),
                ma.std_error(), za, mb.mean(), mb.std_error(), zb, R)};
}

Verdict c9_cross_validation() {
    ExperimentConfig c;
    c.tilt = point_fixture(10);
    c.window_radius = 12;
    c.replicas = 100000;
    c.seed = 909;
    c.threads = workers();
    const auto d = disconnect_direct(c, 0.4, 10).front().result;
    const auto is = disconnect_is(c, 10);
    return {intervals_overlap(d, is.linear) && !is.unreliable,
            fmt("direct %.5f [%.5f, %.5f]; importance sampled %.5f [%.5f, %.5f], ESS %.0f, H = %.4f, log p = %.3f +- %.3f",
                d.estimate, d.ci_low, d.ci_high, is.linear.estimate, is.linear.ci_low, is.linear.ci_high, is.ess, is.entropy,
                is.log_result.estimate, is.log_result.std_error)};
}

Verdict c10_domination() {
    ExperimentConfig c;
    TiltParams& p = c.tilt;
    p.d = 3;
    p.u = 0.2;
    p.u_star2 = 0.2;
    p.epsilon = 0.6;
    p.delta = 0.2;
    p.eta = 0.04;
    p.r_U = 0.5;
    p.shape.kind = ShapeKind::ball;
    p.shape.size = 0.05;
    p.shape.center = {0, 0, 0};
    c.gamma_samples = 4;
    c.seed = 1010;
    const auto r = domination_report(c, 64);
    std::string pts;
    for (const auto& q : r.points)
        pts += fmt(" x=%s: %.4f/%.5f/%.4f;", q.x.str().c_str(), q.capacity_margin, q.equilibrium_margin, q.entrance_margin);
    const bool ok = r.occupation_residual <= 1e-6 && r.min_capacity_margin > 0 && r.min_equilibrium_margin > 0 && r.min_entrance_margin > 0;
    return {ok, fmt("plateau^2 = %.3f, %zu of %zu fence points; occupation identity residual %.2e; min margins: capacity = %.4f, "
                    "equilibrium measure = %.5f, entrance measure = %.4f (ratio needs >= 1 - eps' = %.3f; finite-N report).",
                    p.plateau() * p.plateau(), r.points.size(), r.gamma_size, r.occupation_residual, r.min_capacity_margin, r.min_equilibrium_margin,
                    r.min_entrance_margin, 1 - r.eps_prime) +
                    pts};
}

Verdict c11_trend() {
    ExperimentConfig c;
    TiltParams& p = c.tilt;
    p.d = 3;
    p.u_star2 = 4.0;
    p.u = 1.2;
    p.epsilon = 0.8;
    p.delta = 0.12;
    p.eta = 0.02;
    p.r_U = 0.33;
    p.shape.kind = ShapeKind::ball;
    p.shape.size = 0.05;
    p.shape.center = {0, 0, 0};
    c.replicas = 4000;
    c.seed = 1111;
    c.threads = workers();
    const auto t = disconnect_tilted(c, {20, 30, 40});
    std::string d;
    for (const auto& r : t.rows)
        d += fmt("N=%d (window %d): %.4f +- %.4f; ", r.N, r.window_radius, r.result.estimate, r.result.std_error);
    const bool ok = t.nondecreasing && !t.violation && !t.inconclusive;
    return {ok, d + (t.violation ? "decrease beyond 3 s.e." : t.inconclusive ? "flagged inconclusive" : "nondecreasing")};
}

Verdict c12_reproducibility() {
    const fs::path dir = fs::temp_directory_path() / "ril_acceptance_repro";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto run = [&](const std::string& tag, const std::string& extra) {
        const std::string cmd = std::string(RIL_BINARY) +
                                " disconnect-is --set tilt.u_starstar=0.4 --set experiment.window_radius=12 "
                                "--set experiment.replicas=2000 --seed 1212 " +
                                extra + " --out " + (dir / tag).string() + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const int s1 = run("a", ""), s2 = run("b", ""), s3 = run("c", "--threads 3");
    const std::string a = slurp(dir / "a" / "results.csv"), b = slurp(dir / "b" / "results.csv"),
                      c = slurp(dir / "c" / "results.csv");
    const bool ok = s1 == 0 && s2 == 0 && s3 == 0 && !a.empty() && a == b && a == c;
    return {ok, fmt("disconnect-is re-run: %zu bytes, identical = %s, identical with 3 threads = %s", a.size(),
                    a == b ? "yes" : "no", a == c ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        double limit_s;  // <= 0: none
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> all = {
        {1, 60, c1_green_exactness},  {2, 300, c2_capacities},     {3, 600, c3_alpha},
        {4, 0, c4_martingale},        {5, 60, c5_entropy},         {6, 600, c6_capacity_limit},
        {7, 600, c7_interlacement_law}, {8, 1200, c8_change_of_measure}, {9, 1800, c9_cross_validation},
        {10, 1800, c10_domination},   {11, 0, c11_trend},          {12, 0, c12_reproducibility},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0 && secs > c.limit_s) {
            v.pass = false;
            v.detail += fmt(" runtime limit %.0f s exceeded", c.limit_s);
        }
        failed += !v.pass;
        std::printf("criterion %2d: %s  (%.1f s) %s\n", c.id, v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
