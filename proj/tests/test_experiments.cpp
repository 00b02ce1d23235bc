#include <doctest.h>

#include <cmath>

#include "ril/experiments.hpp"
#include "ril/potential.hpp"

using namespace ril;

namespace {

ExperimentConfig tiny() {
    ExperimentConfig c;
    TiltParams& p = c.tilt;
    p.d = 3;
    p.u = 0.4;
    p.u_star2 = 0.4;
    p.epsilon = 0.2;
    p.delta = 0.3;
    p.eta = 0.05;
    p.r_U = 0.85;
    p.shape.center = {0, 0, 0};
    p.N = 10;
    c.window_radius = 12;
    c.replicas = 2000;
    c.seed = 3;
    return c;
}

}  // namespace

TEST_CASE("configuration invariants") {
    ExperimentConfig c = tiny();
    CHECK_NOTHROW(c.validate());
    c.r2 = 0.15;  // 2 r1 = 0.2 > r2
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("exponent ordering"), std::invalid_argument);
    c = tiny();
    c.window_radius = 8;
    const auto prof = TiltProfile::build(c.tilt);
    CHECK_THROWS_WITH_AS(c.window_for(*prof), doctest::Contains("tilt closure"), std::invalid_argument);
}

TEST_CASE("replica results do not depend on the thread count") {
    auto body = [](long long i, RngStream& rng) { return rng.uniform() + static_cast<double>(i); };
    const auto a = run_replicas<double>(1000, 1, 42, 0, body);
    const auto b = run_replicas<double>(1000, 3, 42, 0, body);
    CHECK(a == b);
    CHECK_THROWS_AS(run_replicas<double>(10, 2, 1, 0,
                                         [](long long i, RngStream&) -> double {
                                             if (i == 7) throw std::runtime_error("boom");
                                             return 0.0;
                                         }),
                    std::runtime_error);
}

TEST_CASE("direct disconnection: zero level, saturation, monotone levels") {
    ExperimentConfig c = tiny();
    c.replicas = 300;
    const auto zero = disconnect_direct(c, 0.0, 10);
    CHECK(zero[0].result.estimate == 0.0);
    CHECK_FALSE(zero[0].result.note.empty());
    c.replicas = 60;
    const auto sat = disconnect_direct(c, 20.0, 10);
    CHECK(sat[0].result.estimate > 0.9);
    c.replicas = 400;
    const auto lv = disconnect_direct_levels(c, {1.0, 2.0, 4.0}, 10);
    REQUIRE(lv.size() == 3);
    CHECK(lv[0].result.estimate <= lv[1].result.estimate);
    CHECK(lv[1].result.estimate <= lv[2].result.estimate);
}

TEST_CASE("direct disconnection reports every window radius") {
    ExperimentConfig c = tiny();
    c.replicas = 200;
    c.window_radii = {8, 12};
    const auto rows = disconnect_direct(c, 2.0, 10);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].window_radius == 12);
    CHECK(rows[1].window_radius == 8);
}

TEST_CASE("importance sampling with f = 1 is the direct estimator") {
    ExperimentConfig c = tiny();
    c.tilt.u = c.tilt.u_star2 + c.tilt.epsilon;
    c.replicas = 1500;
    const auto d = disconnect_direct(c, c.tilt.u, 10);
    const auto is = disconnect_is(c, 10);
    CHECK(is.linear.estimate == d[0].result.estimate);
    CHECK(is.entropy == 0.0);
}

TEST_CASE("importance sampling on the tiny fixture") {
    ExperimentConfig c = tiny();
    c.replicas = 3000;
    const auto is = disconnect_is(c, 10);
    CHECK(is.entropy > 0.0);
    CHECK(is.tilted_frequency.estimate > 0.0);
    CHECK(is.log_result.log_scale);
    CHECK(is.log_result.std_error >= 0.0);
    // point K: the Brownian capacity vanishes
    CHECK(is.asymptotic_target == 0.0);
    if (is.linear.estimate > 0) CHECK(is.log_result.estimate >= is.entropy_bound);
}

TEST_CASE("tilted disconnection with f = 1 matches the direct frequency") {
    ExperimentConfig c = tiny();
    c.tilt.u = c.tilt.u_star2 + c.tilt.epsilon;
    c.replicas = 3000;
    const auto t = disconnect_tilted(c, {10});
    const auto d = disconnect_direct(c, c.tilt.u, 10);
    CHECK(intervals_overlap(t.rows[0].result, d[0].result));
    CHECK(t.rows[0].result.ci_low <= t.rows[0].result.estimate);
    CHECK(t.rows[0].result.estimate <= t.rows[0].result.ci_high);
}

TEST_CASE("alpha decreases with N") {
    const double a8 = alpha_N(8, 2.0), a16 = alpha_N(16, 2.0);
    CHECK(a16 < a8);
    CHECK(a16 < 0.25);
}

TEST_CASE("domination control with f = 1") {
    ExperimentConfig c;
    TiltParams& p = c.tilt;
    p.d = 3;
    p.u_star2 = 0.2;
    p.epsilon = 0.6;
    p.u = 0.8;
    p.delta = 0.2;
    p.eta = 0.04;
    p.r_U = 0.5;
    p.shape.kind = ShapeKind::ball;
    p.shape.size = 0.05;
    p.shape.center = {0, 0, 0};
    c.gamma_samples = 1;
    const auto rep = domination_report(c, 40);
    REQUIRE(rep.points.size() == 1);
    const auto& pt = rep.points[0];
    CHECK(pt.tilted_cap_B3 == doctest::Approx(pt.cap_B3).epsilon(1e-8));
    CHECK(pt.capacity_margin == doctest::Approx((p.u - p.u_star2 - p.epsilon / 2) * pt.cap_B3).epsilon(1e-8));
    CHECK(rep.occupation_residual <= 1e-6);
    CHECK(rep.eps_prime == doctest::Approx(0.6 / (0.8 + 1.2)));
    CHECK(pt.entrance_ratio > 0.0);
    CHECK(pt.entrance_ratio < 1.0);
}

TEST_CASE("coupling check with f = 1 at the same level") {
    ExperimentConfig c = tiny();
    c.tilt.u = c.tilt.u_star2 + c.tilt.epsilon;
    c.window_radius = 0;
    c.replicas = 2000;
    const auto rep = coupling_check(c, 10, c.tilt.u);
    CHECK(rep.panel.size() == 20);
    CHECK(rep.violations == 0);
    CHECK(rep.trace_mean_dominates);
}

TEST_CASE("fence sample is sorted and reproducible") {
    const auto prof = TiltProfile::build(tiny().tilt);
    const auto a = fence_sample(*prof, 3, 9), b = fence_sample(*prof, 3, 9);
    CHECK(a == b);
    CHECK(std::is_sorted(a.begin(), a.end()));
    for (const auto& x : a) CHECK(prof->Gamma_N().contains(x));
}
