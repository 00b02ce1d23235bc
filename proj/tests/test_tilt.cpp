#include <doctest.h>

#include <cmath>
#include <random>

#include "ril/tilt.hpp"

using namespace ril;

namespace {

TiltParams small_point(int N = 8) {
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

}  // namespace

TEST_CASE("radial potential of the annulus") {
    RadialMollified q(1.2, 10.0, 0.05);
    CHECK(q.h(0.5) == doctest::Approx(1.0));
    CHECK(q.h(1.2) == doctest::Approx(1.0));
    CHECK(q.h(10.0) == doctest::Approx(0.0).epsilon(1e-12));
    // harmonic in between: h(r) = (1/r - 1/R) / (1/a - 1/R)
    CHECK(q.h(3.0) == doctest::Approx((1 / 3.0 - 0.1) / (1 / 1.2 - 0.1)));
    // mollification changes nothing away from the kinks, where h is harmonic
    CHECK(q.value(3.0) == doctest::Approx(q.h(3.0)).epsilon(1e-8));
    CHECK(q.value(0.5) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mollifier rule has unit mass") {
    MollifierRule rule(3, 0.05);
    CHECK(std::abs(rule.raw_mass - 1.0) < 1e-2);
    double w = 0.0;
    for (double x : rule.weights) w += x;
    CHECK(w == doctest::Approx(1.0));
}

TEST_CASE("parameter validation names the violated condition") {
    TiltParams p = small_point();
    p.u = 1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("u <= u_** + epsilon"), std::invalid_argument);
    p = small_point();
    p.eta = 0.4;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = small_point();
    p.r_U = 0.5;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("r_U"), std::invalid_argument);
    p = small_point();
    p.u_star2 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("profile invariants: plateau on K_N^delta, f = 1 off the support, V = -Lf/f") {
    const auto prof = TiltProfile::build(small_point());
    const double plateau = std::sqrt(0.6 / 0.4);
    CHECK(prof->plateau() == doctest::Approx(plateau));
    for (const auto& x : prof->K_N_delta()) CHECK(prof->f(x) == doctest::Approx(plateau).epsilon(1e-12));
    const int R = prof->support_radius();
    for (const auto& x : sup_ball(3, R + 3)) {
        const double f = prof->f(x);
        CHECK(f >= 1.0 - 1e-12);
        CHECK(f <= plateau + 1e-12);
        if (x.norm_inf() > R) {
            CHECK(f == 1.0);
            CHECK(prof->V(x) == 0.0);
        }
    }
    std::mt19937_64 g(1);
    std::uniform_int_distribution<int> c(-R, R);
    for (int t = 0; t < 200; ++t) {
        const Site x{c(g), c(g), c(g)};
        double s = 0.0;
        for (int k = 0; k < 6; ++k) s += prof->f(x.neighbor(k));
        CHECK(prof->V(x) == doctest::Approx(-(s / 6.0 - prof->f(x)) / prof->f(x)).epsilon(1e-12));
    }
    CHECK(prof->lambda(Site{0, 0, 0}) == doctest::Approx(plateau * plateau));
}

TEST_CASE("u equal to u_** + epsilon gives the trivial tilt") {
    TiltParams p = small_point();
    p.u = 0.6;
    const auto prof = TiltProfile::build(p);
    CHECK(prof->is_trivial());
    CHECK(prof->f(Site{0, 0, 0}) == 1.0);
    CHECK(prof->V(Site{0, 0, 0}) == 0.0);
}

TEST_CASE("fence and K_N sets") {
    const auto prof = TiltProfile::build(small_point(10));
    const SiteSet K = prof->K_N(), Kd = prof->K_N_delta(), G = prof->Gamma_N();
    CHECK(is_subset(K, Kd));
    CHECK(set_intersection(G, prof->K_N_delta(0.5)).empty());
    for (const auto& x : G) CHECK(prof->f(x) == doctest::Approx(prof->plateau()));
}

TEST_CASE("entropy identity on the annulus") {
    for (int N : {40, 60}) {
        const auto prof = TiltProfile::build(annulus(N));
        const EntropyResult e = entropy(*prof);
        CHECK(std::abs(e.H_direct - e.H_formula) <= 1e-8 * std::abs(e.H_formula));
        CHECK(e.H_formula > 0.0);
    }
}

TEST_CASE("entropy identity for a non-radial shape") {
    TiltParams p = small_point(8);
    p.shape.kind = ShapeKind::box;
    p.shape.size = 0.05;
    p.r_U = 0.9;
    const auto prof = TiltProfile::build(p);
    CHECK_FALSE(prof->radial());
    const EntropyResult e = entropy(*prof);
    CHECK(std::abs(e.H_direct - e.H_formula) <= 1e-8 * std::abs(e.H_formula));
}

TEST_CASE("scaled Dirichlet energy approaches the capacity target") {
    const auto rows = dirichlet_scan(annulus(1), {40, 80});
    REQUIRE(rows.size() == 2);
    const double target = (1.0 / 3.0) * 2.0 * M_PI / (1.0 / 1.2 - 1.0 / 10.0);
    CHECK(rows[0].target == doctest::Approx(target).epsilon(1e-12));
    CHECK(std::abs(rows[1].scaled - target) < std::abs(rows[0].scaled - target));
}
