#include <doctest.h>

#include <cmath>

#include "ril/green.hpp"
#include "ril/potential.hpp"

using namespace ril;

namespace {

SiteSet single(const Site& x) {
    SiteSet s(x.d);
    s.insert(x);
    return s;
}

}  // namespace

TEST_CASE("capacity of a point and of a pair") {
    const double g00 = FreeGreen::get(3)(Site{0, 0, 0});
    const double g01 = FreeGreen::get(3)(Site{1, 0, 0});
    const EquilibriumMeasure e0 = equilibrium_and_capacity(single(Site{0, 0, 0}));
    CHECK(std::abs(e0.total - 0.659463) < 1e-4);
    CHECK(e0.total == doctest::Approx(1.0 / g00).epsilon(1e-12));
    SiteSet pair(3);
    pair.insert(Site{0, 0, 0});
    pair.insert(Site{1, 0, 0});
    const EquilibriumMeasure e2 = equilibrium_and_capacity(pair);
    CHECK(std::abs(e2.total - 0.983886) < 1e-4);
    CHECK(e2.total == doctest::Approx(2.0 / (g00 + g01)).epsilon(1e-12));
}

TEST_CASE("equilibrium potential equals one on M and the measure lives on the inner boundary") {
    const FreeGreen& g = FreeGreen::get(3);
    for (int r = 0; r <= 3; ++r) {
        const SiteSet M = sup_ball(3, r);
        const EquilibriumMeasure em = equilibrium_and_capacity(M);
        const SiteSet inner = boundaries(M).inner;
        double worst = 0.0;
        for (const auto& x : M) {
            long double s = 0.0L;
            for (std::size_t i = 0; i < M.size(); ++i) s += g(x, M[i]) * em.weights[i];
            worst = std::max(worst, std::abs(static_cast<double>(s) - 1.0));
        }
        CHECK(worst <= 1e-6);
        for (std::size_t i = 0; i < M.size(); ++i) {
            CHECK(em.weights[i] >= 0.0);
            if (!inner.contains(M[i])) CHECK(em.weights[i] == 0.0);
        }
    }
}

TEST_CASE("capacity is monotone and subadditive on nested boxes") {
    double prev = 0.0;
    for (int r = 0; r <= 3; ++r) {
        const double c = equilibrium_and_capacity(sup_ball(3, r)).total;
        CHECK(c > prev);
        CHECK(c <= (2 * r + 1) * (2 * r + 1) * (2 * r + 1) * 0.659464);
        prev = c;
    }
}

TEST_CASE("sweeping identity on nested boxes") {
    CHECK(sweeping_residual(single(Site{0, 0, 0}), sup_ball(3, 1)) <= 1e-6);
    CHECK(sweeping_residual(sup_ball(3, 1), sup_ball(3, 2)) <= 1e-6);
    CHECK(sweeping_residual(sup_ball(3, 0), sup_ball(3, 3)) <= 1e-6);
}

TEST_CASE("killed Green functions on tiny domains") {
    // from {0} the walk leaves after one unit holding time
    const GreenTable a = killed_green_table(single(Site{0, 0, 0}));
    CHECK(a.values(0, 0) == doctest::Approx(1.0));
    // two sites: geometric number of returns with probability (1/6)^2
    SiteSet two(3);
    two.insert(Site{0, 0, 0});
    two.insert(Site{1, 0, 0});
    const GreenTable b = killed_green_table(two);
    CHECK(b(Site{0, 0, 0}, Site{0, 0, 0}) == doctest::Approx(36.0 / 35.0));
    CHECK(b(Site{0, 0, 0}, Site{1, 0, 0}) == doctest::Approx(6.0 / 35.0));
    CHECK(killed_green_table(sup_ball(3, 2)).max_asymmetry() < 1e-12);
}

TEST_CASE("entrance measures") {
    const FreeGreen& g = FreeGreen::get(3);
    const SiteSet A = single(Site{0, 0, 0});
    const EntranceMeasure in = entrance_measure(A, nullptr, Site{0, 0, 0});
    CHECK(in.mass[0] == doctest::Approx(1.0));
    const EntranceMeasure from = entrance_measure(A, nullptr, Site{1, 0, 0});
    CHECK(from.mass[0] == doctest::Approx(g(Site{1, 0, 0}) / g(Site{0, 0, 0})).epsilon(1e-10));
    CHECK(from.no_entry == doctest::Approx(1.0 - from.mass[0]));
    // killed entrance can only be smaller than the free one
    const SiteSet B = sup_ball(3, 3);
    const Eigen::MatrixXd hk = entrance_kernel(A, B, {Site{2, 0, 0}});
    const Eigen::MatrixXd hf = entrance_kernel_free(A, {Site{2, 0, 0}});
    CHECK(hk(0, 0) < hf(0, 0));
    CHECK(hk(0, 0) > 0.0);
}

TEST_CASE("Dirichlet form and expected occupation") {
    CHECK(dirichlet_form(single(Site{0, 0, 0}), {1.0}) == doctest::Approx(1.0));
    CHECK(expected_occupation(Site{0, 0, 0}, single(Site{0, 0, 0})) == doctest::Approx(FreeGreen::get(3)(Site{0, 0, 0})));
}

TEST_CASE("tilted capacity with a trivial profile is the standard one") {
    const auto triv = TiltProfile::trivial(3);
    const SiteSet M = sup_ball(3, 1);
    const TiltedCapacity tc = tilted_equilibrium_and_capacity(M, *triv);
    CHECK(tc.measure.total == doctest::Approx(equilibrium_and_capacity(M).total).epsilon(1e-9));
}

TEST_CASE("tilted Green function: finite-rank route matches the grid solve") {
    TiltParams p;
    p.d = 3;
    p.u = 0.4;
    p.u_star2 = 0.4;
    p.epsilon = 0.2;
    p.delta = 0.3;
    p.eta = 0.05;
    p.r_U = 0.85;
    p.shape.center = {0, 0, 0};
    p.N = 8;
    const auto prof = TiltProfile::build(p);
    const SiteSet M = single(Site{0, 0, 0});
    const GreenTable dense = tilted_green_table(M, *prof);
    const GreenTable grid = tilted_green_matched(M, *prof, 31);
    CHECK(std::abs(dense.values(0, 0) - grid.values(0, 0)) < 1e-5);
    // the tilt raises the conductances around the origin, so the walk leaves faster
    CHECK(dense.values(0, 0) < FreeGreen::get(3)(Site{0, 0, 0}));

    // occupation identity: sum e~(v) g~(v,y) lambda(y) = sum lambda over M inside the plateau
    const OccupationIdentity oi = occupation_identity(sup_ball(3, 1), *prof, prof->support_radius() + 2);
    CHECK(oi.residual <= 1e-6);
}
