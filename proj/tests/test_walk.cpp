#include <doctest.h>

#include <cmath>

#include "ril/green.hpp"
#include "ril/potential.hpp"
#include "ril/stats.hpp"
#include "ril/walk.hpp"

using namespace ril;

namespace {

std::shared_ptr<const TiltProfile> small_profile() {
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
    return TiltProfile::build(p);
}

bool adjacent(const Site& a, const Site& b) { return (a - b).norm1() == 1; }

}  // namespace

TEST_CASE("trajectories are nearest-neighbour paths with positive holding times") {
    const auto prof = small_profile();
    const StopRule stop = StopRule::exit(sup_ball(3, 6));
    for (int i = 0; i < 50; ++i) {
        RngStream rng(3, i);
        const Trajectory t = sample_walk(Site{0, 0, 0}, prof.get(), stop, rng);
        CHECK(t.terminal_reason == Terminal::exited_domain);
        for (std::size_t k = 1; k < t.steps.size(); ++k) CHECK(adjacent(t.steps[k - 1].site, t.steps[k].site));
        for (std::size_t k = 0; k + 1 < t.steps.size(); ++k) CHECK(t.steps[k].holding > 0.0);
        CHECK(t.steps.back().site.norm_inf() == 7);
    }
}

TEST_CASE("stop rule validation") {
    CHECK_THROWS_AS(StopRule::escape(sup_ball(3, 1), 1.5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(StopRule::exit(SiteSet(3)).validate(), std::invalid_argument);
    CHECK_THROWS_AS(StopRule::enter(SiteSet(3)).validate(), std::invalid_argument);
}

TEST_CASE("exit kernel: return probability is the equilibrium potential") {
    const auto k = ExitKernel::get(3, 4);
    const FreeGreen& g = FreeGreen::get(3);
    CHECK(k->capacity() == doctest::Approx(equilibrium_and_capacity(sup_ball(3, 4)).total).epsilon(1e-8));
    for (const Site y : {Site{5, 0, 0}, Site{5, 4, -3}, Site{-2, 5, 1}}) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < k->inner().size(); ++i) s += g(y, k->inner()[i]) * k->equilibrium()[i];
        CHECK(k->return_probability(y) == doctest::Approx(static_cast<double>(s)).epsilon(1e-9));
        CHECK(k->return_probability(y) < 1.0);
    }
    CHECK(k->bias_bound() < 1e-6);
}

TEST_CASE("exit kernel returns land on the inner boundary with the right frequency") {
    const auto k = ExitKernel::get(3, 3);
    const Site y{4, 1, 0};
    long long back = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(9, i);
        Site z;
        if (k->sample_return(y, rng, z)) {
            ++back;
            CHECK(z.norm_inf() == 3);
        }
    }
    const double p = k->return_probability(y);
    CHECK(std::abs(back / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("psi is nonnegative on the window") {
    const auto prof = small_profile();
    for (const auto& x : sup_ball(3, prof->support_radius() + 1)) CHECK(psi(*prof, x) >= 0.0);
    CHECK(psi(*prof, Site{0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("martingale has unit mean at a fixed time") {
    const auto prof = small_profile();
    StopRule st = StopRule::exit(sup_ball(3, 30));
    st.until(10.0);
    MeanAccumulator acc;
    for (int i = 0; i < 20000; ++i) {
        RngStream rng(21, i);
        acc.add(martingale_weight(sample_walk(Site{2, 0, 0}, nullptr, st, rng), *prof));
    }
    CHECK(std::abs(acc.mean() - 1.0) < 4.0 * acc.std_error());
}

TEST_CASE("tilted walk jump frequencies follow f at the target") {
    const auto prof = small_profile();
    const Site x{4, 1, 0};
    double tot = 0.0;
    for (int k = 0; k < 6; ++k) tot += prof->f(x.neighbor(k));
    int count[6] = {0};
    const int n = 30000;
    StopRule st = StopRule::exit(SiteSet(3, {x}));
    for (int i = 0; i < n; ++i) {
        RngStream rng(4, i);
        const Trajectory t = sample_walk(x, prof.get(), st, rng);
        for (int k = 0; k < 6; ++k)
            if (t.steps.back().site == x.neighbor(k)) ++count[k];
    }
    for (int k = 0; k < 6; ++k) {
        const double p = prof->f(x.neighbor(k)) / tot;
        CHECK(std::abs(count[k] / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("walks are reproducible from the stream") {
    const auto prof = small_profile();
    const StopRule stop = StopRule::exit(sup_ball(3, 5));
    RngStream a(77, 5), b(77, 5);
    const Trajectory t1 = sample_walk(Site{0, 0, 0}, prof.get(), stop, a);
    const Trajectory t2 = sample_walk(Site{0, 0, 0}, prof.get(), stop, b);
    REQUIRE(t1.steps.size() == t2.steps.size());
    for (std::size_t k = 0; k < t1.steps.size(); ++k) {
        CHECK(t1.steps[k].site == t2.steps[k].site);
        CHECK(t1.steps[k].holding == t2.steps[k].holding);
    }
}
