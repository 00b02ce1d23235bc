#include <doctest.h>

#include <random>
#include <sstream>

#include "ril/lattice.hpp"

using namespace ril;

namespace {

SiteSet random_set(std::mt19937_64& g, int d, int R, double p) {
    std::bernoulli_distribution keep(p);
    SiteSet s(d);
    for (const auto& x : sup_ball(d, R))
        if (keep(g)) s.insert(x);
    return s;
}

SiteSet line(std::initializer_list<int> xs) {
    SiteSet s(3);
    for (int x : xs) s.insert(Site{x, 0, 0});
    return s;
}

}  // namespace

TEST_CASE("boundary sets satisfy their inclusions on random sets") {
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 20; ++trial) {
        const SiteSet S = random_set(g, 3, 3, 0.3);
        const Boundaries b = boundaries(S);
        CHECK(is_subset(b.inner, S));
        CHECK(set_intersection(b.outer, S).empty());
        CHECK(is_subset(S, b.closure));
        for (const auto& y : b.outer) {
            bool adjacent = false;
            for (int k = 0; k < 6; ++k) adjacent = adjacent || S.contains(y.neighbor(k));
            CHECK(adjacent);
        }
    }
}

TEST_CASE("inner and outer boundary of a box") {
    const SiteSet B = sup_ball(3, 2);
    const Boundaries b = boundaries(B);
    CHECK(B.size() == 125);
    CHECK(b.inner.size() == 125 - 27);
    CHECK(b.outer.size() == 6 * 25);
}

TEST_CASE("connectivity examples") {
    const SiteSet K = line({0}), L = line({2});
    CHECK(connected(K, L, line({0, 1, 2})));
    CHECK_FALSE(connected(K, L, line({0, 2})));
    CHECK_FALSE(connected(K, L, SiteSet(3)));
    CHECK(connected(K, K, K));
}

TEST_CASE("connectivity is symmetric and monotone in the allowed set") {
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 30; ++trial) {
        const SiteSet A = random_set(g, 3, 3, 0.55);
        const SiteSet Abig = set_union(A, random_set(g, 3, 3, 0.2));
        const SiteSet K = line({-3}), L = line({3});
        CHECK(connected(K, L, A) == connected(L, K, A));
        if (connected(K, L, A)) CHECK(connected(K, L, Abig));
    }
}

TEST_CASE("disconnection indicator examples") {
    const SiteSet window = sup_ball(3, 5);
    const SiteSet inner = boundaries(window).inner;
    const SiteSet K = sup_ball(3, 1);
    CHECK_FALSE(disconnection_indicator(K, inner, SiteSet(3), window));
    CHECK(disconnection_indicator(K, inner, window, window));
    // closed shell at sup-distance 3
    SiteSet shell(3);
    for (const auto& x : window)
        if (x.norm_inf() == 3) shell.insert(x);
    CHECK(disconnection_indicator(K, inner, shell, window));
    CHECK_THROWS_AS(disconnection_indicator(sup_ball(3, 5), inner, SiteSet(3), window), std::invalid_argument);
}

TEST_CASE("grid disconnection agrees with the set version and is monotone in the occupied set") {
    std::mt19937_64 g(7);
    const int R = 4;
    const SiteSet window = sup_ball(3, R);
    const SiteSet inner = boundaries(window).inner;
    const SiteSet K = sup_ball(3, 0);
    const BoxIndex box = BoxIndex::cube(3, R);
    std::vector<char> target(box.size(), 0);
    for (long long k = 0; k < box.size(); ++k) target[k] = box.on_face(k);
    std::vector<long long> src = {box.index(Site{0, 0, 0})}, q;
    std::vector<char> seen;
    for (int trial = 0; trial < 40; ++trial) {
        const SiteSet occ = random_set(g, 3, R, 0.45);
        std::vector<char> blocked(box.size(), 0);
        for (const auto& x : occ) blocked[box.index(x)] = 1;
        const bool a = disconnection_indicator(K, inner, occ, window);
        CHECK(a == disconnected_in_box(box, src, target, blocked, q, seen));
        const SiteSet more = set_union(occ, random_set(g, 3, R, 0.1));
        if (a) CHECK(disconnection_indicator(K, inner, more, window));
    }
}

TEST_CASE("blow-up of a point is the 3^d cube and blow-up is monotone in the shape") {
    ShapeSpec pt;
    pt.center = {0, 0, 0};
    CHECK(blow_up(pt, 10) == sup_ball(3, 1));
    ShapeSpec a, b;
    a.kind = b.kind = ShapeKind::ball;
    a.center = b.center = {0, 0, 0};
    a.size = 0.1;
    b.size = 0.15;
    for (int N : {10, 20, 33}) CHECK(is_subset(blow_up(a, N), blow_up(b, N)));
}

TEST_CASE("site sets round-trip through the text format") {
    std::mt19937_64 g(3);
    const SiteSet S = random_set(g, 3, 2, 0.5);
    std::stringstream ss;
    write_siteset(ss, S);
    CHECK(read_siteset(ss, 3) == S);
}
