#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "tecgp/moo_core.hpp"

using namespace tecgp;

namespace {

Individual ind(double rmse, std::size_t size, Feature f = Feature::Ssn) {
    return {ExprTree::variable(f), {rmse, size}, std::nullopt};
}

std::vector<Point2> random_points(Rng& rng, std::size_t n, bool integer) {
    std::vector<Point2> pts(n);
    for (auto& p : pts) {
        if (integer) {
            p = {static_cast<double>(rng.uniform_index(10)), static_cast<double>(rng.uniform_index(10))};
        } else {
            p = {rng.uniform(0, 1), rng.uniform(0, 1)};
        }
    }
    return pts;
}

std::vector<Point2> sorted_points(const ParetoArchive& a) {
    auto pts = a.points();
    std::sort(pts.begin(), pts.end());
    return pts;
}

}  // namespace

TEST_SUITE("moo_core") {

TEST_CASE("dominance examples") {
    CHECK(dominates(Point2{1, 2}, Point2{2, 3}));
    CHECK_FALSE(dominates(Point2{1, 3}, Point2{3, 1}));
    CHECK_FALSE(dominates(Point2{3, 1}, Point2{1, 3}));
    CHECK_FALSE(dominates(Point2{1, 2}, Point2{1, 2}));
    CHECK(dominates(Point2{1, 2}, Point2{1, 3}));
    CHECK(dominates(ObjectiveVector{1, 2}, ObjectiveVector{1, 3}));
}

TEST_CASE("dominance is a strict partial order") {
    Rng rng(1);
    for (int k = 0; k < 3000; ++k) {
        const auto p = random_points(rng, 3, true);
        CHECK_FALSE(dominates(p[0], p[0]));
        if (dominates(p[0], p[1])) CHECK_FALSE(dominates(p[1], p[0]));
        if (dominates(p[0], p[1]) && dominates(p[1], p[2])) CHECK(dominates(p[0], p[2]));
        CHECK(dominates(p[0], p[1]) == oracle::dominates(p[0], p[1]));
    }
}

TEST_CASE("archive examples") {
    ParetoArchive a;
    CHECK(a.update(ind(3, 3)));
    CHECK(a.size() == 1);

    ParetoArchive b;
    b.update(ind(1, 5));
    CHECK(b.update(ind(0, 6)));
    CHECK(b.size() == 2);

    ParetoArchive c;
    c.update(ind(1, 5));
    c.update(ind(2, 4));
    c.update(ind(3, 3));
    const auto [next, accepted] = archive_update(c, ind(1, 3));
    CHECK(accepted);
    // (1,3) dominates all three members, (1,5) included
    CHECK(sorted_points(next) == std::vector<Point2>{{1, 3}});
    CHECK(c.size() == 3);  // value form leaves the input alone

    CHECK_FALSE(c.update(ind(4, 4)));

    ParetoArchive d;
    d.update(ind(1, 5));
    d.update(ind(2, 4));
    d.update(ind(3, 3));
    CHECK(d.update(ind(2, 3)));
    CHECK(sorted_points(d) == std::vector<Point2>{{1, 5}, {2, 3}});
}

TEST_CASE("archive keeps equal objectives only for distinct trees") {
    ParetoArchive a;
    CHECK(a.update(ind(1, 1, Feature::Ssn)));
    CHECK_FALSE(a.update(ind(1, 1, Feature::Ssn)));
    CHECK(a.update(ind(1, 1, Feature::SinDay)));
    CHECK(a.size() == 2);
    CHECK(a.update(ind(0.5, 1, Feature::CosDay)));
    CHECK(a.size() == 1);
}

TEST_CASE("filter and sort examples") {
    const std::vector<Point2> same(5, Point2{2, 2});
    CHECK(nondominated_filter(same).size() == 5);
    std::vector<Point2> chain;
    for (int i = 0; i < 10; ++i) chain.push_back({double(i), double(9 - i)});
    CHECK(nondominated_filter(chain).size() == 10);
    CHECK(fast_nondominated_sort(chain).size() == 1);
    const std::vector<Point2> ordered = {{3, 3}, {1, 1}, {2, 2}};
    const auto fronts = fast_nondominated_sort(ordered);
    CHECK(fronts == std::vector<std::vector<std::size_t>>{{1}, {2}, {0}});
    CHECK(nondominated_filter(std::vector<Point2>{}).empty());
    CHECK(fast_nondominated_sort(std::vector<Point2>{}).empty());
}

TEST_CASE("filter and sort match brute-force oracles") {
    Rng rng(2);
    for (int k = 0; k < 200; ++k) {
        const auto pts = random_points(rng, 1 + rng.uniform_index(120), k % 2 == 0);
        CHECK(nondominated_filter(pts) == oracle::nondominated(pts));
        const auto fronts = fast_nondominated_sort(pts);
        CHECK(fronts == oracle::peel(pts));
        CHECK(fronts.front() == nondominated_filter(pts));
    }
}

TEST_CASE("crowding distance") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(crowding_distance(std::vector<Point2>{{1, 1}}) == std::vector<double>{inf});
    CHECK(crowding_distance(std::vector<Point2>{{0, 1}, {1, 0}}) == std::vector<double>{inf, inf});
    const auto d = crowding_distance(std::vector<Point2>{{0, 2}, {1, 1}, {2, 0}});
    CHECK(d[0] == inf);
    CHECK(d[2] == inf);
    CHECK(d[1] == doctest::Approx(2.0).epsilon(1e-12));

    // constant objective contributes nothing
    const auto flat = crowding_distance(std::vector<Point2>{{0, 5}, {1, 5}, {3, 5}, {4, 5}});
    CHECK(flat[1] == doctest::Approx(3.0 / 4.0));
    CHECK(flat[2] == doctest::Approx(3.0 / 4.0));

    // permutation invariance
    Rng rng(3);
    std::vector<Point2> front;
    for (int i = 0; i < 12; ++i) front.push_back({double(i) + rng.uniform(0, 0.5), 20.0 - 1.5 * i});
    const auto base = crowding_distance(front);
    std::vector<std::size_t> perm(front.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    shuffle(perm, rng);
    std::vector<Point2> shuffled;
    for (const auto i : perm) shuffled.push_back(front[i]);
    const auto moved = crowding_distance(shuffled);
    for (std::size_t i = 0; i < perm.size(); ++i) CHECK(moved[i] == base[perm[i]]);
}

}
