#include <doctest.h>

#include <defiers/errors.hpp>
#include <defiers/step_fn.hpp>

#include <random>

using namespace defiers;

namespace {

GridFn fn(std::vector<double> v) {
    std::vector<double> k(v.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i);
    return GridFn(k, std::move(v));
}

GridFn random_fn(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return fn(v);
}

}  // namespace

TEST_SUITE("step_fn") {

TEST_CASE("construction rejects bad grids") {
    CHECK_THROWS_AS(GridFn({0.0, 1.0}, {0.0}), Error);
    CHECK_THROWS_AS(GridFn({1.0, 0.0}, {0.0, 1.0}), Error);
    CHECK_THROWS_AS(GridFn({0.0, 1.0}, {0.0, 1.0}, 0.5, 2.0), Error);
}

TEST_CASE("evaluation is right continuous and zero below the grid") {
    GridFn f({1.0, 2.0, 3.0}, {0.25, 0.5, 1.0});
    CHECK(f(0.5) == 0.0);
    CHECK(f(1.0) == 0.25);
    CHECK(f(1.999) == 0.25);
    CHECK(f(2.0) == 0.5);
    CHECK(f(10.0) == 1.0);
}

TEST_CASE("running sup") {
    CHECK(running_sup_leq(fn({0.1, 0.3, 0.2, 0.5})).values == std::vector<double>{0.1, 0.3, 0.3, 0.5});
    CHECK(running_sup_leq(fn({0.5, 0.2})).values == std::vector<double>{0.5, 0.5});
    CHECK(running_sup_leq(fn({0.1, 0.2, 0.4})).values == std::vector<double>{0.1, 0.2, 0.4});
}

TEST_CASE("running inf") {
    CHECK(running_inf_geq(fn({0.1, 0.3, 0.2, 0.5})).values == std::vector<double>{0.1, 0.2, 0.2, 0.5});
    CHECK(running_inf_geq(fn({0.5, 0.2})).values == std::vector<double>{0.2, 0.2});
    CHECK(running_inf_geq(fn({0.1, 0.2, 0.4})).values == std::vector<double>{0.1, 0.2, 0.4});
}

TEST_CASE("running envelopes are the tightest monotone envelopes") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        GridFn f = random_fn(rng, 1 + rep % 17);
        GridFn up = running_sup_leq(f), dn = running_inf_geq(f);
        CHECK(up.is_nondecreasing(0.0));
        CHECK(dn.is_nondecreasing(0.0));
        for (std::size_t i = 0; i < f.size(); ++i) {
            double mx = f.values[0];
            for (std::size_t j = 0; j <= i; ++j) mx = std::max(mx, f.values[j]);
            double mn = f.values[i];
            for (std::size_t j = i; j < f.size(); ++j) mn = std::min(mn, f.values[j]);
            CHECK(up.values[i] == mx);
            CHECK(dn.values[i] == mn);
        }
        CHECK(running_inf_geq(up).values == up.values);
        CHECK(running_sup_leq(dn).values == dn.values);
    }
}

TEST_CASE("positive part accumulation") {
    CHECK(positive_part_accum(fn({0.2, -0.1, 0.3})).values == std::vector<double>{0.2, 0.2, 0.5});
    GridFn nonneg = fn({0.1, 0.0, 0.4});
    CHECK(positive_part_accum(nonneg).values == cumulative(nonneg).values);
}

TEST_CASE("positive and negative parts reconstruct the net sum") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        GridFn inc = random_fn(rng, 9);
        GridFn neg = axpby(-1.0, inc, 0.0, inc);
        GridFn net = axpby(1.0, positive_part_accum(inc), -1.0, positive_part_accum(neg));
        GridFn direct = cumulative(inc);
        for (std::size_t i = 0; i < inc.size(); ++i) CHECK(net.values[i] == doctest::Approx(direct.values[i]).epsilon(1e-12));
        GridFn back = increments(direct);
        for (std::size_t i = 0; i < inc.size(); ++i) CHECK(back.values[i] == doctest::Approx(inc.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("stieltjes mean") {
    CHECK(stieltjes_mean(GridFn({3.0}, {1.0})) == 3.0);
    CHECK(stieltjes_mean(GridFn({0.0, 1.0}, {0.5, 1.0})) == 0.5);
    CHECK(stieltjes_mean(GridFn({1.0, 2.0, 4.0}, {0.25, 0.5, 1.0})) == doctest::Approx(0.25 + 0.5 + 2.0));
    CHECK_THROWS_AS(stieltjes_mean(GridFn({0.0, 1.0}, {0.5, 0.9})), Error);
    CHECK_THROWS_AS(stieltjes_mean(GridFn({0.0, 1.0}, {0.6, 0.5})), Error);
}

TEST_CASE("generalized inverse") {
    GridFn point({3.0}, {1.0});
    CHECK(generalized_inverse(point, 0.5, Side::Left) == 3.0);
    GridFn half({0.0, 1.0}, {0.5, 1.0});
    CHECK(generalized_inverse(half, 0.5, Side::Left) == 0.0);
    CHECK(generalized_inverse(half, 0.5, Side::Right) == 1.0);
    GridFn stair({1.0, 2.0, 3.0}, {0.25, 0.5, 1.0});
    CHECK(generalized_inverse(stair, 0.6, Side::Left) == 3.0);
    CHECK_THROWS_AS(generalized_inverse(stair, 0.0, Side::Left), Error);
    CHECK_THROWS_AS(generalized_inverse(stair, 1.0, Side::Right), Error);
}

TEST_CASE("left inverse never exceeds the evaluation point") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> v(8);
        double acc = 0.0;
        for (double& x : v) x = (acc += u(rng));
        for (double& x : v) x /= acc;
        GridFn F = fn(v);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            if (v[i] <= 0.0 || v[i] >= 1.0) continue;
            CHECK(generalized_inverse(F, v[i], Side::Left) <= F.knots[i]);
            CHECK(generalized_inverse(F, v[i], Side::Right) > F.knots[i]);
        }
    }
}

TEST_CASE("pointwise helpers") {
    GridFn a = fn({-0.5, 0.5, 1.5}), b = fn({0.0, 1.0, 0.2});
    CHECK(clamp01(a).values == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(pointwise_max(a, b).values == std::vector<double>{0.0, 1.0, 1.5});
    CHECK(pointwise_min(a, b).values == std::vector<double>{-0.5, 0.5, 0.2});
    CHECK(sup_distance(a, b) == doctest::Approx(1.3));
    CHECK(a.is_cdf() == false);
    CHECK(fn({0.0, 0.4, 1.0}).is_cdf());
}

}
