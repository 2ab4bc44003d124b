#include <doctest.h>

#include "bridge.hpp"

#include <defiers/binary_model.hpp>
#include <defiers/errors.hpp>
#include <defiers/regions.hpp>
#include <defiers/simulation.hpp>

#include <cmath>
#include <random>

using namespace defiers;

namespace {

ThetaBin reversed_bin() {
    ThetaBin t = reference_bin();
    t.P10 = 0.20;
    t.P11 = 0.15;
    return t;
}

// Largest excess of the other arm over the own arm on any outcome set; the
// defier group has to carry it.
double subset_pdf_lo(const ThetaBin& t) {
    double best = 0.0;
    for (int d = 0; d < 2; ++d) {
        const double own[2] = {t.arm_share(d, d) - t.P(d, d), t.P(d, d)};
        const double oth[2] = {t.arm_share(d, 1 - d) - t.P(d, 1 - d), t.P(d, 1 - d)};
        for (int mask = 0; mask < 4; ++mask) {
            double gap = 0.0;
            for (int y = 0; y < 2; ++y)
                if (mask & (1 << y)) gap += oth[y] - own[y];
            best = std::max(best, gap);
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("regions") {

TEST_CASE("identified defier share interval") {
    Interval r = pdf_bounds(embed_binary(reference_bin()));
    CHECK(r.hi == doctest::Approx(0.2));
    CHECK(r.lo == doctest::Approx(0.0));
    Interval rev = pdf_bounds(embed_binary(reversed_bin()));
    CHECK(rev.lo == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(rev.lo == doctest::Approx(subset_pdf_lo(reversed_bin())).epsilon(1e-12));
    CHECK(pdf_bounds(reversed_bin()).lo == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("lower heterogeneity bound") {
    ThetaCont ok = embed_binary(reference_bin());
    for (double pi : {0.0, 0.05, 0.1}) CHECK(delta_lower(ok, pi) == 0.0);
    CHECK(delta_lower(ok, 0.2) == doctest::Approx(0.2).epsilon(1e-6));
    ThetaCont rev = embed_binary(reversed_bin());
    BisectionOptions tight{1e-12, 100};
    CHECK(delta_lower(rev, 0.1, tight) == doctest::Approx(0.875).epsilon(1e-9));
    CHECK(delta_lower(rev, 0.05, tight) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(delta_lower(rev, 0.01), Error);
    CHECK_THROWS_AS(delta_lower(rev, 0.25), Error);
}

TEST_CASE("upper heterogeneity bound is at least the lower bound") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 40; ++rep) {
        ThetaCont th = random_latent_cont(rng, 4).theta();
        Interval pdf = pdf_bounds(th);
        for (double t : {0.1, 0.5, 0.9}) {
            double pi = oracle::lerp(pdf.lo, pdf.hi, t);
            if (pi <= 0.0) continue;
            double lo = delta_lower(th, pi), hi = delta_upper(th, pi);
            CHECK(hi >= lo - 1e-6);
            CHECK(hi <= 1.0);
        }
    }
}

TEST_CASE("upper bound at the top share with no takers is the observed KS distance") {
    // p0 = 1 - p1, so both taker groups vanish at the largest defier share and
    // each arm identifies one group directly.
    LatentCont l = reference_cont();
    l.share = {0.5, 0.2, 0.15, 0.15};
    ThetaCont th = l.theta();
    Interval pdf = pdf_bounds(th);
    REQUIRE(pdf.hi == doctest::Approx(0.35));
    GroupShares sh = group_shares(th, pdf.hi);
    REQUIRE(std::abs(sh.pi_at) < 1e-12);
    REQUIRE(std::abs(sh.pi_nt) < 1e-12);
    double ks = 0.0;
    for (int d = 0; d < 2; ++d)
        for (std::size_t i = 0; i < th.knots().size(); ++i)
            ks = std::max(ks, std::abs(th.Q(d, d).values[i] / sh.pi_co - th.Q(d, 1 - d).values[i] / sh.pi_df));
    CHECK(delta_upper(th, pdf.hi) == doctest::Approx(ks).epsilon(1e-9));
}

TEST_CASE("sensitivity region shape") {
    ThetaCont th = embed_binary(reference_bin());
    RegionCurve rc = sensitivity_region(th, linspace(0.0, 0.2, 11));
    CHECK_FALSE(rc.empty);
    CHECK(rc.pdf_lo == doctest::Approx(0.0));
    CHECK(rc.pdf_hi == doctest::Approx(0.2));
    REQUIRE(rc.size() == 11);
    for (std::size_t i = 0; i < rc.size(); ++i) {
        CHECK(rc.delta_lo[i] == doctest::Approx(binary_delta_bounds(reference_bin(), rc.pi_grid[i]).lo).epsilon(1e-6));
        CHECK(rc.in_sr(i, rc.delta_lo[i]));
        CHECK(rc.in_sr(i, rc.delta_hi[i]));
    }

    // Arm distributions that no defier share can reconcile.
    ThetaBin bad = reference_bin();
    bad.P10 = 0.2;
    bad.P11 = 0.0;
    bad.P01 = 0.5;
    bad.P00 = 0.0;
    RegionCurve empty = sensitivity_region(embed_binary(bad), linspace(0.0, 0.2, 5));
    CHECK(empty.empty);
    CHECK(pdf_bounds(bad).lo > pdf_bounds(bad).hi);
}

TEST_CASE("breakdown point on the reference instance") {
    ThetaCont th = embed_binary(reference_bin());
    ThetaBin t = reference_bin();
    auto bp = breakdown_point(th, 0.1, 0.0, {1e-10, 100});
    REQUIRE(bp.has_value());
    // Sweep delta with the latent-grid oracle.
    double last_ok = -1.0;
    for (int k = 0; k <= 1000; ++k) {
        double delta = k * 1e-3;
        auto r1 = oracle::prob_range(t, 0.1, delta, 1), r0 = oracle::prob_range(t, 0.1, delta, 0);
        if (!r1.feasible || !r0.feasible) continue;
        if (r1.lo - r0.hi >= -2e-3) last_ok = delta;
    }
    CHECK(std::abs(*bp - std::min(last_ok, binary_delta_bounds(t, 0.1).hi)) <= 5e-3);
    Interval late = binary_late_bounds(t, {0.1, 0.2});
    CHECK(late.lo >= 0.0);
    CHECK(*bp >= 0.2);
}

TEST_CASE("breakdown point edge cases") {
    ThetaCont th = embed_binary(reference_bin());
    CHECK_FALSE(breakdown_point(th, 0.1, 5.0).has_value());
    auto vac = breakdown_point(th, 0.1, -5.0);
    REQUIRE(vac.has_value());
    CHECK(*vac == doctest::Approx(delta_upper(th, 0.1)));
}

TEST_CASE("breakdown point need not fall with the defier share") {
    std::mt19937_64 rng(101);
    bool found = false;
    for (int rep = 0; rep < 400 && !found; ++rep) {
        ThetaBin t = random_latent_bin(rng).theta();
        Interval pdf = pdf_bounds(t);
        if (pdf.hi - pdf.lo < 0.05) continue;
        std::optional<double> prev;
        for (double pi : linspace(std::max(pdf.lo, 1e-3), pdf.hi, 15)) {
            auto bp = binary_bp_components(t, pi, 0.0).bp;
            if (prev && bp && *bp > *prev + 1e-6) found = true;
            prev = bp;
        }
    }
    CHECK(found);
}

TEST_CASE("robust region") {
    ThetaCont th = embed_binary(reference_bin());
    auto grid = linspace(0.0, 0.2, 9);
    RegionCurve all = robust_region(th, grid, Conclusion{-10.0, std::nullopt});
    for (std::size_t i = 0; i < all.size(); ++i) {
        REQUIRE(all.bp[i].has_value());
        CHECK(*all.bp[i] == doctest::Approx(all.delta_hi[i]));
    }
    RegionCurve none = robust_region(th, grid, Conclusion{10.0, std::nullopt});
    for (const auto& b : none.bp) CHECK_FALSE(b.has_value());

    RegionCurve rc = robust_region(th, {0.1}, Conclusion{0.0, std::nullopt});
    REQUIRE(rc.size() == 1);
    CHECK(rc.in_rr(0, 0.2));
    for (double delta = 0.0; delta <= 1.0; delta += 0.05)
        if (rc.in_rr(0, delta)) CHECK(rc.in_sr(0, delta));
}

TEST_CASE("quantile conclusions") {
    ThetaCont th = reference_cont().theta();
    Conclusion median{0.0, 0.5};
    Interval e = effect_bounds(th, {0.1, 0.3}, median);
    CHECK(e.lo <= e.hi);
    RegionCurve rc = robust_region(th, linspace(0.0, 0.1, 3), median);
    CHECK(rc.size() == 3);
}

TEST_CASE("naive breakdown") {
    CHECK(naive_breakdown(1.0 / 3.0, 0.0, 0.3, 0.1) == doctest::Approx(1.0));
    CHECK(naive_breakdown(0.2, 0.2, 0.3, 0.1) == 0.0);
    CHECK(std::isinf(naive_breakdown(0.2, 0.0, 0.3, 0.0)));
}

TEST_CASE("grids") {
    CHECK(linspace(0.0, 1.0, 5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(linspace(0.3, 0.3, 4).size() == 1);
    CHECK(default_pi_grid({0.0, 0.2}).size() == 81);
    CHECK(default_pi_grid({0.3, 0.2}).empty());
    auto c = clip_pi_grid({-0.1, 0.0, 0.1, 0.2, 0.3}, {0.0, 0.2});
    CHECK(c == std::vector<double>{0.0, 0.1, 0.2});
}

}
