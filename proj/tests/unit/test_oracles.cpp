#include <doctest.h>

#include "bridge.hpp"
#include "lp.hpp"
#include "oracles.hpp"

#include <defiers/simulation.hpp>

using namespace defiers;

TEST_SUITE("oracles") {

TEST_CASE("simplex on small programs") {
    // max x + y with x + 2y <= 4, 3x + y <= 6
    oracle::LinearProgram lp;
    lp.c = {-1.0, -1.0};
    lp.A_le = {{1.0, 2.0}, {3.0, 1.0}};
    lp.b_le = {4.0, 6.0};
    oracle::LpResult r = oracle::solve(lp);
    REQUIRE(r.feasible);
    REQUIRE(r.bounded);
    CHECK(r.value == doctest::Approx(-2.8));
    CHECK(r.x[0] == doctest::Approx(1.6));
    CHECK(r.x[1] == doctest::Approx(1.2));

    oracle::LinearProgram eq;
    eq.c = {1.0, 2.0, 3.0};
    eq.A_eq = {{1.0, 1.0, 1.0}};
    eq.b_eq = {1.0};
    eq.A_le = {{-1.0, 0.0, 0.0}};
    eq.b_le = {-0.25};
    r = oracle::solve(eq);
    REQUIRE(r.feasible);
    CHECK(r.value == doctest::Approx(1.0));
    eq.c = {-1.0, -2.0, -3.0};
    r = oracle::solve(eq);
    CHECK(r.value == doctest::Approx(-2.5));
}

TEST_CASE("simplex infeasible and unbounded") {
    oracle::LinearProgram lp;
    lp.c = {1.0};
    lp.A_eq = {{1.0}};
    lp.b_eq = {-1.0};
    CHECK_FALSE(oracle::solve(lp).feasible);

    oracle::LinearProgram ub;
    ub.c = {-1.0, 0.0};
    ub.A_le = {{1.0, -1.0}};
    ub.b_le = {1.0};
    oracle::LpResult r = oracle::solve(ub);
    CHECK(r.feasible);
    CHECK_FALSE(r.bounded);
}

TEST_CASE("degenerate program terminates") {
    oracle::LinearProgram lp;
    lp.c = {-0.75, 150.0, -0.02, 6.0};
    lp.A_le = {{0.25, -60.0, -0.04, 9.0}, {0.5, -90.0, -0.02, 3.0}, {0.0, 0.0, 1.0, 0.0}};
    lp.b_le = {0.0, 0.0, 1.0};
    oracle::LpResult r = oracle::solve(lp);
    REQUIRE(r.feasible);
    CHECK(r.value == doctest::Approx(-0.05));
}

TEST_CASE("envelope without defiers recovers the complier law") {
    LatentCont l = reference_cont();
    l.share = {0.5, 0.0, 0.1, 0.4};
    ThetaCont t = l.theta();
    oracle::CdfEnvelope e = oracle::envelope(t, 0.0, 0.0, 1);
    REQUIRE(e.feasible);
    CHECK(e.lower[0] == doctest::Approx(0.2));
    CHECK(e.upper[0] == doctest::Approx(0.2));
    CHECK(e.lower[1] == doctest::Approx(0.5));
    CHECK(e.upper[1] == doctest::Approx(0.5));
    CHECK(e.mean_lo == doctest::Approx(1.3));
    CHECK(e.mean_hi == doctest::Approx(1.3));
}

TEST_CASE("grid oracle on an identified cell") {
    ThetaBin t = reference_bin();
    oracle::ProbRange r = oracle::prob_range(t, 0.0, 0.0, 1, 1e-4);
    REQUIRE(r.feasible);
    // no defiers: p = (P11 - P10) / (P1 - P0)
    CHECK(r.lo == doctest::Approx(0.25 / 0.3).epsilon(1e-3));
    CHECK(r.hi == doctest::Approx(0.25 / 0.3).epsilon(1e-3));
    oracle::ProbRange wide = oracle::prob_range(t, 0.1, 1.0, 1, 1e-4);
    CHECK(wide.lo <= r.lo + 1e-9);
    CHECK(wide.lo == doctest::Approx(0.625).epsilon(1e-3));
    CHECK(wide.hi == doctest::Approx(0.875).epsilon(1e-3));
}

}
