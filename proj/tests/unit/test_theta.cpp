#include <doctest.h>

#include <defiers/errors.hpp>
#include <defiers/simulation.hpp>
#include <defiers/theta_model.hpp>

#include <random>

using namespace defiers;

TEST_SUITE("theta") {

TEST_CASE("group shares from the first stage") {
    GroupShares s = group_shares(0.5, 0.2, 0.1);
    CHECK(s.pi_co == doctest::Approx(0.4));
    CHECK(s.pi_at == doctest::Approx(0.1));
    CHECK(s.pi_nt == doctest::Approx(0.4));
    CHECK(s.pi_delta == doctest::Approx(0.3));
    GroupShares m = group_shares(0.5, 0.2, 0.0);
    CHECK(m.pi_co == doctest::Approx(0.3));
    CHECK(m.pi_at == doctest::Approx(0.2));
    CHECK(m.pi_nt == doctest::Approx(0.5));
    CHECK(m.pi_delta == doctest::Approx(0.3));
}

TEST_CASE("group share errors") {
    auto code = [](auto f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidConfig;
    };
    CHECK(code([] { group_shares(0.5, 0.2, 0.25); }) == ErrorCode::InfeasibleDefierShare);
    CHECK(code([] { group_shares(0.2, 0.5, 0.0); }) == ErrorCode::RelevanceViolated);
    CHECK(code([] { group_shares(0.3, 0.3, 0.0); }) == ErrorCode::RelevanceViolated);
}

TEST_CASE("group shares sum to one across the feasible range") {
    for (double pi = 0.0; pi <= 0.2; pi += 0.01) {
        GroupShares s = group_shares(0.5, 0.2, pi);
        CHECK(s.pi_co + s.pi_df + s.pi_at + s.pi_nt == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.pi_co - s.pi_df == doctest::Approx(s.pi_delta));
    }
}

TEST_CASE("wald estimand") {
    MicroSample perfect;
    for (int i = 0; i < 10; ++i) {
        perfect.add(1.0, 1, 1);
        perfect.add(0.0, 0, 0);
    }
    CHECK(wald_estimand(perfect) == doctest::Approx(1.0));
    CHECK(wald_estimand(reference_bin()) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("wald estimand is invariant to outcome shifts") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    MicroSample s, shifted;
    for (int i = 0; i < 500; ++i) {
        int z = coin(rng);
        int d = nd(rng) < 0.5 ? z : coin(rng);
        double y = nd(rng) + d;
        s.add(y, d, z);
        shifted.add(y + 7.25, d, z);
    }
    CHECK(wald_estimand(shifted) == doctest::Approx(wald_estimand(s)).epsilon(1e-9));
}

TEST_CASE("G recovers a mixture component") {
    // Q_dd = Q_d(1-d) + pi_delta F with F a CDF.
    std::vector<double> k{0.0, 1.0, 2.0};
    std::vector<double> f{0.2, 0.3, 0.5};
    std::vector<double> other{0.1, 0.1, 0.1};
    const double pdelta = 0.3;
    std::vector<double> own(3);
    for (int i = 0; i < 3; ++i) own[i] = other[i] + pdelta * f[i];
    // Arm z=1: D=1 masses own, D=0 masses q01; arm z=0: D=1 masses other, D=0 masses q00.
    double p1 = 0.3 + pdelta, p0 = 0.3;
    std::vector<double> q01{(1 - p1) / 3, (1 - p1) / 3, (1 - p1) / 3};
    std::vector<double> q00{(1 - p0) / 3, (1 - p0) / 3, (1 - p0) / 3};
    ThetaCont th = theta_from_masses(k, own, other, q01, q00);
    GridFn G = compute_G(th, 1, group_shares(th, 0.0));
    CHECK(G.values[0] == doctest::Approx(0.2));
    CHECK(G.values[1] == doctest::Approx(0.5));
    CHECK(G.values[2] == doctest::Approx(1.0));
    CHECK(G(-1.0) == 0.0);
}

TEST_CASE("G ends at one and equals the complier CDF without defiers") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 50; ++rep) {
        LatentCont l = random_latent_cont(rng, 5);
        const double pdf = l.share[kDF];
        ThetaCont th = l.theta();
        for (int d = 0; d < 2; ++d) CHECK(compute_G(th, d, group_shares(th, pdf)).back() == doctest::Approx(1.0).epsilon(1e-12));

        l.share[kCO] += l.share[kDF];
        l.share[kDF] = 0.0;
        ThetaCont mono = l.theta();
        for (int d = 0; d < 2; ++d) {
            GridFn G = compute_G(mono, d, group_shares(mono, 0.0));
            double acc = 0.0;
            for (std::size_t i = 0; i < G.size(); ++i) {
                acc += l.pmf[kCO][static_cast<std::size_t>(d)][i];
                CHECK(G.values[i] == doctest::Approx(acc).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("positive part functions follow mass differences") {
    LatentCont l = reference_cont();
    ThetaCont th = l.theta();
    CHECK(th.Gt1p.is_nondecreasing());
    CHECK(th.Gt0p.is_nondecreasing());
    for (int d = 0; d < 2; ++d) {
        GridFn D = th.diff(d);
        double acc = 0.0, prev = 0.0;
        for (std::size_t i = 0; i < D.size(); ++i) {
            acc += std::max(0.0, D.values[i] - prev);
            prev = D.values[i];
            CHECK(th.Gtp(d).values[i] == doctest::Approx(acc).epsilon(1e-12));
        }
    }
}

TEST_CASE("binary embedding") {
    ThetaBin t = reference_bin();
    ThetaCont e = embed_binary(t);
    CHECK(e.knots() == std::vector<double>{0.0, 1.0});
    CHECK(e.Q11.back() == doctest::Approx(t.P1));
    CHECK(e.Q10.back() == doctest::Approx(t.P0));
    CHECK(e.Q11.values[0] == doctest::Approx(t.P1 - t.P11));
    CHECK(e.Q00.values[0] == doctest::Approx(1.0 - t.P0 - t.P00));
    CHECK(wald_estimand(e) == doctest::Approx(wald_estimand(t)).epsilon(1e-12));
}

TEST_CASE("validation of theta") {
    ThetaBin bad = reference_bin();
    bad.P11 = 0.6;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_NOTHROW(reference_bin().validate());
    CHECK_NOTHROW(reference_cont().theta().validate());
}

TEST_CASE("sample bookkeeping") {
    MicroSample s;
    s.add(1.0, 1, 1);
    s.add(0.0, 0, 0);
    s.add(0.5, 0, 0);
    CHECK(s.n() == 3);
    CHECK(s.n1() == 1);
    CHECK(s.binary_outcome() == false);
    for (int i = 0; i < 40; ++i) s.add(0.0, 0, 0);
    CHECK(s.unbalanced_arms());
}

}
