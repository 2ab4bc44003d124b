#pragma once

#include "defiers/step_fn.hpp"

#include <cstddef>
#include <vector>

namespace defiers {

struct Observation {
    double y = 0.0;
    int d = 0;
};

struct MicroSample {
    std::vector<Observation> arm0;
    std::vector<Observation> arm1;

    std::size_t n0() const { return arm0.size(); }
    std::size_t n1() const { return arm1.size(); }
    std::size_t n() const { return arm0.size() + arm1.size(); }
    const std::vector<Observation>& arm(int z) const { return z == 1 ? arm1 : arm0; }
    std::vector<Observation>& arm(int z) { return z == 1 ? arm1 : arm0; }
    void add(double y, int d, int z) { arm(z).push_back({y, d}); }
    bool binary_outcome() const;
    // True when the smaller arm holds less than 5% of the sample.
    bool unbalanced_arms() const;
};

struct GroupShares {
    double pi_co = 0.0;
    double pi_df = 0.0;
    double pi_at = 0.0;
    double pi_nt = 0.0;
    double pi_delta = 0.0;

    // Share of the group that takes treatment d regardless of z.
    double pi_taker(int d) const { return d == 1 ? pi_at : pi_nt; }
    // Share of the group whose Y_d is never observed.
    double pi_unobserved(int d) const { return d == 1 ? pi_nt : pi_at; }
};

struct SensitivityPoint {
    double pi_df = 0.0;
    double delta = 0.0;
};

// Q_ds(y) = P(Y <= y, D = d | Z = s) on a shared grid, with Gtp_d the
// accumulated positive part of the increments of Q_dd - Q_d(1-d).
struct ThetaCont {
    GridFn Q11, Q10, Q01, Q00;
    GridFn Gt1p, Gt0p;

    const GridFn& Q(int d, int s) const;
    const GridFn& Gtp(int d) const { return d == 1 ? Gt1p : Gt0p; }
    // Q_dd - Q_d(1-d).
    GridFn diff(int d) const;
    double p1() const { return Q11.back(); }
    double p0() const { return Q10.back(); }
    const std::vector<double>& knots() const { return Q11.knots; }
    void validate() const;
};

struct ThetaBin {
    double P11 = 0.0, P10 = 0.0, P01 = 0.0, P00 = 0.0;
    double P0 = 0.0, P1 = 0.0;

    double P(int d, int s) const;
    // P(D = d | Z = s).
    double arm_share(int d, int s) const;
    void validate() const;
};

GroupShares group_shares(double p1, double p0, double pi_df);
GroupShares group_shares(const ThetaCont& theta, double pi_df);
GroupShares group_shares(const ThetaBin& theta, double pi_df);

double wald_estimand(const MicroSample& sample);
double wald_estimand(const ThetaCont& theta);
double wald_estimand(const ThetaBin& theta);

GridFn compute_G(const ThetaCont& theta, int d, const GroupShares& shares);

// Builds a ThetaCont from the four CDF-like functions; Gtp is derived from
// positive increments of Q_dd - Q_d(1-d).
ThetaCont theta_from_q(GridFn Q11, GridFn Q10, GridFn Q01, GridFn Q00);
// Same from point masses q_ds on the given knots.
ThetaCont theta_from_masses(const std::vector<double>& knots, const std::vector<double>& q11,
                            const std::vector<double>& q10, const std::vector<double>& q01,
                            const std::vector<double>& q00);
// Two-point support {0,1} embedding of the binary model.
ThetaCont embed_binary(const ThetaBin& theta);

}  // namespace defiers
