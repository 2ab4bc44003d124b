#include "defiers/binary_model.hpp"

#include "defiers/errors.hpp"

#include <algorithm>
#include <cmath>

namespace defiers {

namespace {

constexpr double kTol = 1e-12;

struct Terms {
    double lo0;  // delta-free part of the lower bound
    double hi0;  // delta-free part of the upper bound
    double D;    // P_dd - P_d(1-d)
};

Terms terms(const ThetaBin& t, const GroupShares& sh, int d) {
    double pdd = t.P(d, d);
    double D = pdd - t.P(d, 1 - d);
    double c = sh.pi_co;
    Terms r;
    r.D = D;
    r.lo0 = std::max({0.0, (pdd - sh.pi_taker(d)) / c, D / c});
    r.hi0 = std::min({1.0, pdd / c, (D + sh.pi_df) / c});
    return r;
}

void require_feasible(const ThetaBin& t, double pi_df) {
    Interval pdf = pdf_bounds(t);
    if (pi_df < pdf.lo - kTol || pi_df > pdf.hi + kTol || pi_df < 0.0)
        throw Error(ErrorCode::OutsideRegion, "defier share outside the identified interval");
}

}  // namespace

Interval binary_prob_bounds(const ThetaBin& t, const SensitivityPoint& s, int d) {
    GroupShares sh = group_shares(t, s.pi_df);
    Terms tm = terms(t, sh, d);
    double x = s.pi_df * s.delta;
    Interval r;
    r.lo = std::clamp(std::max(tm.lo0, (tm.D - x) / sh.pi_delta), 0.0, 1.0);
    r.hi = std::clamp(std::min(tm.hi0, (tm.D + x) / sh.pi_delta), 0.0, 1.0);
    return r;
}

Interval binary_late_bounds(const ThetaBin& t, const SensitivityPoint& s) {
    Interval b1 = binary_prob_bounds(t, s, 1);
    Interval b0 = binary_prob_bounds(t, s, 0);
    return {b1.lo - b0.hi, b1.hi - b0.lo};
}

double pdf_lower_d(const ThetaBin& t, int d) {
    double D = t.P(d, d) - t.P(d, 1 - d);
    double pdelta = t.P1 - t.P0;
    return std::max(0.0, -D) + std::max(0.0, D - pdelta);
}

Interval pdf_bounds(const ThetaBin& t) {
    if (!(t.P1 > t.P0)) throw Error(ErrorCode::RelevanceViolated, "P(D=1|Z=1) must exceed P(D=1|Z=0)");
    return {std::max(pdf_lower_d(t, 1), pdf_lower_d(t, 0)), std::min(t.P0, 1.0 - t.P1)};
}

Interval binary_delta_bounds(const ThetaBin& t, double pi_df) {
    Interval pdf = pdf_bounds(t);
    if (pi_df <= 0.0) {
        if (pdf.lo > kTol) throw Error(ErrorCode::OutsideRegion, "zero defier share is refuted by the data");
        return {0.0, 1.0};
    }
    require_feasible(t, pi_df);
    GroupShares sh = group_shares(t, pi_df);
    Interval r{0.0, 0.0};
    for (int d = 0; d < 2; ++d) {
        Terms tm = terms(t, sh, d);
        double x = std::max({0.0, sh.pi_delta * tm.lo0 - tm.D, tm.D - sh.pi_delta * tm.hi0});
        r.lo = std::max(r.lo, x / pi_df);
        SensitivityPoint s1{pi_df, 1.0};
        Interval b = binary_prob_bounds(t, s1, d);
        double scale = 1.0 / pi_df;
        r.hi = std::max(r.hi, scale * std::abs(tm.D - sh.pi_delta * b.lo));
        r.hi = std::max(r.hi, scale * std::abs(tm.D - sh.pi_delta * b.hi));
    }
    r.lo = std::min(r.lo, 1.0);
    r.hi = std::clamp(r.hi, 0.0, 1.0);
    return r;
}

BinaryBreakdown binary_bp_components(const ThetaBin& t, double pi_df, double mu) {
    require_feasible(t, pi_df);
    GroupShares sh = group_shares(t, pi_df);
    const double c = sh.pi_co, pdl = sh.pi_delta;
    const double d1 = t.P11 - t.P10;
    const double d0 = t.P00 - t.P01;
    BinaryBreakdown r;
    r.bp0 = std::max({d1 - (mu + (d0 + pi_df) / c) * pdl,
                      -((mu - d1 / c) * pdl + d0),
                      -(mu * pdl + d0),
                      d1 - (mu + 1.0) * pdl,
                      0.5 * (d1 - d0 - mu * pdl),
                      0.0});
    r.bp1 = std::max(0.0, -((mu - (t.P11 - sh.pi_at) / c) * pdl + d0));
    r.bp2 = std::max(0.0, d1 - (mu + t.P00 / c) * pdl);

    if (pi_df <= 0.0) {
        if (binary_late_bounds(t, {0.0, 0.0}).lo >= mu - kTol) r.bp = 1.0;
        return r;
    }
    Interval db = binary_delta_bounds(t, pi_df);
    if (db.lo > db.hi + kTol) return r;
    if (binary_late_bounds(t, {pi_df, db.lo}).lo < mu - kTol) return r;
    if (binary_late_bounds(t, {pi_df, db.hi}).lo >= mu - kTol) {
        r.bp = db.hi;
        return r;
    }
    r.bp = std::clamp(std::max({r.bp0, r.bp1, r.bp2}) / pi_df, db.lo, db.hi);
    return r;
}

RegionCurve binary_regions(const ThetaBin& t, const std::vector<double>& pi_grid, double mu) {
    RegionCurve rc;
    Interval pdf = pdf_bounds(t);
    rc.pdf_lo = pdf.lo;
    rc.pdf_hi = pdf.hi;
    rc.mu = mu;
    if (pdf.lo > pdf.hi) {
        rc.empty = true;
        return rc;
    }
    rc.pi_grid = clip_pi_grid(pi_grid, pdf);
    for (double p : rc.pi_grid) {
        Interval db = binary_delta_bounds(t, p);
        rc.delta_lo.push_back(db.lo);
        rc.delta_hi.push_back(db.hi);
        rc.bp.push_back(binary_bp_components(t, p, mu).bp);
    }
    return rc;
}

}  // namespace defiers
