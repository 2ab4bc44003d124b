#include "defiers/complier_bounds.hpp"

#include "defiers/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace defiers {

namespace {

struct Pieces {
    GroupShares sh;
    std::vector<double> qdd;  // Q_dd
    std::vector<double> gtp;  // Gt_d^+
    std::vector<double> g;    // G_d
    double eps = 0.0;         // pi_df * delta / pi_delta
};

Pieces pieces(const ThetaCont& theta, const SensitivityPoint& s, int d) {
    Pieces p;
    p.sh = group_shares(theta, s.pi_df);
    p.qdd = theta.Q(d, d).values;
    p.gtp = theta.Gtp(d).values;
    p.g = compute_G(theta, d, p.sh).values;
    p.eps = s.pi_df * s.delta / p.sh.pi_delta;
    return p;
}

std::pair<std::vector<double>, std::vector<double>> prelim(const Pieces& p, int d) {
    const std::size_t m = p.qdd.size();
    const double c = p.sh.pi_co;
    const double pd = p.sh.pi_taker(d);
    const double pdelta = p.sh.pi_delta;
    std::vector<double> gsup(m), ginf(m), lo(m), hi(m);
    for (std::size_t i = 0; i < m; ++i) gsup[i] = i ? std::max(gsup[i - 1], p.g[i]) : p.g[i];
    for (std::size_t i = m; i-- > 0;) ginf[i] = i + 1 < m ? std::min(ginf[i + 1], p.g[i]) : p.g[i];
    for (std::size_t i = 0; i < m; ++i) {
        double l = std::max({0.0, (p.qdd[i] - pd) / c, pdelta / c * gsup[i], gsup[i] - p.eps});
        double u = std::min({1.0, p.qdd[i] / c, (pdelta * ginf[i] + p.sh.pi_df) / c, ginf[i] + p.eps});
        lo[i] = l;
        hi[i] = u;
    }
    return {std::move(lo), std::move(hi)};
}

}  // namespace

std::pair<GridFn, GridFn> prelim_bounds_H(const ThetaCont& theta, const SensitivityPoint& s, int d) {
    Pieces p = pieces(theta, s, d);
    auto [lo, hi] = prelim(p, d);
    const GridFn& base = theta.Q(d, d);
    return {clamp01(base.with_values(std::move(lo))), clamp01(base.with_values(std::move(hi)))};
}

CdfBounds sharp_bounds_F(const ThetaCont& theta, const SensitivityPoint& s, int d) {
    Pieces p = pieces(theta, s, d);
    auto [hlo, hhi] = prelim(p, d);
    const std::size_t m = p.qdd.size();
    const double c = p.sh.pi_co;
    std::vector<double> lo(m), hi(m);

    // Lower: forward pass bounded by the defier slope, backward pass by the taker slope.
    double run = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        run = std::max(run, c * hlo[i] - p.gtp[i]);
        lo[i] = p.gtp[i] + run;  // c * H1
    }
    run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = m; i-- > 0;) {
        run = std::max(run, lo[i] - p.qdd[i]);
        lo[i] = (p.qdd[i] + run) / c;
    }

    // Upper: forward pass bounded by the taker slope, backward pass by the defier slope.
    run = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        run = std::min(run, c * hhi[i] - p.qdd[i]);
        hi[i] = p.qdd[i] + run;
    }
    run = std::numeric_limits<double>::infinity();
    for (std::size_t i = m; i-- > 0;) {
        run = std::min(run, hi[i] - p.gtp[i]);
        hi[i] = (p.gtp[i] + run) / c;
    }

    CdfBounds b;
    b.at = s;
    b.d = d;
    b.crossing_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) b.crossing_gap = std::max(b.crossing_gap, lo[i] - hi[i]);
    b.crossing = b.crossing_gap > kCrossingTol;
    const GridFn& base = theta.Q(d, d);
    b.lower = running_sup_leq(clamp01(base.with_values(std::move(lo))));
    b.upper = running_inf_geq(clamp01(base.with_values(std::move(hi))));
    return b;
}

CdfBounds simple_bounds_S(const ThetaCont& theta, const SensitivityPoint& s, int d) {
    Pieces p = pieces(theta, s, d);
    const std::size_t m = p.qdd.size();
    const double c = p.sh.pi_co;
    const double pd = p.sh.pi_taker(d);
    std::vector<double> lo(m), hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        lo[i] = std::max({0.0, (p.qdd[i] - pd) / c, p.sh.pi_delta / c * p.g[i], p.g[i] - p.eps});
        hi[i] = std::min({1.0, p.qdd[i] / c, (p.sh.pi_delta * p.g[i] + p.sh.pi_df) / c, p.g[i] + p.eps});
    }
    CdfBounds b;
    b.at = s;
    b.d = d;
    b.crossing_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) b.crossing_gap = std::max(b.crossing_gap, lo[i] - hi[i]);
    b.crossing = b.crossing_gap > kCrossingTol;
    const GridFn& base = theta.Q(d, d);
    b.lower = running_sup_leq(clamp01(base.with_values(std::move(lo))));
    b.upper = running_inf_geq(clamp01(base.with_values(std::move(hi))));
    return b;
}

Interval late_bounds(const CdfBounds& b1, const CdfBounds& b0) {
    Interval r;
    r.lo = stieltjes_mean(b1.upper) - stieltjes_mean(b0.lower);
    r.hi = stieltjes_mean(b1.lower) - stieltjes_mean(b0.upper);
    return r;
}

Interval qte_bounds(const CdfBounds& b1, const CdfBounds& b0, double tau) {
    Interval r;
    r.lo = generalized_inverse(b1.upper, tau, Side::Left) - generalized_inverse(b0.lower, tau, Side::Right);
    r.hi = generalized_inverse(b1.lower, tau, Side::Right) - generalized_inverse(b0.upper, tau, Side::Left);
    return r;
}

CdfBounds population_bounds(const ThetaCont& theta, const SensitivityPoint& s, int d) {
    CdfBounds co = sharp_bounds_F(theta, s, d);
    GroupShares sh = group_shares(theta, s.pi_df);
    const GridFn& other = theta.Q(d, 1 - d);
    const double pu = sh.pi_unobserved(d);
    const std::size_t m = other.size();
    std::vector<double> lo(m), hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        lo[i] = sh.pi_co * co.lower.values[i] + other.values[i];
        hi[i] = std::min(1.0, pu + sh.pi_co * co.upper.values[i] + other.values[i]);
    }
    // The unobserved group puts its mass at the top of the support.
    if (other.knots.back() >= other.domain_hi) lo.back() = 1.0;
    CdfBounds b = co;
    b.lower = clamp01(other.with_values(std::move(lo)));
    b.upper = clamp01(other.with_values(std::move(hi)));
    return b;
}

CdfBounds covariate_bounds(const std::vector<Stratum>& strata, const SensitivityPoint& s, int d) {
    if (strata.empty()) throw Error(ErrorCode::InvalidStrata, "no strata supplied");
    double total = 0.0;
    for (const Stratum& st : strata) {
        if (!(st.weight >= 0.0)) throw Error(ErrorCode::InvalidStrata, "negative stratum weight");
        total += st.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidStrata, "stratum weights must sum to one");

    std::set<double> grid;
    double lo_dom = std::numeric_limits<double>::infinity();
    double hi_dom = -std::numeric_limits<double>::infinity();
    for (const Stratum& st : strata) {
        grid.insert(st.theta.knots().begin(), st.theta.knots().end());
        lo_dom = std::min(lo_dom, st.theta.Q11.domain_lo);
        hi_dom = std::max(hi_dom, st.theta.Q11.domain_hi);
    }
    std::vector<double> knots(grid.begin(), grid.end());

    std::vector<CdfBounds> parts;
    std::vector<double> w;
    double wsum = 0.0;
    for (const Stratum& st : strata) {
        double pi_x = std::min(st.pdf.hi, std::max(s.pi_df, st.pdf.lo));
        GroupShares sh = group_shares(st.theta, pi_x);
        parts.push_back(sharp_bounds_F(st.theta, {pi_x, s.delta}, d));
        w.push_back(st.weight * sh.pi_co);
        wsum += w.back();
    }
    std::vector<double> lo(knots.size(), 0.0), hi(knots.size(), 0.0);
    CdfBounds out;
    out.at = s;
    out.d = d;
    out.crossing_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < parts.size(); ++k) {
        double wk = w[k] / wsum;
        for (std::size_t i = 0; i < knots.size(); ++i) {
            lo[i] += wk * parts[k].lower(knots[i]);
            hi[i] += wk * parts[k].upper(knots[i]);
        }
        out.crossing = out.crossing || parts[k].crossing;
        out.crossing_gap = std::max(out.crossing_gap, parts[k].crossing_gap);
    }
    out.lower = GridFn(knots, std::move(lo), lo_dom, hi_dom);
    out.upper = GridFn(knots, std::move(hi), lo_dom, hi_dom);
    return out;
}

}  // namespace defiers
