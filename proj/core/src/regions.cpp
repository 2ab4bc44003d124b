#include "defiers/regions.hpp"

#include "defiers/errors.hpp"
#include "defiers/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace defiers {

namespace {

constexpr double kPiTol = 1e-12;
constexpr double kMuTol = 1e-12;

void require_feasible(const Interval& pdf, double pi_df) {
    if (pi_df < pdf.lo - kPiTol || pi_df > pdf.hi + kPiTol || pi_df < 0.0 || pi_df >= 0.5)
        throw Error(ErrorCode::OutsideRegion, "defier share outside the identified interval");
}

bool crosses_d(const ThetaCont& theta, double pi_df, double delta, int d) {
    return sharp_bounds_F(theta, {pi_df, delta}, d).crossing;
}

std::optional<double> bp_between(const ThetaCont& theta, double pi_df, double dlo, double dhi, const Conclusion& c,
                                 const BisectionOptions& opt) {
    if (dlo > dhi) return std::nullopt;
    auto robust = [&](double delta) { return effect_bounds(theta, {pi_df, delta}, c).lo >= c.mu - kMuTol; };
    if (!robust(dlo)) return std::nullopt;
    if (robust(dhi)) return dhi;
    double lo = dlo, hi = dhi;
    for (int it = 0; it < opt.max_iter && hi - lo > opt.tol; ++it) {
        double mid = 0.5 * (lo + hi);
        (robust(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

bool RegionCurve::in_sr(std::size_t i, double delta, double tol) const {
    if (empty || i >= size() || delta_lo[i] > delta_hi[i]) return false;
    return delta >= delta_lo[i] - tol && delta <= delta_hi[i] + tol;
}

bool RegionCurve::in_rr(std::size_t i, double delta, double tol) const {
    return in_sr(i, delta, tol) && bp[i].has_value() && delta <= *bp[i] + tol;
}

Interval pdf_bounds(const ThetaCont& theta) {
    double p1 = theta.p1(), p0 = theta.p0();
    if (!(p1 > p0)) throw Error(ErrorCode::RelevanceViolated, "P(D=1|Z=1) must exceed P(D=1|Z=0)");
    Interval r;
    r.hi = std::min(p0, 1.0 - p1);
    r.lo = std::max(theta.Gt1p.back(), theta.Gt0p.back()) - (p1 - p0);
    if (r.lo < kPiTol) r.lo = 0.0;
    return r;
}

double delta_lower(const ThetaCont& theta, double pi_df, const BisectionOptions& opt) {
    require_feasible(pdf_bounds(theta), pi_df);
    if (pi_df <= 0.0) return 0.0;
    double out = 0.0;
    for (int d = 0; d < 2; ++d) {
        if (!crosses_d(theta, pi_df, out, d)) continue;
        if (crosses_d(theta, pi_df, 1.0, d)) return 1.0;
        double lo = out, hi = 1.0;
        for (int it = 0; it < opt.max_iter && hi - lo > opt.tol; ++it) {
            double mid = 0.5 * (lo + hi);
            (crosses_d(theta, pi_df, mid, d) ? lo : hi) = mid;
        }
        out = hi;
    }
    return out;
}

double delta_upper(const ThetaCont& theta, double pi_df) {
    require_feasible(pdf_bounds(theta), pi_df);
    if (pi_df <= 0.0) return 1.0;
    double out = 0.0;
    for (int d = 0; d < 2; ++d) {
        GroupShares sh = group_shares(theta, pi_df);
        GridFn g = compute_G(theta, d, sh);
        CdfBounds b = sharp_bounds_F(theta, {pi_df, 1.0}, d);
        double scale = sh.pi_delta / pi_df;
        for (std::size_t i = 0; i < g.size(); ++i) {
            out = std::max(out, scale * std::abs(g.values[i] - b.lower.values[i]));
            out = std::max(out, scale * std::abs(g.values[i] - b.upper.values[i]));
        }
    }
    return std::clamp(out, 0.0, 1.0);
}

Interval effect_bounds(const ThetaCont& theta, const SensitivityPoint& s, const Conclusion& c) {
    CdfBounds b1 = sharp_bounds_F(theta, s, 1);
    CdfBounds b0 = sharp_bounds_F(theta, s, 0);
    if (c.tau) return qte_bounds(b1, b0, *c.tau);
    return late_bounds(b1, b0);
}

std::optional<double> breakdown_point(const ThetaCont& theta, double pi_df, const Conclusion& c,
                                      const BisectionOptions& opt) {
    double dlo = delta_lower(theta, pi_df, opt);
    double dhi = delta_upper(theta, pi_df);
    return bp_between(theta, pi_df, dlo, dhi, c, opt);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1 || hi <= lo) return {lo};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<double> default_pi_grid(const Interval& pdf, std::size_t n) {
    if (pdf.lo > pdf.hi) return {};
    return linspace(pdf.lo, pdf.hi, n);
}

std::vector<double> clip_pi_grid(const std::vector<double>& grid, const Interval& pdf) {
    std::vector<double> out;
    for (double p : grid)
        if (p >= pdf.lo - kPiTol && p <= pdf.hi + kPiTol && p >= 0.0 && p < 0.5)
            out.push_back(std::clamp(p, pdf.lo, pdf.hi));
    return out;
}

RegionCurve sensitivity_region(const ThetaCont& theta, const std::vector<double>& pi_grid,
                               const BisectionOptions& opt) {
    RegionCurve rc;
    Interval pdf = pdf_bounds(theta);
    rc.pdf_lo = pdf.lo;
    rc.pdf_hi = pdf.hi;
    if (pdf.lo > pdf.hi) {
        rc.empty = true;
        return rc;
    }
    rc.pi_grid = clip_pi_grid(pi_grid, pdf);
    const std::size_t n = rc.pi_grid.size();
    rc.delta_lo.assign(n, 0.0);
    rc.delta_hi.assign(n, 0.0);
    rc.bp.assign(n, std::nullopt);
    parallel_for(n, [&](std::size_t i) {
        rc.delta_lo[i] = delta_lower(theta, rc.pi_grid[i], opt);
        rc.delta_hi[i] = delta_upper(theta, rc.pi_grid[i]);
    });
    return rc;
}

RegionCurve robust_region(const ThetaCont& theta, const std::vector<double>& pi_grid, const Conclusion& c,
                          const BisectionOptions& opt) {
    RegionCurve rc = sensitivity_region(theta, pi_grid, opt);
    rc.mu = c.mu;
    parallel_for(rc.size(), [&](std::size_t i) {
        rc.bp[i] = bp_between(theta, rc.pi_grid[i], rc.delta_lo[i], rc.delta_hi[i], c, opt);
    });
    return rc;
}

double naive_breakdown(double beta_iv, double mu, double first_stage, double pi_df) {
    if (pi_df <= 0.0) return std::numeric_limits<double>::infinity();
    return first_stage / pi_df * (beta_iv - mu);
}

}  // namespace defiers
