#include "defiers/inference.hpp"

#include "defiers/binary_model.hpp"
#include "defiers/errors.hpp"
#include "defiers/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace defiers {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMuTol = 1e-12;

// Smooth or exact extremum arithmetic on brackets.
struct Ops {
    double kappa = 0.0;
    bool exact = false;
    int bins = 1;

    Bracket max2(const Bracket& a, const Bracket& b) const {
        if (exact) return {std::max(a.lower, b.lower), std::max(a.upper, b.upper)};
        return smooth_max2(a, b, kappa);
    }
    Bracket min2(const Bracket& a, const Bracket& b) const {
        if (exact) return {std::min(a.lower, b.lower), std::min(a.upper, b.upper)};
        return smooth_min2(a, b, kappa);
    }
    Bracket fold(const std::vector<Bracket>& t, Extremum w) const {
        if (!exact) return smooth_minmax(t, kappa, w);
        Bracket r = t.front();
        for (const Bracket& b : t) r = w == Extremum::Max ? max2(r, b) : min2(r, b);
        return r;
    }
    // Lower bracket from f_lo, upper bracket from f_hi.
    std::pair<GridFn, GridFn> env(const GridFn& f_lo, const GridFn& f_hi, const GridFn& g, EnvelopeKind k) const {
        if (exact) return {exact_envelope(f_lo, g, k), exact_envelope(f_hi, g, k)};
        if (f_lo.values == f_hi.values) return smooth_envelopes(f_lo, g, kappa, bins, k);
        return {smooth_envelopes(f_lo, g, kappa, bins, k).first, smooth_envelopes(f_hi, g, kappa, bins, k).second};
    }
};

// Nondecreasing brackets of a nondecreasing target.
void project(GridFn& lo, GridFn& hi) {
    lo = running_inf_geq(lo);
    hi = running_sup_leq(hi);
}

double grid_mean(const GridFn& F) {
    double m = F.knots.back();
    for (std::size_t i = 0; i + 1 < F.size(); ++i) m -= F.values[i] * (F.knots[i + 1] - F.knots[i]);
    return m;
}

struct Propagated {
    SmoothedCdfBounds b;
    double relaxed_gap = 0.0;
};

struct ModelData {
    ThetaCont theta;
    Ops ops;
    double pdelta = 0.0;
    GridFn g[2];
    GridFn gsup_lo[2], gsup_hi[2], ginf_lo[2], ginf_hi[2];

    Propagated propagate(double pi_df, double delta, int d) const;
    PhiVector phi(double pi_df, double mu, const BisectionOptions& opt) const;
};

Propagated ModelData::propagate(double pi_df, double delta, int d) const {
    GroupShares sh = group_shares(theta, pi_df);
    const double c = sh.pi_co;
    const double pd = sh.pi_taker(d);
    const double eps = pi_df * delta / pdelta;
    const GridFn& Q = theta.Q(d, d);
    const GridFn& Gt = theta.Gtp(d);
    const std::size_t m = Q.size();

    std::vector<double> hl_lo(m), hl_hi(m), hu_lo(m), hu_hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double q = Q.values[i];
        const double sl = gsup_lo[d].values[i], su = gsup_hi[d].values[i];
        const double il = ginf_lo[d].values[i], iu = ginf_hi[d].values[i];
        Bracket a = ops.max2({0.0, 0.0}, {(q - pd) / c, (q - pd) / c});
        Bracket b = ops.max2({pdelta / c * sl, pdelta / c * su}, {sl - eps, su - eps});
        Bracket lo = ops.max2(a, b);
        Bracket e = ops.min2({1.0, 1.0}, {q / c, q / c});
        Bracket f = ops.min2({(pdelta * il + pi_df) / c, (pdelta * iu + pi_df) / c}, {il + eps, iu + eps});
        Bracket hi = ops.min2(e, f);
        hl_lo[i] = c * lo.lower;
        hl_hi[i] = c * lo.upper;
        hu_lo[i] = c * hi.lower;
        hu_hi[i] = c * hi.upper;
    }
    GridFn cHl_lo = Q.with_values(std::move(hl_lo)), cHl_hi = Q.with_values(std::move(hl_hi));
    GridFn cHu_lo = Q.with_values(std::move(hu_lo)), cHu_hi = Q.with_values(std::move(hu_hi));
    project(cHl_lo, cHl_hi);
    project(cHu_lo, cHu_hi);

    // Lower bound: forward pass against Gt, backward pass against Q.
    auto [fw_lo, fw_hi] = ops.env(cHl_lo, cHl_hi, Gt, EnvelopeKind::SupLeq);
    std::vector<double> v_lo(m), v_hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        Bracket r = ops.max2({fw_lo.values[i], fw_hi.values[i]}, {0.0, 0.0});
        v_lo[i] = Gt.values[i] + r.lower;
        v_hi[i] = Gt.values[i] + r.upper;
    }
    GridFn h1_lo = Q.with_values(std::move(v_lo)), h1_hi = Q.with_values(std::move(v_hi));
    project(h1_lo, h1_hi);
    auto [bw_lo, bw_hi] = ops.env(h1_lo, h1_hi, Q, EnvelopeKind::SupGeq);
    std::vector<double> Fl_lo(m), Fl_hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        Fl_lo[i] = (Q.values[i] + bw_lo.values[i]) / c;
        Fl_hi[i] = (Q.values[i] + bw_hi.values[i]) / c;
    }

    // Upper bound: forward pass against Q, backward pass against Gt.
    auto [uf_lo, uf_hi] = ops.env(cHu_lo, cHu_hi, Q, EnvelopeKind::InfLeq);
    std::vector<double> w_lo(m), w_hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        Bracket r = ops.min2({uf_lo.values[i], uf_hi.values[i]}, {0.0, 0.0});
        w_lo[i] = Q.values[i] + r.lower;
        w_hi[i] = Q.values[i] + r.upper;
    }
    GridFn k1_lo = Q.with_values(std::move(w_lo)), k1_hi = Q.with_values(std::move(w_hi));
    project(k1_lo, k1_hi);
    auto [ub_lo, ub_hi] = ops.env(k1_lo, k1_hi, Gt, EnvelopeKind::InfGeq);
    std::vector<double> Fu_lo(m), Fu_hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        Fu_lo[i] = (Gt.values[i] + ub_lo.values[i]) / c;
        Fu_hi[i] = (Gt.values[i] + ub_hi.values[i]) / c;
    }

    Propagated p;
    p.relaxed_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) p.relaxed_gap = std::max(p.relaxed_gap, Fl_lo[i] - Fu_hi[i]);
    p.b.lower_lo = running_sup_leq(clamp01(Q.with_values(std::move(Fl_lo))));
    p.b.lower_hi = running_sup_leq(clamp01(Q.with_values(std::move(Fl_hi))));
    p.b.upper_lo = running_inf_geq(clamp01(Q.with_values(std::move(Fu_lo))));
    p.b.upper_hi = running_inf_geq(clamp01(Q.with_values(std::move(Fu_hi))));
    return p;
}

PhiVector ModelData::phi(double pi_df, double mu, const BisectionOptions& opt) const {
    PhiVector out;
    out.fill(kNaN);
    Bracket lo_pdf = ops.fold({{theta.Gt1p.back() - pdelta, theta.Gt1p.back() - pdelta},
                               {theta.Gt0p.back() - pdelta, theta.Gt0p.back() - pdelta}},
                              Extremum::Max);
    Bracket hi_pdf = ops.fold({{theta.p0(), theta.p0()}, {1.0 - theta.p1(), 1.0 - theta.p1()}}, Extremum::Min);
    out[0] = lo_pdf.lower;
    out[1] = -hi_pdf.upper;
    if (pi_df < 0.0 || pi_df >= 0.5) return out;
    try {
        group_shares(theta, pi_df);
    } catch (const Error&) {
        return out;
    }

    double dlo = 0.0, dlo_floor = 0.0, dhi_lo = 1.0, dhi_hi = 1.0;
    if (pi_df > 0.0) {
        auto crosses = [&](double delta, int d) { return propagate(pi_df, delta, d).relaxed_gap > kCrossingTol; };
        for (int d = 0; d < 2 && dlo < 1.0; ++d) {
            if (!crosses(dlo, d)) continue;
            // Outside the sensitivity region of theta: no defined lower delta or breakdown point.
            if (crosses(1.0, d)) return out;
            double a = dlo, b = 1.0;
            for (int it = 0; it < opt.max_iter && b - a > opt.tol; ++it) {
                double mid = 0.5 * (a + b);
                (crosses(mid, d) ? a : b) = mid;
            }
            dlo = b;
            dlo_floor = a;
        }

        std::vector<Bracket> terms;
        for (int d = 0; d < 2; ++d) {
            Propagated p = propagate(pi_df, 1.0, d);
            const GridFn* pairs[2][2] = {{&p.b.lower_lo, &p.b.lower_hi}, {&p.b.upper_lo, &p.b.upper_hi}};
            for (auto& pr : pairs) {
                for (std::size_t i = 0; i < g[d].size(); ++i) {
                    double gv = g[d].values[i], fl = pr[0]->values[i], fu = pr[1]->values[i];
                    terms.push_back({gv - fu, gv - fl});
                    terms.push_back({fl - gv, fu - gv});
                }
            }
        }
        Bracket r = ops.fold(terms, Extremum::Max);
        const double scale = pdelta / pi_df;
        dhi_lo = std::clamp(scale * r.lower, 0.0, 1.0);
        dhi_hi = std::clamp(scale * r.upper, 0.0, 1.0);
    }
    // The smoothed value stays on the crossing side of the bisection bracket.
    out[2] = ops.exact ? dlo : dlo_floor;
    out[3] = -dhi_hi;

    auto robust = [&](double delta) {
        Propagated p1 = propagate(pi_df, delta, 1);
        Propagated p0 = propagate(pi_df, delta, 0);
        return grid_mean(p1.b.upper_hi) - grid_mean(p0.b.lower_lo) >= mu - kMuTol;
    };
    if (!robust(0.0)) return out;
    if (robust(dhi_lo)) {
        out[4] = dhi_lo;
        return out;
    }
    double a = 0.0, b = dhi_lo;
    for (int it = 0; it < opt.max_iter && b - a > opt.tol; ++it) {
        double mid = 0.5 * (a + b);
        (robust(mid) ? a : b) = mid;
    }
    out[4] = a;
    return out;
}

ModelData make_model(const ThetaCont& theta, const Ops& ops) {
    ModelData md;
    md.theta = theta;
    md.ops = ops;
    md.pdelta = theta.p1() - theta.p0();
    if (!(md.pdelta > 0.0)) throw Error(ErrorCode::RelevanceViolated, "P(D=1|Z=1) must exceed P(D=1|Z=0)");
    for (int d = 0; d < 2; ++d) {
        GridFn diff = theta.diff(d);
        md.g[d] = axpby(1.0 / md.pdelta, diff, 0.0, diff);
        GridFn gp = axpby(1.0 / md.pdelta, theta.Gtp(d), 0.0, diff);
        GridFn gm = positive_part_accum(increments(axpby(-1.0 / md.pdelta, diff, 0.0, diff)));
        std::tie(md.gsup_lo[d], md.gsup_hi[d]) = ops.env(gp, gp, gm, EnvelopeKind::SupLeq);
        std::tie(md.ginf_lo[d], md.ginf_hi[d]) = ops.env(gp, gp, gm, EnvelopeKind::InfGeq);
        project(md.gsup_lo[d], md.gsup_hi[d]);
        project(md.ginf_lo[d], md.ginf_hi[d]);
    }
    return md;
}

std::size_t order_index(std::size_t count, double level) {
    auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(count) - 1e-9));
    return std::clamp<std::size_t>(k, 1, count) - 1;
}

double order_stat(std::vector<double> v, double level) {
    if (v.empty()) return std::numeric_limits<double>::infinity();
    std::size_t k = order_index(v.size(), level);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

std::mt19937_64 replicate_rng(std::uint64_t seed, int r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    return std::mt19937_64(seq);
}

std::vector<double> eval_grid(const BootstrapConfig& cfg, const Interval& pdf) {
    if (!cfg.pi_eval.empty()) return cfg.pi_eval;
    return linspace(std::min(pdf.lo, pdf.hi), pdf.hi, static_cast<std::size_t>(cfg.pi_points));
}

// Value at the estimate and at a bootstrap draw.
struct DD {
    double v = 0.0;
    double s = 0.0;
};

DD operator+(DD a, DD b) { return {a.v + b.v, a.s + b.s}; }
DD operator-(DD a, DD b) { return {a.v - b.v, a.s - b.s}; }
DD operator-(DD a) { return {-a.v, -a.s}; }
DD operator*(DD a, DD b) { return {a.v * b.v, a.s * b.s}; }
DD operator/(DD a, DD b) { return {a.v / b.v, a.s / b.s}; }
DD operator*(double k, DD a) { return {k * a.v, k * a.s}; }
DD cst(double x) { return {x, x}; }

// Directional derivative arithmetic: kinks keep only the near-binding branches.
struct DDOps {
    double eta = 0.0;

    DD max(std::initializer_list<DD> xs) const {
        double v = -std::numeric_limits<double>::infinity();
        for (const DD& x : xs) v = std::max(v, x.v);
        double best = -std::numeric_limits<double>::infinity();
        for (const DD& x : xs)
            if (x.v >= v - eta) best = std::max(best, x.s - x.v);
        return {v, v + best};
    }
    DD min(std::initializer_list<DD> xs) const {
        double v = std::numeric_limits<double>::infinity();
        for (const DD& x : xs) v = std::min(v, x.v);
        double best = std::numeric_limits<double>::infinity();
        for (const DD& x : xs)
            if (x.v <= v + eta) best = std::min(best, x.s - x.v);
        return {v, v + best};
    }
    DD abs(DD x) const {
        double a = std::abs(x.v);
        if (a <= eta) return {a, a + std::abs(x.s - x.v)};
        return x.v > 0.0 ? x : -x;
    }
};

using BinTheta = std::array<DD, 6>;  // P11, P10, P01, P00, P1, P0
using BinPhi = std::array<DD, 6>;

BinPhi binary_components(const BinTheta& t, double pi, double mu, const DDOps& op) {
    const DD P11 = t[0], P10 = t[1], P01 = t[2], P00 = t[3], P1 = t[4], P0 = t[5];
    const DD pdl = P1 - P0;
    const DD c = pdl + cst(pi);
    const DD pat = P0 - cst(pi);
    const DD pnt = cst(1.0 - pi) - P1;
    const DD D[2] = {P00 - P01, P11 - P10};
    const DD Pdd[2] = {P00, P11};
    const DD ptk[2] = {pnt, pat};
    const DD zero = cst(0.0), one = cst(1.0);

    BinPhi out;
    DD pl[2];
    for (int d = 0; d < 2; ++d) pl[d] = op.max({zero, -D[d]}) + op.max({zero, D[d] - pdl});
    out[0] = op.max({pl[1], pl[0]});
    out[1] = -op.min({P0, one - P1});

    if (pi > 0.0) {
        std::vector<DD> terms;
        for (int d = 0; d < 2; ++d) {
            DD lo0 = op.max({zero, (Pdd[d] - ptk[d]) / c, D[d] / c});
            DD hi0 = op.min({one, Pdd[d] / c, (D[d] + cst(pi)) / c});
            DD lo = op.min({op.max({lo0, (D[d] - cst(pi)) / pdl}), one});
            DD hi = op.max({op.min({hi0, (D[d] + cst(pi)) / pdl}), zero});
            terms.push_back((1.0 / pi) * op.abs(D[d] - pdl * lo));
            terms.push_back((1.0 / pi) * op.abs(D[d] - pdl * hi));
        }
        DD m = op.max({terms[0], terms[1], terms[2], terms[3]});
        out[2] = -op.min({one, m});
    } else {
        out[2] = cst(-1.0);
    }

    const DD d1 = D[1], d0 = D[0];
    const DD pdf = cst(pi), mu_ = cst(mu);
    out[3] = op.max({d1 - (mu_ + (d0 + pdf) / c) * pdl, -((mu_ - d1 / c) * pdl + d0), -(mu_ * pdl + d0),
                     d1 - (mu_ + one) * pdl, 0.5 * (d1 - d0 - mu_ * pdl), zero});
    out[4] = op.max({zero, -((mu_ - (P11 - pat) / c) * pdl + d0)});
    out[5] = op.max({zero, d1 - (mu_ + P00 / c) * pdl});
    return out;
}

std::array<double, 6> theta_array(const ThetaBin& t) { return {t.P11, t.P10, t.P01, t.P00, t.P1, t.P0}; }

BinTheta make_dd(const std::array<double, 6>& v, const std::array<double, 6>& s) {
    BinTheta r;
    for (std::size_t i = 0; i < 6; ++i) r[i] = {v[i], s[i]};
    return r;
}

// Multinomial draw of the four (d, y) cells of one arm.
std::array<double, 4> draw_cells(const std::array<double, 4>& p, std::size_t n, std::mt19937_64& rng) {
    std::array<double, 4> out{};
    std::size_t left = n;
    double mass = 1.0;
    for (std::size_t j = 0; j < 4; ++j) {
        if (j == 3 || mass <= 0.0) {
            out[j] = static_cast<double>(left);
            break;
        }
        double q = std::clamp(p[j] / mass, 0.0, 1.0);
        std::binomial_distribution<std::size_t> bin(left, q);
        std::size_t k = left > 0 ? bin(rng) : 0;
        out[j] = static_cast<double>(k);
        left -= k;
        mass -= p[j];
    }
    return out;
}

ConfidenceRegions binary_band(const std::vector<double>& grid, const std::vector<BinPhi>& est, double cv,
                              std::size_t n, double mu, double alpha) {
    ConfidenceRegions cr;
    cr.cv = cv;
    cr.n = n;
    cr.level = 1.0 - alpha;
    cr.components = {"pdf_lo", "neg_pdf_hi", "neg_delta_hi", "bp0", "bp1", "bp2"};
    const double shift = cv / std::sqrt(static_cast<double>(n));
    RegionCurve& sr = cr.sr_outer;
    sr.mu = mu;
    sr.pi_grid = grid;
    const double pdf_lo_band = est.empty() ? 0.0 : est.front()[0].v - shift;
    sr.pdf_lo = std::max(0.0, pdf_lo_band);
    sr.pdf_hi = est.empty() ? 0.0 : -(est.front()[1].v - shift);
    sr.bp.assign(grid.size(), std::nullopt);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> e(6), b(6);
        for (std::size_t i = 0; i < 6; ++i) {
            e[i] = est[k][i].v;
            b[i] = e[i] - shift;
        }
        cr.estimate.push_back(e);
        cr.band.push_back(b);
        const double pi = grid[k];
        sr.delta_lo.push_back(pi > 0.0 ? std::min(1.0, std::max(0.0, pdf_lo_band) / pi) : 0.0);
        sr.delta_hi.push_back(std::min(1.0, -b[2]));
    }
    cr.rr_inner = sr;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        BinaryBandAt at = binary_band_at(cr, grid[k]);
        if (at.bp && *at.bp >= sr.delta_lo[k]) cr.rr_inner.bp[k] = at.bp;
    }
    return cr;
}

}  // namespace

int SmoothingConfig::bins_for(std::size_t grid_size) const {
    if (bins > 0) return bins;
    return std::max(8, static_cast<int>(grid_size / 4));
}

void SmoothingConfig::validate() const {
    if (!(kappa_smooth >= 1.0) || !std::isfinite(kappa_smooth))
        throw Error(ErrorCode::InvalidConfig, "kappa must be finite and at least 1");
    if (bins != 0 && bins < 8) throw Error(ErrorCode::InvalidConfig, "bins must be 0 (automatic) or at least 8");
}

double BootstrapConfig::near_slack(std::size_t n) const {
    if (near_tol) return *near_tol;
    return eta / std::sqrt(static_cast<double>(n));
}

void BootstrapConfig::validate(bool binary) const {
    if (replications < 200) throw Error(ErrorCode::InsufficientReplications, "at least 200 bootstrap replications");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0,1)");
    if (binary && !(alpha_prime_value() > 0.0 && alpha_prime_value() < alpha))
        throw Error(ErrorCode::InvalidConfig, "alpha_prime must lie in (0, alpha)");
    if (!(eta >= 0.0)) throw Error(ErrorCode::InvalidConfig, "eta must be nonnegative");
    if (near_tol && !(*near_tol >= 0.0)) throw Error(ErrorCode::InvalidConfig, "near-binding slack must be nonnegative");
    if (pi_eval.empty() && pi_points < 1) throw Error(ErrorCode::InvalidConfig, "pi_points must be positive");
}

struct SmoothedModel::Data : ModelData {};

SmoothedModel::SmoothedModel(const ThetaCont& theta, const SmoothingConfig& config) {
    config.validate();
    auto data = std::make_shared<Data>();
    static_cast<ModelData&>(*data) =
        make_model(theta, {config.kappa_smooth, false, config.bins_for(theta.knots().size())});
    data_ = std::move(data);
}

SmoothedCdfBounds SmoothedModel::bounds(const SensitivityPoint& s, int d) const {
    return data_->propagate(s.pi_df, s.delta, d).b;
}

double SmoothedModel::relaxed_gap(const SensitivityPoint& s, int d) const {
    return data_->propagate(s.pi_df, s.delta, d).relaxed_gap;
}

PhiVector SmoothedModel::phi(double pi_df, double mu, const BisectionOptions& opt) const {
    return data_->phi(pi_df, mu, opt);
}

PhiVector smoothed_phi(const ThetaCont& theta, double pi_df, double mu, const SmoothingConfig& config) {
    return SmoothedModel(theta, config).phi(pi_df, mu);
}

PhiVector exact_phi(const ThetaCont& theta, double pi_df, double mu, const BisectionOptions& opt) {
    return make_model(theta, {0.0, true, 1}).phi(pi_df, mu, opt);
}

ConfidenceRegions bootstrap_band_cont(const MicroSample& sample, double mu, const BootstrapConfig& config,
                                      const SmoothingConfig& smoothing, const KdeConfig& kde) {
    config.validate(false);
    smoothing.validate();
    const KdePlan plan = make_kde_plan(sample, kde);
    const ThetaCont theta = estimate_theta_cont(sample, plan);
    const Interval pdf = pdf_bounds(theta);
    const std::vector<double> grid = eval_grid(config, pdf);
    const BisectionOptions opt{1e-5, 40};
    const SmoothedModel model(theta, smoothing);

    std::vector<PhiVector> est(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) { est[k] = model.phi(grid[k], mu, opt); });

    const std::size_t n = sample.n();
    const double rn = std::sqrt(static_cast<double>(n));
    const auto B = static_cast<std::size_t>(config.replications);
    std::vector<double> stats(B, kNaN);
    parallel_for(B, [&](std::size_t r) {
        std::mt19937_64 rng = replicate_rng(config.seed, static_cast<int>(r));
        MicroSample draw;
        for (int z = 0; z < 2; ++z) {
            const auto& arm = sample.arm(z);
            std::uniform_int_distribution<std::size_t> pick(0, arm.size() - 1);
            auto& out = draw.arm(z);
            out.reserve(arm.size());
            for (std::size_t j = 0; j < arm.size(); ++j) out.push_back(arm[pick(rng)]);
        }
        try {
            const SmoothedModel star(estimate_theta_cont(draw, plan), smoothing);
            double t = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < grid.size(); ++k) {
                PhiVector ps = star.phi(grid[k], mu, opt);
                for (std::size_t l = 0; l < ps.size(); ++l)
                    if (std::isfinite(ps[l]) && std::isfinite(est[k][l])) t = std::max(t, rn * (ps[l] - est[k][l]));
            }
            stats[r] = t;
        } catch (const Error&) {
            stats[r] = kNaN;
        }
    });
    std::vector<double> valid;
    for (double t : stats)
        if (!std::isnan(t)) valid.push_back(t);

    ConfidenceRegions cr;
    cr.n = n;
    cr.level = 1.0 - config.alpha;
    cr.failed_replications = B - valid.size();
    cr.cv = std::max(0.0, order_stat(valid, 1.0 - config.alpha));
    cr.components = {"pdf_lo", "neg_pdf_hi", "delta_lo", "neg_delta_hi", "bp"};
    const double shift = cr.cv / rn;
    RegionCurve& sr = cr.sr_outer;
    sr.mu = mu;
    sr.pi_grid = grid;
    sr.pdf_lo = est.empty() ? pdf.lo : std::max(0.0, est.front()[0] - shift);
    sr.pdf_hi = est.empty() ? pdf.hi : est.front()[1] * -1.0 + shift;
    sr.bp.assign(grid.size(), std::nullopt);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> e(est[k].begin(), est[k].end()), b(e.size());
        for (std::size_t l = 0; l < e.size(); ++l) b[l] = e[l] - shift;
        sr.delta_lo.push_back(std::isfinite(b[2]) ? std::clamp(b[2], 0.0, 1.0) : 0.0);
        sr.delta_hi.push_back(std::isfinite(b[3]) ? std::clamp(-b[3], 0.0, 1.0) : 1.0);
        cr.estimate.push_back(std::move(e));
        cr.band.push_back(std::move(b));
    }
    cr.rr_inner = sr;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double bp = cr.band[k][4];
        if (std::isfinite(bp) && bp >= sr.delta_lo[k]) cr.rr_inner.bp[k] = std::min(bp, sr.delta_hi[k]);
    }
    return cr;
}

std::array<double, 6> binary_phi(const ThetaBin& theta, double pi_df, double mu) {
    auto v = theta_array(theta);
    BinPhi p = binary_components(make_dd(v, v), pi_df, mu, DDOps{0.0});
    std::array<double, 6> out;
    for (std::size_t i = 0; i < 6; ++i) out[i] = p[i].v;
    return out;
}

ConfidenceRegions binary_directional_bootstrap(const MicroSample& sample, double mu, const BootstrapConfig& config) {
    return binary_directional_bootstrap(sample, mu, config, {config.eta}).front();
}

std::vector<ConfidenceRegions> binary_directional_bootstrap(const MicroSample& sample, double mu,
                                                            const BootstrapConfig& config,
                                                            const std::vector<double>& etas) {
    config.validate(true);
    if (etas.empty()) throw Error(ErrorCode::InvalidConfig, "no near-binding multipliers given");
    const ThetaBin theta = estimate_theta_bin(sample);
    const auto tv = theta_array(theta);
    for (double x : tv)
        if (x <= 0.0 || x >= 1.0) throw Error(ErrorCode::VarianceDegenerate, "a cell probability is 0 or 1");
    const Interval pdf = pdf_bounds(theta);
    const std::vector<double> grid = eval_grid(config, pdf);
    const std::size_t n = sample.n();
    const double rn = std::sqrt(static_cast<double>(n));

    // Cell probabilities (d, y) per arm.
    std::array<std::array<double, 4>, 2> cells{};
    for (int z = 0; z < 2; ++z) {
        const auto& arm = sample.arm(z);
        for (const Observation& o : arm) cells[z][2 * o.d + (o.y == 1.0 ? 1 : 0)] += 1.0;
        for (double& c : cells[z]) c /= static_cast<double>(arm.size());
    }
    const auto B = static_cast<std::size_t>(config.replications);
    std::vector<std::array<double, 6>> draws(B);
    parallel_for(B, [&](std::size_t r) {
        std::mt19937_64 rng = replicate_rng(config.seed, static_cast<int>(r));
        std::array<double, 4> c[2];
        for (int z = 0; z < 2; ++z) {
            const double nz = static_cast<double>(sample.arm(z).size());
            c[z] = draw_cells(cells[z], sample.arm(z).size(), rng);
            for (double& x : c[z]) x /= nz;
        }
        // cell index 2*d + y
        draws[r] = {c[1][3], c[0][3], c[1][1], c[0][1], c[1][2] + c[1][3], c[0][2] + c[0][3]};
    });

    std::vector<BinPhi> est(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) est[k] = binary_components(make_dd(tv, tv), grid[k], mu, DDOps{0.0});

    std::vector<ConfidenceRegions> out;
    for (double eta : etas) {
        BootstrapConfig c = config;
        c.eta = eta;
        const DDOps op{c.near_slack(n)};
        std::vector<double> stats(B);
        parallel_for(B, [&](std::size_t r) {
            const BinTheta t = make_dd(tv, draws[r]);
            double m = -std::numeric_limits<double>::infinity();
            for (double pi : grid) {
                BinPhi p = binary_components(t, pi, mu, op);
                for (const DD& x : p)
                    if (std::isfinite(x.s - x.v)) m = std::max(m, rn * (x.s - x.v));
            }
            stats[r] = m;
        });
        double cv = std::max(0.0, order_stat(stats, 1.0 - config.alpha_prime_value()));
        out.push_back(binary_band(grid, est, cv, n, mu, config.alpha));
    }
    return out;
}

BinaryBandAt binary_band_at(const ConfidenceRegions& cr, double pi_df) {
    BinaryBandAt r;
    const RegionCurve& sr = cr.sr_outer;
    r.inside = pi_df >= sr.pdf_lo && pi_df <= sr.pdf_hi;
    const double shift = cr.cv / std::sqrt(static_cast<double>(cr.n));
    const double lo_band = cr.band.empty() ? 0.0 : cr.estimate.front()[0] - shift;
    r.delta_lo = pi_df > 0.0 ? std::min(1.0, std::max(0.0, lo_band) / pi_df) : 0.0;
    const auto& g = sr.pi_grid;
    if (g.empty() || pi_df < g.front() || pi_df > g.back()) return r;
    std::vector<std::size_t> nb;
    auto it = std::lower_bound(g.begin(), g.end(), pi_df);
    auto k = static_cast<std::size_t>(it - g.begin());
    if (g[k] == pi_df) {
        nb = {k};
    } else {
        nb = {k - 1, k};
    }
    double dhi = 0.0;
    for (std::size_t j : nb) dhi = std::max(dhi, -cr.band[j][2]);
    r.delta_hi = std::min(1.0, dhi);
    if (pi_df <= 0.0) return r;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 3; i < 6; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j : nb) m = std::min(m, cr.band[j][i]);
        best = std::max(best, m);
    }
    r.bp = best / pi_df;
    return r;
}

}  // namespace defiers
