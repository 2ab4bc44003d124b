#include "defiers/theta_model.hpp"

#include "defiers/errors.hpp"

#include <algorithm>
#include <cmath>

namespace defiers {

bool MicroSample::binary_outcome() const {
    auto is01 = [](const Observation& o) { return o.y == 0.0 || o.y == 1.0; };
    return std::all_of(arm0.begin(), arm0.end(), is01) && std::all_of(arm1.begin(), arm1.end(), is01);
}

bool MicroSample::unbalanced_arms() const {
    if (n() == 0) return true;
    double share = static_cast<double>(std::min(n0(), n1())) / static_cast<double>(n());
    return share < 0.05;
}

const GridFn& ThetaCont::Q(int d, int s) const {
    if (d == 1) return s == 1 ? Q11 : Q10;
    return s == 1 ? Q01 : Q00;
}

GridFn ThetaCont::diff(int d) const { return axpby(1.0, Q(d, d), -1.0, Q(d, 1 - d)); }

void ThetaCont::validate() const {
    const GridFn* all[] = {&Q11, &Q10, &Q01, &Q00, &Gt1p, &Gt0p};
    for (const GridFn* f : all) {
        if (f->size() == 0 || !f->same_grid(Q11))
            throw Error(ErrorCode::InvalidDistribution, "theta functions must share one grid");
        if (!f->is_nondecreasing(1e-9))
            throw Error(ErrorCode::InvalidDistribution, "theta functions must be nondecreasing");
    }
    if (std::abs(Q11.back() + Q01.back() - 1.0) > 1e-9 || std::abs(Q10.back() + Q00.back() - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidDistribution, "arm masses must sum to one");
}

double ThetaBin::P(int d, int s) const {
    if (d == 1) return s == 1 ? P11 : P10;
    return s == 1 ? P01 : P00;
}

double ThetaBin::arm_share(int d, int s) const {
    double p = s == 1 ? P1 : P0;
    return d == 1 ? p : 1.0 - p;
}

void ThetaBin::validate() const {
    const double v[] = {P11, P10, P01, P00, P0, P1};
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidDistribution, "probabilities must lie in [0,1]");
    constexpr double tol = 1e-12;
    if (P11 > P1 + tol || P10 > P0 + tol || P01 > 1.0 - P1 + tol || P00 > 1.0 - P0 + tol)
        throw Error(ErrorCode::InvalidDistribution, "joint probability exceeds its arm treatment share");
}

GroupShares group_shares(double p1, double p0, double pi_df) {
    if (!(p1 > p0)) throw Error(ErrorCode::RelevanceViolated, "P(D=1|Z=1) must exceed P(D=1|Z=0)");
    if (!(pi_df >= 0.0)) throw Error(ErrorCode::InfeasibleDefierShare, "defier share must be nonnegative");
    GroupShares s;
    s.pi_df = pi_df;
    s.pi_delta = p1 - p0;
    s.pi_co = s.pi_delta + pi_df;
    s.pi_at = p0 - pi_df;
    s.pi_nt = 1.0 - p1 - pi_df;
    constexpr double tol = 1e-9;
    if (s.pi_at < -tol || s.pi_nt < -tol)
        throw Error(ErrorCode::InfeasibleDefierShare, "defier share leaves a negative group share");
    s.pi_at = std::max(0.0, s.pi_at);
    s.pi_nt = std::max(0.0, s.pi_nt);
    return s;
}

GroupShares group_shares(const ThetaCont& theta, double pi_df) {
    return group_shares(theta.p1(), theta.p0(), pi_df);
}

GroupShares group_shares(const ThetaBin& theta, double pi_df) {
    return group_shares(theta.P1, theta.P0, pi_df);
}

double wald_estimand(const MicroSample& sample) {
    if (sample.n0() == 0 || sample.n1() == 0) throw Error(ErrorCode::EmptyArm, "both instrument arms are required");
    double y[2] = {0.0, 0.0};
    double d[2] = {0.0, 0.0};
    for (int z = 0; z < 2; ++z) {
        for (const Observation& o : sample.arm(z)) {
            y[z] += o.y;
            d[z] += o.d;
        }
        double n = static_cast<double>(sample.arm(z).size());
        y[z] /= n;
        d[z] /= n;
    }
    double fs = d[1] - d[0];
    if (std::abs(fs) < 1e-15) throw Error(ErrorCode::RelevanceViolated, "zero first stage");
    return (y[1] - y[0]) / fs;
}

namespace {
double arm_mean(const GridFn& a, const GridFn& b) {
    double m = 0.0, pa = 0.0, pb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m += a.knots[i] * (a.values[i] - pa + b.values[i] - pb);
        pa = a.values[i];
        pb = b.values[i];
    }
    return m;
}
}  // namespace

double wald_estimand(const ThetaCont& theta) {
    double fs = theta.p1() - theta.p0();
    if (std::abs(fs) < 1e-15) throw Error(ErrorCode::RelevanceViolated, "zero first stage");
    return (arm_mean(theta.Q11, theta.Q01) - arm_mean(theta.Q10, theta.Q00)) / fs;
}

double wald_estimand(const ThetaBin& theta) {
    double fs = theta.P1 - theta.P0;
    if (std::abs(fs) < 1e-15) throw Error(ErrorCode::RelevanceViolated, "zero first stage");
    return (theta.P11 + theta.P01 - theta.P10 - theta.P00) / fs;
}

GridFn compute_G(const ThetaCont& theta, int d, const GroupShares& shares) {
    if (!(shares.pi_delta > 0.0)) throw Error(ErrorCode::RelevanceViolated, "pi_delta must be positive");
    return axpby(1.0 / shares.pi_delta, theta.Q(d, d), -1.0 / shares.pi_delta, theta.Q(d, 1 - d));
}

ThetaCont theta_from_q(GridFn Q11, GridFn Q10, GridFn Q01, GridFn Q00) {
    ThetaCont t;
    t.Q11 = std::move(Q11);
    t.Q10 = std::move(Q10);
    t.Q01 = std::move(Q01);
    t.Q00 = std::move(Q00);
    t.Gt1p = positive_part_accum(increments(t.diff(1)));
    t.Gt0p = positive_part_accum(increments(t.diff(0)));
    return t;
}

ThetaCont theta_from_masses(const std::vector<double>& knots, const std::vector<double>& q11,
                            const std::vector<double>& q10, const std::vector<double>& q01,
                            const std::vector<double>& q00) {
    auto cdf = [&](const std::vector<double>& q) { return cumulative(GridFn(knots, q)); };
    return theta_from_q(cdf(q11), cdf(q10), cdf(q01), cdf(q00));
}

ThetaCont embed_binary(const ThetaBin& b) {
    std::vector<double> k{0.0, 1.0};
    auto masses = [&](int d, int s) {
        double p = b.P(d, s);
        return std::vector<double>{b.arm_share(d, s) - p, p};
    };
    return theta_from_masses(k, masses(1, 1), masses(1, 0), masses(0, 1), masses(0, 0));
}

}  // namespace defiers
