#include "oracles.hpp"

#include "lp.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

CdfEnvelope complier_envelope(const std::vector<double>& knots, const std::vector<double>& q_own,
                              const std::vector<double>& q_other, double pi_co, double pi_df, double pi_t,
                              double delta) {
    // Variables: complier pmf, defier pmf, taker pmf (K each).
    const std::size_t K = knots.size();
    auto col = [K](int block, std::size_t k) { return static_cast<std::size_t>(block) * K + k; };
    LinearProgram lp;
    lp.c.assign(3 * K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> own(3 * K, 0.0), other(3 * K, 0.0);
        own[col(0, k)] = pi_co;
        own[col(2, k)] = pi_t;
        other[col(1, k)] = pi_df;
        other[col(2, k)] = pi_t;
        lp.A_eq.push_back(own);
        lp.b_eq.push_back(q_own[k]);
        lp.A_eq.push_back(other);
        lp.b_eq.push_back(q_other[k]);
    }
    for (int b = 0; b < 3; ++b) {
        std::vector<double> row(3 * K, 0.0);
        for (std::size_t k = 0; k < K; ++k) row[col(b, k)] = 1.0;
        lp.A_eq.push_back(row);
        lp.b_eq.push_back(1.0);
    }
    for (std::size_t k = 0; k + 1 < K; ++k) {
        std::vector<double> up(3 * K, 0.0), dn(3 * K, 0.0);
        for (std::size_t j = 0; j <= k; ++j) {
            up[col(0, j)] = 1.0;
            up[col(1, j)] = -1.0;
            dn[col(0, j)] = -1.0;
            dn[col(1, j)] = 1.0;
        }
        lp.A_le.push_back(up);
        lp.b_le.push_back(delta);
        lp.A_le.push_back(dn);
        lp.b_le.push_back(delta);
    }

    CdfEnvelope env;
    env.lower.assign(K, 0.0);
    env.upper.assign(K, 1.0);
    for (std::size_t k = 0; k < K; ++k) {
        LinearProgram lo = lp;
        for (std::size_t j = 0; j <= k; ++j) lo.c[col(0, j)] = 1.0;
        LpResult r = solve(lo);
        if (!r.feasible) return env;
        env.lower[k] = r.value;
        LinearProgram hi = lp;
        for (std::size_t j = 0; j <= k; ++j) hi.c[col(0, j)] = -1.0;
        env.upper[k] = -solve(hi).value;
    }
    LinearProgram m = lp;
    for (std::size_t k = 0; k < K; ++k) m.c[col(0, k)] = knots[k];
    env.mean_lo = solve(m).value;
    for (std::size_t k = 0; k < K; ++k) m.c[col(0, k)] = -knots[k];
    env.mean_hi = -solve(m).value;
    env.feasible = true;
    return env;
}

ProbRange binary_complier_range(double p_own, double p_other, double pi_co, double pi_df, double pi_t,
                                double delta, double step) {
    // Given the complier value p, the taker value solves p_own = pi_co p + pi_t t
    // and the defier value solves p_other = pi_df f + pi_t t.
    ProbRange r;
    r.lo = 2.0;
    r.hi = -1.0;
    const auto n = static_cast<long>(std::llround(1.0 / step));
    for (long i = 0; i <= n; ++i) {
        const double p = static_cast<double>(i) * step;
        const double rest = p_own - pi_co * p;  // pi_t * t
        const double other = p_other - rest;    // pi_df * f
        bool ok;
        if (pi_df > 0.0) {
            const double f = other / pi_df;
            ok = rest >= -1e-12 && rest <= pi_t + 1e-12 && f >= -1e-12 && f <= 1.0 + 1e-12 &&
                 std::abs(p - f) <= delta + 1e-12;
        } else {
            // p is pinned down; accept the grid points next to it
            const double slack = pi_co * step + 1e-12;
            ok = rest >= -slack && rest <= pi_t + slack && std::abs(other) <= slack;
        }
        if (!ok) continue;
        r.feasible = true;
        r.lo = std::min(r.lo, p);
        r.hi = std::max(r.hi, p);
    }
    return r;
}

}  // namespace oracle
