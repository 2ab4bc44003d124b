#pragma once

#include <vector>

namespace oracle {

// LP envelope of a complier outcome CDF on a finite support. Masses q_own and
// q_other are the point masses of Q_dd and Q_d(1-d); pi_t is the share of the
// group that always takes treatment d.
struct CdfEnvelope {
    bool feasible = false;
    std::vector<double> lower;
    std::vector<double> upper;
    double mean_lo = 0.0;
    double mean_hi = 0.0;
};

CdfEnvelope complier_envelope(const std::vector<double>& knots, const std::vector<double>& q_own,
                              const std::vector<double>& q_other, double pi_co, double pi_df, double pi_t,
                              double delta);

// Range of P(Y_d = 1) for compliers in the binary model by scanning a grid of
// candidate values with step `step`.
struct ProbRange {
    bool feasible = false;
    double lo = 0.0;
    double hi = 0.0;
};

ProbRange binary_complier_range(double p_own, double p_other, double pi_co, double pi_df, double pi_t,
                                double delta, double step = 1e-3);

}  // namespace oracle
