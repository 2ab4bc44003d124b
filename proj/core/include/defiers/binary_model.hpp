#pragma once

#include "defiers/complier_bounds.hpp"
#include "defiers/regions.hpp"
#include "defiers/theta_model.hpp"

#include <optional>
#include <vector>

namespace defiers {

// Bounds on P(Y_d = 1) for compliers.
Interval binary_prob_bounds(const ThetaBin& theta, const SensitivityPoint& s, int d);
Interval binary_late_bounds(const ThetaBin& theta, const SensitivityPoint& s);

Interval pdf_bounds(const ThetaBin& theta);
// Smallest defier share that every taker-arm decomposition for treatment d requires.
double pdf_lower_d(const ThetaBin& theta, int d);

Interval binary_delta_bounds(const ThetaBin& theta, double pi_df);

struct BinaryBreakdown {
    double bp0 = 0.0;
    double bp1 = 0.0;
    double bp2 = 0.0;
    std::optional<double> bp;
};

BinaryBreakdown binary_bp_components(const ThetaBin& theta, double pi_df, double mu);

RegionCurve binary_regions(const ThetaBin& theta, const std::vector<double>& pi_grid, double mu);

}  // namespace defiers
