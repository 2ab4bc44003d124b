#pragma once

#include "defiers/step_fn.hpp"
#include "defiers/theta_model.hpp"

#include <utility>
#include <vector>

namespace defiers {

struct CdfBounds {
    GridFn lower;
    GridFn upper;
    SensitivityPoint at;
    int d = 1;
    // Largest value of lower - upper before clamping; positive means the
    // point lies outside the sensitivity region.
    double crossing_gap = 0.0;
    bool crossing = false;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Tolerance above which lower - upper counts as a crossing.
inline constexpr double kCrossingTol = 1e-10;

std::pair<GridFn, GridFn> prelim_bounds_H(const ThetaCont& theta, const SensitivityPoint& s, int d);
CdfBounds sharp_bounds_F(const ThetaCont& theta, const SensitivityPoint& s, int d);
CdfBounds simple_bounds_S(const ThetaCont& theta, const SensitivityPoint& s, int d);

Interval late_bounds(const CdfBounds& bounds1, const CdfBounds& bounds0);
Interval qte_bounds(const CdfBounds& bounds1, const CdfBounds& bounds0, double tau);

CdfBounds population_bounds(const ThetaCont& theta, const SensitivityPoint& s, int d);

struct Stratum {
    double weight = 0.0;
    ThetaCont theta;
    Interval pdf;  // identified defier-share interval of the stratum
};

CdfBounds covariate_bounds(const std::vector<Stratum>& strata, const SensitivityPoint& s, int d);

}  // namespace defiers
