#pragma once

#include "defiers/complier_bounds.hpp"
#include "defiers/theta_model.hpp"

#include <optional>
#include <vector>

namespace defiers {

struct RegionCurve {
    std::vector<double> pi_grid;
    std::vector<double> delta_lo;
    std::vector<double> delta_hi;
    std::vector<std::optional<double>> bp;  // empty when no robust pairs at that pi
    double pdf_lo = 0.0;
    double pdf_hi = 0.0;
    double mu = 0.0;
    bool empty = false;

    std::size_t size() const { return pi_grid.size(); }
    // Whether (pi, delta) lies in the region at grid index i.
    bool in_sr(std::size_t i, double delta, double tol = 0.0) const;
    bool in_rr(std::size_t i, double delta, double tol = 0.0) const;
};

struct BisectionOptions {
    double tol = 1e-6;
    int max_iter = 60;
};

// Empirical conclusion Delta_CO >= mu, or QTE(tau) >= mu when tau is set.
struct Conclusion {
    double mu = 0.0;
    std::optional<double> tau;
};

Interval pdf_bounds(const ThetaCont& theta);

double delta_lower(const ThetaCont& theta, double pi_df, const BisectionOptions& opt = {});
double delta_upper(const ThetaCont& theta, double pi_df);

// Lower and upper bound on the conclusion's parameter at s.
Interval effect_bounds(const ThetaCont& theta, const SensitivityPoint& s, const Conclusion& c);

std::optional<double> breakdown_point(const ThetaCont& theta, double pi_df, const Conclusion& c,
                                      const BisectionOptions& opt = {});
inline std::optional<double> breakdown_point(const ThetaCont& theta, double pi_df, double mu,
                                             const BisectionOptions& opt = {}) {
    return breakdown_point(theta, pi_df, Conclusion{mu, std::nullopt}, opt);
}

// n equally spaced points on [lo, hi]; a single point when lo == hi.
std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> default_pi_grid(const Interval& pdf, std::size_t n = 81);
std::vector<double> clip_pi_grid(const std::vector<double>& grid, const Interval& pdf);

RegionCurve sensitivity_region(const ThetaCont& theta, const std::vector<double>& pi_grid,
                               const BisectionOptions& opt = {});
RegionCurve robust_region(const ThetaCont& theta, const std::vector<double>& pi_grid, const Conclusion& c,
                          const BisectionOptions& opt = {});

// Breakdown point of the simple illustrative model; +inf when pi_df = 0.
double naive_breakdown(double beta_iv, double mu, double first_stage, double pi_df);

}  // namespace defiers
