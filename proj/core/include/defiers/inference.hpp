#pragma once

#include "defiers/estimation.hpp"
#include "defiers/regions.hpp"
#include "defiers/smoothing.hpp"
#include "defiers/theta_model.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace defiers {

struct SmoothingConfig {
    double kappa_smooth = 1e4;
    int bins = 0;  // 0 selects a quarter of the grid size, at least 8

    int bins_for(std::size_t grid_size) const;
    void validate() const;
};

struct BootstrapConfig {
    int replications = 500;
    double alpha = 0.05;
    std::optional<double> alpha_prime;  // binary path; defaults to alpha - 0.001
    double eta = 1.0;                   // near-binding slack in units of 1/sqrt(n)
    std::optional<double> near_tol;     // absolute near-binding slack, overrides eta
    std::uint64_t seed = 1;
    std::vector<double> pi_eval;        // empty selects pi_points on the estimated interval
    int pi_points = 41;

    double alpha_prime_value() const { return alpha_prime.value_or(alpha - 0.001); }
    double near_slack(std::size_t n) const;
    void validate(bool binary) const;
};

struct ConfidenceRegions {
    RegionCurve sr_outer;
    RegionCurve rr_inner;
    double cv = 0.0;
    double level = 0.95;
    std::size_t n = 0;
    std::size_t failed_replications = 0;  // resamples on which estimation failed
    std::vector<std::string> components;
    // Per evaluation point: point estimates and lower bands of each component.
    std::vector<std::vector<double>> estimate;
    std::vector<std::vector<double>> band;
};

// Components: (pdf_lo, -pdf_hi, delta_lo, -delta_hi, bp); bp is NaN when the
// conclusion holds nowhere on [0, delta_hi].
using PhiVector = std::array<double, 5>;

struct SmoothedCdfBounds {
    GridFn lower_lo, lower_hi;  // bracket of the sharp lower bound
    GridFn upper_lo, upper_hi;  // bracket of the sharp upper bound
};

class SmoothedModel {
public:
    SmoothedModel(const ThetaCont& theta, const SmoothingConfig& config);

    SmoothedCdfBounds bounds(const SensitivityPoint& s, int d) const;
    // Largest lower - upper gap of the relaxed bounds.
    double relaxed_gap(const SensitivityPoint& s, int d) const;
    PhiVector phi(double pi_df, double mu, const BisectionOptions& opt = {}) const;

    struct Data;

private:
    std::shared_ptr<const Data> data_;
};

PhiVector smoothed_phi(const ThetaCont& theta, double pi_df, double mu, const SmoothingConfig& config);
PhiVector exact_phi(const ThetaCont& theta, double pi_df, double mu, const BisectionOptions& opt = {});

ConfidenceRegions bootstrap_band_cont(const MicroSample& sample, double mu, const BootstrapConfig& config,
                                      const SmoothingConfig& smoothing, const KdeConfig& kde = {});

// Binary components (pdf_lo, -pdf_hi, -delta_hi, bp0, bp1, bp2) at pi_df.
std::array<double, 6> binary_phi(const ThetaBin& theta, double pi_df, double mu);

ConfidenceRegions binary_directional_bootstrap(const MicroSample& sample, double mu, const BootstrapConfig& config);
// One bootstrap pass shared across several near-binding multipliers.
std::vector<ConfidenceRegions> binary_directional_bootstrap(const MicroSample& sample, double mu,
                                                            const BootstrapConfig& config,
                                                            const std::vector<double>& etas);

// Lower delta band and breakdown band of a binary confidence set at any pi,
// using the neighbour rule between evaluation points.
struct BinaryBandAt {
    bool inside = false;  // pi within the outer defier-share interval
    double delta_lo = 0.0;
    double delta_hi = 1.0;
    std::optional<double> bp;
};
BinaryBandAt binary_band_at(const ConfidenceRegions& cr, double pi_df);

}  // namespace defiers
