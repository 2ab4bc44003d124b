#pragma once

#include "defiers/step_fn.hpp"
#include "defiers/theta_model.hpp"

#include <optional>
#include <vector>

namespace defiers {

struct KdeConfig {
    std::optional<double> bandwidth;  // empty selects 1.06 * sd * n^(-1/3)
    int grid_points = 512;
    double atom_threshold = 0.02;  // pooled frequency above which a value is an atom
    std::optional<double> domain_lo;
    std::optional<double> domain_hi;

    void validate() const;
};

// Everything needed to re-estimate on a resample with the same grid.
struct KdePlan {
    std::vector<double> knots;
    std::vector<double> atoms;
    double bandwidth = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Triweight kernel rescaled to support [-0.5, 0.5].
double kernel(double u);

ThetaBin estimate_theta_bin(const MicroSample& sample);

KdePlan make_kde_plan(const MicroSample& sample, const KdeConfig& config);
// Density of (Y, D = d) in arm z on the plan's knots, from the non-atom observations.
GridFn kde_q(const MicroSample& sample, int d, int z, const KdeConfig& config);
GridFn kde_q(const MicroSample& sample, int d, int z, const KdePlan& plan);

ThetaCont estimate_theta_cont(const MicroSample& sample, const KdeConfig& config);
ThetaCont estimate_theta_cont(const MicroSample& sample, const KdePlan& plan);

// Empirical step functions on the pooled distinct outcome values.
ThetaCont estimate_theta_step(const MicroSample& sample);

}  // namespace defiers
