#pragma once

#include <cstddef>
#include <vector>

namespace defiers {

// Right-continuous step function on a sorted knot grid. values[i] holds the
// value on [knots[i], knots[i+1]); below knots[0] the function is 0.
struct GridFn {
    std::vector<double> knots;
    std::vector<double> values;
    double domain_lo = 0.0;
    double domain_hi = 0.0;

    GridFn() = default;
    GridFn(std::vector<double> k, std::vector<double> v);
    GridFn(std::vector<double> k, std::vector<double> v, double lo, double hi);

    std::size_t size() const { return knots.size(); }
    double operator()(double y) const;
    double at(std::size_t i) const { return values[i]; }
    double back() const { return values.back(); }

    // Same knots, new values.
    GridFn with_values(std::vector<double> v) const;
    bool same_grid(const GridFn& other) const;
    bool is_cdf(double tol = 1e-12) const;
    bool is_nondecreasing(double tol = 1e-12) const;
};

enum class Side { Left, Right };

GridFn running_sup_leq(const GridFn& f);
GridFn running_inf_geq(const GridFn& f);

// increments.values[i] is the jump at knots[i]; returns sum_{j<=i} max(0, jump_j).
GridFn positive_part_accum(const GridFn& increments);
// Jumps of f with f(knots[0]-) = 0.
GridFn increments(const GridFn& f);
GridFn cumulative(const GridFn& increments);

double stieltjes_mean(const GridFn& F);
double generalized_inverse(const GridFn& F, double tau, Side side);

GridFn clamp01(const GridFn& f);
GridFn pointwise_max(const GridFn& a, const GridFn& b);
GridFn pointwise_min(const GridFn& a, const GridFn& b);
GridFn axpby(double a, const GridFn& x, double b, const GridFn& y);
double sup_distance(const GridFn& a, const GridFn& b);

}  // namespace defiers
