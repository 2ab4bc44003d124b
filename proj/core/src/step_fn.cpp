#include "defiers/step_fn.hpp"

#include "defiers/errors.hpp"

#include <algorithm>
#include <cmath>

namespace defiers {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::InvalidQuantile: return "InvalidQuantile";
        case ErrorCode::RelevanceViolated: return "RelevanceViolated";
        case ErrorCode::InfeasibleDefierShare: return "InfeasibleDefierShare";
        case ErrorCode::OutsideRegion: return "OutsideRegion";
        case ErrorCode::WrongModel: return "WrongModel";
        case ErrorCode::InvalidBandwidth: return "InvalidBandwidth";
        case ErrorCode::MonotonicityRequired: return "MonotonicityRequired";
        case ErrorCode::InsufficientReplications: return "InsufficientReplications";
        case ErrorCode::VarianceDegenerate: return "VarianceDegenerate";
        case ErrorCode::InvalidStrata: return "InvalidStrata";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::EmptyArm: return "EmptyArm";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Error";
}

GridFn::GridFn(std::vector<double> k, std::vector<double> v)
    : GridFn(k, std::move(v), k.empty() ? 0.0 : k.front(), k.empty() ? 0.0 : k.back()) {}

GridFn::GridFn(std::vector<double> k, std::vector<double> v, double lo, double hi)
    : knots(std::move(k)), values(std::move(v)), domain_lo(lo), domain_hi(hi) {
    if (knots.size() != values.size())
        throw Error(ErrorCode::InvalidDistribution, "knots and values differ in length");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw Error(ErrorCode::InvalidDistribution, "knots must be strictly increasing");
    if (!knots.empty() && (domain_lo > knots.front() || domain_hi < knots.back()))
        throw Error(ErrorCode::InvalidDistribution, "domain does not cover the knots");
}

double GridFn::operator()(double y) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), y);
    if (it == knots.begin()) return 0.0;
    return values[static_cast<std::size_t>(it - knots.begin()) - 1];
}

GridFn GridFn::with_values(std::vector<double> v) const {
    GridFn out;
    out.knots = knots;
    out.values = std::move(v);
    out.domain_lo = domain_lo;
    out.domain_hi = domain_hi;
    if (out.values.size() != out.knots.size())
        throw Error(ErrorCode::InvalidDistribution, "knots and values differ in length");
    return out;
}

bool GridFn::same_grid(const GridFn& other) const { return knots == other.knots; }

bool GridFn::is_nondecreasing(double tol) const {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1] - tol) return false;
    return true;
}

bool GridFn::is_cdf(double tol) const {
    if (values.empty()) return false;
    return is_nondecreasing(tol) && values.front() >= -tol && values.back() <= 1.0 + tol;
}

GridFn running_sup_leq(const GridFn& f) {
    std::vector<double> v(f.values);
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = std::max(v[i], v[i - 1]);
    return f.with_values(std::move(v));
}

GridFn running_inf_geq(const GridFn& f) {
    std::vector<double> v(f.values);
    for (std::size_t i = v.size(); i-- > 1;) v[i - 1] = std::min(v[i - 1], v[i]);
    return f.with_values(std::move(v));
}

GridFn positive_part_accum(const GridFn& inc) {
    std::vector<double> v(inc.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc += std::max(0.0, inc.values[i]);
        v[i] = acc;
    }
    return inc.with_values(std::move(v));
}

GridFn increments(const GridFn& f) {
    std::vector<double> v(f.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f.values[i] - prev;
        prev = f.values[i];
    }
    return f.with_values(std::move(v));
}

GridFn cumulative(const GridFn& inc) {
    std::vector<double> v(inc.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc += inc.values[i];
        v[i] = acc;
    }
    return inc.with_values(std::move(v));
}

double stieltjes_mean(const GridFn& F) {
    if (!F.is_cdf(1e-9) || std::abs(F.back() - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidDistribution, "argument is not a proper CDF");
    double mean = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        mean += F.knots[i] * (F.values[i] - prev);
        prev = F.values[i];
    }
    return mean;
}

double generalized_inverse(const GridFn& F, double tau, Side side) {
    if (!(tau > 0.0 && tau < 1.0))
        throw Error(ErrorCode::InvalidQuantile, "quantile level must lie in (0,1)");
    constexpr double tol = 1e-12;
    if (side == Side::Left) {
        for (std::size_t i = 0; i < F.size(); ++i)
            if (F.values[i] >= tau - tol) return F.knots[i];
        return F.domain_hi;
    }
    for (std::size_t i = 0; i < F.size(); ++i)
        if (F.values[i] > tau + tol) return F.knots[i];
    return F.domain_hi;
}

GridFn clamp01(const GridFn& f) {
    std::vector<double> v(f.values);
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return f.with_values(std::move(v));
}

GridFn pointwise_max(const GridFn& a, const GridFn& b) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(a.values[i], b.values[i]);
    return a.with_values(std::move(v));
}

GridFn pointwise_min(const GridFn& a, const GridFn& b) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(a.values[i], b.values[i]);
    return a.with_values(std::move(v));
}

GridFn axpby(double a, const GridFn& x, double b, const GridFn& y) {
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * x.values[i] + b * y.values[i];
    return x.with_values(std::move(v));
}

double sup_distance(const GridFn& a, const GridFn& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

}  // namespace defiers
