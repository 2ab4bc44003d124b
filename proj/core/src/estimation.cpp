#include "defiers/estimation.hpp"

#include "defiers/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace defiers {

namespace {

void require_arms(const MicroSample& s) {
    if (s.n0() == 0 || s.n1() == 0) throw Error(ErrorCode::EmptyArm, "both instrument arms need observations");
}

bool is_atom(const std::vector<double>& atoms, double y) {
    return std::binary_search(atoms.begin(), atoms.end(), y);
}

}  // namespace

void KdeConfig::validate() const {
    if (bandwidth && !(*bandwidth > 0.0)) throw Error(ErrorCode::InvalidBandwidth, "bandwidth must be positive");
    if (grid_points < 64) throw Error(ErrorCode::InvalidConfig, "grid_points must be at least 64");
    if (domain_lo && domain_hi && !(*domain_lo < *domain_hi))
        throw Error(ErrorCode::InvalidConfig, "domain_lo must be below domain_hi");
}

double kernel(double u) {
    if (u <= -0.5 || u >= 0.5) return 0.0;
    double t = 1.0 - 4.0 * u * u;
    return 35.0 / 16.0 * t * t * t;
}

ThetaBin estimate_theta_bin(const MicroSample& sample) {
    require_arms(sample);
    if (!sample.binary_outcome()) throw Error(ErrorCode::WrongModel, "outcome is not binary");
    double c[2][2][2] = {};  // [z][d][y]
    for (int z = 0; z < 2; ++z)
        for (const Observation& o : sample.arm(z)) c[z][o.d][o.y == 1.0 ? 1 : 0] += 1.0;
    double n1 = static_cast<double>(sample.n1()), n0 = static_cast<double>(sample.n0());
    ThetaBin t;
    t.P11 = c[1][1][1] / n1;
    t.P10 = c[0][1][1] / n0;
    t.P01 = c[1][0][1] / n1;
    t.P00 = c[0][0][1] / n0;
    t.P1 = (c[1][1][0] + c[1][1][1]) / n1;
    t.P0 = (c[0][1][0] + c[0][1][1]) / n0;
    return t;
}

KdePlan make_kde_plan(const MicroSample& sample, const KdeConfig& config) {
    config.validate();
    require_arms(sample);
    std::map<double, std::size_t> counts;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (int z = 0; z < 2; ++z)
        for (const Observation& o : sample.arm(z)) {
            ++counts[o.y];
            ymin = std::min(ymin, o.y);
            ymax = std::max(ymax, o.y);
        }
    KdePlan plan;
    plan.lo = config.domain_lo.value_or(ymin);
    plan.hi = config.domain_hi.value_or(ymax);
    if (ymin < plan.lo || ymax > plan.hi) throw Error(ErrorCode::InvalidConfig, "observations outside the declared support");
    if (!(plan.hi > plan.lo)) throw Error(ErrorCode::InvalidDistribution, "outcome has no spread");

    const double n = static_cast<double>(sample.n());
    for (const auto& [y, k] : counts)
        if (static_cast<double>(k) / n > config.atom_threshold) plan.atoms.push_back(y);

    if (config.bandwidth) {
        plan.bandwidth = *config.bandwidth;
    } else {
        double m = 0.0, m2 = 0.0, cnt = 0.0;
        for (int z = 0; z < 2; ++z)
            for (const Observation& o : sample.arm(z)) {
                if (is_atom(plan.atoms, o.y)) continue;
                cnt += 1.0;
                double delta = o.y - m;
                m += delta / cnt;
                m2 += delta * (o.y - m);
            }
        double sd = cnt > 1.0 ? std::sqrt(m2 / (cnt - 1.0)) : 0.0;
        plan.bandwidth = 1.06 * sd * std::pow(n, -1.0 / 3.0);
        if (!(plan.bandwidth > 0.0)) {
            if (cnt > 0.0) throw Error(ErrorCode::InvalidBandwidth, "automatic bandwidth is zero");
            plan.bandwidth = (plan.hi - plan.lo) / 10.0;
        }
    }

    std::vector<double> knots = [&] {
        std::vector<double> g(static_cast<std::size_t>(config.grid_points));
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] = plan.lo + (plan.hi - plan.lo) * static_cast<double>(i) / static_cast<double>(g.size() - 1);
        g.back() = plan.hi;
        return g;
    }();
    const double snap = 1e-12 * (plan.hi - plan.lo);
    for (double a : plan.atoms) {
        auto it = std::lower_bound(knots.begin(), knots.end(), a);
        if (it != knots.end() && std::abs(*it - a) <= snap) {
            *it = a;
        } else if (it != knots.begin() && std::abs(*(it - 1) - a) <= snap) {
            *(it - 1) = a;
        } else {
            knots.insert(it, a);
        }
    }
    plan.knots = std::move(knots);
    return plan;
}

GridFn kde_q(const MicroSample& sample, int d, int z, const KdeConfig& config) {
    return kde_q(sample, d, z, make_kde_plan(sample, config));
}

GridFn kde_q(const MicroSample& sample, int d, int z, const KdePlan& plan) {
    if (!(plan.bandwidth > 0.0)) throw Error(ErrorCode::InvalidBandwidth, "bandwidth must be positive");
    const auto& arm = sample.arm(z);
    if (arm.empty()) throw Error(ErrorCode::EmptyArm, "instrument arm has no observations");
    const double h = plan.bandwidth;
    std::vector<double> pts;
    for (const Observation& o : arm) {
        if (o.d != d || is_atom(plan.atoms, o.y)) continue;
        pts.push_back(o.y);
        pts.push_back(2.0 * plan.lo - o.y);
        pts.push_back(2.0 * plan.hi - o.y);
    }
    std::sort(pts.begin(), pts.end());
    const double scale = 1.0 / (static_cast<double>(arm.size()) * h);
    std::vector<double> dens(plan.knots.size(), 0.0);
    for (std::size_t i = 0; i < plan.knots.size(); ++i) {
        double y = plan.knots[i];
        auto first = std::lower_bound(pts.begin(), pts.end(), y - 0.5 * h);
        auto last = std::upper_bound(first, pts.end(), y + 0.5 * h);
        double acc = 0.0;
        for (auto it = first; it != last; ++it) acc += kernel((y - *it) / h);
        dens[i] = acc * scale;
    }
    return GridFn(plan.knots, std::move(dens), plan.lo, plan.hi);
}

ThetaCont estimate_theta_cont(const MicroSample& sample, const KdeConfig& config) {
    return estimate_theta_cont(sample, make_kde_plan(sample, config));
}

ThetaCont estimate_theta_cont(const MicroSample& sample, const KdePlan& plan) {
    require_arms(sample);
    const std::size_t m = plan.knots.size();
    GridFn Q[2][2];  // [d][z]
    for (int z = 0; z < 2; ++z) {
        const auto& arm = sample.arm(z);
        const double nz = static_cast<double>(arm.size());
        for (int d = 0; d < 2; ++d) {
            GridFn dens = kde_q(sample, d, z, plan);
            double cont_mass = 0.0;
            std::map<double, double> atom_mass;
            for (const Observation& o : arm) {
                if (o.d != d) continue;
                if (is_atom(plan.atoms, o.y))
                    atom_mass[o.y] += 1.0 / nz;
                else
                    cont_mass += 1.0 / nz;
            }
            std::vector<double> q(m, 0.0);
            for (std::size_t i = 1; i < m; ++i)
                q[i] = q[i - 1] + 0.5 * (dens.values[i] + dens.values[i - 1]) * (plan.knots[i] - plan.knots[i - 1]);
            double total = q.back();
            for (double& v : q) v = total > 0.0 ? v * cont_mass / total : 0.0;
            if (total <= 0.0 && cont_mass > 0.0) q.back() = cont_mass;
            double acc = 0.0;
            auto it = atom_mass.begin();
            for (std::size_t i = 0; i < m; ++i) {
                while (it != atom_mass.end() && it->first <= plan.knots[i]) acc += (it++)->second;
                q[i] += acc;
            }
            Q[d][z] = GridFn(plan.knots, std::move(q), plan.lo, plan.hi);
        }
        // Pin the arm total to one.
        double top = Q[1][z].values.back() + Q[0][z].values.back();
        if (top > 0.0)
            for (int d = 0; d < 2; ++d)
                for (double& v : Q[d][z].values) v /= top;
    }
    if (!(Q[1][1].back() > Q[1][0].back()))
        throw Error(ErrorCode::RelevanceViolated, "estimated first stage is not positive");
    return theta_from_q(Q[1][1], Q[1][0], Q[0][1], Q[0][0]);
}

ThetaCont estimate_theta_step(const MicroSample& sample) {
    require_arms(sample);
    std::vector<double> knots;
    for (int z = 0; z < 2; ++z)
        for (const Observation& o : sample.arm(z)) knots.push_back(o.y);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<double> mass[2][2];
    for (auto& row : mass)
        for (auto& v : row) v.assign(knots.size(), 0.0);
    for (int z = 0; z < 2; ++z) {
        double nz = static_cast<double>(sample.arm(z).size());
        for (const Observation& o : sample.arm(z)) {
            auto i = static_cast<std::size_t>(std::lower_bound(knots.begin(), knots.end(), o.y) - knots.begin());
            mass[o.d][z][i] += 1.0 / nz;
        }
    }
    return theta_from_masses(knots, mass[1][1], mass[1][0], mass[0][1], mass[0][0]);
}

}  // namespace defiers
