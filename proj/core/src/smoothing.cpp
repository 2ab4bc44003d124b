#include "defiers/smoothing.hpp"

#include "defiers/errors.hpp"

#include <algorithm>
#include <cmath>

namespace defiers {

namespace {

double psi_upper(double f, double kappa) { return std::sqrt(f * f + 1.0 / kappa); }
double psi_lower(double f, double kappa) { return f * f / std::sqrt(f * f + 1.0 / kappa); }

double max_lower(double a, double b, double k) { return 0.5 * (a + b + psi_lower(a - b, k)); }
double max_upper(double a, double b, double k) { return 0.5 * (a + b + psi_upper(a - b, k)); }
double min_lower(double a, double b, double k) { return 0.5 * (a + b - psi_upper(a - b, k)); }
double min_upper(double a, double b, double k) { return 0.5 * (a + b - psi_lower(a - b, k)); }

Bracket combine(const Bracket& a, const Bracket& b, double k, Extremum which) {
    return which == Extremum::Max ? smooth_max2(a, b, k) : smooth_min2(a, b, k);
}

// Power-of-two aligned folds, so any prefix is a fold of O(log n) balanced nodes.
class PrefixFolds {
public:
    PrefixFolds(std::vector<Bracket> terms, double kappa, Extremum which) : kappa_(kappa), which_(which) {
        levels_.push_back(std::move(terms));
        while (levels_.back().size() > 1) {
            const auto& prev = levels_.back();
            std::vector<Bracket> next(prev.size() / 2);
            for (std::size_t j = 0; j < next.size(); ++j) next[j] = combine(prev[2 * j], prev[2 * j + 1], kappa_, which_);
            if (next.empty()) break;
            levels_.push_back(std::move(next));
        }
    }

    // Fold over terms [0, n); n must be positive.
    Bracket prefix(std::size_t n) const {
        std::vector<Bracket> nodes;
        std::size_t start = 0;
        for (std::size_t lvl = levels_.size(); lvl-- > 0;) {
            std::size_t width = std::size_t{1} << lvl;
            if (start + width <= n && (start / width) < levels_[lvl].size()) {
                nodes.push_back(levels_[lvl][start / width]);
                start += width;
            }
        }
        return smooth_minmax(nodes, kappa_, which_);
    }

private:
    double kappa_;
    Extremum which_;
    std::vector<std::vector<Bracket>> levels_;
};

void require_kappa(double kappa) {
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidConfig, "smoothing level must be positive");
}

}  // namespace

Bracket smooth_abs(double f, double kappa) {
    require_kappa(kappa);
    return {psi_lower(f, kappa), psi_upper(f, kappa)};
}

std::pair<GridFn, GridFn> smooth_abs(const GridFn& f, double kappa) {
    std::vector<double> lo(f.size()), hi(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        Bracket b = smooth_abs(f.values[i], kappa);
        lo[i] = b.lower;
        hi[i] = b.upper;
    }
    return {f.with_values(std::move(lo)), f.with_values(std::move(hi))};
}

Bracket smooth_max2(const Bracket& a, const Bracket& b, double kappa) {
    return {max_lower(a.lower, b.lower, kappa), max_upper(a.upper, b.upper, kappa)};
}

Bracket smooth_min2(const Bracket& a, const Bracket& b, double kappa) {
    return {min_lower(a.lower, b.lower, kappa), min_upper(a.upper, b.upper, kappa)};
}

Bracket smooth_minmax(const std::vector<Bracket>& fs, double kappa, Extremum which) {
    require_kappa(kappa);
    if (fs.empty()) throw Error(ErrorCode::InvalidConfig, "smooth extremum of an empty list");
    std::vector<Bracket> cur(fs);
    while (cur.size() > 1) {
        std::vector<Bracket> next;
        next.reserve((cur.size() + 1) / 2);
        for (std::size_t j = 0; j + 1 < cur.size(); j += 2) next.push_back(combine(cur[j], cur[j + 1], kappa, which));
        if (cur.size() % 2) next.push_back(cur.back());
        cur = std::move(next);
    }
    return cur.front();
}

Bracket smooth_minmax(const std::vector<double>& fs, double kappa, Extremum which) {
    std::vector<Bracket> b(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) b[i] = {fs[i], fs[i]};
    return smooth_minmax(b, kappa, which);
}

GridFn exact_envelope(const GridFn& f, const GridFn& g, EnvelopeKind kind) {
    GridFn h = axpby(1.0, f, -1.0, g);
    switch (kind) {
        case EnvelopeKind::SupLeq: return running_sup_leq(h);
        case EnvelopeKind::InfGeq: return running_inf_geq(h);
        case EnvelopeKind::InfLeq: {
            std::vector<double> v(h.values);
            for (std::size_t i = 1; i < v.size(); ++i) v[i] = std::min(v[i], v[i - 1]);
            return h.with_values(std::move(v));
        }
        case EnvelopeKind::SupGeq: {
            std::vector<double> v(h.values);
            for (std::size_t i = v.size(); i-- > 1;) v[i - 1] = std::max(v[i - 1], v[i]);
            return h.with_values(std::move(v));
        }
    }
    return h;
}

std::pair<GridFn, GridFn> smooth_envelopes(const GridFn& f, const GridFn& g, double kappa, int bins,
                                           EnvelopeKind kind) {
    require_kappa(kappa);
    if (!f.same_grid(g)) throw Error(ErrorCode::InvalidDistribution, "envelope inputs must share a grid");
    if (!f.is_nondecreasing(1e-12) || !g.is_nondecreasing(1e-12))
        throw Error(ErrorCode::MonotonicityRequired, "envelope inputs must be nondecreasing");
    if (bins < 1) throw Error(ErrorCode::InvalidConfig, "bins must be positive");
    const std::size_t m = f.size();
    const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(bins), m);
    std::vector<std::size_t> start(nb + 1);
    for (std::size_t b = 0; b <= nb; ++b) start[b] = b * m / nb;
    std::vector<std::size_t> block(m);
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t i = start[b]; i < start[b + 1]; ++i) block[i] = b;

    const auto& F = f.values;
    const auto& G = g.values;
    auto h = [&](std::size_t i) { return F[i] - G[i]; };
    const bool is_sup = kind == EnvelopeKind::SupLeq || kind == EnvelopeKind::SupGeq;
    const bool leq = kind == EnvelopeKind::SupLeq || kind == EnvelopeKind::InfLeq;
    const Extremum which = is_sup ? Extremum::Max : Extremum::Min;

    // Bracket of the extremum of f - g over knots [a, b].
    auto range_bracket = [&](std::size_t a, std::size_t b) -> Bracket {
        if (is_sup) return {h(a), F[b] - G[a]};
        return {F[a] - G[b], h(a)};
    };

    std::vector<Bracket> terms(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        std::size_t j = leq ? b : nb - 1 - b;
        terms[b] = range_bracket(start[j], start[j + 1] - 1);
    }
    PrefixFolds folds(std::move(terms), kappa, which);

    // Fold of the first c complete blocks, shared by every knot of a block.
    std::vector<Bracket> pre(nb);
    for (std::size_t c = 1; c < nb; ++c) pre[c] = folds.prefix(c);

    std::vector<double> lo(m), hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t J = block[i];
        std::size_t complete = leq ? J : nb - 1 - J;
        std::size_t s0 = start[J], e0 = start[J + 1] - 1;
        Bracket r;
        if (is_sup)
            r = {h(i), leq ? F[i] - G[s0] : F[e0] - G[i]};
        else
            r = {leq ? F[s0] - G[i] : F[i] - G[e0], h(i)};
        if (complete > 0) r = combine(pre[complete], r, kappa, which);
        lo[i] = r.lower;
        hi[i] = r.upper;
    }
    return {f.with_values(std::move(lo)), f.with_values(std::move(hi))};
}

}  // namespace defiers
