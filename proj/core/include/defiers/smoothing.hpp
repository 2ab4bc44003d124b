#pragma once

#include "defiers/step_fn.hpp"

#include <utility>
#include <vector>

namespace defiers {

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
};

enum class Extremum { Max, Min };
enum class EnvelopeKind { SupLeq, InfLeq, SupGeq, InfGeq };

// psi^L(f) <= |f| <= psi^U(f).
Bracket smooth_abs(double f, double kappa);
std::pair<GridFn, GridFn> smooth_abs(const GridFn& f, double kappa);

// Pairwise smooth max/min brackets, folded as a balanced tree.
Bracket smooth_max2(const Bracket& a, const Bracket& b, double kappa);
Bracket smooth_min2(const Bracket& a, const Bracket& b, double kappa);
Bracket smooth_minmax(const std::vector<double>& fs, double kappa, Extremum which);
Bracket smooth_minmax(const std::vector<Bracket>& fs, double kappa, Extremum which);

// Binned brackets of the running envelope of f - g, for nondecreasing f and g:
//   SupLeq: sup_{z <= y}, InfLeq: inf_{z <= y}, SupGeq: sup_{z >= y}, InfGeq: inf_{z >= y}.
std::pair<GridFn, GridFn> smooth_envelopes(const GridFn& f, const GridFn& g, double kappa, int bins,
                                           EnvelopeKind kind);

// Exact counterpart of smooth_envelopes.
GridFn exact_envelope(const GridFn& f, const GridFn& g, EnvelopeKind kind);

}  // namespace defiers
