#include "defiers/simulation.hpp"

#include "defiers/binary_model.hpp"
#include "defiers/errors.hpp"
#include "defiers/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace defiers {

namespace {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::mt19937_64 rng = stream_rng(seed, a, b);
    return rng();
}

bool in01(double p) { return p >= 0.0 && p <= 1.0; }

// Positive weights summing to one.
std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k, double floor) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(k);
    double s = 0.0;
    for (double& x : w) s += (x = e(rng) + floor);
    for (double& x : w) x /= s;
    return w;
}

}  // namespace

void DgpSpec::validate() const {
    const double sh[] = {pi_co, pi_df, pi_at, pi_nt};
    double total = 0.0;
    for (double s : sh) {
        if (!(s >= 0.0)) throw Error(ErrorCode::InvalidSpec, "group shares must be nonnegative");
        total += s;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidSpec, "group shares must sum to one");
    if (!in01(0.5 + delta_co) || !in01(0.5 + delta_df))
        throw Error(ErrorCode::InvalidSpec, "outcome probabilities must lie in [0,1]");
    if (!(p_z > 0.0 && p_z < 1.0)) throw Error(ErrorCode::InvalidSpec, "p_z must lie in (0,1)");
    if (n < 2) throw Error(ErrorCode::InvalidSpec, "sample size must be at least 2");
}

ThetaBin LatentBin::theta() const {
    ThetaBin t;
    t.P11 = share[kCO] * p1[kCO] + share[kAT] * p1[kAT];
    t.P10 = share[kDF] * p1[kDF] + share[kAT] * p1[kAT];
    t.P01 = share[kDF] * p0[kDF] + share[kNT] * p0[kNT];
    t.P00 = share[kCO] * p0[kCO] + share[kNT] * p0[kNT];
    t.P1 = share[kCO] + share[kAT];
    t.P0 = share[kDF] + share[kAT];
    return t;
}

double LatentBin::ks(int d) const {
    const auto& p = d == 1 ? p1 : p0;
    return std::abs(p[kCO] - p[kDF]);
}

LatentBin latent_of(const DgpSpec& spec) {
    spec.validate();
    LatentBin l;
    l.share = {spec.pi_co, spec.pi_df, spec.pi_at, spec.pi_nt};
    l.p1 = {0.5 + spec.delta_co, 0.5 + spec.delta_df, 0.5, 0.5};
    l.p0 = {0.5, 0.5, 0.5, 0.5};
    return l;
}

ThetaBin true_theta(const DgpSpec& spec) { return latent_of(spec).theta(); }

MicroSample simulate_dgp(const DgpSpec& spec) { return simulate_dgp(spec, 0); }

MicroSample simulate_dgp(const DgpSpec& spec, std::uint64_t stream) {
    const LatentBin l = latent_of(spec);
    std::mt19937_64 rng = stream_rng(spec.seed, stream);
    std::discrete_distribution<int> group(l.share.begin(), l.share.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MicroSample s;
    for (std::size_t i = 0; i < spec.n; ++i) {
        int g = group(rng);
        int z = u(rng) < spec.p_z ? 1 : 0;
        int d = g == kCO ? z : g == kDF ? 1 - z : g == kAT ? 1 : 0;
        double p = d == 1 ? l.p1[static_cast<std::size_t>(g)] : l.p0[static_cast<std::size_t>(g)];
        s.add(u(rng) < p ? 1.0 : 0.0, d, z);
    }
    return s;
}

ThetaCont LatentCont::theta() const {
    const std::size_t m = knots.size();
    std::vector<double> q11(m), q10(m), q01(m), q00(m);
    for (std::size_t i = 0; i < m; ++i) {
        q11[i] = share[kCO] * pmf[kCO][1][i] + share[kAT] * pmf[kAT][1][i];
        q10[i] = share[kDF] * pmf[kDF][1][i] + share[kAT] * pmf[kAT][1][i];
        q01[i] = share[kDF] * pmf[kDF][0][i] + share[kNT] * pmf[kNT][0][i];
        q00[i] = share[kCO] * pmf[kCO][0][i] + share[kNT] * pmf[kNT][0][i];
    }
    return theta_from_masses(knots, q11, q10, q01, q00);
}

double LatentCont::complier_late() const {
    double m = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) m += knots[i] * (pmf[kCO][1][i] - pmf[kCO][0][i]);
    return m;
}

LatentBin random_latent_bin(std::mt19937_64& rng) {
    LatentBin l;
    for (;;) {
        auto w = random_simplex(rng, 4, 0.05);
        if (w[kCO] - w[kDF] < 0.05) continue;
        std::copy(w.begin(), w.end(), l.share.begin());
        break;
    }
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (std::size_t g = 0; g < 4; ++g) {
        l.p1[g] = u(rng);
        l.p0[g] = u(rng);
    }
    return l;
}

LatentCont random_latent_cont(std::mt19937_64& rng, std::size_t support) {
    if (support < 2) throw Error(ErrorCode::InvalidSpec, "support needs at least two points");
    LatentCont l;
    for (std::size_t i = 0; i < support; ++i) l.knots.push_back(static_cast<double>(i));
    for (;;) {
        auto w = random_simplex(rng, 4, 0.05);
        if (w[kCO] - w[kDF] < 0.05) continue;
        std::copy(w.begin(), w.end(), l.share.begin());
        break;
    }
    for (auto& g : l.pmf)
        for (auto& f : g) f = random_simplex(rng, support, 0.02);
    return l;
}

ThetaBin reference_bin() {
    ThetaBin t;
    t.P11 = 0.35;
    t.P10 = 0.10;
    t.P01 = 0.15;
    t.P00 = 0.30;
    t.P0 = 0.2;
    t.P1 = 0.5;
    return t;
}

LatentCont reference_cont() {
    LatentCont l;
    l.knots = {0.0, 1.0, 2.0};
    l.share = {0.4, 0.1, 0.1, 0.4};
    const std::vector<double> flat(3, 1.0 / 3.0);
    for (auto& g : l.pmf)
        for (auto& f : g) f = flat;
    l.pmf[kCO][1] = {0.2, 0.3, 0.5};
    return l;
}

CoverageCheck check_coverage(const ThetaBin& truth, const ConfidenceRegions& cr, double mu, std::size_t fine_points) {
    CoverageCheck out;
    const Interval pdf = pdf_bounds(truth);
    const std::vector<double> grid = linspace(pdf.lo, pdf.hi, fine_points);
    out.sr_covered = true;
    out.rr_clean = true;
    for (double pi : grid) {
        const Interval db = binary_delta_bounds(truth, pi);
        const std::optional<double> bp = binary_bp_components(truth, pi, mu).bp;
        const BinaryBandAt band = binary_band_at(cr, pi);
        if (!band.inside || band.delta_lo > db.lo + 1e-9 || band.delta_hi < db.hi - 1e-9) out.sr_covered = false;
        if (!band.bp) continue;
        const double lo = std::max(db.lo, band.delta_lo);
        const double hi = std::min({db.hi, *band.bp, band.delta_hi});
        if (lo <= hi && (!bp || hi > *bp + 1e-9)) out.rr_clean = false;
    }
    return out;
}

std::vector<DgpSpec> coverage_designs(std::size_t n) {
    std::vector<DgpSpec> out;
    const double pairs[2][2] = {{0.35, 0.05}, {0.25, 0.15}};
    for (const auto& p : pairs)
        for (double dco : {0.3, 0.1})
            for (double ddf : {0.0, -0.3}) {
                DgpSpec s;
                s.pi_co = p[0];
                s.pi_df = p[1];
                s.pi_at = 0.3;
                s.pi_nt = 0.3;
                s.delta_co = dco;
                s.delta_df = ddf;
                s.n = n;
                out.push_back(s);
            }
    return out;
}

std::vector<CoverageRow> coverage_study(const CoverageConfig& config) {
    if (config.reps < 1) throw Error(ErrorCode::InvalidConfig, "reps must be positive");
    std::vector<CoverageRow> rows;
    for (std::size_t i = 0; i < config.specs.size(); ++i) {
        DgpSpec spec = config.specs[i];
        spec.seed = derive_seed(config.seed, i, 0);
        const ThetaBin truth = true_theta(spec);
        const auto reps = static_cast<std::size_t>(config.reps);
        std::vector<std::vector<char>> hit(reps, std::vector<char>(config.etas.size(), 0));
        std::vector<char> failed(reps, 0);
        parallel_for(reps, [&](std::size_t r) {
            MicroSample sample = simulate_dgp(spec, r);
            BootstrapConfig bc;
            bc.replications = config.replications;
            bc.alpha = config.alpha;
            bc.pi_points = config.pi_points;
            bc.seed = derive_seed(config.seed, i, r + 1);
            try {
                auto crs = binary_directional_bootstrap(sample, config.mu, bc, config.etas);
                for (std::size_t e = 0; e < crs.size(); ++e) hit[r][e] = check_coverage(truth, crs[e], config.mu).covered();
            } catch (const Error&) {
                failed[r] = 1;
            }
        });
        CoverageRow row;
        row.spec = config.specs[i];
        row.coverage.assign(config.etas.size(), 0.0);
        for (std::size_t r = 0; r < reps; ++r) {
            row.failures += failed[r];
            for (std::size_t e = 0; e < config.etas.size(); ++e) row.coverage[e] += hit[r][e];
        }
        for (double& c : row.coverage) c /= static_cast<double>(reps);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string coverage_csv(const std::vector<CoverageRow>& rows, const std::vector<double>& etas) {
    std::ostringstream os;
    os.precision(6);
    os << "pi_co,delta_co,defier_offset";
    for (double e : etas) os << ",eta=" << e;
    os << ",failures\n";
    for (const CoverageRow& r : rows) {
        os << r.spec.pi_co << ',' << r.spec.delta_co << ',' << r.spec.delta_df;
        for (double c : r.coverage) os << ',' << 100.0 * c;
        os << ',' << r.failures << '\n';
    }
    return os.str();
}

}  // namespace defiers
