#include "defiers/commands.hpp"

#include "defiers/binary_model.hpp"
#include "defiers/errors.hpp"
#include "defiers/io.hpp"
#include "defiers/regions.hpp"
#include "defiers/simulation.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <iostream>
#include <sstream>

namespace defiers {

using nlohmann::json;

namespace {

struct Loaded {
    MicroSample sample;
    bool binary = false;
    ThetaBin tb;
    ThetaCont tc;
    Interval pdf;
};

Loaded load(const RunConfig& cfg) {
    Loaded l;
    l.sample = cfg.input == "-" ? read_sample(std::cin) : ingest_csv(cfg.input);
    const bool is_bin = l.sample.binary_outcome();
    if (cfg.outcome == OutcomeKind::Binary && !is_bin)
        throw Error(ErrorCode::WrongModel, "--outcome binary requires y in {0,1}");
    l.binary = cfg.outcome == OutcomeKind::Binary || (cfg.outcome == OutcomeKind::Auto && is_bin);
    if (l.binary) {
        l.tb = estimate_theta_bin(l.sample);
        l.pdf = pdf_bounds(l.tb);
    } else {
        l.tc = estimate_theta_cont(l.sample, cfg.kde);
        l.pdf = pdf_bounds(l.tc);
    }
    return l;
}

json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

json config_echo(const RunConfig& c) {
    return {{"input", c.input},
            {"outcome", outcome_kind_name(c.outcome)},
            {"mu", c.mu},
            {"alpha", c.alpha},
            {"pi_grid", c.pi_grid},
            {"seed", c.seed},
            {"replications", c.bootstrap.replications},
            {"eta", c.bootstrap.eta},
            {"kappa", c.smoothing.kappa_smooth},
            {"bins", c.smoothing.bins},
            {"bandwidth", c.kde.bandwidth ? json(*c.kde.bandwidth) : json(nullptr)},
            {"grid_points", c.kde.grid_points}};
}

json header(const char* command, const RunConfig& cfg) {
    return {{"version", kFormatVersion}, {"command", command}, {"config", config_echo(cfg)}};
}

json sample_summary(const Loaded& l) {
    json s = {{"model", l.binary ? "binary" : "continuous"},
              {"n", l.sample.n()},
              {"n0", l.sample.n0()},
              {"n1", l.sample.n1()},
              {"wald", num(wald_estimand(l.sample))},
              {"first_stage", num(l.binary ? l.tb.P1 - l.tb.P0 : l.tc.p1() - l.tc.p0())},
              {"pdf", {{"lo", l.pdf.lo}, {"hi", l.pdf.hi}}}};
    json warnings = json::array();
    if (l.sample.unbalanced_arms()) warnings.push_back("one instrument arm holds less than 5% of the sample");
    s["warnings"] = warnings;
    return s;
}

RegionCurve point_regions(const Loaded& l, const std::vector<double>& grid, double mu) {
    if (l.binary) return binary_regions(l.tb, grid, mu);
    return robust_region(l.tc, grid, Conclusion{mu, std::nullopt});
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

OutcomeKind parse_outcome_kind(const std::string& s) {
    if (s == "auto") return OutcomeKind::Auto;
    if (s == "binary") return OutcomeKind::Binary;
    if (s == "continuous") return OutcomeKind::Continuous;
    throw Error(ErrorCode::InvalidConfig, "outcome must be auto, binary or continuous");
}

const char* outcome_kind_name(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Binary: return "binary";
        case OutcomeKind::Continuous: return "continuous";
        default: return "auto";
    }
}

void RunConfig::validate() const {
    if (!std::isfinite(mu)) throw Error(ErrorCode::InvalidConfig, "mu must be finite");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0,1)");
    smoothing.validate();
    kde.validate();
    if (sim_reps < 1) throw Error(ErrorCode::InvalidConfig, "reps must be positive");
    for (const SensitivityPoint& s : at)
        if (!(s.pi_df >= 0.0 && s.pi_df < 0.5 && s.delta >= 0.0 && s.delta <= 1.0))
            throw Error(ErrorCode::InvalidConfig, "--at needs 0 <= pi < 0.5 and 0 <= delta <= 1");
}

std::vector<double> parse_pi_grid(const std::string& spec, const Interval& pdf) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    auto to_num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidConfig, "bad --pi-grid value '" + s + "'");
        }
    };
    auto count = [&](const std::string& s) {
        double v = to_num(s);
        if (!(v >= 1.0) || v != std::floor(v)) throw Error(ErrorCode::InvalidConfig, "--pi-grid count must be a positive integer");
        return static_cast<std::size_t>(v);
    };
    if (parts.size() == 1) {
        if (pdf.lo > pdf.hi) return {};
        return linspace(pdf.lo, pdf.hi, count(parts[0]));
    }
    if (parts.size() == 3) {
        double lo = to_num(parts[0]), hi = to_num(parts[1]);
        if (!(lo <= hi)) throw Error(ErrorCode::InvalidConfig, "--pi-grid needs lo <= hi");
        return clip_pi_grid(linspace(lo, hi, count(parts[2])), pdf);
    }
    throw Error(ErrorCode::InvalidConfig, "--pi-grid must be N or lo:hi:N");
}

CommandResult cmd_regions(const RunConfig& cfg) {
    cfg.validate();
    Loaded l = load(cfg);
    std::vector<double> grid = parse_pi_grid(cfg.pi_grid.empty() ? "81" : cfg.pi_grid, l.pdf);
    RegionCurve rc = point_regions(l, grid, cfg.mu);
    json doc = header("regions", cfg);
    doc["sample"] = sample_summary(l);
    doc["regions"] = json::parse(region_to_json(rc));
    CommandResult r;
    r.exit_code = rc.empty ? kExitRefuted : kExitOk;
    r.json = dump(doc);
    r.csv = curve_csv(rc);
    return r;
}

CommandResult cmd_bounds(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.at.empty()) throw Error(ErrorCode::InvalidConfig, "bounds needs at least one --at pi,delta");
    Loaded l = load(cfg);
    json doc = header("bounds", cfg);
    doc["sample"] = sample_summary(l);
    json pts = json::array();
    const bool refuted = l.pdf.lo > l.pdf.hi;
    for (const SensitivityPoint& s : cfg.at) {
        json e = {{"pi_df", s.pi_df}, {"delta", s.delta}};
        try {
            if (l.binary) {
                Interval b1 = binary_prob_bounds(l.tb, s, 1), b0 = binary_prob_bounds(l.tb, s, 0);
                Interval late = binary_late_bounds(l.tb, s);
                bool in_sr = !refuted && s.pi_df >= l.pdf.lo - 1e-12 && s.pi_df <= l.pdf.hi + 1e-12;
                if (in_sr) {
                    Interval db = binary_delta_bounds(l.tb, s.pi_df);
                    in_sr = s.delta >= db.lo - 1e-12 && s.delta <= db.hi + 1e-12;
                }
                e["in_sensitivity_region"] = in_sr;
                e["p_complier_y1"] = {b1.lo, b1.hi};
                e["p_complier_y0"] = {b0.lo, b0.hi};
                e["late"] = {late.lo, late.hi};
            } else {
                CdfBounds b1 = sharp_bounds_F(l.tc, s, 1), b0 = sharp_bounds_F(l.tc, s, 0);
                bool in_sr = !refuted && !b1.crossing && !b0.crossing;
                e["in_sensitivity_region"] = in_sr;
                Interval late = late_bounds(b1, b0);
                e["late"] = {late.lo, late.hi};
                e["cdf"] = {{"y", b1.lower.knots},
                            {"y1_lower", b1.lower.values},
                            {"y1_upper", b1.upper.values},
                            {"y0_lower", b0.lower.values},
                            {"y0_upper", b0.upper.values}};
            }
        } catch (const Error& err) {
            e["error"] = err.what();
        }
        pts.push_back(e);
    }
    doc["bounds"] = pts;
    CommandResult r;
    r.exit_code = refuted ? kExitRefuted : kExitOk;
    r.json = dump(doc);
    std::ostringstream os;
    os.precision(17);
    os << "pi_df,delta,in_sr,late_lo,late_hi\n";
    for (const json& e : pts) {
        os << e["pi_df"].get<double>() << ',' << e["delta"].get<double>() << ',';
        if (e.contains("late"))
            os << (e["in_sensitivity_region"].get<bool>() ? 1 : 0) << ',' << e["late"][0].get<double>() << ','
               << e["late"][1].get<double>();
        else
            os << ",,";
        os << '\n';
    }
    r.csv = os.str();
    return r;
}

CommandResult cmd_ci(const RunConfig& cfg) {
    cfg.validate();
    Loaded l = load(cfg);
    const bool refuted = l.pdf.lo > l.pdf.hi;
    const std::string spec = cfg.pi_grid.empty() ? "41" : cfg.pi_grid;
    std::vector<double> grid = parse_pi_grid(spec, l.pdf);
    if (grid.empty()) grid = parse_pi_grid(spec, Interval{std::min(l.pdf.lo, l.pdf.hi), l.pdf.hi});
    BootstrapConfig bc = cfg.bootstrap;
    bc.alpha = cfg.alpha;
    bc.seed = cfg.seed;
    bc.pi_eval = grid;
    ConfidenceRegions cr = l.binary ? binary_directional_bootstrap(l.sample, cfg.mu, bc)
                                    : bootstrap_band_cont(l.sample, cfg.mu, bc, cfg.smoothing, cfg.kde);
    RegionCurve rc = point_regions(l, grid, cfg.mu);
    json doc = header("ci", cfg);
    doc["sample"] = sample_summary(l);
    doc["regions"] = json::parse(region_to_json(rc));
    doc["confidence"] = json::parse(confidence_to_json(cr));
    CommandResult r;
    r.exit_code = refuted ? kExitRefuted : kExitOk;
    r.json = dump(doc);
    // Rows follow the bootstrap grid; refuted samples have no point curve.
    r.csv = curve_csv(rc.size() == cr.sr_outer.size() ? rc : cr.sr_outer, &cr);
    return r;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    cfg.validate();
    CoverageConfig cc;
    cc.specs = coverage_designs(cfg.sim_n);
    cc.etas = cfg.sim_etas;
    cc.replications = cfg.bootstrap.replications;
    cc.reps = cfg.sim_reps;
    cc.alpha = cfg.alpha;
    cc.mu = cfg.mu;
    cc.pi_points = cfg.bootstrap.pi_points;
    cc.seed = cfg.seed;
    std::vector<CoverageRow> rows = coverage_study(cc);
    json doc = header("simulate", cfg);
    doc["design"] = {{"n", cfg.sim_n}, {"reps", cfg.sim_reps}, {"etas", cfg.sim_etas}};
    json arr = json::array();
    for (const CoverageRow& row : rows)
        arr.push_back({{"pi_co", row.spec.pi_co},
                       {"pi_df", row.spec.pi_df},
                       {"delta_co", row.spec.delta_co},
                       {"defier_offset", row.spec.delta_df},
                       {"coverage", row.coverage},
                       {"failures", row.failures}});
    doc["coverage"] = arr;
    CommandResult r;
    r.json = dump(doc);
    r.csv = coverage_csv(rows, cfg.sim_etas);
    return r;
}

}  // namespace defiers
