#include "defiers/commands.hpp"
#include "defiers/errors.hpp"
#include "defiers/parallel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace defiers;

namespace {

SensitivityPoint parse_at(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--at expects pi,delta");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, "--at expects pi,delta, got '" + s + "'");
    }
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + p.string() + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensitivity and robust regions for IV estimates without monotonicity"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string outcome = "auto";
    std::string out;
    std::vector<std::string> at;
    double bandwidth = 0.0;
    unsigned threads = 0;

    auto common = [&](CLI::App* sub, bool needs_input) {
        if (needs_input) sub->add_option("input", cfg.input, "CSV file with columns y,d,z ('-' for stdin)")->required();
        sub->add_option("--mu", cfg.mu, "Conclusion threshold: complier effect >= mu");
        sub->add_option("--alpha", cfg.alpha, "Significance level");
        sub->add_option("--pi-grid", cfg.pi_grid, "Defier share grid: N or lo:hi:N");
        sub->add_option("--bootstrap", cfg.bootstrap.replications, "Bootstrap replications");
        sub->add_option("--eta", cfg.bootstrap.eta, "Near-binding slack in units of 1/sqrt(n)");
        sub->add_option("--kappa", cfg.smoothing.kappa_smooth, "Smoothing level");
        sub->add_option("--bins", cfg.smoothing.bins, "Envelope bins (0 = automatic)");
        sub->add_option("--bandwidth", bandwidth, "Kernel bandwidth (default: rule of thumb)");
        sub->add_option("--grid-points", cfg.kde.grid_points, "Outcome grid size");
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("--outcome", outcome, "auto, binary or continuous")
            ->check(CLI::IsMember({"auto", "binary", "continuous"}));
        sub->add_option("--out", out, "Output JSON path; a .csv companion is written next to it");
        sub->add_option("--threads", threads, "Worker threads (0 = DEFIERS_THREADS or hardware)");
    };

    CLI::App* regions = app.add_subcommand("regions", "Estimated sensitivity and robust regions");
    common(regions, true);
    CLI::App* bounds = app.add_subcommand("bounds", "Complier bounds at given sensitivity points");
    common(bounds, true);
    bounds->add_option("--at", at, "Sensitivity point pi,delta (repeatable)")->required();
    CLI::App* ci = app.add_subcommand("ci", "Bootstrap confidence sets for the regions");
    common(ci, true);
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo coverage of the binary confidence sets");
    common(simulate, false);
    simulate->add_option("--n", cfg.sim_n, "Sample size per draw");
    simulate->add_option("--reps", cfg.sim_reps, "Monte Carlo draws per design");
    simulate->add_option("--etas", cfg.sim_etas, "Near-binding multipliers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        cfg.outcome = parse_outcome_kind(outcome);
        if (bandwidth > 0.0) cfg.kde.bandwidth = bandwidth;
        if (bandwidth < 0.0) throw Error(ErrorCode::InvalidBandwidth, "bandwidth must be positive");
        for (const std::string& s : at) cfg.at.push_back(parse_at(s));
        set_thread_count(threads);

        CommandResult r;
        if (regions->parsed()) r = cmd_regions(cfg);
        else if (bounds->parsed()) r = cmd_bounds(cfg);
        else if (ci->parsed()) r = cmd_ci(cfg);
        else r = cmd_simulate(cfg);

        if (out.empty()) {
            std::cout << r.json;
        } else {
            std::filesystem::path p(out);
            write_file(p, r.json);
            write_file(std::filesystem::path(p).replace_extension(".csv"), r.csv);
        }
        if (r.exit_code == kExitRefuted) std::cerr << "the data refute the model: the sensitivity region is empty\n";
        return r.exit_code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}
