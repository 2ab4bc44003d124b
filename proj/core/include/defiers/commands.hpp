#pragma once

#include "defiers/complier_bounds.hpp"
#include "defiers/estimation.hpp"
#include "defiers/inference.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace defiers {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRefuted = 2;
inline constexpr int kExitInput = 3;

enum class OutcomeKind { Auto, Binary, Continuous };

OutcomeKind parse_outcome_kind(const std::string& s);
const char* outcome_kind_name(OutcomeKind k);

struct RunConfig {
    std::string input;
    OutcomeKind outcome = OutcomeKind::Auto;
    double mu = 0.0;
    double alpha = 0.05;
    std::string pi_grid;  // "N" or "lo:hi:N"; empty selects 81 points (41 for ci)
    BootstrapConfig bootstrap;
    SmoothingConfig smoothing;
    KdeConfig kde;
    std::uint64_t seed = 1;
    std::vector<SensitivityPoint> at;

    // simulate only
    std::size_t sim_n = 2000;
    int sim_reps = 1000;
    std::vector<double> sim_etas{0.2, 0.5, 1.0, 1.5, 2.0};

    void validate() const;
};

struct CommandResult {
    int exit_code = kExitOk;
    std::string json;
    std::string csv;
};

// Grid of defier shares from "N" or "lo:hi:N", clipped to the identified interval.
std::vector<double> parse_pi_grid(const std::string& spec, const Interval& pdf);

CommandResult cmd_regions(const RunConfig& config);
CommandResult cmd_bounds(const RunConfig& config);
CommandResult cmd_ci(const RunConfig& config);
CommandResult cmd_simulate(const RunConfig& config);

}  // namespace defiers
