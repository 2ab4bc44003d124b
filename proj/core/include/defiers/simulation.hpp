#pragma once

#include "defiers/inference.hpp"
#include "defiers/theta_model.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace defiers {

// Latent groups in the order complier, defier, always taker, never taker.
enum Group { kCO = 0, kDF = 1, kAT = 2, kNT = 3 };

struct DgpSpec {
    double pi_co = 0.35;
    double pi_df = 0.05;
    double pi_at = 0.3;
    double pi_nt = 0.3;
    double delta_co = 0.3;
    double delta_df = 0.0;  // defier offset
    double p_z = 0.5;
    std::size_t n = 2000;
    std::uint64_t seed = 1;

    void validate() const;
};

// Binary latent model: shares and P(Y_d = 1) by group.
struct LatentBin {
    std::array<double, 4> share{};
    std::array<double, 4> p1{};  // P(Y_1 = 1 | group)
    std::array<double, 4> p0{};  // P(Y_0 = 1 | group)

    ThetaBin theta() const;
    double complier_late() const { return p1[kCO] - p0[kCO]; }
    // KS distance between complier and defier outcome distributions under d.
    double ks(int d) const;
};

LatentBin latent_of(const DgpSpec& spec);
ThetaBin true_theta(const DgpSpec& spec);

MicroSample simulate_dgp(const DgpSpec& spec);
// Independent draw number `stream` of the same design.
MicroSample simulate_dgp(const DgpSpec& spec, std::uint64_t stream);

// Discrete latent model on a finite support: pmf[group][d] over knots.
struct LatentCont {
    std::vector<double> knots;
    std::array<double, 4> share{};
    std::array<std::array<std::vector<double>, 2>, 4> pmf;

    ThetaCont theta() const;
    double complier_late() const;
};

// Feasible random instances, used by property tests and benchmarks.
LatentBin random_latent_bin(std::mt19937_64& rng);
LatentCont random_latent_cont(std::mt19937_64& rng, std::size_t support);

// Fixed small instances with hand-checkable bounds.
ThetaBin reference_bin();
LatentCont reference_cont();

struct CoverageCheck {
    bool sr_covered = false;  // identified sensitivity region inside the outer set
    bool rr_clean = false;    // inner robust set avoids the non-robust pairs
    bool covered() const { return sr_covered && rr_clean; }
};

CoverageCheck check_coverage(const ThetaBin& truth, const ConfidenceRegions& cr, double mu,
                             std::size_t fine_points = 201);

struct CoverageConfig {
    std::vector<DgpSpec> specs;
    std::vector<double> etas{0.2, 0.5, 1.0, 1.5, 2.0};
    int replications = 500;
    int reps = 1000;
    double alpha = 0.05;
    double mu = 0.0;
    int pi_points = 41;
    std::uint64_t seed = 1;
};

struct CoverageRow {
    DgpSpec spec;
    std::vector<double> coverage;  // one entry per eta
    int failures = 0;              // draws where the bootstrap could not run
};

// The eight designs of the reference Monte Carlo table.
std::vector<DgpSpec> coverage_designs(std::size_t n = 2000);

std::vector<CoverageRow> coverage_study(const CoverageConfig& config);
std::string coverage_csv(const std::vector<CoverageRow>& rows, const std::vector<double>& etas);

}  // namespace defiers
