#pragma once

#include "defiers/inference.hpp"
#include "defiers/regions.hpp"
#include "defiers/theta_model.hpp"

#include <istream>
#include <string>

namespace defiers {

inline constexpr const char* kFormatVersion = "1";

// CSV with a header naming columns y, d and z (any order, extra columns ignored).
MicroSample read_sample(std::istream& in);
MicroSample ingest_csv(const std::string& path);

std::string region_to_json(const RegionCurve& rc);
RegionCurve region_from_json(const std::string& text);
std::string confidence_to_json(const ConfidenceRegions& cr);
ConfidenceRegions confidence_from_json(const std::string& text);

// Plotting table: pi_df, delta_lo, delta_hi, bp and, when bands are given,
// band_delta_lo, band_delta_hi, band_bp on the same grid.
std::string curve_csv(const RegionCurve& rc, const ConfidenceRegions* cr = nullptr);

}  // namespace defiers
