#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sbwave/evolve.hpp"
#include "sbwave/functionals.hpp"
#include "sbwave/grid.hpp"
#include "sbwave/operators.hpp"
#include "sbwave/orbit.hpp"
#include "sbwave/profile.hpp"

// Artifact writers. All numeric text uses 17 significant digits with '.' as
// the decimal separator, so identical inputs give byte-identical files.
namespace sbwave::io {

std::string format_g17(double x);

void write_profile_csv(const std::string& path, const Grid<double>& grid,
                       const Profile<double>& profile);

/// Snapshot with the profile schema; eps_hat column holds |e| and phi is
/// reconstructed from w as mean(w) x plus the periodic antiderivative.
void write_state_csv(const std::string& path, const State<double>& state);

void write_region_csv(const std::string& path,
                      const std::vector<RegionRow<double>>& rows);

void write_conservation_csv(const std::string& path, const ConservationLog<double>& log);

void write_spectral_jsonl(const std::string& path,
                          const std::array<SpectralReport<double>, 3>& reports);

nlohmann::json stability_to_json(const StabilityReport<double>& report);

void write_stability_json(const std::string& path, const StabilityReport<double>& report);

void write_stability_csv(const std::string& path, const StabilityReport<double>& report);

void write_text(const std::string& path, const std::string& text);

}  // namespace sbwave::io
