#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlorenz/atlas.hpp"
#include "dlorenz/lyapunov.hpp"
#include "dlorenz/rescaling.hpp"

namespace dlorenz {

inline constexpr const char* kAtlasCsvSchema = "dlorenz.atlas.csv/1";
inline constexpr const char* kRegionsSchema = "dlorenz.regions/1";
inline constexpr const char* kTrajectoryCsvSchema = "dlorenz.trajectory.csv/1";
inline constexpr const char* kSpectrumSchema = "dlorenz.spectrum/1";
inline constexpr const char* kRescalingSchema = "dlorenz.rescaling/1";
inline constexpr const char* kRescalingCsvSchema = "dlorenz.rescaling.csv/1";
inline constexpr const char* kDeltaKSchema = "dlorenz.delta_k/1";
inline constexpr const char* kDeltaKCsvSchema = "dlorenz.delta_k.csv/1";
inline constexpr const char* kManifestSchema = "dlorenz.manifest/1";
inline constexpr const char* kClassificationSchema = "dlorenz.classification/1";

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// Throws ErrorKind::Config when the file cannot be written.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// CSV files start with a "# schema=<name>" line followed by a header row.

std::string trajectory_csv(const std::vector<State3>& states, int dims = 3);
std::string atlas_csv(const Atlas& atlas);
std::string rescaling_csv(const RescalingReport& rep);
std::string delta_k_csv(const DeltaKReport& rep);

nlohmann::json spectrum_json(const LyapunovSpectrum& spec);
nlohmann::json sweep_config_json(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json regions_json(const Atlas& atlas, const std::vector<Component>& comps,
                            const HenonParams& reference, double adjoin_distance);
nlohmann::json rescaling_json(const RescalingReport& rep);
nlohmann::json delta_k_json(const DeltaKReport& rep);

struct RunManifest {
  std::string command;
  nlohmann::json config;  ///< fully resolved options, enough to replay the run
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;
  std::string tool_version;
  int threads = 1;
};

nlohmann::json manifest_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

}  // namespace dlorenz
