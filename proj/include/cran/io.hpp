#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "cran/association.hpp"
#include "cran/channel_gen.hpp"
#include "cran/model.hpp"
#include "cran/sweep.hpp"

namespace cran {

/// Unreadable or malformed input file. The message names the file or the
/// offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ChannelFile {
  ChannelState channels;
  double noise_power_w = 0.0;
  std::optional<Topology> topology;
};

/// h is stored as h[k][n][m] = [re, im].
nlohmann::json channels_to_json(const ChannelFile& file);
ChannelFile channels_from_json(const nlohmann::json& doc);

void write_channel_file(const std::filesystem::path& path, const ChannelFile& file);
ChannelFile read_channel_file(const std::filesystem::path& path);

/// Trace of a scheme run. Unbounded fronthaul caps are written as null.
nlohmann::json report_to_json(const SolveReport& report);

}  // namespace cran
