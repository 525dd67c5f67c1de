#pragma once

#include <optional>
#include <string>

#include "egomwf/metrics.hpp"
#include "egomwf/pipeline.hpp"
#include "egomwf/scenegen.hpp"

// JSON configuration and report documents. Parsers throw ConfigError listing
// every problem found, not just the first.
namespace egomwf {

struct EnhancePaths {
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> report;
  std::optional<std::string> speech;  // ground-truth components, same layout as input
  std::optional<std::string> noise;
};

struct EnhanceFile {
  EnhanceConfig config;
  EnhancePaths paths;
};

// Missing keys keep their defaults. Unknown keys are rejected so that typos do
// not silently fall back to defaults. With input_channels > 0 the partition and
// SPP channel are also range-checked.
EnhanceFile parse_enhance_config(const std::string& json_text, std::size_t input_channels = 0);
// Schema checks only (syntax, types, unknown keys, enum names), appended to
// `violations` instead of thrown, so callers can apply overrides first and
// report everything at once.
EnhanceFile read_enhance_config(const std::string& json_text, std::vector<std::string>& violations);
std::string enhance_config_to_json(const EnhanceConfig& cfg);

SceneConfig parse_scene_config(const std::string& json_text);

std::string metrics_to_json(const MetricsReport& report);
std::string manifest_to_json(const SceneManifest& manifest);

// Run summary: configuration echo, per-bin status tallies, mask activity,
// warnings, and metrics when available.
std::string enhance_report_to_json(const EnhanceConfig& cfg, const EnhanceResult& result,
                                   const std::optional<MetricsReport>& metrics);

}  // namespace egomwf
