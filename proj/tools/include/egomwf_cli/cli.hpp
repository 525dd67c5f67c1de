#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "egomwf/filters.hpp"
#include "egomwf/metrics.hpp"
#include "egomwf/scenegen.hpp"

namespace egomwf::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitProcessing = 3,
};

// argv excludes the program name and the subcommand.
using Args = std::vector<std::string>;

int cmd_enhance(const Args& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const Args& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const Args& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const Args& args, std::ostream& out, std::ostream& err);
int cmd_speech(const Args& args, std::ostream& out, std::ostream& err);

// Dispatches on args[0].
int run(const Args& args, std::ostream& out, std::ostream& err);

struct SweepOptions {
  std::vector<double> snrs_db{kSuiteSnrsDb.begin(), kSuiteSnrsDb.end()};
  std::vector<std::size_t> array_sizes{kSuiteArraySizes.begin(), kSuiteArraySizes.end()};
  std::vector<SppMode> spp_modes{SppMode::Internal, SppMode::External, SppMode::Oracle};
  std::vector<EnhanceMethod> methods{EnhanceMethod::Mwf, EnhanceMethod::MwfWithNoiseMics, EnhanceMethod::PkMwf};
  std::vector<std::uint64_t> seeds{1};
  std::size_t threads = 1;
};

struct SweepRow {
  SweepCell cell;
  std::optional<MetricsReport> metrics;
  std::array<std::size_t, kBinStatusCount> bin_status{};
  std::string error;  // empty on success
};

// Renders each (snr, seed) scene once and runs every grid cell against it.
// Rows come back in grid order regardless of the worker count.
std::vector<SweepRow> run_sweep(const SweepOptions& opts, const AudioClip& speech,
                                const std::string& speech_path = {});

// One evaluated cell, the same computation the sweep performs.
SweepRow run_cell(const SweepCell& cell, const SceneOutput& scene);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);

}  // namespace egomwf::cli
