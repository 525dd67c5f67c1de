#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egomwf/audio_io.hpp"
#include "egomwf/pipeline.hpp"

namespace egomwf {

inline constexpr double kSnrCapDb = 120.0;

struct SnrDb {
  double value = 0.0;
  bool capped = false;  // one of the energies was zero; value is +/-kSnrCapDb
};

// 10 log10(sum s^2 / sum n^2) over single-channel components of equal length.
SnrDb snr_db(std::span<const double> speech, std::span<const double> noise);
SnrDb snr_db(const AudioClip& speech, const AudioClip& noise);

// Short-time objective intelligibility. Both signals are resampled to 10 kHz,
// silent frames (40 dB below the loudest clean frame) are removed, and the
// clipped, normalized envelopes of 15 one-third-octave bands are correlated
// over 384 ms segments.
double stoi(std::span<const double> clean, std::span<const double> processed, int rate_hz);
double stoi(const AudioClip& clean, const AudioClip& processed);

struct MetricsReport {
  std::optional<double> snr_in_db;
  std::optional<double> snr_out_db;
  std::optional<double> snr_improvement_db;
  double stoi_in = 0.0;
  double stoi_out = 0.0;
  double stoi_improvement = 0.0;
  std::string method;
  ChannelPartition partition;
  std::string spp_mode;
  std::optional<std::size_t> spp_channel;
  std::vector<std::string> flags;
};

// clean_ref / noisy_ref are the single-channel speech component and mixture at
// the reference channel. Input SNR uses noise = noisy - clean; output SNR uses
// the shadow-filtered components, and is omitted (flag "no_ground_truth")
// when those are absent.
MetricsReport evaluate(const EnhanceResult& result, const AudioClip& clean_ref, const AudioClip& noisy_ref);

// Same computation from individual signals; shadow components are optional.
MetricsReport evaluate_signals(const AudioClip& clean_ref, const AudioClip& noisy_ref,
                               const AudioClip& processed, const AudioClip* shadow_speech,
                               const AudioClip* shadow_noise);

}  // namespace egomwf
