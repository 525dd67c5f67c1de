#pragma once

#include <optional>
#include <string>
#include <vector>

#include "egomwf/audio_io.hpp"
#include "egomwf/filters.hpp"
#include "egomwf/spp.hpp"
#include "egomwf/stft.hpp"

namespace egomwf {

// The three filter variants compared in the evaluation grid.
enum class EnhanceMethod {
  Mwf,               // speech+noise channels only
  MwfWithNoiseMics,  // standard MWF over speech+noise and noise-only channels
  PkMwf,             // prior-knowledge MWF, noise-only channels as blocking references
};

const char* to_string(EnhanceMethod method) noexcept;
EnhanceMethod enhance_method_from_string(const std::string& name);

struct EnhanceConfig {
  StftParams stft;
  SppParams spp;
  SppSource spp_source;  // channel is an index into the input clip
  ChannelPartition partition;
  EnhanceMethod method = EnhanceMethod::PkMwf;
  double regularization_delta = 1e-6;
  std::size_t threads = 1;

  // Partition actually fed to the filter: noise-only channels are dropped for Mwf.
  ChannelPartition effective_partition() const;
  FilterMethod filter_method() const noexcept;

  std::vector<std::string> violations(std::size_t input_channels = 0) const;
  void validate(std::size_t input_channels = 0) const;
};

// Separately known components of the input, mixture = speech + noise.
struct GroundTruth {
  AudioClip speech;
  AudioClip noise;
};

struct EnhanceResult {
  AudioClip enhanced;                   // single channel, the reference estimate
  std::optional<AudioClip> shadow_speech;
  std::optional<AudioClip> shadow_noise;
  FilterBank filterbank;
  SppMask mask;
  std::vector<std::string> warnings;
};

// d(k, l) = w(k)^H y(k, l); grid channels must be in filter-bank order.
ComplexMatrix apply_filterbank(const StftGrid& grid, const FilterBank& fb);

// analyze -> SPP -> correlations -> regularize -> filters -> apply -> synthesize.
// Inputs whose rate differs from cfg.stft.sample_rate_hz are resampled first.
// When `truth` is given the same filter bank is applied to each component
// (shadow filtering). Oracle SPP mode uses `oracle` if given, otherwise builds
// the mask from `truth` at the reference channel.
EnhanceResult enhance(const AudioClip& mixture, const EnhanceConfig& cfg,
                      const GroundTruth* truth = nullptr, const SppMask* oracle = nullptr);

}  // namespace egomwf
