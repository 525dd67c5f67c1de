#include "egomwf/pipeline.hpp"

#include <algorithm>

#include "egomwf/covariance.hpp"
#include "egomwf/error.hpp"

namespace egomwf {

const char* to_string(EnhanceMethod method) noexcept {
  switch (method) {
    case EnhanceMethod::Mwf: return "mwf";
    case EnhanceMethod::MwfWithNoiseMics: return "mwf-with-noise-mics";
    case EnhanceMethod::PkMwf: return "pk-mwf";
  }
  return "?";
}

EnhanceMethod enhance_method_from_string(const std::string& name) {
  if (name == "mwf") return EnhanceMethod::Mwf;
  if (name == "mwf-with-noise-mics") return EnhanceMethod::MwfWithNoiseMics;
  if (name == "pk-mwf" || name == "pkmwf") return EnhanceMethod::PkMwf;
  throw ConfigError("unknown method '" + name + "' (expected mwf, mwf-with-noise-mics or pk-mwf)");
}

ChannelPartition EnhanceConfig::effective_partition() const {
  ChannelPartition p = partition;
  if (method == EnhanceMethod::Mwf) p.noise_only_channels.clear();
  return p;
}

FilterMethod EnhanceConfig::filter_method() const noexcept {
  return method == EnhanceMethod::PkMwf ? FilterMethod::PkMwf : FilterMethod::Mwf;
}

std::vector<std::string> EnhanceConfig::violations(std::size_t input_channels) const {
  std::vector<std::string> bad;
  auto absorb = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      bad.insert(bad.end(), e.violations().begin(), e.violations().end());
    }
  };
  absorb([&] { stft.validate(); });
  absorb([&] { spp.validate(); });
  auto part = partition.violations(input_channels);
  bad.insert(bad.end(), part.begin(), part.end());
  if (method != EnhanceMethod::Mwf && partition.noise_only_channels.empty())
    bad.push_back(std::string("method ") + to_string(method) +
                  " needs at least one noise_only channel");
  if (spp_source.mode != SppMode::Oracle && input_channels != 0 &&
      spp_source.channel >= input_channels)
    bad.push_back("spp channel " + std::to_string(spp_source.channel) + " is out of range (input has " +
                  std::to_string(input_channels) + " channels)");
  if (!(regularization_delta >= 0.0)) bad.emplace_back("regularization_delta must be >= 0");
  if (threads == 0) bad.emplace_back("threads must be >= 1");
  return bad;
}

void EnhanceConfig::validate(std::size_t input_channels) const {
  auto bad = violations(input_channels);
  if (!bad.empty()) throw ConfigError(std::move(bad));
}

ComplexMatrix apply_filterbank(const StftGrid& grid, const FilterBank& fb) {
  if (grid.channels() != fb.channels() || grid.bins() != fb.bins())
    throw Error("apply_filterbank: grid is " + std::to_string(grid.bins()) + " bins x " +
                std::to_string(grid.channels()) + " channels, filter bank is " +
                std::to_string(fb.bins()) + " x " + std::to_string(fb.channels()));
  ComplexMatrix out(static_cast<Eigen::Index>(grid.bins()), static_cast<Eigen::Index>(grid.frames()));
  for (std::size_t k = 0; k < grid.bins(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    // w^H Y for the whole bin at once
    out.row(kk) = fb.weights.row(kk).conjugate() * grid.bin_block(k);
  }
  return out;
}

namespace {

AudioClip at_rate(const AudioClip& clip, int rate) {
  return clip.sample_rate_hz() == rate ? clip : resample(clip, rate);
}

AudioClip filter_component(const AudioClip& component, const std::vector<std::size_t>& channels,
                           const FilterBank& fb, const StftParams& params) {
  const StftGrid grid = analyze(component, params).select_channels(channels);
  auto samples = synthesize(apply_filterbank(grid, fb), params, component.frames());
  return AudioClip({std::move(samples)}, params.sample_rate_hz);
}

}  // namespace

EnhanceResult enhance(const AudioClip& mixture_in, const EnhanceConfig& cfg, const GroundTruth* truth,
                      const SppMask* oracle) {
  cfg.validate(mixture_in.channels());
  const StftParams& params = cfg.stft;
  const AudioClip mixture = at_rate(mixture_in, params.sample_rate_hz);

  std::optional<GroundTruth> gt;
  if (truth) {
    gt = GroundTruth{at_rate(truth->speech, params.sample_rate_hz), at_rate(truth->noise, params.sample_rate_hz)};
    if (gt->speech.channels() != mixture.channels() || gt->noise.channels() != mixture.channels() ||
        gt->speech.frames() != mixture.frames() || gt->noise.frames() != mixture.frames())
      throw Error("enhance: ground-truth components do not match the mixture shape");
  }

  const StftGrid grid = analyze(mixture, params);
  const ChannelPartition partition = cfg.effective_partition();
  const std::vector<std::size_t> channels = partition.canonical_channels();

  EnhanceResult result;
  switch (cfg.spp_source.mode) {
    case SppMode::Internal:
    case SppMode::External:
      result.mask = estimate_spp(select_spp_channel(grid, cfg.spp_source.mode, cfg.spp_source.channel),
                                 cfg.spp, cfg.spp_source);
      break;
    case SppMode::Oracle:
      if (oracle) {
        result.mask = *oracle;
      } else if (gt) {
        const std::size_t ref = partition.ref_input_channel();
        result.mask = oracle_mask(analyze(gt->speech.single(ref), params).channel_slice(0),
                                  analyze(gt->noise.single(ref), params).channel_slice(0));
      } else {
        throw ConfigError("oracle SPP mode needs ground-truth components or a precomputed mask");
      }
      break;
  }

  const auto stats = estimate_correlations(grid, result.mask, channels);
  result.filterbank =
      compute_filterbank(stats, partition, cfg.filter_method(), cfg.regularization_delta, cfg.threads);

  const auto counts = result.filterbank.status_counts();
  const std::size_t fallbacks = result.filterbank.bins() - counts[static_cast<std::size_t>(BinStatus::Ok)];
  if (fallbacks == result.filterbank.bins())
    result.warnings.emplace_back("all frequency bins are in fallback status");

  const StftGrid selected = grid.select_channels(channels);
  auto samples = synthesize(apply_filterbank(selected, result.filterbank), params, mixture.frames());
  result.enhanced = AudioClip({std::move(samples)}, params.sample_rate_hz);

  if (gt) {
    result.shadow_speech = filter_component(gt->speech, channels, result.filterbank, params);
    result.shadow_noise = filter_component(gt->noise, channels, result.filterbank, params);
  }
  return result;
}

}  // namespace egomwf
