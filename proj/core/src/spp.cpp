#include "egomwf/spp.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "egomwf/error.hpp"

namespace egomwf {

void SppParams::validate() const {
  std::vector<std::string> bad;
  if (!(xi_h1 > 0.0)) bad.emplace_back("spp.xi_h1 must be > 0");
  if (!(alpha_psd > 0.0 && alpha_psd < 1.0)) bad.emplace_back("spp.alpha_psd must be in (0, 1)");
  if (!(spp_cap > 0.0 && spp_cap < 1.0)) bad.emplace_back("spp.spp_cap must be in (0, 1)");
  if (!(threshold > 0.0 && threshold < 1.0)) bad.emplace_back("spp.threshold must be in (0, 1)");
  if (init_frames == 0) bad.emplace_back("spp.init_frames must be >= 1");
  if (!bad.empty()) throw ConfigError(std::move(bad));
}

const char* to_string(SppMode mode) noexcept {
  switch (mode) {
    case SppMode::Internal: return "internal";
    case SppMode::External: return "external";
    case SppMode::Oracle: return "oracle";
  }
  return "?";
}

SppMode spp_mode_from_string(const std::string& name) {
  if (name == "internal" || name == "ispp") return SppMode::Internal;
  if (name == "external" || name == "xspp") return SppMode::External;
  if (name == "oracle") return SppMode::Oracle;
  throw ConfigError("unknown SPP mode '" + name + "' (expected internal, external or oracle)");
}

double SppMask::active_fraction() const {
  if (beta.size() == 0) return 0.0;
  return beta.cast<double>().mean();
}

SppMask estimate_spp(const ComplexMatrix& spectrogram, const SppParams& params, SppSource source) {
  params.validate();
  const auto bins = spectrogram.rows();
  const auto frames = spectrogram.cols();
  if (static_cast<std::size_t>(frames) < params.init_frames)
    throw Error("estimate_spp: " + std::to_string(frames) + " frames available, " +
                std::to_string(params.init_frames) + " needed for initialization");

  const double xi = params.xi_h1;
  const double floor = std::numeric_limits<double>::epsilon();
  const auto init = static_cast<Eigen::Index>(params.init_frames);

  SppMask mask{RealMatrix(bins, frames), MaskMatrix(bins, frames), source};
  for (Eigen::Index k = 0; k < bins; ++k) {
    double noise_psd = spectrogram.row(k).head(init).cwiseAbs2().mean();
    if (!(noise_psd > 0.0)) noise_psd = floor;
    for (Eigen::Index l = 0; l < frames; ++l) {
      const double power = std::norm(spectrogram(k, l));
      const double p = speech_presence(power / noise_psd, xi);
      mask.spp(k, l) = p;
      mask.beta(k, l) = p >= params.threshold ? 1 : 0;

      const double capped = std::min(p, params.spp_cap);
      const double periodogram = capped * noise_psd + (1.0 - capped) * power;
      noise_psd = params.alpha_psd * noise_psd + (1.0 - params.alpha_psd) * periodogram;
      noise_psd = std::max(noise_psd, std::numeric_limits<double>::min());
    }
  }
  return mask;
}

ComplexMatrix select_spp_channel(const StftGrid& grid, SppMode mode, std::size_t channel) {
  if (mode == SppMode::Oracle) throw Error("select_spp_channel: oracle mode has no source channel");
  if (channel >= grid.channels())
    throw Error("select_spp_channel: channel " + std::to_string(channel) +
                " out of range for " + std::to_string(grid.channels()) + "-channel grid");
  return grid.channel_slice(channel);
}

SppMask oracle_mask(const ComplexMatrix& speech, const ComplexMatrix& noise) {
  if (speech.rows() != noise.rows() || speech.cols() != noise.cols())
    throw Error("oracle_mask: speech and noise spectrogram shapes differ");
  SppMask mask{RealMatrix(speech.rows(), speech.cols()), MaskMatrix(speech.rows(), speech.cols()),
               SppSource{SppMode::Oracle, 0}};
  for (Eigen::Index k = 0; k < speech.rows(); ++k) {
    for (Eigen::Index l = 0; l < speech.cols(); ++l) {
      const double s = std::norm(speech(k, l));
      const double n = std::norm(noise(k, l));
      const bool active = s > 0.0 && s >= n;
      mask.beta(k, l) = active ? 1 : 0;
      mask.spp(k, l) = active ? 1.0 : 0.0;
    }
  }
  return mask;
}

}  // namespace egomwf
