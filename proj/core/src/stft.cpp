#include "egomwf/stft.hpp"

#include <algorithm>
#include <cmath>

#include "egomwf/error.hpp"
#include "egomwf/fft.hpp"

namespace egomwf {

std::size_t StftParams::frames_for(std::size_t samples) const noexcept {
  if (samples == 0) return 0;
  return (samples - 1) / hop + 1;
}

void StftParams::validate() const {
  std::vector<std::string> bad;
  if (fft_size < 8 || fft_size % 2 != 0) bad.emplace_back("stft.fft_size must be even and >= 8");
  if (hop == 0 || hop > fft_size) bad.emplace_back("stft.hop must be in [1, fft_size]");
  if (window == WindowKind::SqrtHannPeriodic && hop * 2 != fft_size)
    bad.emplace_back("stft.hop must equal fft_size/2 for the sqrt-Hann window");
  if (sample_rate_hz <= 0) bad.emplace_back("stft.sample_rate_hz must be positive");
  if (!bad.empty()) throw ConfigError(std::move(bad));
}

std::vector<double> analysis_window(const StftParams& params) {
  std::vector<double> w(params.fft_size, 1.0);
  if (params.window == WindowKind::SqrtHannPeriodic) {
    const double n = static_cast<double>(params.fft_size);
    for (std::size_t t = 0; t < params.fft_size; ++t)
      w[t] = std::sqrt(0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(t) / n));
  }
  return w;
}

StftGrid::StftGrid(StftParams params, std::size_t frames, std::size_t channels,
                   std::optional<std::size_t> signal_length)
    : params_(params), frames_(frames), channels_(channels), length_(signal_length),
      data_(params.bins() * frames * channels) {}

ComplexMatrix StftGrid::channel_slice(std::size_t ch) const {
  if (ch >= channels_) throw Error("StftGrid: channel " + std::to_string(ch) + " out of range");
  ComplexMatrix out(static_cast<Eigen::Index>(bins()), static_cast<Eigen::Index>(frames_));
  for (std::size_t k = 0; k < bins(); ++k)
    for (std::size_t l = 0; l < frames_; ++l) out(k, l) = at(k, l, ch);
  return out;
}

StftGrid StftGrid::select_channels(std::span<const std::size_t> channels) const {
  for (auto c : channels)
    if (c >= channels_) throw Error("StftGrid: channel " + std::to_string(c) + " out of range");
  StftGrid out(params_, frames_, channels.size(), length_);
  for (std::size_t k = 0; k < bins(); ++k)
    for (std::size_t l = 0; l < frames_; ++l)
      for (std::size_t i = 0; i < channels.size(); ++i) out.at(k, l, i) = at(k, l, channels[i]);
  return out;
}

void StftGrid::scale(double factor) {
  for (auto& v : data_) v *= factor;
}

StftGrid analyze(const AudioClip& clip, const StftParams& params) {
  params.validate();
  if (clip.sample_rate_hz() != params.sample_rate_hz)
    throw Error("analyze: clip rate " + std::to_string(clip.sample_rate_hz()) +
                " Hz does not match STFT rate " + std::to_string(params.sample_rate_hz) + " Hz");
  if (clip.frames() < params.fft_size)
    throw Error("analyze: clip shorter than one frame (" + std::to_string(clip.frames()) +
                " < " + std::to_string(params.fft_size) + " samples)");

  const std::size_t n = params.fft_size;
  const std::size_t frames = params.frames_for(clip.frames());
  const auto window = analysis_window(params);
  StftGrid grid(params, frames, clip.channels(), clip.frames());

  RealFft fft(n);
  std::vector<double> buf(n);
  std::vector<cdouble> spec(params.bins());
  for (std::size_t c = 0; c < clip.channels(); ++c) {
    const auto x = clip.channel(c);
    for (std::size_t l = 0; l < frames; ++l) {
      const std::size_t start = l * params.hop;
      const std::size_t avail = std::min(n, x.size() - start);
      for (std::size_t t = 0; t < avail; ++t) buf[t] = x[start + t] * window[t];
      std::fill(buf.begin() + static_cast<std::ptrdiff_t>(avail), buf.end(), 0.0);
      fft.forward(buf, spec);
      for (std::size_t k = 0; k < spec.size(); ++k) grid.at(k, l, c) = spec[k];
    }
  }
  return grid;
}

namespace {

// Overlap-add normalization: sum over shifts of analysis * synthesis window.
double cola_constant(const std::vector<double>& w, std::size_t hop) {
  double sum = 0.0;
  for (std::size_t t = 0; t < w.size(); t += hop) sum += w[t] * w[t];
  return sum;
}

class OverlapAdd {
 public:
  explicit OverlapAdd(const StftParams& params)
      : params_(params), window_(analysis_window(params)), fft_(params.fft_size),
        frame_(params.fft_size) {
    gain_ = 1.0 / cola_constant(window_, params.hop);
  }

  template <typename SpectrumAt>
  std::vector<double> run(std::size_t frames, std::size_t length, SpectrumAt&& spectrum_at) {
    const std::size_t n = params_.fft_size;
    const std::size_t full = (frames == 0 ? 0 : (frames - 1) * params_.hop + n);
    std::vector<double> out(std::max(full, length), 0.0);
    std::vector<cdouble> spec(params_.bins());
    for (std::size_t l = 0; l < frames; ++l) {
      for (std::size_t k = 0; k < spec.size(); ++k) spec[k] = spectrum_at(k, l);
      fft_.inverse(spec, frame_);
      const std::size_t start = l * params_.hop;
      for (std::size_t t = 0; t < n; ++t) out[start + t] += frame_[t] * window_[t] * gain_;
    }
    out.resize(length);
    return out;
  }

 private:
  StftParams params_;
  std::vector<double> window_;
  RealFft fft_;
  std::vector<double> frame_;
  double gain_ = 1.0;
};

}  // namespace

AudioClip synthesize(const StftGrid& grid) {
  const auto& params = grid.params();
  params.validate();
  const std::size_t length = grid.signal_length().value_or(
      grid.frames() == 0 ? 0 : (grid.frames() - 1) * params.hop + params.fft_size);
  if (grid.signal_length() && params.frames_for(length) != grid.frames())
    throw Error("synthesize: frame count inconsistent with recorded signal length");

  OverlapAdd ola(params);
  std::vector<std::vector<double>> channels;
  channels.reserve(grid.channels());
  for (std::size_t c = 0; c < grid.channels(); ++c)
    channels.push_back(
        ola.run(grid.frames(), length, [&](std::size_t k, std::size_t l) { return grid.at(k, l, c); }));
  return AudioClip(std::move(channels), params.sample_rate_hz);
}

std::vector<double> synthesize(const ComplexMatrix& spectrogram, const StftParams& params,
                               std::optional<std::size_t> length) {
  params.validate();
  if (static_cast<std::size_t>(spectrogram.rows()) != params.bins())
    throw Error("synthesize: spectrogram has " + std::to_string(spectrogram.rows()) +
                " bins, expected " + std::to_string(params.bins()));
  const auto frames = static_cast<std::size_t>(spectrogram.cols());
  const std::size_t len =
      length.value_or(frames == 0 ? 0 : (frames - 1) * params.hop + params.fft_size);
  if (length && params.frames_for(len) != frames)
    throw Error("synthesize: frame count inconsistent with requested length");
  OverlapAdd ola(params);
  return ola.run(frames, len, [&](std::size_t k, std::size_t l) {
    return spectrogram(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  });
}

}  // namespace egomwf
