#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace egomwf {

// Multichannel real signal, de-interleaved: one contiguous row per channel.
class AudioClip {
 public:
  AudioClip() = default;
  AudioClip(std::size_t channels, std::size_t frames, int sample_rate_hz);
  AudioClip(std::vector<std::vector<double>> channels, int sample_rate_hz);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t frames() const noexcept { return frames_; }
  int sample_rate_hz() const noexcept { return rate_; }
  bool empty() const noexcept { return channels_ == 0 || frames_ == 0; }

  std::span<double> channel(std::size_t c);
  std::span<const double> channel(std::size_t c) const;

  double& at(std::size_t c, std::size_t t) { return data_[c * frames_ + t]; }
  double at(std::size_t c, std::size_t t) const { return data_[c * frames_ + t]; }

  // Copy of a subset of channels, in the given order.
  AudioClip select(std::span<const std::size_t> channels) const;
  AudioClip single(std::size_t c) const;

  // Throws Error when a sample is NaN/Inf or the rate is not positive.
  void validate() const;

  friend bool operator==(const AudioClip&, const AudioClip&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  int rate_ = 0;
  std::vector<double> data_;
};

enum class BitDepth { Pcm16, Float32 };

// PCM 16/24/32-bit integer and 32-bit float WAV (plain or extensible header).
AudioClip read_wav(const std::filesystem::path& path);

// Samples are clamped to [-1, 1] before integer quantization.
void write_wav(const AudioClip& clip, const std::filesystem::path& path,
               BitDepth depth = BitDepth::Float32);

// Rational polyphase resampler. Kaiser-windowed sinc, 64 taps per phase,
// cutoff at 0.9 of the lower Nyquist frequency. Output length is
// ceil(frames * target / source).
AudioClip resample(const AudioClip& clip, int target_rate_hz);

// Single-channel convenience overload used by the metrics.
std::vector<double> resample(std::span<const double> x, int source_rate_hz,
                             int target_rate_hz);

}  // namespace egomwf
