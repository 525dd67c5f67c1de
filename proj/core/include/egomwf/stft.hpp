#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "egomwf/audio_io.hpp"

namespace egomwf {

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class WindowKind {
  SqrtHannPeriodic,
  Rectangular,  // test-only
};

struct StftParams {
  std::size_t fft_size = 512;
  std::size_t hop = 256;
  WindowKind window = WindowKind::SqrtHannPeriodic;
  int sample_rate_hz = 16000;

  std::size_t bins() const noexcept { return fft_size / 2 + 1; }
  // Frames needed so that every sample past the first hop is covered by
  // fft_size / hop frames; trailing frames are zero-padded.
  std::size_t frames_for(std::size_t samples) const noexcept;

  void validate() const;
  friend bool operator==(const StftParams&, const StftParams&) = default;
};

std::vector<double> analysis_window(const StftParams& params);

// One-sided STFT tensor, bins x frames x channels. The channel vector of a
// (bin, frame) point is contiguous, which is the access pattern of the
// covariance and filtering stages.
class StftGrid {
 public:
  StftGrid() = default;
  StftGrid(StftParams params, std::size_t frames, std::size_t channels,
           std::optional<std::size_t> signal_length = std::nullopt);

  const StftParams& params() const noexcept { return params_; }
  std::size_t bins() const noexcept { return params_.bins(); }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t channels() const noexcept { return channels_; }
  std::optional<std::size_t> signal_length() const noexcept { return length_; }

  cdouble& at(std::size_t bin, std::size_t frame, std::size_t ch) {
    return data_[(bin * frames_ + frame) * channels_ + ch];
  }
  cdouble at(std::size_t bin, std::size_t frame, std::size_t ch) const {
    return data_[(bin * frames_ + frame) * channels_ + ch];
  }

  std::span<const cdouble> point(std::size_t bin, std::size_t frame) const {
    return {data_.data() + (bin * frames_ + frame) * channels_, channels_};
  }
  // All frames of one bin: a channels x frames column-major block.
  Eigen::Map<const ComplexMatrix> bin_block(std::size_t bin) const {
    return {data_.data() + bin * frames_ * channels_, static_cast<Eigen::Index>(channels_),
            static_cast<Eigen::Index>(frames_)};
  }

  // bins x frames spectrogram of a single channel.
  ComplexMatrix channel_slice(std::size_t ch) const;

  StftGrid select_channels(std::span<const std::size_t> channels) const;
  void scale(double factor);

 private:
  StftParams params_;
  std::size_t frames_ = 0;
  std::size_t channels_ = 0;
  std::optional<std::size_t> length_;
  std::vector<cdouble> data_;
};

// Frame f covers samples [f*hop, f*hop + fft_size); windowed then transformed.
StftGrid analyze(const AudioClip& clip, const StftParams& params);

// Weighted overlap-add with the matched synthesis window. Output is trimmed to
// the analyzed length when the grid records it.
AudioClip synthesize(const StftGrid& grid);

// Single-channel synthesis of a bins x frames spectrogram.
std::vector<double> synthesize(const ComplexMatrix& spectrogram, const StftParams& params,
                               std::optional<std::size_t> length = std::nullopt);

}  // namespace egomwf
