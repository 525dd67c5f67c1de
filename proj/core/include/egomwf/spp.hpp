#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <string>

#include "egomwf/stft.hpp"

namespace egomwf {

struct SppParams {
  double xi_h1 = 31.622776601683793;  // 15 dB a-priori SNR under H1
  double alpha_psd = 0.8;
  double spp_cap = 0.99;
  std::size_t init_frames = 5;
  double threshold = 0.5;

  void validate() const;
};

enum class SppMode { Internal, External, Oracle };

const char* to_string(SppMode mode) noexcept;
SppMode spp_mode_from_string(const std::string& name);

struct SppSource {
  SppMode mode = SppMode::Internal;
  std::size_t channel = 0;  // index into the analyzed grid; unused for Oracle
};

using RealMatrix = Eigen::MatrixXd;
using MaskMatrix = Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic>;

struct SppMask {
  RealMatrix spp;   // bins x frames, in [0, 1]
  MaskMatrix beta;  // bins x frames, 1 = speech active
  SppSource source;

  std::size_t bins() const noexcept { return static_cast<std::size_t>(spp.rows()); }
  std::size_t frames() const noexcept { return static_cast<std::size_t>(spp.cols()); }
  double active_fraction() const;
};

// Closed-form posterior under the fixed a-priori SNR: 1 / (1 + (1+xi) exp(-gamma xi/(1+xi))).
inline double speech_presence(double gamma, double xi) {
  return 1.0 / (1.0 + (1.0 + xi) * std::exp(-gamma * xi / (1.0 + xi)));
}

// Per-bin recursive noise-PSD tracking with the posterior above; the PSD is
// initialized from the mean periodogram of the first init_frames frames.
SppMask estimate_spp(const ComplexMatrix& spectrogram, const SppParams& params,
                     SppSource source = {});

ComplexMatrix select_spp_channel(const StftGrid& grid, SppMode mode, std::size_t channel);

// Ground-truth mask: beta = 1 where speech power >= noise power (0 dB) and the
// speech component is nonzero. spp holds the same 0/1 values.
SppMask oracle_mask(const ComplexMatrix& speech, const ComplexMatrix& noise);

}  // namespace egomwf
