#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "egomwf/covariance.hpp"
#include "egomwf/gevd.hpp"

namespace egomwf {

// Channels (indices into the analyzed input) split into speech+noise array
// channels and noise-only reference channels. Filter math always uses the
// canonical order: speech+noise channels first, then noise-only channels.
struct ChannelPartition {
  std::vector<std::size_t> speech_noise_channels;
  std::vector<std::size_t> noise_only_channels;
  std::size_t ref_channel = 0;  // position within speech_noise_channels

  std::size_t m_sn() const noexcept { return speech_noise_channels.size(); }
  std::size_t m_n() const noexcept { return noise_only_channels.size(); }
  std::size_t size() const noexcept { return m_sn() + m_n(); }
  std::vector<std::size_t> canonical_channels() const;
  std::size_t ref_input_channel() const { return speech_noise_channels.at(ref_channel); }

  // Collects all violations; total_channels = 0 skips the range check.
  std::vector<std::string> violations(std::size_t total_channels = 0) const;
  void validate(std::size_t total_channels = 0) const;

  friend bool operator==(const ChannelPartition&, const ChannelPartition&) = default;
};

struct SelectionBlocking {
  Eigen::MatrixXd h;  // M x M_sn, [I; 0]
  Eigen::MatrixXd b;  // M x M_n,  [0; I]
};

SelectionBlocking build_selection_blocking(const ChannelPartition& partition);

enum class FilterMethod { Mwf, PkMwf };
const char* to_string(FilterMethod method) noexcept;

enum class BinStatus : unsigned char {
  Ok,
  NoSpeechFrames,  // suppressed, w = 0
  NoNoiseFrames,   // passthrough, w = e_d
  ClampedGain,     // sigma_y1 < sigma_n1, w = 0
  Singular,        // noise matrix not PD even after loading, w = 0
};
inline constexpr std::size_t kBinStatusCount = 5;
const char* to_string(BinStatus status) noexcept;

struct BinFilter {
  ComplexVector w;
  BinStatus status = BinStatus::Ok;
};

// max(0, 1 - sigma_n1 / sigma_y1)
double wiener_gain(const PencilDecomposition& d, bool* clamped = nullptr);

// Q^{-H} diag(g, 0, ..., 0) Q^H e_ref
ComplexVector rank1_wiener_weights(const PencilDecomposition& d, std::size_t ref, double gain);

// Q diag(max(0, sigma_y1 - sigma_n1), 0, ..., 0) Q^H
ComplexMatrix rank1_speech_covariance(const PencilDecomposition& d);

// Standard GEVD-based MWF. stats must already be regularized.
BinFilter compute_mwf(const BinStatistics& stats, std::size_t ref);

// LCMV / GSC stage: C = H - B (B^H R B)^{-1} B^H R H.
ComplexMatrix compute_gsc(const ComplexMatrix& r_nn, const Eigen::MatrixXd& h,
                          const Eigen::MatrixXd& b);

struct PkMwfSolution {
  ComplexMatrix c;                // M x M_sn
  PencilDecomposition reduced;    // of {C^H R_yy C, C^H R_nn C}
  BinFilter filter;
  // H Q_red diag(max(0, sigma_y1 - sigma_n1), 0, ...) Q_red^H H^H
  ComplexMatrix speech_covariance(const Eigen::MatrixXd& h) const;
};

// Full solution; stats must be in canonical partition order and regularized.
// Throws on fallback bins (zero frame counts) since no decomposition exists.
PkMwfSolution solve_pkmwf(const BinStatistics& stats, const ChannelPartition& partition);

// Prior-knowledge MWF weights with the same per-bin fallbacks as compute_mwf.
BinFilter compute_pkmwf(const BinStatistics& stats, const ChannelPartition& partition);

struct FilterBank {
  ComplexMatrix weights;  // bins x M, canonical partition order
  FilterMethod method = FilterMethod::Mwf;
  ChannelPartition partition;
  std::vector<BinStatus> status;

  std::size_t bins() const noexcept { return static_cast<std::size_t>(weights.rows()); }
  std::size_t channels() const noexcept { return static_cast<std::size_t>(weights.cols()); }
  std::array<std::size_t, kBinStatusCount> status_counts() const;
};

// Regularizes each bin's statistics with `delta`, then computes its filter.
// Bins are independent; `threads` workers split them.
FilterBank compute_filterbank(const std::vector<BinStatistics>& stats,
                              const ChannelPartition& partition, FilterMethod method,
                              double delta = 1e-6, std::size_t threads = 1);

}  // namespace egomwf
