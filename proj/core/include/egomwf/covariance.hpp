#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "egomwf/spp.hpp"
#include "egomwf/stft.hpp"

namespace egomwf {

struct BinStatistics {
  ComplexMatrix r_yy;  // speech-active frames
  ComplexMatrix r_nn;  // speech-inactive frames
  std::size_t l_on = 0;
  std::size_t l_off = 0;
  std::size_t bin_index = 0;

  std::size_t channels() const noexcept { return static_cast<std::size_t>(r_yy.rows()); }
};

// Per-bin batch estimates of the speech+noise and noise-only correlation
// matrices over the listed channels (in list order). A matrix whose frame
// count is zero is left at zero; the filter stage decides what to do.
std::vector<BinStatistics> estimate_correlations(const StftGrid& grid, const SppMask& mask,
                                                 std::span<const std::size_t> channels);

// Diagonal loading of r_nn by delta * trace(r_nn)/M; falls back to r_yy's
// trace when r_nn is identically zero.
BinStatistics regularize(BinStatistics stats, double delta = 1e-6);

// (A + A^H) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& a);

}  // namespace egomwf
