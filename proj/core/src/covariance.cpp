#include "egomwf/covariance.hpp"

#include <algorithm>

#include "egomwf/error.hpp"

namespace egomwf {

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

std::vector<BinStatistics> estimate_correlations(const StftGrid& grid, const SppMask& mask,
                                                 std::span<const std::size_t> channels) {
  if (mask.bins() != grid.bins() || mask.frames() != grid.frames())
    throw Error("estimate_correlations: mask is " + std::to_string(mask.bins()) + "x" +
                std::to_string(mask.frames()) + ", grid is " + std::to_string(grid.bins()) + "x" +
                std::to_string(grid.frames()));
  if (channels.empty()) throw Error("estimate_correlations: empty channel list");
  std::vector<bool> seen(grid.channels(), false);
  for (auto c : channels) {
    if (c >= grid.channels())
      throw Error("estimate_correlations: channel " + std::to_string(c) + " out of range");
    if (seen[c]) throw Error("estimate_correlations: duplicate channel " + std::to_string(c));
    seen[c] = true;
  }

  const auto m = static_cast<Eigen::Index>(channels.size());
  const auto frames = static_cast<Eigen::Index>(grid.frames());
  std::vector<BinStatistics> out(grid.bins());

  ComplexMatrix on(m, frames), off(m, frames);
  for (std::size_t k = 0; k < grid.bins(); ++k) {
    const auto block = grid.bin_block(k);
    Eigen::Index n_on = 0, n_off = 0;
    for (Eigen::Index l = 0; l < frames; ++l) {
      auto& dst = mask.beta(static_cast<Eigen::Index>(k), l) ? on : off;
      auto& col = mask.beta(static_cast<Eigen::Index>(k), l) ? n_on : n_off;
      for (Eigen::Index i = 0; i < m; ++i) dst(i, col) = block(static_cast<Eigen::Index>(channels[i]), l);
      ++col;
    }

    BinStatistics& s = out[k];
    s.bin_index = k;
    s.l_on = static_cast<std::size_t>(n_on);
    s.l_off = static_cast<std::size_t>(n_off);
    s.r_yy = ComplexMatrix::Zero(m, m);
    s.r_nn = ComplexMatrix::Zero(m, m);
    if (n_on > 0) {
      const auto y = on.leftCols(n_on);
      s.r_yy = hermitian_part((y * y.adjoint()) / static_cast<double>(n_on));
    }
    if (n_off > 0) {
      const auto y = off.leftCols(n_off);
      s.r_nn = hermitian_part((y * y.adjoint()) / static_cast<double>(n_off));
    }
  }
  return out;
}

BinStatistics regularize(BinStatistics stats, double delta) {
  if (delta < 0.0) throw Error("regularize: delta must be >= 0");
  if (delta == 0.0) return stats;
  const auto m = stats.r_nn.rows();
  if (m == 0) return stats;
  double trace = stats.r_nn.trace().real();
  if (trace <= 0.0) trace = stats.r_yy.trace().real();
  const double load = delta * trace / static_cast<double>(m);
  stats.r_nn.diagonal().array() += load;
  return stats;
}

}  // namespace egomwf
