#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "egomwf/audio_io.hpp"
#include "egomwf/covariance.hpp"
#include "egomwf/filters.hpp"

namespace egomwf::test {

using Rng = std::mt19937_64;

inline ComplexMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cdouble(n(rng), n(rng));
  return m;
}

inline ComplexMatrix random_hermitian(Rng& rng, Eigen::Index m) {
  const ComplexMatrix a = random_complex(rng, m, m);
  return (a + a.adjoint()) / 2.0;
}

// B B^H / m + shift I, comfortably positive definite.
inline ComplexMatrix random_pd(Rng& rng, Eigen::Index m, double shift = 0.1) {
  const ComplexMatrix b = random_complex(rng, m, m);
  ComplexMatrix a = b * b.adjoint() / static_cast<double>(m);
  a.diagonal().array() += shift;
  return (a + a.adjoint()) / 2.0;
}

// Speech-like pair: r_nn PD, r_yy = r_nn + rank-1 PSD, as estimated stats look.
inline BinStatistics random_stats(Rng& rng, Eigen::Index m, std::size_t l_on = 50, std::size_t l_off = 50) {
  BinStatistics s;
  s.r_nn = random_pd(rng, m);
  const ComplexMatrix a = random_complex(rng, m, 1);
  s.r_yy = s.r_nn + 2.0 * a * a.adjoint();
  s.r_yy = (s.r_yy + s.r_yy.adjoint()) / 2.0;
  s.l_on = l_on;
  s.l_off = l_off;
  return s;
}

inline std::vector<double> random_signal(Rng& rng, std::size_t n, double scale = 0.5) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

inline AudioClip random_clip(Rng& rng, std::size_t channels, std::size_t frames, int rate = 16000) {
  std::vector<std::vector<double>> data;
  for (std::size_t c = 0; c < channels; ++c) data.push_back(random_signal(rng, frames));
  return AudioClip(std::move(data), rate);
}

inline double rel_err(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double n = b.norm();
  return n == 0.0 ? a.norm() : (a - b).norm() / n;
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("egomwf_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline ChannelPartition make_partition(std::size_t m_sn, std::size_t m_n, std::size_t ref = 0) {
  ChannelPartition p;
  for (std::size_t i = 0; i < m_sn; ++i) p.speech_noise_channels.push_back(i);
  for (std::size_t i = 0; i < m_n; ++i) p.noise_only_channels.push_back(m_sn + i);
  p.ref_channel = ref;
  return p;
}

}  // namespace egomwf::test
