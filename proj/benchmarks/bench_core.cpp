#include <benchmark/benchmark.h>

#include <random>

#include "egomwf/filters.hpp"
#include "egomwf/gevd.hpp"
#include "egomwf/stft.hpp"

namespace egomwf {
namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = cdouble(g(rng), g(rng));
  return a;
}

// Noise PD plus a rank-1 speech term, as one bin's statistics look after
// regularization.
BinStatistics make_stats(Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ComplexMatrix x = random_matrix(rng, m, 2 * m);
  const ComplexVector a = random_matrix(rng, m, 1);
  BinStatistics s;
  s.r_nn = x * x.adjoint() / static_cast<double>(2 * m) + 0.1 * ComplexMatrix::Identity(m, m);
  s.r_yy = s.r_nn + 2.0 * a * a.adjoint();
  s.l_on = s.l_off = 100;
  return s;
}

ChannelPartition partition_for(std::size_t m_sn, std::size_t m_n) {
  ChannelPartition p;
  for (std::size_t i = 0; i < m_sn; ++i) p.speech_noise_channels.push_back(i);
  for (std::size_t i = 0; i < m_n; ++i) p.noise_only_channels.push_back(m_sn + i);
  return p;
}

void BM_Gevd(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  const BinStatistics s = make_stats(m, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gevd(s.r_yy, s.r_nn));
  state.SetLabel("M=" + std::to_string(m));
}
BENCHMARK(BM_Gevd)->Arg(2)->Arg(4)->Arg(8)->Arg(12)->Arg(16);

// Per-bin filter cost for the array sizes of the evaluation grid, with four
// noise-only channels. Plain MWF sees only the array channels.
void BM_MwfPerBin(benchmark::State& state) {
  const auto m_sn = static_cast<Eigen::Index>(state.range(0));
  const BinStatistics s = make_stats(m_sn, 2);
  for (auto _ : state) benchmark::DoNotOptimize(compute_mwf(s, 0));
}
BENCHMARK(BM_MwfPerBin)->Arg(4)->Arg(8)->Arg(12);

void BM_MwfWithNoiseMicsPerBin(benchmark::State& state) {
  const auto m_sn = static_cast<std::size_t>(state.range(0));
  const BinStatistics s = make_stats(static_cast<Eigen::Index>(m_sn + 4), 3);
  for (auto _ : state) benchmark::DoNotOptimize(compute_mwf(s, 0));
}
BENCHMARK(BM_MwfWithNoiseMicsPerBin)->Arg(4)->Arg(8)->Arg(12);

void BM_PkMwfPerBin(benchmark::State& state) {
  const auto m_sn = static_cast<std::size_t>(state.range(0));
  const BinStatistics s = make_stats(static_cast<Eigen::Index>(m_sn + 4), 3);
  const ChannelPartition p = partition_for(m_sn, 4);
  for (auto _ : state) benchmark::DoNotOptimize(compute_pkmwf(s, p));
}
BENCHMARK(BM_PkMwfPerBin)->Arg(4)->Arg(8)->Arg(12);

// 10 s of 16-channel audio through the default STFT and back.
void BM_StftRoundTrip(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.3);
  AudioClip x(16, 160000, 16000);
  for (std::size_t c = 0; c < 16; ++c)
    for (auto& v : x.channel(c)) v = g(rng);
  const StftParams p;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(analyze(x, p)));
  state.SetItemsProcessed(state.iterations() * 16 * 160000);
}
BENCHMARK(BM_StftRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace egomwf

// The distribution's benchmark_main archive carries LTO bytecode from another
// compiler release, so the entry point is defined here.
BENCHMARK_MAIN();
