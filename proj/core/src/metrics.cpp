#include "egomwf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "egomwf/error.hpp"
#include "egomwf/fft.hpp"

namespace egomwf {

SnrDb snr_db(std::span<const double> speech, std::span<const double> noise) {
  if (speech.size() != noise.size())
    throw Error("snr_db: component lengths differ (" + std::to_string(speech.size()) + " vs " +
                std::to_string(noise.size()) + ")");
  const double es = std::inner_product(speech.begin(), speech.end(), speech.begin(), 0.0);
  const double en = std::inner_product(noise.begin(), noise.end(), noise.begin(), 0.0);
  if (en == 0.0) return {kSnrCapDb, true};
  if (es == 0.0) return {-kSnrCapDb, true};
  return {10.0 * std::log10(es / en), false};
}

SnrDb snr_db(const AudioClip& speech, const AudioClip& noise) {
  if (speech.channels() != 1 || noise.channels() != 1) throw Error("snr_db: expects single-channel clips");
  return snr_db(speech.channel(0), noise.channel(0));
}

namespace {

constexpr int kStoiRate = 10000;
constexpr std::size_t kFrameLen = 256;
constexpr std::size_t kFrameHop = 128;
constexpr std::size_t kFftLen = 512;
constexpr std::size_t kBands = 15;
constexpr double kMinBandHz = 150.0;
constexpr std::size_t kSegmentFrames = 30;
constexpr double kClipDb = -15.0;
constexpr double kDynamicRangeDb = 40.0;

// Symmetric Hann without the zero endpoints: 0.5 (1 - cos(2 pi k / (N + 1))), k = 1..N.
std::vector<double> stoi_window() {
  std::vector<double> w(kFrameLen);
  for (std::size_t k = 0; k < kFrameLen; ++k)
    w[k] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(k + 1) / static_cast<double>(kFrameLen + 1)));
  return w;
}

std::vector<std::size_t> frame_starts(std::size_t length) {
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + kFrameLen < length; s += kFrameHop) starts.push_back(s);
  return starts;
}

void remove_silent_frames(std::vector<double>& x, std::vector<double>& y) {
  const auto w = stoi_window();
  const auto starts = frame_starts(x.size());
  std::vector<double> energy(starts.size());
  for (std::size_t j = 0; j < starts.size(); ++j) {
    double acc = 0.0;
    for (std::size_t t = 0; t < kFrameLen; ++t) {
      const double v = x[starts[j] + t] * w[t];
      acc += v * v;
    }
    energy[j] = 20.0 * std::log10(std::sqrt(acc) / std::sqrt(static_cast<double>(kFrameLen)));
  }
  const double peak = energy.empty() ? -std::numeric_limits<double>::infinity()
                                     : *std::max_element(energy.begin(), energy.end());
  if (!std::isfinite(peak)) throw Error("stoi: clean signal is silent");

  std::vector<double> xs(x.size(), 0.0), ys(y.size(), 0.0);
  std::size_t count = 0;
  for (std::size_t j = 0; j < starts.size(); ++j) {
    if (!(energy[j] - peak + kDynamicRangeDb > 0.0)) continue;
    const std::size_t in = starts[j];
    const std::size_t out = starts[count];
    for (std::size_t t = 0; t < kFrameLen; ++t) {
      xs[out + t] += x[in + t] * w[t];
      ys[out + t] += y[in + t] * w[t];
    }
    ++count;
  }
  const std::size_t len = count == 0 ? 0 : starts[count - 1] + kFrameLen;
  xs.resize(len);
  ys.resize(len);
  x = std::move(xs);
  y = std::move(ys);
}

// Rows: bands, cols: FFT bins 0..kFftLen/2.
std::vector<std::pair<std::size_t, std::size_t>> third_octave_bands() {
  const std::size_t n_bins = kFftLen / 2 + 1;
  auto nearest = [&](double f) {
    std::size_t best = 0;
    double err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_bins; ++i) {
      const double fi = static_cast<double>(i) * kStoiRate / static_cast<double>(kFftLen);
      const double e = (fi - f) * (fi - f);
      if (e < err) {
        err = e;
        best = i;
      }
    }
    return best;
  };
  std::vector<std::pair<std::size_t, std::size_t>> bands;
  std::vector<std::size_t> rank;
  for (std::size_t k = 0; k < kBands; ++k) {
    const double kd = static_cast<double>(k);
    const double lo = kMinBandHz * std::pow(2.0, (2.0 * kd - 1.0) / 6.0);
    const double hi = kMinBandHz * std::pow(2.0, (2.0 * kd + 1.0) / 6.0);
    const std::size_t a = nearest(lo), b = nearest(hi);
    bands.emplace_back(a, b);
    rank.push_back(b > a ? b - a : 0);
  }
  // Drop trailing bands that do not fit below Nyquist.
  std::size_t keep = 1;
  for (std::size_t i = 1; i < rank.size(); ++i)
    if (rank[i] >= rank[i - 1] && rank[i] != 0) keep = i + 1;
  bands.resize(keep);
  return bands;
}

// Band envelopes, bands x frames (row-major per band).
std::vector<std::vector<double>> band_envelopes(const std::vector<double>& x,
                                                const std::vector<std::pair<std::size_t, std::size_t>>& bands) {
  const auto w = stoi_window();
  const auto starts = frame_starts(x.size());
  RealFft fft(kFftLen);
  std::vector<double> buf(kFrameLen);
  std::vector<cdouble> spec(fft.bins());
  std::vector<std::vector<double>> env(bands.size(), std::vector<double>(starts.size()));
  for (std::size_t i = 0; i < starts.size(); ++i) {
    for (std::size_t t = 0; t < kFrameLen; ++t) buf[t] = x[starts[i] + t] * w[t];
    fft.forward(buf, spec);
    for (std::size_t j = 0; j < bands.size(); ++j) {
      double acc = 0.0;
      for (std::size_t b = bands[j].first; b < bands[j].second; ++b) acc += std::norm(spec[b]);
      env[j][i] = std::sqrt(acc);
    }
  }
  return env;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / (std::sqrt(saa) * std::sqrt(sbb));
}

}  // namespace

double stoi(std::span<const double> clean, std::span<const double> processed, int rate_hz) {
  if (clean.size() != processed.size())
    throw Error("stoi: signal lengths differ (" + std::to_string(clean.size()) + " vs " +
                std::to_string(processed.size()) + ")");
  std::vector<double> x = resample(clean, rate_hz, kStoiRate);
  std::vector<double> y = resample(processed, rate_hz, kStoiRate);
  remove_silent_frames(x, y);

  const auto bands = third_octave_bands();
  const auto X = band_envelopes(x, bands);
  const auto Y = band_envelopes(y, bands);
  const std::size_t frames = X.empty() ? 0 : X.front().size();
  if (frames < kSegmentFrames)
    throw Error("stoi: need at least " + std::to_string(kSegmentFrames) +
                " non-silent frames (~384 ms), got " + std::to_string(frames));

  const double clip = std::pow(10.0, -kClipDb / 20.0);
  std::vector<double> yp(kSegmentFrames);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t m = kSegmentFrames; m <= frames; ++m) {
    const std::size_t first = m - kSegmentFrames;
    for (std::size_t j = 0; j < bands.size(); ++j) {
      const std::span<const double> xs(X[j].data() + first, kSegmentFrames);
      const std::span<const double> ys(Y[j].data() + first, kSegmentFrames);
      double ex = 0.0, ey = 0.0;
      for (std::size_t i = 0; i < kSegmentFrames; ++i) {
        ex += xs[i] * xs[i];
        ey += ys[i] * ys[i];
      }
      const double alpha = ey > 0.0 ? std::sqrt(ex / ey) : 0.0;
      for (std::size_t i = 0; i < kSegmentFrames; ++i)
        yp[i] = std::min(alpha * ys[i], xs[i] + xs[i] * clip);
      total += correlation(xs, yp);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double stoi(const AudioClip& clean, const AudioClip& processed) {
  if (clean.channels() != 1 || processed.channels() != 1) throw Error("stoi: expects single-channel clips");
  if (clean.sample_rate_hz() != processed.sample_rate_hz()) throw Error("stoi: sample rates differ");
  return stoi(clean.channel(0), processed.channel(0), clean.sample_rate_hz());
}

namespace {

std::string method_name(const FilterBank& fb) {
  if (fb.method == FilterMethod::PkMwf) return to_string(EnhanceMethod::PkMwf);
  return to_string(fb.partition.m_n() > 0 ? EnhanceMethod::MwfWithNoiseMics : EnhanceMethod::Mwf);
}

}  // namespace

MetricsReport evaluate_signals(const AudioClip& clean_ref, const AudioClip& noisy_ref, const AudioClip& processed,
                               const AudioClip* shadow_speech, const AudioClip* shadow_noise) {
  if (clean_ref.channels() != 1 || noisy_ref.channels() != 1 || processed.channels() != 1)
    throw Error("evaluate: reference and processed signals must be single-channel");
  if (clean_ref.frames() != noisy_ref.frames() || clean_ref.frames() != processed.frames())
    throw Error("evaluate: signal lengths differ");

  MetricsReport r;
  r.stoi_in = stoi(clean_ref, noisy_ref);
  r.stoi_out = stoi(clean_ref, processed);
  r.stoi_improvement = r.stoi_out - r.stoi_in;

  if (!shadow_speech || !shadow_noise) {
    r.flags.emplace_back("no_ground_truth");
    return r;
  }
  const auto clean = clean_ref.channel(0);
  const auto noisy = noisy_ref.channel(0);
  std::vector<double> noise_in(noisy.size());
  for (std::size_t t = 0; t < noisy.size(); ++t) noise_in[t] = noisy[t] - clean[t];

  const SnrDb in = snr_db(clean, noise_in);
  const SnrDb out = snr_db(*shadow_speech, *shadow_noise);
  if (in.capped) r.flags.emplace_back("snr_in_capped");
  r.snr_in_db = in.value;

  const auto ss = shadow_speech->channel(0);
  const bool silent_out = std::all_of(ss.begin(), ss.end(), [](double v) { return v == 0.0; });
  if (silent_out && out.capped) {
    r.flags.emplace_back("snr_out_undefined");
    return r;
  }
  if (out.capped) r.flags.emplace_back("snr_out_capped");
  r.snr_out_db = out.value;
  r.snr_improvement_db = out.value - in.value;
  return r;
}

MetricsReport evaluate(const EnhanceResult& result, const AudioClip& clean_ref, const AudioClip& noisy_ref) {
  MetricsReport r = evaluate_signals(clean_ref, noisy_ref, result.enhanced,
                                     result.shadow_speech ? &*result.shadow_speech : nullptr,
                                     result.shadow_noise ? &*result.shadow_noise : nullptr);
  r.method = method_name(result.filterbank);
  r.partition = result.filterbank.partition;
  r.spp_mode = to_string(result.mask.source.mode);
  if (result.mask.source.mode != SppMode::Oracle) r.spp_channel = result.mask.source.channel;
  return r;
}

}  // namespace egomwf
