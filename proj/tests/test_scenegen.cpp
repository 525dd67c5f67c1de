#include <gtest/gtest.h>

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "egomwf/error.hpp"
#include "egomwf/metrics.hpp"
#include "egomwf/scenegen.hpp"
#include "json.hpp"
#include "support.hpp"

namespace egomwf {
namespace {

const AudioClip& speech() {
  static const AudioClip s = synth_speech(4.0, 16000, 7);
  return s;
}

double power(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e / static_cast<double>(x.size());
}

// Magnitude-squared spectrum via Eigen's FFT.
std::vector<double> spectrum(std::span<const double> x) {
  Eigen::FFT<double> fft;
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  std::vector<double> p(in.size() / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(out[k]);
  return p;
}

double band_energy(const std::vector<double>& p, double lo_hz, double hi_hz, double hz_per_bin) {
  double e = 0.0;
  for (auto k = static_cast<std::size_t>(lo_hz / hz_per_bin); k <= static_cast<std::size_t>(hi_hz / hz_per_bin); ++k)
    e += p[k];
  return e;
}

TEST(Steering, ReferenceDistanceAndSpeedOfSound) {
  const Vec3 src{0, 0, 0}, mic{3, 4, 0};
  const DelayGain a = steering_delay_gain(src, mic, 16000, 5.0);
  EXPECT_DOUBLE_EQ(a.gain, 1.0);
  EXPECT_NEAR(a.delay_samples, 5.0 / 343.0 * 16000, 1e-9);
  const DelayGain b = steering_delay_gain(src, Vec3{3, 4, 343}, 16000, 5.0);
  const double d = std::sqrt(25.0 + 343.0 * 343.0);
  EXPECT_NEAR(b.delay_samples - a.delay_samples, (d - 5.0) / 343.0 * 16000, 1e-9);
  const DelayGain c = steering_delay_gain(src, Vec3{348, 0, 0}, 16000, 5.0);
  EXPECT_NEAR(c.delay_samples - a.delay_samples, 16000.0, 1e-9);
  EXPECT_NEAR(c.gain, 5.0 / 348.0, 1e-15);
  EXPECT_THROW(steering_delay_gain(src, src, 16000, 1.0), Error);
}

TEST(FractionalDelay, IntegerShiftIsExact) {
  test::Rng rng(1);
  const auto x = test::random_signal(rng, 200);
  const auto y = fractional_delay(x, 3.0, 2.0);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(y[t], 0.0);
  for (std::size_t t = 3; t < 200; ++t) EXPECT_NEAR(y[t], 2.0 * x[t - 3], 1e-15);
}

TEST(FractionalDelay, BandLimitedSine) {
  std::vector<double> x(2000);
  const double f = 500.0 / 16000.0;
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2 * std::numbers::pi * f * t);
  const double delay = 2.37;
  const auto y = fractional_delay(x, delay);
  for (std::size_t t = 100; t < 1900; ++t)
    ASSERT_NEAR(y[t], std::sin(2 * std::numbers::pi * f * (t - delay)), 1e-3);
}

TEST(EgoNoise, HarmonicsOfBladePassFrequency) {
  const AudioClip n = synth_ego_noise(3000.0, 4.0, 16000, 3);
  const auto p = spectrum(n.channel(0));
  const double hz = 16000.0 / static_cast<double>(n.frames());
  // Local maxima, strongest 20.
  std::vector<std::pair<double, std::size_t>> peaks;
  for (std::size_t k = 1; k + 1 < p.size(); ++k)
    if (p[k] > p[k - 1] && p[k] >= p[k + 1]) peaks.emplace_back(p[k], k);
  std::sort(peaks.rbegin(), peaks.rend());
  // Jitter smears each partial, so many local maxima belong to one partial;
  // every strong peak must still sit within 5% of some harmonic of 100 Hz.
  for (std::size_t i = 0; i < 20; ++i) {
    const double freq = static_cast<double>(peaks[i].second) * hz;
    const double h = std::max(1.0, std::round(freq / 100.0));
    EXPECT_LE(std::abs(freq - 100.0 * h), 0.05 * 100.0 * h + hz) << "peak at " << freq << " Hz";
    EXPECT_LE(h, 20.0);
  }
  // The fundamental band carries more than any band between partials.
  EXPECT_GT(band_energy(p, 95, 105, hz), 100.0 * band_energy(p, 140, 160, hz));
}

TEST(EgoNoise, UnitPowerAndDeterministic) {
  for (double rpm : {2500.0, 4000.0, 6100.0}) {
    const AudioClip a = synth_ego_noise(rpm, 3.0, 16000, 9);
    EXPECT_NEAR(power(a.channel(0)), 1.0, 1e-6);
    EXPECT_EQ(a, synth_ego_noise(rpm, 3.0, 16000, 9));
    EXPECT_NE(a, synth_ego_noise(rpm, 3.0, 16000, 10));
  }
}

TEST(SynthSpeech, ShapeAndSilentLead) {
  const AudioClip& s = speech();
  EXPECT_EQ(s.channels(), 1u);
  EXPECT_EQ(s.frames(), 64000u);
  double peak = 0.0;
  for (double v : s.channel(0)) peak = std::max(peak, std::abs(v));
  EXPECT_NEAR(peak, 0.5, 1e-12);
  for (std::size_t t = 0; t < 8000; ++t) ASSERT_EQ(s.at(0, t), 0.0);
  EXPECT_EQ(s, synth_speech(4.0, 16000, 7));
}

TEST(RenderScene, CalibrationAndStructure) {
  for (double snr : {-20.0, -10.0, 0.0}) {
    SceneConfig cfg;
    cfg.target_snr_db = snr;
    const SceneOutput sc = render_scene(cfg, speech());
    EXPECT_EQ(sc.mixture.channels(), 17u);
    EXPECT_NEAR(snr_db(sc.speech_image.channel(0), sc.noise_image.channel(0)).value, snr, 0.1);
    EXPECT_NEAR(sc.manifest.achieved_snr_db, snr, 0.1);
    ASSERT_TRUE(sc.manifest.external_snr_db);
    EXPECT_NEAR(*sc.manifest.external_snr_db, snr + 15.0, 0.1);
    EXPECT_NEAR(snr_db(sc.speech_image.channel(16), sc.noise_image.channel(16)).value, snr + 15.0, 0.1);
    for (std::size_t c = 0; c < 17; ++c)
      for (std::size_t t = 0; t < sc.mixture.frames(); t += 7)
        ASSERT_EQ(sc.mixture.at(c, t), sc.speech_image.at(c, t) + sc.noise_image.at(c, t));
  }
}

TEST(RenderScene, ManifestDescribesChannels) {
  SceneConfig cfg;
  cfg.seed = 5;
  const SceneOutput sc = render_scene(cfg, speech());
  const SceneManifest& m = sc.manifest;
  EXPECT_EQ(m.array_channels.size(), 12u);
  EXPECT_EQ(m.propeller_channels, (std::vector<std::size_t>{12, 13, 14, 15}));
  EXPECT_EQ(m.external_channel, std::optional<std::size_t>{16});
  EXPECT_EQ(m.reference_channel, 0u);
  EXPECT_EQ(m.seed, 5u);
  EXPECT_EQ(m.frames, 64000u);
  EXPECT_EQ(m.rotor_speeds_rpm, cfg.rotor_speeds_rpm);
}

TEST(RenderScene, SpeechIsNegligibleAtPropellerMics) {
  const SceneOutput sc = render_scene(SceneConfig{}, speech());
  const double ref = power(sc.speech_image.channel(0));
  for (std::size_t c = 12; c < 16; ++c)
    EXPECT_LE(10 * std::log10(power(sc.speech_image.channel(c)) / ref), -20.0);
}

// Components isolated by linearity: raising one coupling by 6.02 dB and
// subtracting the default scene leaves exactly the affected contributions
// (the reference channel, and with it the noise normalization, is unchanged).
// A single other rotor reaches mic r through the same unit-power noise and a
// delay filter as it reaches its own mic, so its contribution is the own
// component of mic q scaled by the other-propeller coupling. The allowance
// covers the delay filter's passband ripple.
TEST(RenderScene, OwnRotorDominatesPropellerMic) {
  const double doubled = 20 * std::log10(2.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SceneConfig base;
    base.seed = seed;
    base.rotor_speeds_rpm = default_rotor_speeds(seed);
    SceneConfig own = base, other = base;
    own.coupling_own_db += doubled;
    other.coupling_other_propeller_db += doubled;
    const SceneOutput a = render_scene(base, speech()), b = render_scene(own, speech()),
                      c = render_scene(other, speech());
    ASSERT_EQ(a.manifest.achieved_snr_db, b.manifest.achieved_snr_db);
    auto diff_power = [&](const SceneOutput& x, std::size_t ch) {
      double e = 0.0;
      for (std::size_t t = 0; t < a.noise_image.frames(); ++t) {
        const double d = x.noise_image.at(ch, t) - a.noise_image.at(ch, t);
        e += d * d;
      }
      return e / static_cast<double>(a.noise_image.frames());
    };
    std::array<double, 4> own_power{}, others_power{};
    for (std::size_t r = 0; r < 4; ++r) {
      own_power[r] = diff_power(b, 12 + r);
      others_power[r] = diff_power(c, 12 + r);
    }
    const double coupling = std::pow(10.0, base.coupling_other_propeller_db / 10.0);
    for (std::size_t r = 0; r < 4; ++r) {
      // The three others together, measured directly, sit well below the own rotor.
      EXPECT_GE(10 * std::log10(own_power[r] / others_power[r]), 12.0 - 10 * std::log10(3.0) - 1.0);
      for (std::size_t q = 0; q < 4; ++q) {
        if (q == r) continue;
        EXPECT_GE(10 * std::log10(own_power[r] / (coupling * own_power[q])), 12.0 - 1e-3)
            << "seed " << seed << " mic " << r << " rotor " << q;
      }
    }
  }
}

TEST(RenderScene, SpeechCrossCorrelationLagMatchesGeometry) {
  SceneConfig cfg;
  const SceneOutput sc = render_scene(cfg, speech());
  const auto& g = cfg.geometry;
  for (std::size_t m : {4u, 9u}) {
    const double expect = (distance(g.source, g.array_mics[m]) - distance(g.source, g.array_mics[0])) /
                          kSpeedOfSound * 16000.0;
    const auto a = sc.speech_image.channel(0), b = sc.speech_image.channel(m);
    auto xc = [&](long lag) {
      double acc = 0.0;
      for (std::size_t t = 100; t + 100 < a.size(); ++t) acc += a[t] * b[static_cast<std::size_t>(static_cast<long>(t) + lag)];
      return acc;
    };
    long best = 0;
    double best_v = -1e300;
    for (long lag = -20; lag <= 20; ++lag)
      if (xc(lag) > best_v) best_v = xc(lag), best = lag;
    // Parabolic refinement around the integer peak.
    const double ym = xc(best - 1), y0 = xc(best), yp = xc(best + 1);
    const double lag = static_cast<double>(best) + 0.5 * (ym - yp) / (ym - 2 * y0 + yp);
    EXPECT_NEAR(lag, expect, 0.5) << "mic " << m;
  }
}

TEST(RenderScene, SnrChangeScalesOnlyNoise) {
  SceneConfig a, b;
  a.target_snr_db = -10.0;
  b.target_snr_db = -10.0 + 10 * std::log10(2.0);
  const SceneOutput sa = render_scene(a, speech()), sb = render_scene(b, speech());
  EXPECT_EQ(sa.speech_image, sb.speech_image);
  const double ratio = 1.0 / std::sqrt(2.0);
  for (std::size_t c = 0; c < 16; ++c)
    for (std::size_t t = 0; t < sa.noise_image.frames(); t += 11)
      ASSERT_NEAR(sb.noise_image.at(c, t), ratio * sa.noise_image.at(c, t), 1e-12);
}

TEST(RenderScene, DeterministicAndSeeded) {
  SceneConfig cfg;
  const SceneOutput a = render_scene(cfg, speech()), b = render_scene(cfg, speech());
  EXPECT_EQ(a.mixture, b.mixture);
  cfg.seed = 2;
  EXPECT_NE(render_scene(cfg, speech()).noise_image, a.noise_image);
}

TEST(RenderScene, OracleMaskSilentFramesInactive) {
  const SceneOutput sc = render_scene(SceneConfig{}, speech());
  const StftGrid s = analyze(sc.speech_image.single(0), {});
  std::size_t checked = 0;
  for (std::size_t l = 0; l < s.frames(); ++l) {
    double e = 0.0;
    for (std::size_t k = 0; k < s.bins(); ++k) e += std::norm(s.at(k, l, 0));
    if (e != 0.0) continue;
    ++checked;
    for (std::size_t k = 0; k < s.bins(); ++k) ASSERT_EQ(sc.oracle_mask.beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)), 0);
  }
  EXPECT_GT(checked, 10u);
}

TEST(RenderScene, RejectsBadConfigs) {
  SceneConfig cfg;
  cfg.rotor_speeds_rpm[2] = -1.0;
  cfg.geometry.rotors.pop_back();
  cfg.target_snr_db = std::nan("");
  const auto v = cfg.violations();
  EXPECT_GE(v.size(), 3u);
  EXPECT_THROW(render_scene(cfg, speech()), ConfigError);
  EXPECT_THROW(render_scene(SceneConfig{}, AudioClip(1, 64000, 16000)), Error);  // silent speech
  EXPECT_THROW(render_scene(SceneConfig{}, AudioClip(2, 64000, 16000)), Error);  // not mono
}

TEST(RenderScene, ResamplesSpeech) {
  const AudioClip s44 = resample(speech(), 44100);
  const SceneOutput sc = render_scene(SceneConfig{}, s44);
  EXPECT_EQ(sc.mixture.sample_rate_hz(), 16000);
  EXPECT_NEAR(sc.manifest.achieved_snr_db, -10.0, 0.1);
}

TEST(RenderScene, WritesSceneDirectory) {
  const auto dir = test::scratch_dir("scene");
  const SceneOutput sc = render_scene(SceneConfig{}, speech());
  write_scene(sc, dir);
  for (const char* f : {"mixture.wav", "speech.wav", "noise.wav", "external.wav", "manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const AudioClip mix = read_wav(dir / "mixture.wav");
  EXPECT_EQ(mix.channels(), 17u);
  EXPECT_EQ(read_wav(dir / "external.wav").channels(), 1u);
  std::ifstream f(dir / "manifest.json");
  const auto j = nlohmann::json::parse(f);
  EXPECT_NEAR(j.at("achieved_snr_db").get<double>(), -10.0, 0.1);
}

TEST(DefaultSuite, CrossProduct) {
  const auto suite = default_suite();
  ASSERT_EQ(suite.size(), 81u);
  std::set<std::string> keys;
  for (const auto& c : suite) {
    EXPECT_NO_THROW(c.scene.validate());
    EXPECT_NO_THROW(c.enhance_config().validate(17));
    const auto& p = c.partition;
    std::set<std::size_t> all(p.speech_noise_channels.begin(), p.speech_noise_channels.end());
    all.insert(p.noise_only_channels.begin(), p.noise_only_channels.end());
    EXPECT_EQ(all.size(), p.size());
    EXPECT_LE(p.size(), 16u);
    EXPECT_EQ(p.m_n(), 4u);
    EXPECT_LT(*all.rbegin(), 16u);
    keys.insert(c.key());
  }
  EXPECT_EQ(keys.size(), 81u);
}

TEST(DefaultSuite, PartitionsAndSppChannels) {
  EXPECT_EQ(suite_partition(4).speech_noise_channels, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(suite_partition(12).m_sn(), 12u);
  EXPECT_EQ(suite_partition(8).noise_only_channels, (std::vector<std::size_t>{12, 13, 14, 15}));
  SweepCell cell;
  cell.partition = suite_partition(8);
  cell.spp_mode = SppMode::External;
  EXPECT_EQ(cell.enhance_config().spp_source.channel, 16u);
  cell.spp_mode = SppMode::Internal;
  EXPECT_EQ(cell.enhance_config().spp_source.channel, 0u);
  EXPECT_EQ(cell.key(), "snr=-10/msn=8/spp=internal/method=pk-mwf");
}

TEST(DefaultSuite, RotorSpeedsWithinTwoPercent) {
  for (std::uint64_t seed = 1; seed < 20; ++seed) {
    const auto rpm = default_rotor_speeds(seed);
    for (double v : rpm) {
      EXPECT_GE(v, 4000.0 * 0.98);
      EXPECT_LE(v, 4000.0 * 1.02);
    }
    EXPECT_EQ(rpm, default_rotor_speeds(seed));
  }
}

}  // namespace
}  // namespace egomwf
