#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egomwf/audio_io.hpp"
#include "egomwf/pipeline.hpp"
#include "egomwf/spp.hpp"

namespace egomwf {

inline constexpr double kSpeedOfSound = 343.0;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double distance(const Vec3& a, const Vec3& b);

// Positions in meters. The default mimics the measurement setup: loudspeaker
// on the floor 2 m from the stand, array centre 1.15 m up, a 12-mic array
// plus one microphone under each rotor, external mic 0.2 m above the source.
struct SceneGeometry {
  Vec3 source;
  std::vector<Vec3> array_mics;
  std::vector<Vec3> propeller_mics;
  std::vector<Vec3> rotors;
  std::optional<Vec3> external_mic;

  static SceneGeometry uav_default();
  std::size_t channels() const noexcept { return array_mics.size() + propeller_mics.size(); }
};

// 4000 rpm with seeded per-rotor offsets within +/-2%.
std::array<double, 4> default_rotor_speeds(std::uint64_t seed);

struct SceneConfig {
  SceneGeometry geometry = SceneGeometry::uav_default();
  std::array<double, 4> rotor_speeds_rpm{4000.0, 4000.0, 4000.0, 4000.0};
  double target_snr_db = -10.0;
  std::string speech_path;
  std::uint64_t seed = 1;
  int sample_rate_hz = 16000;

  double coupling_own_db = 0.0;
  double coupling_other_propeller_db = -12.0;
  double coupling_array_db = -6.0;
  // Extra speech loss at the propeller mics, which sit under the blades and
  // face away from the source.
  double propeller_speech_db = -25.0;
  // Spatially white sensor self-noise, relative to the ego-noise power at the
  // reference mic.
  double sensor_noise_db = -30.0;
  double external_snr_offset_db = 15.0;

  std::size_t reference_mic = 0;  // index into array_mics

  std::vector<std::string> violations() const;
  void validate() const;
};

// Free-field propagation: delay in (fractional) samples and 1/r gain relative
// to a reference distance.
struct DelayGain {
  double delay_samples = 0.0;
  double gain = 1.0;
};
DelayGain steering_delay_gain(const Vec3& src, const Vec3& mic, int rate_hz, double ref_distance);

// y(t) = gain * x(t - delay) through a 32-tap windowed-sinc fractional delay.
// Negative delays advance the signal; samples shifted in are zero.
std::vector<double> fractional_delay(std::span<const double> x, double delay_samples, double gain = 1.0);

// Harmonic series at the blade-pass frequency 2 rpm / 60 (20 partials, 1/k
// amplitudes, shared slow rpm jitter within +/-5%) plus low-passed white noise
// 10 dB below the harmonic power. Normalized to unit power.
AudioClip synth_ego_noise(double rpm, double duration_s, int rate_hz, std::uint64_t seed);

// Speech-like test signal: voiced syllables (glottal harmonics through vowel
// formants) with fricative bursts, word pauses and 0.5 s of leading silence.
// Peak normalized to 0.5.
AudioClip synth_speech(double duration_s, int rate_hz, std::uint64_t seed);

struct SceneManifest {
  double target_snr_db = 0.0;
  double achieved_snr_db = 0.0;
  std::optional<double> external_snr_db;
  std::uint64_t seed = 0;
  int sample_rate_hz = 0;
  std::size_t frames = 0;
  std::vector<std::size_t> array_channels;
  std::vector<std::size_t> propeller_channels;
  std::optional<std::size_t> external_channel;
  std::size_t reference_channel = 0;
  std::array<double, 4> rotor_speeds_rpm{};
  std::string speech_source;
};

struct SceneOutput {
  AudioClip mixture;       // array mics, propeller mics, then external (if any)
  AudioClip speech_image;  // same channel layout
  AudioClip noise_image;
  SppMask oracle_mask;     // from the reference channel components
  SceneManifest manifest;
};

SceneOutput render_scene(const SceneConfig& cfg);
// Uses the given speech instead of reading cfg.speech_path.
SceneOutput render_scene(const SceneConfig& cfg, const AudioClip& speech);

// mixture.wav, speech.wav, noise.wav, external.wav (if present), manifest.json
void write_scene(const SceneOutput& scene, const std::filesystem::path& dir);

// One cell of the evaluation grid.
struct SweepCell {
  SceneConfig scene;
  ChannelPartition partition;
  SppMode spp_mode = SppMode::Internal;
  EnhanceMethod method = EnhanceMethod::PkMwf;

  EnhanceConfig enhance_config() const;
  std::string key() const;
};

inline constexpr std::array<double, 3> kSuiteSnrsDb{-20.0, -10.0, 0.0};
inline constexpr std::array<std::size_t, 3> kSuiteArraySizes{4, 8, 12};

// Array channels used for each array size: the inner ring, plus the outer
// ring on the same axes, plus the outer ring on the rotor arms.
ChannelPartition suite_partition(std::size_t array_size);

// SNR x array size x SPP mode x method, 81 cells.
std::vector<SweepCell> default_suite(const std::string& speech_path = {}, std::uint64_t seed = 1);

}  // namespace egomwf
