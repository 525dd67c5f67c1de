#include "egomwf/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "egomwf/config.hpp"
#include "egomwf/error.hpp"
#include "egomwf/metrics.hpp"
#include "egomwf/stft.hpp"

namespace egomwf {

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

SceneGeometry SceneGeometry::uav_default() {
  constexpr double kHeight = 1.15;
  constexpr double kRotorRadius = 0.2;
  auto on_ring = [](double radius, double deg, double z) {
    const double a = deg * M_PI / 180.0;
    return Vec3{radius * std::cos(a), radius * std::sin(a), z};
  };
  SceneGeometry g;
  g.source = {2.0, 0.0, 0.0};
  for (double deg : {0.0, 90.0, 180.0, 270.0}) g.array_mics.push_back(on_ring(0.06, deg, kHeight));
  for (double deg : {0.0, 90.0, 180.0, 270.0}) g.array_mics.push_back(on_ring(0.12, deg, kHeight));
  for (double deg : {45.0, 135.0, 225.0, 315.0}) g.array_mics.push_back(on_ring(0.12, deg, kHeight));
  for (double deg : {45.0, 135.0, 225.0, 315.0}) {
    g.rotors.push_back(on_ring(kRotorRadius, deg, kHeight + 0.05));
    g.propeller_mics.push_back(on_ring(kRotorRadius, deg, kHeight - 0.02));
  }
  g.external_mic = Vec3{2.0, 0.0, 0.2};
  return g;
}

std::vector<std::string> SceneConfig::violations() const {
  std::vector<std::string> bad;
  const auto& g = geometry;
  if (g.array_mics.empty()) bad.emplace_back("scene.geometry.array_mics is empty");
  if (g.rotors.size() != 4) bad.emplace_back("scene.geometry needs exactly 4 rotors");
  if (g.propeller_mics.size() != g.rotors.size())
    bad.emplace_back("scene.geometry needs one propeller mic per rotor");
  if (reference_mic >= g.array_mics.size()) bad.emplace_back("scene.reference_mic is out of range");
  auto check_distinct = [&](const Vec3& mic, const std::string& what) {
    if (!(distance(g.source, mic) > 0.0)) bad.push_back(what + " coincides with the source");
    for (std::size_t r = 0; r < g.rotors.size(); ++r)
      if (!(distance(g.rotors[r], mic) > 0.0)) bad.push_back(what + " coincides with rotor " + std::to_string(r));
  };
  for (std::size_t i = 0; i < g.array_mics.size(); ++i) check_distinct(g.array_mics[i], "array mic " + std::to_string(i));
  for (std::size_t i = 0; i < g.propeller_mics.size(); ++i)
    check_distinct(g.propeller_mics[i], "propeller mic " + std::to_string(i));
  if (g.external_mic) check_distinct(*g.external_mic, "external mic");
  for (std::size_t r = 0; r < rotor_speeds_rpm.size(); ++r)
    if (!(rotor_speeds_rpm[r] > 0.0) || !std::isfinite(rotor_speeds_rpm[r]))
      bad.push_back("scene.rotor_speeds_rpm[" + std::to_string(r) + "] must be positive");
  if (!std::isfinite(target_snr_db)) bad.emplace_back("scene.target_snr_db must be finite");
  if (sample_rate_hz <= 0) bad.emplace_back("scene.sample_rate_hz must be positive");
  for (double db : {coupling_own_db, coupling_other_propeller_db, coupling_array_db, propeller_speech_db,
                    sensor_noise_db, external_snr_offset_db})
    if (!std::isfinite(db)) {
      bad.emplace_back("scene gains must be finite");
      break;
    }
  return bad;
}

void SceneConfig::validate() const {
  auto bad = violations();
  if (!bad.empty()) throw ConfigError(std::move(bad));
}

DelayGain steering_delay_gain(const Vec3& src, const Vec3& mic, int rate_hz, double ref_distance) {
  const double d = distance(src, mic);
  if (!(d > 0.0)) throw Error("steering_delay_gain: source and microphone coincide");
  return {d / kSpeedOfSound * static_cast<double>(rate_hz), ref_distance / d};
}

std::vector<double> fractional_delay(std::span<const double> x, double delay_samples, double gain) {
  constexpr int kHalf = 16;  // taps -15..16
  const double whole = std::floor(delay_samples);
  const double frac = delay_samples - whole;
  const auto shift = static_cast<long>(whole);

  std::array<double, 2 * kHalf> h{};
  double sum = 0.0;
  for (int k = -kHalf + 1; k <= kHalf; ++k) {
    const double u = static_cast<double>(k) - frac;
    // Integer delays use the exact unit impulse; sin(pi k) is not exactly 0.
    const double sinc = frac == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::sin(M_PI * u) / (M_PI * u);
    // Blackman taper over |u| < kHalf + 1
    const double a = M_PI * u / (kHalf + 1);
    const double w = 0.42 + 0.5 * std::cos(a) + 0.08 * std::cos(2.0 * a);
    h[static_cast<std::size_t>(k + kHalf - 1)] = sinc * w;
    sum += sinc * w;
  }
  for (auto& v : h) v *= gain / sum;

  const auto n = static_cast<long>(x.size());
  std::vector<double> y(x.size(), 0.0);
  for (long t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int k = -kHalf + 1; k <= kHalf; ++k) {
      const long s = t - shift - k;
      if (s >= 0 && s < n) acc += h[static_cast<std::size_t>(k + kHalf - 1)] * x[static_cast<std::size_t>(s)];
    }
    y[static_cast<std::size_t>(t)] = acc;
  }
  return y;
}

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::array<double, 4> default_rotor_speeds(std::uint64_t seed) {
  auto rng = make_rng(seed, 0x4070);
  std::uniform_real_distribution<double> offset(-0.02, 0.02);
  std::array<double, 4> rpm{};
  for (auto& r : rpm) r = 4000.0 * (1.0 + offset(rng));
  return rpm;
}

namespace {

double power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / static_cast<double>(x.size());
}

std::size_t samples_for(double duration_s, int rate_hz) {
  if (!(duration_s > 0.0)) throw Error("duration must be positive");
  return static_cast<std::size_t>(std::llround(duration_s * rate_hz));
}

// Two-pole resonator with unit peak gain.
class Resonator {
 public:
  Resonator(double freq, double bandwidth, int rate) {
    const double r = std::exp(-M_PI * bandwidth / rate);
    a1_ = 2.0 * r * std::cos(2.0 * M_PI * freq / rate);
    a2_ = -r * r;
    g_ = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(4.0 * M_PI * freq / rate) + r * r);
  }
  double operator()(double x) {
    const double y = g_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_, a2_, g_;
  double y1_ = 0.0, y2_ = 0.0;
};

struct Vowel {
  double f1, f2, f3;
};
constexpr std::array<Vowel, 6> kVowels{{
    {730, 1090, 2440},  // a
    {270, 2290, 3010},  // i
    {300, 870, 2240},   // u
    {530, 1840, 2480},  // e
    {570, 840, 2410},   // o
    {660, 1720, 2410},  // ae
}};

}  // namespace

AudioClip synth_ego_noise(double rpm, double duration_s, int rate_hz, std::uint64_t seed) {
  if (!(rpm > 0.0)) throw Error("synth_ego_noise: rpm must be positive");
  if (rate_hz <= 0) throw Error("synth_ego_noise: rate must be positive");
  const std::size_t n = samples_for(duration_s, rate_hz);
  auto rng = make_rng(seed, 0xE60);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  constexpr int kPartials = 20;
  constexpr double kJitter = 0.05;
  const double f0 = 2.0 * rpm / 60.0;
  const double fs = rate_hz;

  // Slow jitter: three sub-hertz sinusoids with weights summing to kJitter.
  std::array<double, 3> jf{}, jp{}, jw{};
  double wsum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    jf[i] = 0.1 + 0.9 * uni(rng);
    jp[i] = 2.0 * M_PI * uni(rng);
    jw[i] = 0.2 + uni(rng);
    wsum += jw[i];
  }
  for (auto& w : jw) w *= kJitter / wsum;
  std::array<double, kPartials> phase0{};
  for (auto& p : phase0) p = 2.0 * M_PI * uni(rng);

  std::vector<double> harm(n, 0.0);
  double phase = 0.0;  // fundamental phase; partial k runs at k times it
  for (std::size_t t = 0; t < n; ++t) {
    const double time = static_cast<double>(t) / fs;
    double jitter = 0.0;
    for (std::size_t i = 0; i < 3; ++i) jitter += jw[i] * std::sin(2.0 * M_PI * jf[i] * time + jp[i]);
    double acc = 0.0;
    for (int k = 1; k <= kPartials; ++k) {
      if (k * f0 * (1.0 + kJitter) >= 0.5 * fs) break;
      acc += std::sin(k * phase + phase0[static_cast<std::size_t>(k - 1)]) / k;
    }
    harm[t] = acc;
    phase += 2.0 * M_PI * f0 * (1.0 + jitter) / fs;
    if (phase > 2.0 * M_PI * 1e6) phase = std::fmod(phase, 2.0 * M_PI);
  }

  // One-pole low-pass at 1 kHz: flat below, -6 dB/octave above.
  std::vector<double> broad(n);
  const double a = std::exp(-2.0 * M_PI * 1000.0 / fs);
  double state = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    state = (1.0 - a) * gauss(rng) + a * state;
    broad[t] = state;
  }
  const double ph = power(harm), pb = power(broad);
  const double bscale = pb > 0.0 ? std::sqrt(0.1 * ph / pb) : 0.0;
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = harm[t] + bscale * broad[t];
  const double p = power(out);
  if (p > 0.0) {
    const double s = 1.0 / std::sqrt(p);
    for (auto& v : out) v *= s;
  }
  return AudioClip({std::move(out)}, rate_hz);
}

AudioClip synth_speech(double duration_s, int rate_hz, std::uint64_t seed) {
  if (rate_hz <= 0) throw Error("synth_speech: rate must be positive");
  const std::size_t n = samples_for(duration_s, rate_hz);
  const double fs = rate_hz;
  auto rng = make_rng(seed, 0x5BEEC4);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
  auto secs = [&](double s) { return static_cast<std::size_t>(s * fs); };

  std::vector<double> out(n, 0.0);
  std::size_t pos = secs(0.5);
  while (pos < n) {
    const int syllables = 1 + static_cast<int>(uni(rng) * 4.0);
    for (int s = 0; s < syllables && pos < n; ++s) {
      const double level = std::pow(10.0, range(-4.0, 4.0) / 20.0);

      if (uni(rng) < 0.35) {
        // Fricative onset: white noise through a high resonance.
        const std::size_t len = secs(range(0.04, 0.09));
        Resonator hiss(range(3500.0, std::min(6500.0, 0.4 * fs)), 2000.0, rate_hz);
        for (std::size_t t = 0; t < len && pos + t < n; ++t) {
          const double env = std::sin(M_PI * static_cast<double>(t) / static_cast<double>(len));
          out[pos + t] += 0.35 * level * env * hiss(gauss(rng));
        }
        pos += len;
      }

      const std::size_t len = secs(range(0.12, 0.28));
      const Vowel& v = kVowels[static_cast<std::size_t>(uni(rng) * kVowels.size()) % kVowels.size()];
      Resonator r1(v.f1, 80.0, rate_hz), r2(v.f2, 110.0, rate_hz), r3(std::min(v.f3, 0.45 * fs), 160.0, rate_hz);
      const double f_start = range(95.0, 135.0);
      const double f_end = f_start * range(0.85, 1.12);
      const std::size_t attack = secs(0.02), release = secs(0.045);
      double phase = 0.0;
      for (std::size_t t = 0; t < len && pos + t < n; ++t) {
        const double u = static_cast<double>(t) / static_cast<double>(len);
        const double f0 = f_start + (f_end - f_start) * u;
        double src = 0.0;
        for (int k = 1; k * f0 < 0.45 * fs; ++k) src += std::sin(k * phase) / k;
        phase += 2.0 * M_PI * f0 / fs;
        if (phase > 2.0 * M_PI) phase -= 2.0 * M_PI;
        double env = 1.0;
        if (t < attack) env = 0.5 - 0.5 * std::cos(M_PI * static_cast<double>(t) / attack);
        if (len - t < release) env = 0.5 - 0.5 * std::cos(M_PI * static_cast<double>(len - t) / release);
        const double y = r1(src) + 0.6 * r2(src) + 0.3 * r3(src);
        out[pos + t] += level * env * y;
      }
      pos += len + secs(range(0.02, 0.07));
    }
    pos += secs(range(0.15, 0.45));
  }

  const double peak = std::accumulate(out.begin(), out.end(), 0.0,
                                      [](double m, double v) { return std::max(m, std::abs(v)); });
  if (peak > 0.0)
    for (auto& v : out) v *= 0.5 / peak;
  return AudioClip({std::move(out)}, rate_hz);
}

namespace {

double db_to_amp(double db) { return std::pow(10.0, db / 20.0); }

void add_into(std::span<double> dst, const std::vector<double>& src) {
  for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += src[t];
}

// Rotor contributions at one position, one coupling gain per rotor.
std::vector<double> rotor_mix(const std::vector<std::vector<double>>& rotor_noise, const SceneGeometry& g,
                              const Vec3& mic, const std::vector<double>& gains, int rate) {
  std::vector<double> acc(rotor_noise.front().size(), 0.0);
  for (std::size_t r = 0; r < rotor_noise.size(); ++r) {
    // Only path-length differences matter; 5 cm is taken as the common delay.
    const double delay = (distance(g.rotors[r], mic) - 0.05) / kSpeedOfSound * rate;
    add_into(acc, fractional_delay(rotor_noise[r], delay, gains[r]));
  }
  return acc;
}

}  // namespace

SceneOutput render_scene(const SceneConfig& cfg) {
  if (cfg.speech_path.empty()) throw ConfigError("scene.speech_path is empty");
  return render_scene(cfg, read_wav(cfg.speech_path));
}

SceneOutput render_scene(const SceneConfig& cfg, const AudioClip& speech_in) {
  cfg.validate();
  if (speech_in.channels() != 1) throw Error("render_scene: speech source must be mono");
  const int rate = cfg.sample_rate_hz;
  const AudioClip speech = speech_in.sample_rate_hz() == rate ? speech_in : resample(speech_in, rate);
  const auto s = speech.channel(0);
  if (power(s) == 0.0) throw Error("render_scene: speech source is silent, SNR target is unreachable");

  const SceneGeometry& g = cfg.geometry;
  const std::size_t n = speech.frames();
  const std::size_t m_arr = g.array_mics.size();
  const std::size_t m_prop = g.propeller_mics.size();
  const std::size_t m = m_arr + m_prop;
  const bool has_ext = g.external_mic.has_value();
  const std::size_t total = m + (has_ext ? 1 : 0);

  std::vector<Vec3> mics = g.array_mics;
  mics.insert(mics.end(), g.propeller_mics.begin(), g.propeller_mics.end());
  if (has_ext) mics.push_back(*g.external_mic);

  // Speech images, delays relative to the reference mic.
  const Vec3& ref_mic = g.array_mics[cfg.reference_mic];
  const double ref_dist = distance(g.source, ref_mic);
  const double ref_delay = steering_delay_gain(g.source, ref_mic, rate, ref_dist).delay_samples;
  AudioClip speech_img(total, n, rate), noise_img(total, n, rate);
  for (std::size_t c = 0; c < total; ++c) {
    const DelayGain dg = steering_delay_gain(g.source, mics[c], rate, ref_dist);
    const double extra = (c >= m_arr && c < m) ? db_to_amp(cfg.propeller_speech_db) : 1.0;
    auto img = fractional_delay(s, dg.delay_samples - ref_delay, dg.gain * extra);
    std::copy(img.begin(), img.end(), speech_img.channel(c).begin());
  }

  std::vector<std::vector<double>> rotor_noise;
  const double duration = static_cast<double>(n) / rate;
  for (std::size_t r = 0; r < g.rotors.size(); ++r) {
    auto clip = synth_ego_noise(cfg.rotor_speeds_rpm[r], duration, rate, cfg.seed * 16 + r);
    rotor_noise.emplace_back(clip.channel(0).begin(), clip.channel(0).end());
    rotor_noise.back().resize(n, 0.0);  // the duration round trip can be off by one sample
  }

  for (std::size_t c = 0; c < m; ++c) {
    std::vector<double> gains(g.rotors.size());
    for (std::size_t r = 0; r < g.rotors.size(); ++r) {
      if (c < m_arr) gains[r] = db_to_amp(cfg.coupling_array_db);
      else gains[r] = db_to_amp(c - m_arr == r ? cfg.coupling_own_db : cfg.coupling_other_propeller_db);
    }
    auto mix = rotor_mix(rotor_noise, g, mics[c], gains, rate);
    std::copy(mix.begin(), mix.end(), noise_img.channel(c).begin());
  }

  // Sensor self-noise, white and independent per channel.
  const double ego_ref_power = power(noise_img.channel(cfg.reference_mic));
  const double sensor_sd = std::sqrt(ego_ref_power * std::pow(10.0, cfg.sensor_noise_db / 10.0));
  {
    auto rng = make_rng(cfg.seed, 0x5E50);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t c = 0; c < m; ++c)
      for (auto& v : noise_img.channel(c)) v += sensor_sd * gauss(rng);
  }

  // Scale the noise so the reference channel hits the target SNR exactly.
  const double ps = power(speech_img.channel(cfg.reference_mic));
  const double pn = power(noise_img.channel(cfg.reference_mic));
  const double noise_scale = std::sqrt(ps / (pn * std::pow(10.0, cfg.target_snr_db / 10.0)));
  for (std::size_t c = 0; c < m; ++c)
    for (auto& v : noise_img.channel(c)) v *= noise_scale;

  SceneManifest man;
  if (has_ext) {
    std::vector<double> gains(g.rotors.size());
    for (std::size_t r = 0; r < g.rotors.size(); ++r)
      gains[r] = db_to_amp(cfg.coupling_array_db) * distance(g.rotors[r], ref_mic) / distance(g.rotors[r], mics[m]);
    auto ext_noise = rotor_mix(rotor_noise, g, mics[m], gains, rate);
    auto rng = make_rng(cfg.seed, 0xE7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : ext_noise) v += sensor_sd * gauss(rng);
    const double pse = power(speech_img.channel(m));
    const double pne = power(ext_noise);
    const double target = cfg.target_snr_db + cfg.external_snr_offset_db;
    const double scale = std::sqrt(pse / (pne * std::pow(10.0, target / 10.0)));
    auto dst = noise_img.channel(m);
    for (std::size_t t = 0; t < n; ++t) dst[t] = ext_noise[t] * scale;
    man.external_snr_db = snr_db(speech_img.channel(m), noise_img.channel(m)).value;
    man.external_channel = m;
  }

  SceneOutput out;
  out.mixture = AudioClip(total, n, rate);
  for (std::size_t c = 0; c < total; ++c) {
    auto y = out.mixture.channel(c);
    auto a = speech_img.channel(c);
    auto b = noise_img.channel(c);
    for (std::size_t t = 0; t < n; ++t) y[t] = a[t] + b[t];
  }

  StftParams params;
  params.sample_rate_hz = rate;
  out.oracle_mask = oracle_mask(analyze(speech_img.single(cfg.reference_mic), params).channel_slice(0),
                                analyze(noise_img.single(cfg.reference_mic), params).channel_slice(0));

  man.target_snr_db = cfg.target_snr_db;
  man.achieved_snr_db = snr_db(speech_img.channel(cfg.reference_mic), noise_img.channel(cfg.reference_mic)).value;
  man.seed = cfg.seed;
  man.sample_rate_hz = rate;
  man.frames = n;
  for (std::size_t c = 0; c < m_arr; ++c) man.array_channels.push_back(c);
  for (std::size_t c = m_arr; c < m; ++c) man.propeller_channels.push_back(c);
  man.reference_channel = cfg.reference_mic;
  man.rotor_speeds_rpm = cfg.rotor_speeds_rpm;
  man.speech_source = cfg.speech_path;
  out.manifest = std::move(man);
  out.speech_image = std::move(speech_img);
  out.noise_image = std::move(noise_img);
  return out;
}

void write_scene(const SceneOutput& scene, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create scene directory " + dir.string() + ": " + ec.message());
  write_wav(scene.mixture, dir / "mixture.wav");
  write_wav(scene.speech_image, dir / "speech.wav");
  write_wav(scene.noise_image, dir / "noise.wav");
  if (scene.manifest.external_channel) write_wav(scene.mixture.single(*scene.manifest.external_channel), dir / "external.wav");
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  if (!f) throw IoError("cannot write " + (dir / "manifest.json").string());
  f << manifest_to_json(scene.manifest) << '\n';
  if (!f) throw IoError("write failed: " + (dir / "manifest.json").string());
}

ChannelPartition suite_partition(std::size_t array_size) {
  if (array_size == 0 || array_size > 12) throw ConfigError("array size must be in 1..12");
  ChannelPartition p;
  for (std::size_t c = 0; c < array_size; ++c) p.speech_noise_channels.push_back(c);
  p.noise_only_channels = {12, 13, 14, 15};
  p.ref_channel = 0;
  return p;
}

EnhanceConfig SweepCell::enhance_config() const {
  EnhanceConfig cfg;
  cfg.stft.sample_rate_hz = scene.sample_rate_hz;
  cfg.partition = partition;
  cfg.method = method;
  cfg.spp_source.mode = spp_mode;
  if (spp_mode == SppMode::External) cfg.spp_source.channel = scene.geometry.channels();
  else cfg.spp_source.channel = partition.ref_input_channel();
  return cfg;
}

std::string SweepCell::key() const {
  char snr[32];
  std::snprintf(snr, sizeof snr, "%g", scene.target_snr_db);
  return std::string("snr=") + snr + "/msn=" + std::to_string(partition.m_sn()) + "/spp=" + to_string(spp_mode) +
         "/method=" + to_string(method);
}

std::vector<SweepCell> default_suite(const std::string& speech_path, std::uint64_t seed) {
  std::vector<SweepCell> cells;
  for (double snr : kSuiteSnrsDb) {
    for (std::size_t size : kSuiteArraySizes) {
      for (SppMode mode : {SppMode::Internal, SppMode::External, SppMode::Oracle}) {
        for (EnhanceMethod method : {EnhanceMethod::Mwf, EnhanceMethod::MwfWithNoiseMics, EnhanceMethod::PkMwf}) {
          SweepCell cell;
          cell.scene.target_snr_db = snr;
          cell.scene.speech_path = speech_path;
          cell.scene.seed = seed;
          cell.scene.rotor_speeds_rpm = default_rotor_speeds(seed);
          cell.partition = suite_partition(size);
          cell.spp_mode = mode;
          cell.method = method;
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

}  // namespace egomwf
