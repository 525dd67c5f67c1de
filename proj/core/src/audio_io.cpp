#include "egomwf/audio_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "egomwf/error.hpp"

namespace egomwf {

AudioClip::AudioClip(std::size_t channels, std::size_t frames, int sample_rate_hz)
    : channels_(channels), frames_(frames), rate_(sample_rate_hz),
      data_(channels * frames, 0.0) {}

AudioClip::AudioClip(std::vector<std::vector<double>> channels, int sample_rate_hz)
    : channels_(channels.size()), rate_(sample_rate_hz) {
  frames_ = channels.empty() ? 0 : channels.front().size();
  data_.reserve(channels_ * frames_);
  for (const auto& ch : channels) {
    if (ch.size() != frames_) throw Error("AudioClip: channels have unequal frame counts");
    data_.insert(data_.end(), ch.begin(), ch.end());
  }
}

std::span<double> AudioClip::channel(std::size_t c) {
  if (c >= channels_) throw Error("AudioClip: channel index out of range");
  return {data_.data() + c * frames_, frames_};
}

std::span<const double> AudioClip::channel(std::size_t c) const {
  if (c >= channels_) throw Error("AudioClip: channel index out of range");
  return {data_.data() + c * frames_, frames_};
}

AudioClip AudioClip::select(std::span<const std::size_t> channels) const {
  AudioClip out(channels.size(), frames_, rate_);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    auto src = channel(channels[i]);
    std::copy(src.begin(), src.end(), out.channel(i).begin());
  }
  return out;
}

AudioClip AudioClip::single(std::size_t c) const {
  const std::array<std::size_t, 1> idx{c};
  return select(idx);
}

void AudioClip::validate() const {
  if (rate_ <= 0) throw Error("AudioClip: sample rate must be positive");
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error("AudioClip: non-finite sample");
  }
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0)
    throw IoError(path.string() + ": not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* chunk = bytes.data() + pos;
    const auto size = load<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw IoError(path.string() + ": truncated fmt chunk");
      format = load<std::uint16_t>(chunk + 8);
      channels = load<std::uint16_t>(chunk + 10);
      rate = load<std::uint32_t>(chunk + 12);
      bits = load<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible) {
        if (avail < 26) throw IoError(path.string() + ": truncated extensible fmt chunk");
        format = load<std::uint16_t>(chunk + 32);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos = body + size + (size & 1U);
  }

  if (channels == 0 || rate == 0) throw IoError(path.string() + ": missing or invalid fmt chunk");
  if (data == nullptr) throw IoError(path.string() + ": missing data chunk");

  const bool pcm = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool flt = format == kFormatFloat && bits == 32;
  if (!pcm && !flt)
    throw IoError(path.string() + ": unsupported codec (format " + std::to_string(format) +
                  ", " + std::to_string(bits) + " bits)");

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  if (frames == 0) throw IoError(path.string() + ": zero-length audio");

  AudioClip clip(channels, frames, static_cast<int>(rate));
  const char* p = data;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < channels; ++c, p += width) {
      double v = 0.0;
      if (flt) {
        v = load<float>(p);
      } else if (bits == 16) {
        v = load<std::int16_t>(p) / 32768.0;
      } else if (bits == 24) {
        std::int32_t s = static_cast<unsigned char>(p[0]) |
                         (static_cast<unsigned char>(p[1]) << 8) |
                         (static_cast<std::int32_t>(static_cast<signed char>(p[2])) << 16);
        v = s / 8388608.0;
      } else {
        v = load<std::int32_t>(p) / 2147483648.0;
      }
      clip.at(c, t) = v;
    }
  }
  clip.validate();
  return clip;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path, BitDepth depth) {
  if (clip.empty()) throw IoError("write_wav: empty clip");
  clip.validate();

  const std::uint16_t channels = static_cast<std::uint16_t>(clip.channels());
  const std::uint16_t bits = depth == BitDepth::Pcm16 ? 16 : 32;
  const std::uint16_t block = channels * (bits / 8);
  const auto rate = static_cast<std::uint32_t>(clip.sample_rate_hz());
  const auto payload = static_cast<std::uint32_t>(clip.frames() * block);

  std::string out;
  out.reserve(44 + payload);
  out.append("RIFF");
  store<std::uint32_t>(out, 36 + payload);
  out.append("WAVEfmt ");
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, depth == BitDepth::Pcm16 ? kFormatPcm : kFormatFloat);
  store<std::uint16_t>(out, channels);
  store<std::uint32_t>(out, rate);
  store<std::uint32_t>(out, rate * block);
  store<std::uint16_t>(out, block);
  store<std::uint16_t>(out, bits);
  out.append("data");
  store<std::uint32_t>(out, payload);

  for (std::size_t t = 0; t < clip.frames(); ++t) {
    for (std::size_t c = 0; c < clip.channels(); ++c) {
      const double v = std::clamp(clip.at(c, t), -1.0, 1.0);
      if (depth == BitDepth::Pcm16) {
        const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        store<std::int16_t>(out, static_cast<std::int16_t>(q));
      } else {
        store<float>(out, static_cast<float>(v));
      }
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

namespace {

constexpr int kTapsPerPhase = 64;
constexpr double kKaiserBeta = 8.0;
constexpr double kCutoffFactor = 0.9;
constexpr std::int64_t kMaxRatioTerm = 1024;

// Polyphase table: phases x taps. Phase p interpolates at fractional offset p/up.
struct PolyphaseKernel {
  std::int64_t up = 1;
  std::int64_t down = 1;
  std::vector<double> taps;

  PolyphaseKernel(int source, int target) {
    const std::int64_t g = std::gcd<std::int64_t>(source, target);
    up = target / g;
    down = source / g;
    if (up > kMaxRatioTerm || down > kMaxRatioTerm)
      throw Error("resample: ratio " + std::to_string(target) + "/" + std::to_string(source) +
                  " needs terms above " + std::to_string(kMaxRatioTerm));

    // Cutoff in cycles per input sample.
    const double fc = kCutoffFactor * 0.5 * std::min(1.0, static_cast<double>(up) / down);
    const double half = kTapsPerPhase / 2.0;
    const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);

    taps.assign(static_cast<std::size_t>(up * kTapsPerPhase), 0.0);
    for (std::int64_t p = 0; p < up; ++p) {
      const double frac = static_cast<double>(p) / static_cast<double>(up);
      double* row = taps.data() + p * kTapsPerPhase;
      double sum = 0.0;
      for (int j = 0; j < kTapsPerPhase; ++j) {
        // Tap j multiplies x[k0 - (half - 1) + j]; tau = t - k.
        const double tau = frac + (half - 1.0) - j;
        const double r = tau / half;
        const double win =
            std::abs(r) >= 1.0 ? 0.0
                               : std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) / norm;
        const double arg = 2.0 * fc * tau;
        const double sinc = arg == 0.0 ? 1.0 : std::sin(M_PI * arg) / (M_PI * arg);
        row[j] = 2.0 * fc * sinc * win;
        sum += row[j];
      }
      for (int j = 0; j < kTapsPerPhase; ++j) row[j] /= sum;
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    const auto n_in = static_cast<std::int64_t>(x.size());
    const std::int64_t n_out = (n_in * up + down - 1) / down;
    std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
    const std::int64_t offset = kTapsPerPhase / 2 - 1;
    for (std::int64_t n = 0; n < n_out; ++n) {
      const std::int64_t pos = n * down;
      const std::int64_t k0 = pos / up;
      const double* row = taps.data() + (pos % up) * kTapsPerPhase;
      double acc = 0.0;
      const std::int64_t first = k0 - offset;
      const std::int64_t j_lo = std::max<std::int64_t>(0, -first);
      const std::int64_t j_hi = std::min<std::int64_t>(kTapsPerPhase, n_in - first);
      for (std::int64_t j = j_lo; j < j_hi; ++j) acc += row[j] * x[static_cast<std::size_t>(first + j)];
      y[static_cast<std::size_t>(n)] = acc;
    }
    return y;
  }
};

}  // namespace

std::vector<double> resample(std::span<const double> x, int source_rate_hz, int target_rate_hz) {
  if (target_rate_hz <= 0 || source_rate_hz <= 0) throw Error("resample: rates must be positive");
  if (target_rate_hz == source_rate_hz) return {x.begin(), x.end()};
  return PolyphaseKernel(source_rate_hz, target_rate_hz).apply(x);
}

AudioClip resample(const AudioClip& clip, int target_rate_hz) {
  if (target_rate_hz <= 0) throw Error("resample: target rate must be positive");
  if (target_rate_hz == clip.sample_rate_hz()) return clip;
  const PolyphaseKernel kernel(clip.sample_rate_hz(), target_rate_hz);
  std::vector<std::vector<double>> out;
  out.reserve(clip.channels());
  for (std::size_t c = 0; c < clip.channels(); ++c) out.push_back(kernel.apply(clip.channel(c)));
  return AudioClip(std::move(out), target_rate_hz);
}

}  // namespace egomwf
