#include "egomwf/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "egomwf/error.hpp"
#include "json.hpp"

namespace egomwf {

using nlohmann::json;

namespace {

// Reads typed fields out of one JSON object, recording problems instead of
// throwing so that a single pass reports every violation.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<std::string>& bad)
      : obj_(obj), prefix_(std::move(prefix)), bad_(bad) {
    if (!obj_.is_object()) bad_.push_back(where("") + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      bad_.push_back(where(key) + " has the wrong type (got " + v->type_name() + ")");
    }
  }

  void get_size(const char* key, std::size_t& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number_integer() || v->get<long long>() < 0) {
      bad_.push_back(where(key) + " must be a non-negative integer");
      return;
    }
    out = v->get<std::size_t>();
  }

  void get_sizes(const char* key, std::vector<std::size_t>& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array()) {
      bad_.push_back(where(key) + " must be an array of channel indices");
      return;
    }
    out.clear();
    for (const auto& e : *v) {
      if (!e.is_number_integer() || e.get<long long>() < 0) {
        bad_.push_back(where(key) + " entries must be non-negative integers");
        return;
      }
      out.push_back(e.get<std::size_t>());
    }
  }

  template <typename Fn>
  void get_enum(const char* key, Fn parse) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_string()) {
      bad_.push_back(where(key) + " must be a string");
      return;
    }
    try {
      parse(v->get<std::string>());
    } catch (const ConfigError& e) {
      for (const auto& msg : e.violations()) bad_.push_back(where(key) + ": " + msg);
    }
  }

  const json* child(const char* key) { return find(key); }

  void reject_unknown(std::initializer_list<const char*> known) {
    if (!obj_.is_object()) return;
    std::set<std::string> ok(known.begin(), known.end());
    for (const auto& [k, v] : obj_.items())
      if (!ok.count(k)) bad_.push_back(where(k.c_str()) + " is not a recognized key");
  }

  std::string where(const char* key) const {
    if (prefix_.empty()) return key;
    return *key ? prefix_ + "." + key : prefix_;
  }

 private:
  const json* find(const char* key) {
    if (!obj_.is_object()) return nullptr;
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& bad_;
};

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

WindowKind window_from_string(const std::string& s) {
  if (s == "sqrt-hann-periodic") return WindowKind::SqrtHannPeriodic;
  if (s == "rectangular") return WindowKind::Rectangular;
  throw ConfigError("unknown window '" + s + "' (expected sqrt-hann-periodic or rectangular)");
}

const char* to_string(WindowKind w) { return w == WindowKind::Rectangular ? "rectangular" : "sqrt-hann-periodic"; }

json partition_json(const ChannelPartition& p) {
  return {{"speech_noise_channels", p.speech_noise_channels},
          {"noise_only_channels", p.noise_only_channels},
          {"ref_channel", p.ref_channel},
          {"m_sn", p.m_sn()},
          {"m_n", p.m_n()}};
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

EnhanceFile read_enhance_config(const std::string& json_text, std::vector<std::string>& bad) {
  EnhanceFile out;
  json doc;
  try {
    doc = parse_text(json_text);
  } catch (const ConfigError& e) {
    bad.insert(bad.end(), e.violations().begin(), e.violations().end());
    return out;
  }
  EnhanceConfig& cfg = out.config;

  Reader top(doc, "", bad);
  top.reject_unknown({"stft", "spp", "partition", "method", "regularization_delta", "threads", "paths"});
  top.get_enum("method", [&](const std::string& s) { cfg.method = enhance_method_from_string(s); });
  top.get("regularization_delta", cfg.regularization_delta);
  top.get_size("threads", cfg.threads);

  if (const json* j = top.child("stft")) {
    Reader r(*j, "stft", bad);
    r.reject_unknown({"fft_size", "hop", "window", "sample_rate_hz"});
    r.get_size("fft_size", cfg.stft.fft_size);
    r.get_size("hop", cfg.stft.hop);
    r.get("sample_rate_hz", cfg.stft.sample_rate_hz);
    r.get_enum("window", [&](const std::string& s) { cfg.stft.window = window_from_string(s); });
  }
  if (const json* j = top.child("spp")) {
    Reader r(*j, "spp", bad);
    r.reject_unknown({"mode", "channel", "xi_h1", "alpha_psd", "spp_cap", "init_frames", "threshold"});
    r.get_enum("mode", [&](const std::string& s) { cfg.spp_source.mode = spp_mode_from_string(s); });
    r.get_size("channel", cfg.spp_source.channel);
    r.get("xi_h1", cfg.spp.xi_h1);
    r.get("alpha_psd", cfg.spp.alpha_psd);
    r.get("spp_cap", cfg.spp.spp_cap);
    r.get_size("init_frames", cfg.spp.init_frames);
    r.get("threshold", cfg.spp.threshold);
  }
  if (const json* j = top.child("partition")) {
    Reader r(*j, "partition", bad);
    r.reject_unknown({"speech_noise_channels", "noise_only_channels", "ref_channel"});
    r.get_sizes("speech_noise_channels", cfg.partition.speech_noise_channels);
    r.get_sizes("noise_only_channels", cfg.partition.noise_only_channels);
    r.get_size("ref_channel", cfg.partition.ref_channel);
  } else {
    bad.emplace_back("partition is required");
  }
  if (const json* j = top.child("paths")) {
    Reader r(*j, "paths", bad);
    r.reject_unknown({"input", "output", "report", "speech", "noise"});
    auto opt = [&](const char* key, std::optional<std::string>& dst) {
      std::string s;
      bool present = false;
      if (j->is_object() && j->contains(key) && !(*j)[key].is_null()) present = true;
      r.get(key, s);
      if (present && !s.empty()) dst = s;
    };
    opt("input", out.paths.input);
    opt("output", out.paths.output);
    opt("report", out.paths.report);
    opt("speech", out.paths.speech);
    opt("noise", out.paths.noise);
  }
  if (out.paths.speech.has_value() != out.paths.noise.has_value())
    bad.emplace_back("paths.speech and paths.noise must be given together");
  return out;
}

EnhanceFile parse_enhance_config(const std::string& json_text, std::size_t input_channels) {
  std::vector<std::string> bad;
  EnhanceFile out = read_enhance_config(json_text, bad);
  auto sem = out.config.violations(input_channels);
  bad.insert(bad.end(), sem.begin(), sem.end());
  if (!bad.empty()) throw ConfigError(std::move(bad));
  return out;
}

std::string enhance_config_to_json(const EnhanceConfig& cfg) {
  json j = {
      {"stft",
       {{"fft_size", cfg.stft.fft_size},
        {"hop", cfg.stft.hop},
        {"window", to_string(cfg.stft.window)},
        {"sample_rate_hz", cfg.stft.sample_rate_hz}}},
      {"spp",
       {{"mode", to_string(cfg.spp_source.mode)},
        {"channel", cfg.spp_source.channel},
        {"xi_h1", cfg.spp.xi_h1},
        {"alpha_psd", cfg.spp.alpha_psd},
        {"spp_cap", cfg.spp.spp_cap},
        {"init_frames", cfg.spp.init_frames},
        {"threshold", cfg.spp.threshold}}},
      {"partition",
       {{"speech_noise_channels", cfg.partition.speech_noise_channels},
        {"noise_only_channels", cfg.partition.noise_only_channels},
        {"ref_channel", cfg.partition.ref_channel}}},
      {"method", to_string(cfg.method)},
      {"regularization_delta", cfg.regularization_delta},
  };
  return j.dump(2);
}

SceneConfig parse_scene_config(const std::string& json_text) {
  const json doc = parse_text(json_text);
  std::vector<std::string> bad;
  SceneConfig cfg;
  Reader top(doc, "", bad);
  top.reject_unknown({"target_snr_db", "speech_path", "seed", "sample_rate_hz", "rotor_speeds_rpm",
                      "coupling_own_db", "coupling_other_propeller_db", "coupling_array_db", "propeller_speech_db",
                      "sensor_noise_db", "external_snr_offset_db", "external_mic", "source"});
  top.get("target_snr_db", cfg.target_snr_db);
  top.get("speech_path", cfg.speech_path);
  top.get("seed", cfg.seed);
  top.get("sample_rate_hz", cfg.sample_rate_hz);
  cfg.rotor_speeds_rpm = default_rotor_speeds(cfg.seed);
  if (const json* j = top.child("rotor_speeds_rpm")) {
    if (!j->is_array() || j->size() != 4) bad.emplace_back("rotor_speeds_rpm must be an array of 4 numbers");
    else top.get("rotor_speeds_rpm", cfg.rotor_speeds_rpm);
  }
  top.get("coupling_own_db", cfg.coupling_own_db);
  top.get("coupling_other_propeller_db", cfg.coupling_other_propeller_db);
  top.get("coupling_array_db", cfg.coupling_array_db);
  top.get("propeller_speech_db", cfg.propeller_speech_db);
  top.get("sensor_noise_db", cfg.sensor_noise_db);
  top.get("external_snr_offset_db", cfg.external_snr_offset_db);
  auto read_vec = [&](const char* key, auto assign) {
    const json* j = top.child(key);
    if (!j) return;
    if (!j->is_array() || j->size() != 3 || !std::all_of(j->begin(), j->end(), [](const json& e) { return e.is_number(); })) {
      bad.push_back(std::string(key) + " must be [x, y, z] in meters");
      return;
    }
    assign(Vec3{(*j)[0].get<double>(), (*j)[1].get<double>(), (*j)[2].get<double>()});
  };
  read_vec("source", [&](Vec3 v) { cfg.geometry.source = v; });
  if (doc.is_object() && doc.contains("external_mic") && doc["external_mic"].is_null()) cfg.geometry.external_mic.reset();
  read_vec("external_mic", [&](Vec3 v) { cfg.geometry.external_mic = v; });

  auto sem = cfg.violations();
  bad.insert(bad.end(), sem.begin(), sem.end());
  if (!bad.empty()) throw ConfigError(std::move(bad));
  return cfg;
}

std::string metrics_to_json(const MetricsReport& r) {
  json j = {
      {"snr_in_db", optional_json(r.snr_in_db)},
      {"snr_out_db", optional_json(r.snr_out_db)},
      {"snr_improvement_db", optional_json(r.snr_improvement_db)},
      {"stoi_in", r.stoi_in},
      {"stoi_out", r.stoi_out},
      {"stoi_improvement", r.stoi_improvement},
      {"method", r.method.empty() ? json(nullptr) : json(r.method)},
      {"partition", r.partition.m_sn() == 0 ? json(nullptr) : partition_json(r.partition)},
      {"spp_mode", r.spp_mode.empty() ? json(nullptr) : json(r.spp_mode)},
      {"spp_channel", optional_json(r.spp_channel)},
      {"flags", r.flags},
  };
  return j.dump(2);
}

std::string manifest_to_json(const SceneManifest& m) {
  json j = {
      {"target_snr_db", m.target_snr_db},
      {"achieved_snr_db", m.achieved_snr_db},
      {"external_snr_db", optional_json(m.external_snr_db)},
      {"seed", m.seed},
      {"sample_rate_hz", m.sample_rate_hz},
      {"frames", m.frames},
      {"channels",
       {{"array", m.array_channels},
        {"propeller", m.propeller_channels},
        {"external", optional_json(m.external_channel)},
        {"reference", m.reference_channel}}},
      {"rotor_speeds_rpm", m.rotor_speeds_rpm},
      {"speech_source", m.speech_source},
  };
  return j.dump(2);
}

std::string enhance_report_to_json(const EnhanceConfig& cfg, const EnhanceResult& result,
                                   const std::optional<MetricsReport>& metrics) {
  json counts = json::object();
  const auto tally = result.filterbank.status_counts();
  for (std::size_t i = 0; i < kBinStatusCount; ++i) counts[to_string(static_cast<BinStatus>(i))] = tally[i];
  json j = {
      {"method", to_string(cfg.method)},
      {"partition", partition_json(result.filterbank.partition)},
      {"spp", {{"mode", to_string(result.mask.source.mode)},
               {"channel", result.mask.source.mode == SppMode::Oracle ? json(nullptr) : json(result.mask.source.channel)},
               {"active_fraction", result.mask.active_fraction()}}},
      {"bins", result.filterbank.bins()},
      {"bin_status_counts", counts},
      {"frames", result.enhanced.frames()},
      {"sample_rate_hz", result.enhanced.sample_rate_hz()},
      {"regularization_delta", cfg.regularization_delta},
      {"warnings", result.warnings},
      {"metrics", metrics ? json::parse(metrics_to_json(*metrics)) : json(nullptr)},
  };
  return j.dump(2);
}

}  // namespace egomwf
