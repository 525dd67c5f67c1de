#include <charconv>
#include <sstream>

#include "egomwf/config.hpp"
#include "egomwf/error.hpp"
#include "egomwf/parallel.hpp"
#include "egomwf_cli/cli.hpp"
#include "json.hpp"

namespace egomwf::cli {

SweepRow run_cell(const SweepCell& cell, const SceneOutput& scene) {
  SweepRow row;
  row.cell = cell;
  try {
    const EnhanceConfig cfg = cell.enhance_config();
    const GroundTruth truth{scene.speech_image, scene.noise_image};
    const SppMask* oracle = cell.spp_mode == SppMode::Oracle ? &scene.oracle_mask : nullptr;
    const EnhanceResult res = enhance(scene.mixture, cfg, &truth, oracle);
    const std::size_t ref = cell.partition.ref_input_channel();
    row.metrics = evaluate(res, scene.speech_image.single(ref), scene.mixture.single(ref));
    row.bin_status = res.filterbank.status_counts();
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepOptions& opts, const AudioClip& speech, const std::string& speech_path) {
  std::vector<SweepCell> cells;
  for (std::uint64_t seed : opts.seeds)
    for (double snr : opts.snrs_db)
      for (std::size_t size : opts.array_sizes)
        for (SppMode mode : opts.spp_modes)
          for (EnhanceMethod method : opts.methods) {
            SweepCell c;
            c.scene.target_snr_db = snr;
            c.scene.seed = seed;
            c.scene.speech_path = speech_path;
            c.scene.rotor_speeds_rpm = default_rotor_speeds(seed);
            c.partition = suite_partition(size);
            c.spp_mode = mode;
            c.method = method;
            cells.push_back(std::move(c));
          }

  // Scenes depend only on (seed, snr).
  std::vector<std::pair<std::uint64_t, double>> keys;
  for (std::uint64_t seed : opts.seeds)
    for (double snr : opts.snrs_db) keys.emplace_back(seed, snr);
  std::vector<std::optional<SceneOutput>> scenes(keys.size());
  std::vector<std::string> scene_errors(keys.size());
  parallel_for(keys.size(), opts.threads, [&](std::size_t i) {
    SceneConfig sc;
    sc.seed = keys[i].first;
    sc.target_snr_db = keys[i].second;
    sc.rotor_speeds_rpm = default_rotor_speeds(sc.seed);
    sc.speech_path = speech_path;
    try {
      scenes[i] = render_scene(sc, speech);
    } catch (const std::exception& e) {
      scene_errors[i] = e.what();
    }
  });
  auto scene_index = [&](const SweepCell& c) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i].first == c.scene.seed && keys[i].second == c.scene.target_snr_db) return i;
    return keys.size();
  };

  std::vector<SweepRow> rows(cells.size());
  parallel_for(cells.size(), opts.threads, [&](std::size_t i) {
    const std::size_t s = scene_index(cells[i]);
    if (!scenes[s]) {
      rows[i].cell = cells[i];
      rows[i].error = "scene rendering failed: " + scene_errors[s];
      return;
    }
    rows[i] = run_cell(cells[i], *scenes[s]);
  });
  return rows;
}

namespace {

// Shortest representation that round-trips, so the table is bit-faithful.
std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(1, sep) : "") + v[i];
  return out;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "snr_db,m_sn,m_n,spp_mode,method,seed,snr_in_db,snr_out_db,snr_improvement_db,"
        "stoi_in,stoi_out,stoi_improvement";
  for (std::size_t i = 0; i < kBinStatusCount; ++i) os << ",bins_" << to_string(static_cast<BinStatus>(i));
  os << ",flags,error\n";
  for (const auto& r : rows) {
    const auto& c = r.cell;
    const ChannelPartition used = c.enhance_config().effective_partition();
    os << num(c.scene.target_snr_db) << ',' << used.m_sn() << ',' << used.m_n() << ','
       << to_string(c.spp_mode) << ',' << to_string(c.method) << ',' << c.scene.seed << ',';
    if (r.metrics) {
      const auto& m = *r.metrics;
      os << opt_num(m.snr_in_db) << ',' << opt_num(m.snr_out_db) << ',' << opt_num(m.snr_improvement_db) << ','
         << num(m.stoi_in) << ',' << num(m.stoi_out) << ',' << num(m.stoi_improvement);
    } else {
      os << ",,,,,";
    }
    for (std::size_t i = 0; i < kBinStatusCount; ++i) os << ',' << r.bin_status[i];
    os << ',' << csv_field(r.metrics ? join(r.metrics->flags, ';') : "") << ',' << csv_field(r.error) << '\n';
  }
  return os.str();
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  using nlohmann::json;
  json cells = json::array();
  for (const auto& r : rows) {
    const auto& c = r.cell;
    const ChannelPartition used = c.enhance_config().effective_partition();
    json counts = json::object();
    for (std::size_t i = 0; i < kBinStatusCount; ++i) counts[to_string(static_cast<BinStatus>(i))] = r.bin_status[i];
    cells.push_back({
        {"key", c.key()},
        {"snr_db", c.scene.target_snr_db},
        {"m_sn", used.m_sn()},
        {"m_n", used.m_n()},
        {"spp_mode", to_string(c.spp_mode)},
        {"method", to_string(c.method)},
        {"seed", c.scene.seed},
        {"metrics", r.metrics ? json::parse(metrics_to_json(*r.metrics)) : json(nullptr)},
        {"bin_status_counts", counts},
        {"error", r.error.empty() ? json(nullptr) : json(r.error)},
    });
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  return json{{"cells", cells}, {"cell_count", rows.size()}, {"failed", failed}}.dump(2);
}

}  // namespace egomwf::cli
