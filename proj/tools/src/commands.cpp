#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "egomwf/config.hpp"
#include "egomwf/error.hpp"
#include "egomwf/parallel.hpp"
#include "egomwf_cli/cli.hpp"
#include "json.hpp"

namespace egomwf::cli {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void make_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  make_parent(path);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

// CLI11 wants argv-style input; element 0 is the program name.
int parse(CLI::App& app, const Args& args, std::ostream& out, std::ostream& err, bool& done) {
  std::vector<std::string> rev(args.rbegin(), args.rend());
  done = false;
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    done = true;
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    done = true;
    return kExitConfig;
  }
  return kExitOk;
}

// Maps library exceptions onto the exit-code contract.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn, const std::string& usage = {}) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "configuration error:\n";
    for (const auto& v : e.violations()) err << "  - " << v << '\n';
    if (!usage.empty()) err << '\n' << usage;
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "processing error: " << e.what() << '\n';
    return kExitProcessing;
  }
}

}  // namespace

int cmd_enhance(const Args& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Enhance a multichannel recording with MWF or PK-MWF", "egomwf enhance"};
  std::string input, output, config_path, method, report, spp_mode, speech, noise;
  std::optional<std::size_t> spp_channel, threads;
  app.add_option("--input", input, "multichannel WAV");
  app.add_option("--output", output, "enhanced mono WAV");
  app.add_option("--config", config_path, "JSON enhance configuration")->required();
  app.add_option("--method", method, "mwf | mwf-with-noise-mics | pk-mwf (overrides config)");
  app.add_option("--report", report, "JSON report path");
  app.add_option("--spp-mode", spp_mode, "internal | external | oracle (overrides config)");
  app.add_option("--spp-channel", spp_channel, "input channel for internal/external SPP");
  app.add_option("--speech", speech, "ground-truth speech component, same layout as input");
  app.add_option("--noise", noise, "ground-truth noise component, same layout as input");
  app.add_option("--threads", threads, "worker threads for the per-bin stages");
  bool done = false;
  const int rc = parse(app, args, out, err, done);
  if (done) return rc;

  return guarded(err, [&] {
    std::vector<std::string> bad;
    EnhanceFile file = read_enhance_config(read_text(config_path), bad);
    EnhanceConfig& cfg = file.config;
    auto absorb = [&](auto&& fn) {
      try {
        fn();
      } catch (const ConfigError& e) {
        bad.insert(bad.end(), e.violations().begin(), e.violations().end());
      }
    };
    if (!method.empty()) absorb([&] { cfg.method = enhance_method_from_string(method); });
    if (!spp_mode.empty()) absorb([&] { cfg.spp_source.mode = spp_mode_from_string(spp_mode); });
    if (spp_channel) cfg.spp_source.channel = *spp_channel;
    cfg.threads = threads ? *threads : default_thread_count();
    if (!input.empty()) file.paths.input = input;
    if (!output.empty()) file.paths.output = output;
    if (!report.empty()) file.paths.report = report;
    if (!speech.empty()) file.paths.speech = speech;
    if (!noise.empty()) file.paths.noise = noise;
    if (!file.paths.input) bad.emplace_back("--input (or paths.input) is required");
    if (!file.paths.output) bad.emplace_back("--output (or paths.output) is required");
    if (file.paths.speech.has_value() != file.paths.noise.has_value())
      bad.emplace_back("--speech and --noise must be given together");
    if (cfg.spp_source.mode == SppMode::Oracle && !file.paths.speech)
      bad.emplace_back("oracle SPP mode needs --speech and --noise");
    // The input is read before reporting so channel ranges are checked too;
    // an unreadable input with a bad config still reports the config first.
    std::optional<AudioClip> input_clip;
    if (file.paths.input) {
      try {
        input_clip = read_wav(*file.paths.input);
      } catch (const IoError&) {
        if (bad.empty() && cfg.violations().empty()) throw;
      }
    }
    const auto sem = cfg.violations(input_clip ? input_clip->channels() : 0);
    bad.insert(bad.end(), sem.begin(), sem.end());
    if (!bad.empty()) throw ConfigError(std::move(bad));
    const AudioClip& mixture = *input_clip;

    std::optional<GroundTruth> truth;
    if (file.paths.speech) truth = GroundTruth{read_wav(*file.paths.speech), read_wav(*file.paths.noise)};
    const EnhanceResult res = enhance(mixture, cfg, truth ? &*truth : nullptr);
    make_parent(*file.paths.output);
    write_wav(res.enhanced, *file.paths.output);

    std::optional<MetricsReport> metrics;
    if (truth) {
      const std::size_t ref = cfg.partition.ref_input_channel();
      AudioClip clean = truth->speech.single(ref);
      AudioClip noisy = mixture.single(ref);
      if (clean.sample_rate_hz() != cfg.stft.sample_rate_hz) clean = resample(clean, cfg.stft.sample_rate_hz);
      if (noisy.sample_rate_hz() != cfg.stft.sample_rate_hz) noisy = resample(noisy, cfg.stft.sample_rate_hz);
      metrics = evaluate(res, clean, noisy);
    }
    const std::string doc = enhance_report_to_json(cfg, res, metrics);
    if (file.paths.report) write_text(*file.paths.report, doc);
    for (const auto& w : res.warnings) err << "warning: " << w << '\n';
    out << "wrote " << *file.paths.output << '\n';
    return static_cast<int>(kExitOk);
  }, app.help());
}

int cmd_simulate(const Args& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Render synthetic UAV scenes", "egomwf simulate"};
  std::string scene_config, output_dir, speech;
  bool default_suite_flag = false;
  std::uint64_t seed = 1;
  auto* sc = app.add_option("--scene-config", scene_config, "JSON scene configuration");
  auto* ds = app.add_flag("--default-suite", default_suite_flag, "render the 81-cell evaluation suite");
  sc->excludes(ds);
  app.add_option("--output-dir", output_dir, "destination directory")->required();
  app.add_option("--speech", speech, "mono speech WAV (overrides speech_path)");
  app.add_option("--seed", seed, "seed for the default suite");
  bool done = false;
  const int rc = parse(app, args, out, err, done);
  if (done) return rc;

  return guarded(err, [&] {
    if (scene_config.empty() && !default_suite_flag)
      throw ConfigError("one of --scene-config or --default-suite is required");
    const std::filesystem::path dir(output_dir);
    if (!default_suite_flag) {
      SceneConfig cfg = parse_scene_config(read_text(scene_config));
      if (!speech.empty()) cfg.speech_path = speech;
      const SceneOutput scene = render_scene(cfg);
      write_scene(scene, dir);
      out << "scene written to " << dir.string() << " (achieved SNR " << scene.manifest.achieved_snr_db << " dB)\n";
      return static_cast<int>(kExitOk);
    }
    if (speech.empty()) throw ConfigError("--default-suite needs --speech");
    const AudioClip source = read_wav(speech);
    const auto cells = default_suite(speech, seed);
    // Cells share one scene per SNR; render those once.
    nlohmann::json listing = nlohmann::json::array();
    std::vector<double> rendered;
    for (const auto& cell : cells) {
      char name[48];
      std::snprintf(name, sizeof name, "scene_snr%+g", cell.scene.target_snr_db);
      if (std::find(rendered.begin(), rendered.end(), cell.scene.target_snr_db) == rendered.end()) {
        write_scene(render_scene(cell.scene, source), dir / name);
        rendered.push_back(cell.scene.target_snr_db);
      }
      listing.push_back({{"key", cell.key()},
                         {"scene_dir", name},
                         {"enhance", nlohmann::json::parse(enhance_config_to_json(cell.enhance_config()))}});
    }
    write_text(dir / "suite.json", nlohmann::json{{"seed", seed}, {"cells", listing}}.dump(2));
    out << cells.size() << " suite cells over " << rendered.size() << " scenes written to " << dir.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_evaluate(const Args& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Score an enhanced signal against the clean reference", "egomwf evaluate"};
  std::string clean, processed, noisy, shadow_speech, shadow_noise, report;
  std::size_t channel = 0;
  app.add_option("--clean", clean, "clean speech (mono, or multichannel with --channel)")->required();
  app.add_option("--processed", processed, "enhanced mono WAV")->required();
  app.add_option("--noisy", noisy, "unprocessed mixture (mono, or multichannel with --channel)")->required();
  app.add_option("--shadow-speech", shadow_speech, "filter output for the speech component");
  app.add_option("--shadow-noise", shadow_noise, "filter output for the noise component");
  app.add_option("--channel", channel, "reference channel of multichannel clean/noisy inputs");
  app.add_option("--report", report, "JSON report path")->required();
  bool done = false;
  const int rc = parse(app, args, out, err, done);
  if (done) return rc;

  return guarded(err, [&] {
    if (shadow_speech.empty() != shadow_noise.empty())
      throw ConfigError("--shadow-speech and --shadow-noise must be given together");
    auto mono = [&](const std::string& path) {
      AudioClip c = read_wav(path);
      if (c.channels() == 1) return c;
      if (channel >= c.channels())
        throw ConfigError("--channel " + std::to_string(channel) + " out of range for " + path);
      return c.single(channel);
    };
    const AudioClip c = mono(clean), y = mono(noisy), p = read_wav(processed);
    std::optional<AudioClip> ss, sn;
    if (!shadow_speech.empty()) {
      ss = read_wav(shadow_speech);
      sn = read_wav(shadow_noise);
    }
    const MetricsReport r = evaluate_signals(c, y, p, ss ? &*ss : nullptr, sn ? &*sn : nullptr);
    write_text(report, metrics_to_json(r));
    out << "wrote " << report << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const Args& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Run the evaluation grid: simulate, enhance and score every cell", "egomwf sweep"};
  std::string output_dir, speech;
  SweepOptions opts;
  std::vector<std::string> modes, methods;
  std::optional<std::size_t> threads;
  app.add_option("--output-dir", output_dir, "destination for results.json and results.csv")->required();
  app.add_option("--speech", speech, "mono speech WAV")->required();
  app.add_option("--snr", opts.snrs_db, "input SNRs in dB")->delimiter(',');
  app.add_option("--array-sizes", opts.array_sizes, "speech+noise channel counts (1..12)")->delimiter(',');
  app.add_option("--spp-modes", modes, "internal,external,oracle")->delimiter(',');
  app.add_option("--methods", methods, "mwf,mwf-with-noise-mics,pk-mwf")->delimiter(',');
  app.add_option("--seeds", opts.seeds, "scene seeds")->delimiter(',');
  app.add_option("--threads", threads, "worker count (default EGOMWF_THREADS or all cores)");
  bool done = false;
  const int rc = parse(app, args, out, err, done);
  if (done) return rc;

  return guarded(err, [&] {
    std::vector<std::string> bad;
    if (!modes.empty()) {
      opts.spp_modes.clear();
      for (const auto& m : modes) {
        try {
          opts.spp_modes.push_back(spp_mode_from_string(m));
        } catch (const ConfigError& e) {
          bad.insert(bad.end(), e.violations().begin(), e.violations().end());
        }
      }
    }
    if (!methods.empty()) {
      opts.methods.clear();
      for (const auto& m : methods) {
        try {
          opts.methods.push_back(enhance_method_from_string(m));
        } catch (const ConfigError& e) {
          bad.insert(bad.end(), e.violations().begin(), e.violations().end());
        }
      }
    }
    for (auto s : opts.array_sizes)
      if (s == 0 || s > 12) bad.push_back("--array-sizes entries must be in 1..12, got " + std::to_string(s));
    if (opts.snrs_db.empty() || opts.seeds.empty()) bad.emplace_back("--snr and --seeds must not be empty");
    if (!bad.empty()) throw ConfigError(std::move(bad));
    opts.threads = threads ? std::max<std::size_t>(1, *threads) : default_thread_count();

    const AudioClip source = read_wav(speech);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = run_sweep(opts, source, speech);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::filesystem::path dir(output_dir);
    write_text(dir / "results.csv", sweep_csv(rows));
    write_text(dir / "results.json", sweep_json(rows));
    std::size_t failed = 0;
    for (const auto& r : rows) {
      if (r.error.empty()) continue;
      ++failed;
      err << "cell " << r.cell.key() << " failed: " << r.error << '\n';
    }
    out << rows.size() << " cells (" << failed << " failed) in " << secs << " s, results in " << dir.string() << '\n';
    return static_cast<int>(failed == 0 ? kExitOk : kExitProcessing);
  });
}

int cmd_speech(const Args& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Write the synthetic speech-like test signal", "egomwf speech"};
  std::string output;
  double duration = 10.0;
  int rate = 16000;
  std::uint64_t seed = 7;
  app.add_option("--output", output, "mono WAV path")->required();
  app.add_option("--duration", duration, "seconds");
  app.add_option("--rate", rate, "sample rate in Hz");
  app.add_option("--seed", seed, "generator seed");
  bool done = false;
  const int rc = parse(app, args, out, err, done);
  if (done) return rc;
  return guarded(err, [&] {
    make_parent(output);
    write_wav(synth_speech(duration, rate, seed), output, BitDepth::Pcm16);
    out << "wrote " << output << '\n';
    return static_cast<int>(kExitOk);
  });
}

int run(const Args& args, std::ostream& out, std::ostream& err) {
  static const char* kUsage =
      "usage: egomwf <command> [options]\n"
      "commands:\n"
      "  enhance   filter a multichannel recording (MWF / PK-MWF)\n"
      "  simulate  render synthetic UAV scenes\n"
      "  evaluate  compute SNR and STOI against a clean reference\n"
      "  sweep     run the full evaluation grid\n"
      "  speech    write the synthetic speech-like test signal\n"
      "run 'egomwf <command> --help' for options\n";
  if (args.empty()) {
    err << kUsage;
    return kExitConfig;
  }
  const Args rest(args.begin() + 1, args.end());
  const std::string& cmd = args.front();
  if (cmd == "enhance") return cmd_enhance(rest, out, err);
  if (cmd == "simulate") return cmd_simulate(rest, out, err);
  if (cmd == "evaluate") return cmd_evaluate(rest, out, err);
  if (cmd == "sweep") return cmd_sweep(rest, out, err);
  if (cmd == "speech") return cmd_speech(rest, out, err);
  if (cmd == "--help" || cmd == "-h" || cmd == "help") {
    out << kUsage;
    return kExitOk;
  }
  err << "unknown command '" << cmd << "'\n" << kUsage;
  return kExitConfig;
}

}  // namespace egomwf::cli
