// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "egomwf/metrics.hpp"
#include "egomwf/parallel.hpp"
#include "egomwf_cli/cli.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace egomwf {
namespace {

struct Outcome {
  Outcome() = default;
  Outcome(bool p, std::string s) : pass(p), summary(std::move(s)) {}

  bool pass = true;
  std::string summary;
  std::vector<std::string> details;  // printed indented under the verdict
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const AudioClip& speech10() {
  static const AudioClip s = synth_speech(10.0, 16000, 7);
  return s;
}

Outcome perfect_reconstruction() {
  test::Rng rng(101);
  double worst = 0.0;
  double elapsed = 0.0;
  const StftParams p;
  for (int i = 0; i < 100; ++i) {
    const AudioClip x = test::random_clip(rng, 1, 48000);
    const auto t0 = std::chrono::steady_clock::now();
    const AudioClip y = synthesize(analyze(x, p));
    elapsed += seconds_since(t0);
    // The first hop is covered by a single window; the COLA-valid interior follows.
    for (std::size_t t = p.hop; t < x.frames(); ++t) worst = std::max(worst, std::abs(x.at(0, t) - y.at(0, t)));
  }
  return {worst <= 1e-6 && elapsed < 5.0, fmt("max error %.2e (<= 1e-6), %.2f s (< 5 s)", worst, elapsed)};
}

Outcome gevd_oracle_suite() {
  test::Rng rng(202);
  const std::array<Eigen::Index, 9> sizes{2, 3, 4, 5, 6, 7, 8, 12, 16};
  double recon = 0.0, relation = 0.0;
  bool deterministic = true;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index m = sizes[static_cast<std::size_t>(i) % sizes.size()];
    const ComplexMatrix rnn = test::random_pd(rng, m);
    const ComplexMatrix ryy = test::random_hermitian(rng, m);
    const PencilDecomposition d = gevd(ryy, rnn);
    recon = std::max(recon, (d.q * d.sigma_y.asDiagonal() * d.q.adjoint() - ryy).norm() / ryy.norm());
    recon = std::max(recon, (d.q * d.sigma_n.asDiagonal() * d.q.adjoint() - rnn).norm() / rnn.norm());
    const ComplexMatrix lhs = ryy * d.q_inv_h;
    const ComplexMatrix rhs = rnn * d.q_inv_h * (d.sigma_y.array() / d.sigma_n.array()).matrix().asDiagonal();
    relation = std::max(relation, (lhs - rhs).norm() / lhs.norm());
    const PencilDecomposition again = gevd(ryy, rnn);
    deterministic = deterministic && again.q == d.q && again.sigma_y == d.sigma_y && again.q_inv_h == d.q_inv_h;
  }
  return {recon <= 1e-8 && relation <= 1e-8 && deterministic,
          fmt("reconstruction %.2e, pencil relation %.2e (<= 1e-8), deterministic %s", recon, relation,
              deterministic ? "yes" : "no")};
}

Outcome constrained_optimality() {
  test::Rng rng(303);
  std::size_t violations = 0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index m = 2 + i % 5;
    const BinStatistics s = test::random_stats(rng, m);
    const ComplexMatrix rss = rank1_speech_covariance(gevd(s.r_yy, s.r_nn));
    const test::WhitenedCost cost(s.r_yy, s.r_nn);
    const double best = cost(rss);
    const ComplexMatrix eye = ComplexMatrix::Identity(m, m);
    for (int k = 0; k < 1000; ++k)
      if (best > cost(test::candidate(rng, eye, rss, k)) * (1 + 1e-12)) ++violations;
  }
  return {violations == 0, fmt("%zu violations in 200 x 1000 candidates", violations)};
}

Outcome pkmwf_constraints() {
  test::Rng rng(404);
  double block = 0.0, rank = 0.0, negative = 0.0, lcmv = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ChannelPartition part = test::make_partition(kSuiteArraySizes[static_cast<std::size_t>(i) % 3], 4);
    const BinStatistics s = test::random_stats(rng, static_cast<Eigen::Index>(part.size()));
    const PkMwfSolution sol = solve_pkmwf(s, part);
    const SelectionBlocking sb = build_selection_blocking(part);
    const ComplexMatrix rss = sol.speech_covariance(sb.h);
    const ComplexMatrix b = sb.b.cast<cdouble>();
    const double scale = rss.norm();
    block = std::max(block, (b.adjoint() * rss * b).norm() / scale);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<ComplexMatrix>(rss).singularValues();
    rank = std::max(rank, sv(1) / sv(0));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rss);
    negative = std::max(negative, -es.eigenvalues().minCoeff() / sv(0));
    const auto msn = static_cast<Eigen::Index>(part.m_sn());
    lcmv = std::max(lcmv, (sb.h.cast<cdouble>().adjoint() * sol.c - ComplexMatrix::Identity(msn, msn)).norm());
  }
  const bool ok = block <= 1e-10 && rank <= 1e-8 && negative <= 1e-12 && lcmv <= 1e-12;
  return {ok, fmt("block %.2e (<= 1e-10), sigma2/sigma1 %.2e (<= 1e-8), min eig %.2e, H^H C - I %.2e (<= 1e-12)",
                  block, rank, -negative, lcmv)};
}

Outcome degeneracies() {
  test::Rng rng(505);
  double no_noise = 0.0, block_diag = 0.0, wiener = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto m = static_cast<std::size_t>(1 + i % 8);
    const BinStatistics s = test::random_stats(rng, static_cast<Eigen::Index>(m));
    const ComplexVector mwf = compute_mwf(s, 0).w;
    no_noise = std::max(no_noise, (compute_pkmwf(s, test::make_partition(m, 0)).w - mwf).norm() /
                                      std::max(mwf.norm(), 1.0));

    const auto sn = static_cast<Eigen::Index>(1 + i % 5), n = static_cast<Eigen::Index>(1 + i % 3);
    const BinStatistics a = test::random_stats(rng, sn), c = test::random_stats(rng, n);
    BinStatistics joint;
    joint.r_yy = ComplexMatrix::Zero(sn + n, sn + n);
    joint.r_nn = joint.r_yy;
    joint.r_yy.topLeftCorner(sn, sn) = a.r_yy;
    joint.r_yy.bottomRightCorner(n, n) = c.r_yy;
    joint.r_nn.topLeftCorner(sn, sn) = a.r_nn;
    joint.r_nn.bottomRightCorner(n, n) = c.r_nn;
    joint.l_on = joint.l_off = 20;
    ComplexVector padded = ComplexVector::Zero(sn + n);
    padded.head(sn) = compute_mwf(a, 0).w;
    const ComplexVector pk =
        compute_pkmwf(joint, test::make_partition(static_cast<std::size_t>(sn), static_cast<std::size_t>(n))).w;
    block_diag = std::max(block_diag, (pk - padded).norm() / std::max(padded.norm(), 1.0));

    // Direct Wiener solution r_yy^{-1} R_ss e_ref against the GEVD form.
    const auto ref = static_cast<std::size_t>(i) % m;
    const ComplexVector direct = test::oracle_mwf_weights(s.r_yy, s.r_nn, static_cast<Eigen::Index>(ref));
    wiener = std::max(wiener, (compute_mwf(s, ref).w - direct).norm() / std::max(direct.norm(), 1e-12));
  }
  const bool ok = no_noise <= 1e-10 && block_diag <= 1e-10 && wiener <= 1e-8;
  return {ok, fmt("M_N = 0: %.2e, block-diagonal: %.2e (<= 1e-10); direct vs GEVD filter %.2e (<= 1e-8)", no_noise,
                  block_diag, wiener)};
}

Outcome end_to_end_oracle() {
  Outcome o;
  std::ostringstream summary;
  for (double snr : kSuiteSnrsDb) {
    SceneConfig scene;
    scene.target_snr_db = snr;
    const SceneOutput sc = render_scene(scene, speech10());
    EnhanceConfig cfg;
    cfg.partition = suite_partition(8);
    cfg.spp_source = {SppMode::Oracle, 0};
    cfg.threads = default_thread_count();
    const GroundTruth truth{sc.speech_image, sc.noise_image};
    const EnhanceResult r = enhance(sc.mixture, cfg, &truth);
    const MetricsReport m = evaluate(r, sc.speech_image.single(0), sc.mixture.single(0));
    const double snr_imp = m.snr_improvement_db.value_or(-1e9);
    bool ok = snr_imp > 0.0;
    if (snr == -10.0) ok = ok && snr_imp >= 5.0;
    if (snr >= -10.0) ok = ok && m.stoi_improvement > 0.0;
    o.pass = o.pass && ok;
    summary << fmt("%+g dB: dSNR %.2f dB, dSTOI %+.3f; ", snr, snr_imp, m.stoi_improvement);
  }
  o.summary = summary.str();
  o.summary.resize(o.summary.size() - 2);
  return o;
}

// Seed-averaged metrics per (snr, array size, spp mode, method).
struct Averages {
  std::map<std::tuple<double, std::size_t, SppMode, EnhanceMethod>, std::pair<double, double>> sum;  // snr, stoi
  std::map<std::tuple<double, std::size_t, SppMode, EnhanceMethod>, int> count;
  std::size_t failed_cells = 0;

  explicit Averages(const std::vector<cli::SweepRow>& rows) {
    for (const auto& r : rows) {
      if (!r.metrics || !r.metrics->snr_improvement_db) {
        ++failed_cells;
        continue;
      }
      const auto key = std::make_tuple(r.cell.scene.target_snr_db, r.cell.partition.m_sn(), r.cell.spp_mode,
                                       r.cell.method);
      sum[key].first += *r.metrics->snr_improvement_db;
      sum[key].second += r.metrics->stoi_improvement;
      ++count[key];
    }
  }
  std::pair<double, double> at(double snr, std::size_t msn, SppMode mode, EnhanceMethod method) const {
    const auto key = std::make_tuple(snr, msn, mode, method);
    const auto it = sum.find(key);
    if (it == sum.end()) return {std::nan(""), std::nan("")};
    const double n = count.at(key);
    return {it->second.first / n, it->second.second / n};
  }
};

const std::vector<cli::SweepRow>& three_seed_sweep() {
  static const std::vector<cli::SweepRow> rows = [] {
    cli::SweepOptions opts;
    opts.seeds = {1, 2, 3};
    opts.threads = default_thread_count();
    return cli::run_sweep(opts, speech10());
  }();
  return rows;
}

Outcome trend_ispp() {
  const Averages avg(three_seed_sweep());
  Outcome o;
  int stoi_ok = 0, snr_ok = 0, both = 0;
  for (double snr : kSuiteSnrsDb)
    for (std::size_t msn : kSuiteArraySizes) {
      const auto pk = avg.at(snr, msn, SppMode::Internal, EnhanceMethod::PkMwf);
      const auto mwf = avg.at(snr, msn, SppMode::Internal, EnhanceMethod::Mwf);
      const auto mwf_n = avg.at(snr, msn, SppMode::Internal, EnhanceMethod::MwfWithNoiseMics);
      const bool stoi_clause = pk.second >= mwf.second;
      const bool snr_clause = std::abs(pk.first - mwf_n.first) <= 3.0;
      stoi_ok += stoi_clause;
      snr_ok += snr_clause;
      both += stoi_clause && snr_clause;
      o.details.push_back(fmt("snr %+3g dB, M_S+N %2zu: dSTOI pk %+.3f vs mwf %+.3f [%s]; dSNR pk %.2f vs "
                              "mwf+noise-mics %.2f dB, gap %.2f [%s]",
                              snr, msn, pk.second, mwf.second, stoi_clause ? "ok" : "VIOLATION", pk.first,
                              mwf_n.first, pk.first - mwf_n.first, snr_clause ? "ok" : "VIOLATION"));
    }
  o.pass = both >= 8 && avg.failed_cells == 0;
  o.summary = fmt("%d/9 cells satisfy both clauses (need >= 8); STOI clause %d/9, SNR-parity clause %d/9", both,
                  stoi_ok, snr_ok);
  return o;
}

Outcome array_size_monotonicity() {
  const Averages avg(three_seed_sweep());
  std::map<std::size_t, std::pair<double, int>> per_size;
  for (const auto& [key, s] : avg.sum) {
    auto& acc = per_size[std::get<1>(key)];
    acc.first += s.first;
    acc.second += avg.count.at(key);
  }
  auto mean = [&](std::size_t m) { return per_size[m].first / per_size[m].second; };
  const double m4 = mean(4), m8 = mean(8), m12 = mean(12);
  Outcome o;
  o.pass = m8 >= m4 && avg.failed_cells == 0;
  o.summary = fmt("mean dSNR 4 -> 8 mics: %.2f -> %.2f dB (gated); 8 -> 12: %.2f dB (reported only)", m4, m8, m12);
  for (SppMode mode : {SppMode::Internal, SppMode::External, SppMode::Oracle})
    for (EnhanceMethod method : {EnhanceMethod::Mwf, EnhanceMethod::MwfWithNoiseMics, EnhanceMethod::PkMwf}) {
      double v[3] = {0, 0, 0};
      for (std::size_t i = 0; i < 3; ++i)
        for (double snr : kSuiteSnrsDb) v[i] += avg.at(snr, kSuiteArraySizes[i], mode, method).first / 3.0;
      o.details.push_back(fmt("%-8s %-19s dSNR over SNRs and seeds: 4: %.2f  8: %.2f  12: %.2f dB", to_string(mode),
                              to_string(method), v[0], v[1], v[2]));
    }
  return o;
}

Outcome metric_self_tests() {
  const auto x = speech10().channel(0);
  std::vector<double> scaled(x.begin(), x.end());
  for (auto& v : scaled) v *= 0.3;
  const double self = stoi(x, x, 16000);
  const double gain = std::abs(stoi(x, scaled, 16000) - 1.0);

  test::Rng rng(909);
  std::normal_distribution<double> gauss(0.0, 0.2);
  std::vector<double> noisy(x.begin(), x.end()), noisy_loud(x.size());
  for (std::size_t t = 0; t < noisy.size(); ++t) {
    noisy[t] += gauss(rng);
    noisy_loud[t] = 5.0 * noisy[t];
  }
  const double gain_noisy = std::abs(stoi(x, noisy, 16000) - stoi(x, noisy_loud, 16000));

  std::vector<double> s(1000), n(1000);
  for (std::size_t t = 0; t < s.size(); ++t) {
    s[t] = t % 2 ? -2.0 : 2.0;        // power 4
    n[t] = t % 4 < 2 ? 0.2 : -0.2;    // power 0.04
  }
  const double snr_err = std::max(std::abs(snr_db(s, n).value - 20.0), std::abs(snr_db(n, n).value));

  const SppParams sp;
  const SppMask zero = estimate_spp(ComplexMatrix::Zero(257, 20), sp);
  double spp_err = 0.0;
  for (Eigen::Index k = 0; k < zero.spp.rows(); ++k)
    for (Eigen::Index l = 0; l < zero.spp.cols(); ++l)
      spp_err = std::max(spp_err, std::abs(zero.spp(k, l) - 1.0 / (2.0 + sp.xi_h1)));

  const bool ok = std::abs(self - 1.0) <= 1e-10 && gain <= 1e-10 && gain_noisy <= 1e-10 && snr_err <= 1e-12 &&
                  spp_err <= 1e-12;
  return {ok, fmt("|stoi(x,x) - 1| %.1e, gain invariance %.1e / %.1e, snr closed form %.1e, zero-input SPP %.1e",
                  std::abs(self - 1.0), gain, gain_noisy, snr_err, spp_err)};
}

Outcome full_sweep() {
  cli::SweepOptions opts;
  opts.threads = default_thread_count();
  std::string csv[2];
  double elapsed[2];
  std::size_t rows = 0, failed = 0;
  for (int run = 0; run < 2; ++run) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = cli::run_sweep(opts, speech10());
    elapsed[run] = seconds_since(t0);
    csv[run] = cli::sweep_csv(result);
    rows = result.size();
    failed = 0;
    for (const auto& r : result) failed += !r.error.empty();
  }
  const bool ok = rows == 81 && failed == 0 && csv[0] == csv[1] && std::max(elapsed[0], elapsed[1]) <= 600.0;
  return {ok, fmt("%zu cells, %zu failed, %.1f s and %.1f s with %zu thread(s) (<= 600 s), CSV %s", rows, failed,
                  elapsed[0], elapsed[1], opts.threads, csv[0] == csv[1] ? "byte-identical" : "DIFFERS")};
}

}  // namespace
}  // namespace egomwf

int main() {
  using namespace egomwf;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"STFT perfect reconstruction", perfect_reconstruction},
      {"GEVD oracle suite", gevd_oracle_suite},
      {"rank-1 constrained optimality", constrained_optimality},
      {"PK-MWF constraint suite", pkmwf_constraints},
      {"degeneracy equivalences", degeneracies},
      {"end-to-end enhancement, oracle mask", end_to_end_oracle},
      {"directional trends with iSPP", trend_ispp},
      {"monotonicity in array size", array_size_monotonicity},
      {"metric self-tests", metric_self_tests},
      {"full sweep runtime and reproducibility", full_sweep},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = Outcome(false, std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.summary << '\n';
    for (const auto& d : o.details) std::cout << "    " << d << '\n';
    std::cout.flush();
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
