#include "egomwf/filters.hpp"

#include <algorithm>
#include <set>

#include "egomwf/error.hpp"
#include "egomwf/parallel.hpp"

namespace egomwf {

std::vector<std::size_t> ChannelPartition::canonical_channels() const {
  std::vector<std::size_t> out = speech_noise_channels;
  out.insert(out.end(), noise_only_channels.begin(), noise_only_channels.end());
  return out;
}

std::vector<std::string> ChannelPartition::violations(std::size_t total_channels) const {
  std::vector<std::string> bad;
  if (speech_noise_channels.empty()) bad.emplace_back("partition.speech_noise_channels is empty");
  if (ref_channel >= speech_noise_channels.size())
    bad.push_back("partition.ref_channel " + std::to_string(ref_channel) +
                  " is not a position in speech_noise_channels (size " +
                  std::to_string(speech_noise_channels.size()) + ")");
  std::set<std::size_t> seen;
  auto check = [&](const std::vector<std::size_t>& list, const char* name) {
    for (auto c : list) {
      if (total_channels != 0 && c >= total_channels)
        bad.push_back(std::string("partition.") + name + " channel " + std::to_string(c) +
                      " is out of range (input has " + std::to_string(total_channels) +
                      " channels)");
      if (!seen.insert(c).second)
        bad.push_back(std::string("partition.") + name + " channel " + std::to_string(c) +
                      " appears more than once across the channel lists");
    }
  };
  check(speech_noise_channels, "speech_noise_channels");
  check(noise_only_channels, "noise_only_channels");
  return bad;
}

void ChannelPartition::validate(std::size_t total_channels) const {
  auto bad = violations(total_channels);
  if (!bad.empty()) throw ConfigError(std::move(bad));
}

SelectionBlocking build_selection_blocking(const ChannelPartition& partition) {
  partition.validate();
  const auto m_sn = static_cast<Eigen::Index>(partition.m_sn());
  const auto m_n = static_cast<Eigen::Index>(partition.m_n());
  SelectionBlocking sb{Eigen::MatrixXd::Zero(m_sn + m_n, m_sn), Eigen::MatrixXd::Zero(m_sn + m_n, m_n)};
  sb.h.topRows(m_sn).setIdentity();
  sb.b.bottomRows(m_n).setIdentity();
  return sb;
}

const char* to_string(FilterMethod method) noexcept {
  return method == FilterMethod::Mwf ? "mwf" : "pk-mwf";
}

const char* to_string(BinStatus status) noexcept {
  switch (status) {
    case BinStatus::Ok: return "ok";
    case BinStatus::NoSpeechFrames: return "no_speech_frames";
    case BinStatus::NoNoiseFrames: return "no_noise_frames";
    case BinStatus::ClampedGain: return "clamped_gain";
    case BinStatus::Singular: return "singular";
  }
  return "?";
}

double wiener_gain(const PencilDecomposition& d, bool* clamped) {
  const double sy = d.sigma_y(0);
  const double sn = d.sigma_n(0);
  const bool neg = sy < sn;
  if (clamped) *clamped = neg;
  if (neg || !(sy > 0.0)) return 0.0;
  return 1.0 - sn / sy;
}

ComplexVector rank1_wiener_weights(const PencilDecomposition& d, std::size_t ref, double gain) {
  const auto r = static_cast<Eigen::Index>(ref);
  return d.q_inv_h.col(0) * (gain * std::conj(d.q(r, 0)));
}

ComplexMatrix rank1_speech_covariance(const PencilDecomposition& d) {
  const double power = std::max(0.0, d.sigma_y(0) - d.sigma_n(0));
  return power * d.q.col(0) * d.q.col(0).adjoint();
}

namespace {

ComplexVector unit_vector(std::size_t m, std::size_t i) {
  ComplexVector e = ComplexVector::Zero(static_cast<Eigen::Index>(m));
  e(static_cast<Eigen::Index>(i)) = 1.0;
  return e;
}

// Fallbacks shared by both methods; returns true when the bin was handled.
bool fallback(const BinStatistics& stats, std::size_t ref, BinFilter& out) {
  const std::size_t m = stats.channels();
  if (stats.l_on == 0) {
    out = {ComplexVector::Zero(static_cast<Eigen::Index>(m)), BinStatus::NoSpeechFrames};
    return true;
  }
  if (stats.l_off == 0) {
    out = {unit_vector(m, ref), BinStatus::NoNoiseFrames};
    return true;
  }
  return false;
}

}  // namespace

BinFilter compute_mwf(const BinStatistics& stats, std::size_t ref) {
  if (ref >= stats.channels()) throw Error("compute_mwf: reference channel out of range");
  BinFilter out;
  if (fallback(stats, ref, out)) return out;
  try {
    const PencilDecomposition d = gevd(stats.r_yy, stats.r_nn);
    bool clamped = false;
    const double g = wiener_gain(d, &clamped);
    out.w = rank1_wiener_weights(d, ref, g);
    out.status = clamped ? BinStatus::ClampedGain : BinStatus::Ok;
  } catch (const NotPositiveDefinite&) {
    out = {ComplexVector::Zero(static_cast<Eigen::Index>(stats.channels())), BinStatus::Singular};
  }
  return out;
}

ComplexMatrix compute_gsc(const ComplexMatrix& r_nn, const Eigen::MatrixXd& h, const Eigen::MatrixXd& b) {
  if (h.rows() != r_nn.rows() || b.rows() != r_nn.rows())
    throw Error("compute_gsc: selection/blocking matrices do not match r_nn");
  const ComplexMatrix hc = h.cast<cdouble>();
  if (b.cols() == 0) return hc;
  const ComplexMatrix bc = b.cast<cdouble>();
  const ComplexMatrix rb = r_nn * bc;
  const ComplexMatrix brb = hermitian_part(bc.adjoint() * rb);
  const ComplexMatrix brh = rb.adjoint() * hc;  // B^H R H (R Hermitian)
  ComplexMatrix l;
  try {
    l = cholesky(brb);
  } catch (const NotPositiveDefinite&) {
    throw Error("compute_gsc: B^H R_nn B is singular");
  }
  const ComplexMatrix f = solve_lower_adjoint(l, solve_lower(l, brh));
  return hc - bc * f;
}

ComplexMatrix PkMwfSolution::speech_covariance(const Eigen::MatrixXd& h) const {
  const ComplexMatrix hc = h.cast<cdouble>();
  return hc * rank1_speech_covariance(reduced) * hc.adjoint();
}

PkMwfSolution solve_pkmwf(const BinStatistics& stats, const ChannelPartition& partition) {
  if (stats.channels() != partition.size())
    throw Error("solve_pkmwf: statistics have " + std::to_string(stats.channels()) +
                " channels, partition has " + std::to_string(partition.size()));
  if (stats.l_on == 0 || stats.l_off == 0)
    throw Error("solve_pkmwf: bin " + std::to_string(stats.bin_index) + " has an empty frame set");

  const SelectionBlocking sb = build_selection_blocking(partition);
  PkMwfSolution sol;
  sol.c = compute_gsc(stats.r_nn, sb.h, sb.b);
  const ComplexMatrix red_yy = hermitian_part(sol.c.adjoint() * stats.r_yy * sol.c);
  const ComplexMatrix red_nn = hermitian_part(sol.c.adjoint() * stats.r_nn * sol.c);
  sol.reduced = gevd(red_yy, red_nn);
  bool clamped = false;
  const double g = wiener_gain(sol.reduced, &clamped);
  // H^H e_d selects position ref_channel of the reduced space.
  sol.filter.w = sol.c * rank1_wiener_weights(sol.reduced, partition.ref_channel, g);
  sol.filter.status = clamped ? BinStatus::ClampedGain : BinStatus::Ok;
  return sol;
}

BinFilter compute_pkmwf(const BinStatistics& stats, const ChannelPartition& partition) {
  BinFilter out;
  if (fallback(stats, partition.ref_channel, out)) return out;
  try {
    return solve_pkmwf(stats, partition).filter;
  } catch (const NotPositiveDefinite&) {
    return {ComplexVector::Zero(static_cast<Eigen::Index>(stats.channels())), BinStatus::Singular};
  }
}

std::array<std::size_t, kBinStatusCount> FilterBank::status_counts() const {
  std::array<std::size_t, kBinStatusCount> counts{};
  for (auto s : status) ++counts[static_cast<std::size_t>(s)];
  return counts;
}

FilterBank compute_filterbank(const std::vector<BinStatistics>& stats, const ChannelPartition& partition,
                              FilterMethod method, double delta, std::size_t threads) {
  partition.validate();
  const std::size_t m = partition.size();
  FilterBank fb;
  fb.method = method;
  fb.partition = partition;
  fb.weights = ComplexMatrix::Zero(static_cast<Eigen::Index>(stats.size()), static_cast<Eigen::Index>(m));
  fb.status.assign(stats.size(), BinStatus::Ok);

  parallel_for(stats.size(), threads, [&](std::size_t k) {
    if (stats[k].channels() != m)
      throw Error("compute_filterbank: bin " + std::to_string(k) + " has " +
                  std::to_string(stats[k].channels()) + " channels, expected " + std::to_string(m));
    const BinStatistics s = regularize(stats[k], delta);
    const BinFilter f = method == FilterMethod::Mwf ? compute_mwf(s, partition.ref_channel)
                                                    : compute_pkmwf(s, partition);
    fb.weights.row(static_cast<Eigen::Index>(k)) = f.w.transpose();
    fb.status[k] = f.status;
  });
  return fb;
}

}  // namespace egomwf
