// SPDX-License-Identifier: Apache-2.0
//
// hbsched - joint user scheduling and hybrid beamforming for mmWave MIMO-OFDM
// Copyright (C) 2026 The hbsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hbs/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hbs {

CMatrix BeamAssignment::analog_for(const UserSet& users) const {
  CMatrix g(analog.rows(), static_cast<Eigen::Index>(users.size()));
  for (std::size_t m = 0; m < users.size(); ++m) g.col(static_cast<Eigen::Index>(m)) = analog.col(users[m]);
  return g;
}

CMatrix EffectiveChannelMatrix::prb_average() const {
  if (per_prb.empty()) return {};
  CMatrix avg = CMatrix::Zero(per_prb.front().rows(), per_prb.front().cols());
  for (const auto& u : per_prb) avg += u;
  return avg / static_cast<double>(per_prb.size());
}

CVector derive_combiner(const CMatrix& h_avg, bool* degenerate) {
  const Eigen::Index n_rx = h_avg.cols();
  const bool zero = h_avg.squaredNorm() == 0.0 || !h_avg.allFinite();
  if (degenerate) *degenerate = zero;
  if (n_rx == 1 || zero) return CVector::Unit(n_rx, 0);

  Eigen::JacobiSVD<CMatrix> svd(h_avg, Eigen::ComputeThinV);
  CVector g = svd.matrixV().col(0);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::abs(g(i)) > 1e-12) {
      g *= std::conj(g(i)) / std::abs(g(i));
      break;
    }
  }
  return g.normalized();
}

std::vector<double> beam_metrics(std::span<const CMatrix> channels, const CVector& combiner,
                                 const Codebook& codebook) {
  std::vector<double> metric(codebook.beams.size(), 0.0);
  if (channels.empty()) return metric;
  std::vector<CVector> seen;
  seen.reserve(channels.size());
  for (const CMatrix& h : channels) seen.push_back(h * combiner);
  const double inv_k = 1.0 / static_cast<double>(channels.size());
  for (std::size_t l = 0; l < codebook.beams.size(); ++l) {
    double acc = 0.0;
    for (const CVector& v : seen) acc += std::norm(v.dot(codebook.beams[l]));
    metric[l] = acc * inv_k;
  }
  return metric;
}

int select_best_beam(std::span<const CMatrix> channels, const CVector& combiner, const Codebook& codebook) {
  if (codebook.beams.empty()) throw InputError("select_best_beam: empty codebook");
  const auto metric = beam_metrics(channels, combiner, codebook);
  int best = 0;
  for (int l = 1; l < static_cast<int>(metric.size()); ++l) {
    if (metric[l] > metric[best]) best = l;
  }
  return best;
}

BeamAssignment assign_beams(const ChannelTensor& h, const Codebook& codebook) {
  BeamAssignment out;
  const int n_tx = static_cast<int>(codebook.beams.front().size());
  out.analog.resize(n_tx, h.num_users);
  std::vector<CMatrix> per_user(static_cast<std::size_t>(h.num_prbs));
  for (int i = 0; i < h.num_users; ++i) {
    CMatrix avg = CMatrix::Zero(h.at(0, i).rows(), h.at(0, i).cols());
    for (int k = 0; k < h.num_prbs; ++k) {
      per_user[k] = h.at(k, i);
      avg += per_user[k];
    }
    avg /= static_cast<double>(h.num_prbs);
    CVector g = derive_combiner(avg);
    const int best = select_best_beam(per_user, g, codebook);
    out.beam_index.push_back(best);
    out.combiners.push_back(std::move(g));
    out.analog.col(i) = codebook.beams[best];
  }
  return out;
}

EffectiveChannelMatrix effective_channels(const ChannelTensor& h, const BeamAssignment& assignment,
                                          const UserSet& users) {
  EffectiveChannelMatrix out;
  out.users = users;
  const auto n = static_cast<Eigen::Index>(users.size());
  const CMatrix g = assignment.analog_for(users);
  CMatrix seen(g.rows(), n);
  for (int k = 0; k < h.num_prbs; ++k) {
    for (Eigen::Index a = 0; a < n; ++a) {
      const int i = users[a];
      seen.col(a) = h.at(k, i) * assignment.combiners[i];
    }
    out.per_prb.push_back(seen.adjoint() * g);
  }
  return out;
}

double gram_condition(const CMatrix& u) {
  if (u.size() == 0) return 1.0;
  const CMatrix gram = u * u.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(hi > 0.0) || !(lo > 0.0) || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

std::optional<CMatrix> try_zf_precoder(const CMatrix& u, double max_condition) {
  if (!(gram_condition(u) <= max_condition)) return std::nullopt;
  // U^H (U U^H)^{-1} evaluated through U^H = QR, which gives Q R^{-H}
  // without squaring the condition number.
  Eigen::HouseholderQR<CMatrix> qr(u.adjoint());
  const Eigen::Index m = u.rows();
  const CMatrix r = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
  const CMatrix q = qr.householderQ() * CMatrix::Identity(u.cols(), m);
  const CMatrix r_inv_h = r.adjoint().template triangularView<Eigen::Lower>().solve(CMatrix::Identity(m, m));
  return CMatrix(q * r_inv_h);
}

CMatrix zf_precoder(const CMatrix& u, double max_condition, const UserSet& users) {
  auto f = try_zf_precoder(u, max_condition);
  if (!f) throw IllConditioned(users, gram_condition(u));
  return *std::move(f);
}

CMatrix normalize_precoder(const CMatrix& f, const CMatrix& analog, double power, int streams) {
  if (streams < 1) throw InputError("normalize_precoder: streams must be >= 1");
  if (analog.cols() != f.rows()) throw InputError("normalize_precoder: G* and F dimensions disagree");
  CMatrix out = f;
  const double target = std::sqrt(power / streams);
  for (Eigen::Index m = 0; m < f.cols(); ++m) {
    const double norm = (analog * f.col(m)).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InputError("normalize_precoder: degenerate precoder column");
    out.col(m) *= target / norm;
  }
  return out;
}

double sinr(const CMatrix& u, const CMatrix& f, int m, double noise) {
  const auto row = u.row(m);
  double signal = 0.0;
  double interference = 0.0;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    const double p = std::norm((row * f.col(j)).value());
    if (j == m) {
      signal = p;
    } else {
      interference += p;
    }
  }
  return signal / (interference + noise);
}

double user_rate(std::span<const double> sinrs, std::span<const double> bandwidth) {
  if (sinrs.size() != bandwidth.size()) throw InputError("user_rate: SINR and bandwidth lengths differ");
  double r = 0.0;
  for (std::size_t k = 0; k < sinrs.size(); ++k) {
    if (!(sinrs[k] >= 0.0)) throw InputError("user_rate: negative SINR");
    r += bandwidth[k] * std::log2(1.0 + sinrs[k]);
  }
  return r;
}

double weighted_sum_rate(const UserSet& users, std::span<const double> weights, std::span<const double> rates) {
  double acc = 0.0;
  for (int i : users) acc += weights[i] * rates[i];
  return acc;
}

LinkBudget LinkBudget::from_config(const SimConfig& cfg) {
  LinkBudget link;
  link.power = cfg.power_watts();
  link.noise.assign(static_cast<std::size_t>(cfg.num_users), cfg.noise_watts());
  link.bandwidth.assign(static_cast<std::size_t>(cfg.num_prbs), cfg.bandwidth_factor());
  link.max_condition = cfg.max_condition;
  return link;
}

SetEvaluation evaluate_set(const EffectiveChannelMatrix& all, const BeamAssignment& assignment, const UserSet& set,
                           std::span<const double> weights, const LinkBudget& link, ComponentTimings* timings) {
  SetEvaluation out;
  const auto m = static_cast<Eigen::Index>(set.size());
  if (m == 0) return out;

  std::vector<Eigen::Index> pos(set.size());
  for (std::size_t a = 0; a < set.size(); ++a) {
    auto it = std::lower_bound(all.users.begin(), all.users.end(), set[a]);
    if (it == all.users.end() || *it != set[a]) throw InputError("evaluate_set: user missing from effective channels");
    pos[a] = it - all.users.begin();
  }

  const int num_prbs = all.num_prbs();
  std::vector<CMatrix> sub(static_cast<std::size_t>(num_prbs));
  {
    ScopedTimer t(timings ? &timings->effective_channel : nullptr);
    for (int k = 0; k < num_prbs; ++k) sub[k] = all.per_prb[k](pos, pos);
  }

  std::vector<CMatrix> precoders(static_cast<std::size_t>(num_prbs));
  {
    ScopedTimer t(timings ? &timings->precoder : nullptr);
    const CMatrix g = assignment.analog_for(set);
    for (int k = 0; k < num_prbs; ++k) {
      auto f = try_zf_precoder(sub[k], link.max_condition);
      if (!f) {
        out.feasible = false;
        break;
      }
      try {
        precoders[k] = normalize_precoder(*f, g, link.power, static_cast<int>(m));
      } catch (const InputError&) {
        out.feasible = false;
        break;
      }
    }
  }
  if (!out.feasible) {
    out.rates.assign(set.size(), 0.0);
    return out;
  }

  out.rates.resize(set.size());
  std::vector<double> s(static_cast<std::size_t>(num_prbs));
  for (Eigen::Index a = 0; a < m; ++a) {
    const double noise = link.noise[set[a]];
    for (int k = 0; k < num_prbs; ++k) s[k] = sinr(sub[k], precoders[k], static_cast<int>(a), noise);
    out.rates[a] = user_rate(s, link.bandwidth);
    out.weighted_sum_rate += weights[set[a]] * out.rates[a];
  }
  return out;
}

}  // namespace hbs
