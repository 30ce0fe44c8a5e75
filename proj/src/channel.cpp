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

#include "hbs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace hbs {

namespace {

constexpr double kClusterPowerExponent = 2.8;  // r_tau of the 28 GHz cluster power law
constexpr double kClusterShadowDb = 4.0;
constexpr double kNlosElevationSpreadDeg = 10.0;

double wrap_azimuth(double deg) {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0) w += 360.0;
  return w - 180.0;
}

double clamp_elevation(double deg) { return std::clamp(deg, -90.0, 90.0); }

cplx expj(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

ArrayGeometry ArrayGeometry::from_config(const SimConfig& cfg) {
  return ArrayGeometry{cfg.n_horizontal, cfg.n_vertical, cfg.element_spacing, cfg.downtilt_deg};
}

Topology generate_topology(const SimConfig& cfg, Rng& rng) {
  Topology topo;
  topo.bs_height = cfg.bs_height_m;
  topo.cell_radius = cfg.cell_radius_m;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < cfg.num_users; ++i) {
    const double r = cfg.cell_radius_m * std::sqrt(unit(rng));
    const double phi = 2.0 * kPi * unit(rng);
    const double speed = cfg.max_speed_mps * unit(rng);
    const double heading = 2.0 * kPi * unit(rng);
    topo.user_positions.push_back({r * std::cos(phi), r * std::sin(phi)});
    topo.user_velocities.push_back({speed * std::cos(heading), speed * std::sin(heading)});
  }
  return topo;
}

void advance_topology(Topology& topo, double dt) {
  for (std::size_t i = 0; i < topo.user_positions.size(); ++i) {
    Vec2& p = topo.user_positions[i];
    Vec2& v = topo.user_velocities[i];
    p.x += v.x * dt;
    p.y += v.y * dt;
    const double r = std::hypot(p.x, p.y);
    if (r > topo.cell_radius && r > 0) {
      const Vec2 n{p.x / r, p.y / r};
      const double overshoot = r - topo.cell_radius;
      p.x -= 2.0 * overshoot * n.x;
      p.y -= 2.0 * overshoot * n.y;
      const double vn = v.x * n.x + v.y * n.y;
      v.x -= 2.0 * vn * n.x;
      v.y -= 2.0 * vn * n.y;
    }
  }
}

CVector steering_vector(const ArrayGeometry& geometry, double azimuth_deg, double elevation_deg) {
  if (!(azimuth_deg >= -180.0 && azimuth_deg <= 180.0)) throw InputError("steering_vector: azimuth out of [-180, 180]");
  if (!(elevation_deg >= -90.0 && elevation_deg <= 90.0))
    throw InputError("steering_vector: elevation out of [-90, 90]");
  const double az = deg2rad(azimuth_deg);
  const double el = deg2rad(elevation_deg);
  const double u = std::sin(az) * std::cos(el);
  const double v = std::sin(el);
  const int n = geometry.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector a(n);
  for (int row = 0; row < geometry.n_vertical; ++row) {
    for (int col = 0; col < geometry.n_horizontal; ++col) {
      const double phase = 2.0 * kPi * geometry.element_spacing * (col * u + row * v);
      a(row * geometry.n_horizontal + col) = scale * expj(phase);
    }
  }
  return a;
}

CVector receive_steering_vector(int n, double azimuth_deg) {
  const double s = std::sin(deg2rad(azimuth_deg));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector a(n);
  for (int m = 0; m < n; ++m) a(m) = scale * expj(kPi * m * s);
  return a;
}

Codebook build_codebook(const ArrayGeometry& geometry, AngleRange az, AngleRange el, int azimuth_count,
                        int elevation_count) {
  if (azimuth_count < 1 || elevation_count < 1) throw InputError("build_codebook: grid counts must be >= 1");
  Codebook cb;
  cb.azimuth_count = azimuth_count;
  cb.elevation_count = elevation_count;
  const double az_step = (az.max_deg - az.min_deg) / azimuth_count;
  const double el_step = (el.max_deg - el.min_deg) / elevation_count;
  cb.beams.reserve(static_cast<std::size_t>(azimuth_count) * elevation_count);
  for (int e = 0; e < elevation_count; ++e) {
    for (int a = 0; a < azimuth_count; ++a) {
      const double az_deg = az.min_deg + (a + 0.5) * az_step;
      const double el_deg = el.min_deg + (e + 0.5) * el_step;
      cb.beams.push_back(steering_vector(geometry, az_deg, el_deg));
      cb.azimuth_deg.push_back(az_deg);
      cb.elevation_deg.push_back(el_deg);
    }
  }
  return cb;
}

Codebook build_codebook(const SimConfig& cfg) {
  return build_codebook(ArrayGeometry::from_config(cfg), {cfg.azimuth_min_deg, cfg.azimuth_max_deg},
                        {cfg.elevation_min_deg, cfg.elevation_max_deg}, cfg.codebook_azimuth,
                        cfg.codebook_elevation);
}

double mean_path_loss_db(const PathLossModel& model, double distance_m) {
  return model.alpha_db + model.beta * 10.0 * std::log10(std::max(distance_m, 1.0));
}

double los_probability(double ground_distance_m) { return std::exp(-ground_distance_m / kLosDecayMeters); }

PathSet realize_long_block(const Topology& topo, const SimConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> cluster_count(1, kMaxClusters);
  const double link_gain = db_to_linear(cfg.link_gain_db);

  PathSet set;
  set.users.reserve(topo.user_positions.size());
  for (std::size_t i = 0; i < topo.user_positions.size(); ++i) {
    const Vec2 p = topo.user_positions[i];
    const Vec2 v = topo.user_velocities[i];
    const double ground = std::hypot(p.x, p.y);
    const double distance = std::hypot(ground, topo.bs_height);

    UserPaths user;
    user.distance_m = distance;
    user.los = unit(rng) < los_probability(ground);
    const PathLossModel& model = user.los ? kLosPathLoss : kNlosPathLoss;
    user.path_loss_db = mean_path_loss_db(model, distance) + model.shadow_sigma_db * gauss(rng);
    const double speed = std::hypot(v.x, v.y);
    user.doppler_scale = cfg.max_speed_mps > 0 ? speed / cfg.max_speed_mps : 0.0;

    const int n_clusters = cluster_count(rng);
    std::vector<double> fractions(n_clusters);
    for (auto& f : fractions) {
      f = std::pow(unit(rng), kClusterPowerExponent - 1.0) * std::pow(10.0, -0.1 * kClusterShadowDb * gauss(rng));
    }
    // The direct path, if any, takes the strongest share.
    std::sort(fractions.begin(), fractions.end(), std::greater<>());
    double total = 0.0;
    for (double f : fractions) total += f;
    if (total <= 0.0) {
      std::fill(fractions.begin(), fractions.end(), 1.0 / n_clusters);
      total = 1.0;
    }

    const double geo_az = ground > 0 ? rad2deg(std::atan2(p.y, p.x)) : 0.0;
    const double geo_el = -rad2deg(std::atan2(topo.bs_height, ground));
    const double large_scale = std::pow(10.0, -user.path_loss_db / 10.0) * link_gain;

    for (int c = 0; c < n_clusters; ++c) {
      Cluster cl;
      cl.los = user.los && c == 0;
      if (cl.los) {
        cl.az_dep = geo_az;
        cl.el_dep = clamp_elevation(geo_el + cfg.downtilt_deg);
        cl.delay_s = 0.0;
      } else {
        cl.az_dep = wrap_azimuth(-180.0 + 360.0 * unit(rng));
        cl.el_dep =
            clamp_elevation(geo_el + cfg.downtilt_deg + kNlosElevationSpreadDeg * (2.0 * unit(rng) - 1.0));
        cl.delay_s = kMaxClusterDelay * unit(rng);
      }
      cl.az_arr = wrap_azimuth(-180.0 + 360.0 * unit(rng));
      cl.power = large_scale * fractions[c] / total;
      cl.subpaths.reserve(kSubpathsPerCluster);
      const double sub_sigma = std::sqrt(0.5 / kSubpathsPerCluster);
      for (int s = 0; s < kSubpathsPerCluster; ++s) {
        Subpath sp;
        sp.az_dep = wrap_azimuth(cl.az_dep + kSubpathSpreadDeg * (2.0 * unit(rng) - 1.0));
        sp.el_dep = clamp_elevation(cl.el_dep + kSubpathSpreadDeg * (2.0 * unit(rng) - 1.0));
        sp.az_arr = wrap_azimuth(cl.az_arr + kSubpathSpreadDeg * (2.0 * unit(rng) - 1.0));
        const double re = gauss(rng);
        const double im = gauss(rng);
        sp.gain = cplx(re, im) * sub_sigma;
        sp.doppler_cos = std::cos(2.0 * kPi * unit(rng));
        cl.subpaths.push_back(sp);
      }
      user.clusters.push_back(std::move(cl));
    }
    set.users.push_back(std::move(user));
  }
  return set;
}

double prb_center_offset(int k, const SimConfig& cfg) {
  if (k < 0 || k >= cfg.num_prbs) throw InputError("prb_center_offset: PRB index out of range");
  return (k - 0.5 * (cfg.num_prbs - 1)) * cfg.prb_width_hz();
}

double doppler_for_offset(double offset_hz, const SimConfig& cfg) {
  return cfg.max_doppler_hz * (1.0 + offset_hz / cfg.carrier_hz);
}

double doppler_for_prb(int k, const SimConfig& cfg) { return doppler_for_offset(prb_center_offset(k, cfg), cfg); }

ChannelTensor evolve_short_block(const PathSet& paths, const Topology& topo, long slot, const SimConfig& cfg) {
  (void)topo;
  const ArrayGeometry geometry = ArrayGeometry::from_config(cfg);
  const int n_tx = geometry.size();
  const int n_rx = cfg.n_rx;
  const int num_users = static_cast<int>(paths.users.size());
  const double t = static_cast<double>(slot) * cfg.slot_duration_s();
  const double array_gain = std::sqrt(static_cast<double>(n_tx) * n_rx);

  std::vector<double> offsets(cfg.num_prbs);
  std::vector<double> dopplers(cfg.num_prbs);
  for (int k = 0; k < cfg.num_prbs; ++k) {
    offsets[k] = prb_center_offset(k, cfg);
    dopplers[k] = doppler_for_offset(offsets[k], cfg);
  }

  ChannelTensor h;
  h.num_prbs = cfg.num_prbs;
  h.num_users = num_users;
  h.slot_index = slot;
  h.entries.assign(static_cast<std::size_t>(cfg.num_prbs) * num_users, CMatrix::Zero(n_tx, n_rx));

  for (int i = 0; i < num_users; ++i) {
    const UserPaths& user = paths.users[i];
    for (const Cluster& cl : user.clusters) {
      const double amp = array_gain * std::sqrt(cl.power);
      for (const Subpath& sp : cl.subpaths) {
        const CMatrix outer = steering_vector(geometry, sp.az_dep, sp.el_dep) *
                              receive_steering_vector(n_rx, sp.az_arr).adjoint();
        for (int k = 0; k < cfg.num_prbs; ++k) {
          const double doppler_phase = 2.0 * kPi * dopplers[k] * user.doppler_scale * sp.doppler_cos * t;
          const double delay_phase = -2.0 * kPi * cl.delay_s * offsets[k];
          const cplx coeff = amp * sp.gain * expj(doppler_phase + delay_phase);
          h.at(k, i).noalias() += coeff * outer;
        }
      }
    }
  }
  return h;
}

void write_channel_csv(std::ostream& os, const ChannelTensor& h) {
  os << "slot,prb,user,tx,rx,re,im\n";
  for (int k = 0; k < h.num_prbs; ++k) {
    for (int i = 0; i < h.num_users; ++i) {
      const CMatrix& m = h.at(k, i);
      for (int a = 0; a < m.rows(); ++a) {
        for (int b = 0; b < m.cols(); ++b) {
          os << h.slot_index << ',' << k << ',' << i << ',' << a << ',' << b << ',' << m(a, b).real() << ','
             << m(a, b).imag() << '\n';
        }
      }
    }
  }
}

}  // namespace hbs
