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

#ifndef HBS_CHANNEL_HPP
#define HBS_CHANNEL_HPP

#include "hbs/common.hpp"
#include "hbs/config.hpp"

#include <iosfwd>
#include <vector>

namespace hbs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

/// Cell layout: BS at the origin, users on the ground plane.
struct Topology {
  double bs_height = 0.0;
  double cell_radius = 0.0;
  std::vector<Vec2> user_positions;
  std::vector<Vec2> user_velocities;

  int num_users() const { return static_cast<int>(user_positions.size()); }
  bool operator==(const Topology&) const = default;
};

/// Uniform planar array. Element (m, n) sits in column m (horizontal) and row n
/// (vertical); its index in a steering vector is n * n_horizontal + m.
struct ArrayGeometry {
  int n_horizontal = 8;
  int n_vertical = 2;
  double element_spacing = 0.5;  // wavelengths
  double boresight_tilt = 10.0;  // degrees of downtilt

  int size() const { return n_horizontal * n_vertical; }
  static ArrayGeometry from_config(const SimConfig& cfg);
};

struct AngleRange {
  double min_deg;
  double max_deg;
};

struct Codebook {
  std::vector<CVector> beams;
  int azimuth_count = 0;
  int elevation_count = 0;
  std::vector<double> azimuth_deg;    // per beam, array frame
  std::vector<double> elevation_deg;  // per beam, array frame

  int size() const { return static_cast<int>(beams.size()); }
  /// Beam ell sits at azimuth column ell % azimuth_count, elevation row ell / azimuth_count.
  int azimuth_slot(int ell) const { return ell % azimuth_count; }
  int elevation_slot(int ell) const { return ell / azimuth_count; }
};

struct Subpath {
  double az_dep = 0.0;  // array frame, degrees
  double el_dep = 0.0;
  double az_arr = 0.0;
  cplx gain{1.0, 0.0};
  double doppler_cos = 0.0;  // cos of the angle between motion and arrival direction
  bool operator==(const Subpath&) const = default;
};

struct Cluster {
  double az_dep = 0.0;
  double el_dep = 0.0;
  double az_arr = 0.0;
  double delay_s = 0.0;
  double power = 0.0;  // linear, includes path loss
  bool los = false;
  std::vector<Subpath> subpaths;
  bool operator==(const Cluster&) const = default;
};

struct UserPaths {
  bool los = false;
  double distance_m = 0.0;
  double path_loss_db = 0.0;
  double doppler_scale = 0.0;  // user speed / max speed
  std::vector<Cluster> clusters;
  bool operator==(const UserPaths&) const = default;
};

/// Angles, delays and large-scale gains of every user, frozen for one long block.
struct PathSet {
  std::vector<UserPaths> users;
  bool operator==(const PathSet&) const = default;
};

/// h[k][i] is the N_TX x N_RX channel of user i on PRB k.
struct ChannelTensor {
  int num_prbs = 0;
  int num_users = 0;
  long slot_index = 0;
  std::vector<CMatrix> entries;  // k * num_users + i

  const CMatrix& at(int k, int i) const { return entries[static_cast<std::size_t>(k) * num_users + i]; }
  CMatrix& at(int k, int i) { return entries[static_cast<std::size_t>(k) * num_users + i]; }
};

inline constexpr int kSubpathsPerCluster = 20;
inline constexpr int kMaxClusters = 4;
inline constexpr double kMaxClusterDelay = 200e-9;
inline constexpr double kSubpathSpreadDeg = 5.0;
inline constexpr double kLosDecayMeters = 67.1;

struct PathLossModel {
  double alpha_db;
  double beta;
  double shadow_sigma_db;
};
inline constexpr PathLossModel kLosPathLoss{61.4, 2.0, 5.8};
inline constexpr PathLossModel kNlosPathLoss{72.0, 2.92, 8.7};

Topology generate_topology(const SimConfig& cfg, Rng& rng);

/// Constant-velocity motion over dt seconds, reflecting off the cell edge.
void advance_topology(Topology& topo, double dt);

/// Unit-norm UPA response; angles in the array frame (elevation already relative
/// to the tilted boresight). Throws InputError outside [-180,180] x [-90,90].
CVector steering_vector(const ArrayGeometry& geometry, double azimuth_deg, double elevation_deg);

/// Unit-norm ULA response for a user-side array of n elements at half-wavelength spacing.
CVector receive_steering_vector(int n, double azimuth_deg);

/// Grid of beams evenly spaced at cell centres of the two ranges, azimuth fastest.
Codebook build_codebook(const ArrayGeometry& geometry, AngleRange az, AngleRange el, int azimuth_count,
                        int elevation_count);
Codebook build_codebook(const SimConfig& cfg);

/// Deterministic mean path loss (dB) without shadowing.
double mean_path_loss_db(const PathLossModel& model, double distance_m);
double los_probability(double ground_distance_m);

PathSet realize_long_block(const Topology& topo, const SimConfig& cfg, Rng& rng);

/// Offset of PRB k's centre frequency from the carrier (k is 0-based).
double prb_center_offset(int k, const SimConfig& cfg);

/// f'_{k,max} = f_{c,max} (1 + df / f_c).
double doppler_for_offset(double offset_hz, const SimConfig& cfg);
double doppler_for_prb(int k, const SimConfig& cfg);

/// Assemble all h_{k,i} at absolute slot `slot`. Pure in its arguments.
ChannelTensor evolve_short_block(const PathSet& paths, const Topology& topo, long slot, const SimConfig& cfg);

/// One row per (slot, prb, user, tx, rx) with real/imag columns.
void write_channel_csv(std::ostream& os, const ChannelTensor& h);

}  // namespace hbs

#endif  // HBS_CHANNEL_HPP
