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

#ifndef HBS_COMMON_HPP
#define HBS_COMMON_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbs {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Users are 0-based indices. A UserSet is always kept sorted ascending.
using UserSet = std::vector<int>;

using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Malformed arguments to a library call.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration rejected during validation; `key` names the offending field.
class ConfigError : public InputError {
 public:
  ConfigError(std::string key, const std::string& what)
      : InputError("config error [" + key + "]: " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// ZF inversion refused because cond(U U^H) exceeds the threshold.
class IllConditioned : public std::runtime_error {
 public:
  IllConditioned(UserSet users, double condition)
      : std::runtime_error("ill-conditioned effective channel (cond=" + std::to_string(condition) + ")"),
        users_(std::move(users)),
        condition_(condition) {}
  const UserSet& users() const noexcept { return users_; }
  double condition() const noexcept { return condition_; }

 private:
  UserSet users_;
  double condition_;
};

// Exhaustive search refused because the candidate count is too large.
class Intractable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Derive an independent, reproducible stream from a base seed and a tuple of tags.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto t : tags) {
    words.push_back(static_cast<std::uint32_t>(t));
    words.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace hbs

#endif  // HBS_COMMON_HPP
