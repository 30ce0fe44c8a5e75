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

#include "hbs/fairness.hpp"

#include "hbs/common.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace hbs;

TEST_CASE("EMA update edge cases") {
  RateTracker frozen(3, 0.0);
  frozen.update(std::vector<double>{5.0, 0.0, 100.0});
  CHECK(frozen.cumulative() == std::vector<double>{1.0, 1.0, 1.0});

  RateTracker instant(1, 1.0);
  instant.update(std::vector<double>{5.0});
  CHECK(instant.cumulative()[0] == 5.0);

  RateTracker smooth(1, 0.1);
  smooth.update(std::vector<double>{3.0});
  CHECK(smooth.cumulative()[0] == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(smooth.slot_count() == 1);
}

TEST_CASE("EMA rejects bad input") {
  RateTracker t(2, 0.1);
  CHECK_THROWS_AS(t.update(std::vector<double>{1.0, -0.5}), InputError);
  CHECK_THROWS_AS(t.update(std::vector<double>{1.0}), InputError);
  CHECK_THROWS_AS(RateTracker(2, 1.5), InputError);
  CHECK_THROWS_AS(RateTracker(std::vector<double>{1.0, 0.0}, std::vector<double>{0.1, 0.1}), InputError);
}

TEST_CASE("weights are reciprocal cumulative rates") {
  RateTracker init(4, 0.1);
  CHECK(init.weights() == std::vector<double>(4, 1.0));
  RateTracker t(std::vector<double>{2.0, 4.0}, std::vector<double>{0.1, 0.1});
  CHECK(t.weights() == std::vector<double>{0.5, 0.25});
}

TEST_CASE("a starved user outweighs a served user after ten slots") {
  RateTracker t(2, 0.1);
  for (int s = 0; s < 10; ++s) t.update(std::vector<double>{0.0, 50.0});
  const auto w = t.weights();
  CHECK(w[0] > w[1]);
  CHECK(t.cumulative()[0] == doctest::Approx(std::pow(0.9, 10)));
}

TEST_CASE("PF metric is the sum of natural logs") {
  CHECK(RateTracker(5, 0.1).pf_metric() == 0.0);
  RateTracker e(std::vector<double>{std::exp(1.0), std::exp(1.0)}, std::vector<double>{0.1, 0.1});
  CHECK(e.pf_metric() == doctest::Approx(2.0).epsilon(1e-15));

  Rng rng(3);
  std::uniform_real_distribution<double> u(0.01, 1000.0);
  std::vector<double> r(17);
  double loop = 0.0;
  for (auto& x : r) {
    x = u(rng);
    loop += std::log(x);
  }
  CHECK(pf_metric(r) == doctest::Approx(loop).epsilon(1e-14));

  std::vector<double> halved = r;
  halved[6] *= 0.5;
  CHECK(pf_metric(r) - pf_metric(halved) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("largest weight belongs to the smallest cumulative rate") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r(8);
    for (auto& x : r) x = u(rng);
    RateTracker t(r, std::vector<double>(8, 0.1));
    const auto w = t.weights();
    CHECK(std::max_element(w.begin(), w.end()) - w.begin() == std::min_element(r.begin(), r.end()) - r.begin());
  }
}

TEST_CASE("EMA stays bounded by the largest rate") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  RateTracker t(6, 0.3);
  for (int s = 0; s < 2000; ++s) {
    std::vector<double> r(6);
    for (auto& x : r) x = u(rng);
    t.update(r);
    for (double c : t.cumulative()) CHECK(c <= 40.0);
  }
}

TEST_CASE("tracker rows serialize as slot,user,R") {
  RateTracker t(2, 0.5);
  t.update(std::vector<double>{3.0, 1.0});
  std::ostringstream os;
  t.write_csv_rows(os);
  CHECK(os.str() == "1,0,2\n1,1,1\n");
}
