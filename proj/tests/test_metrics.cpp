// Copyright 2026 The vcforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vcforge/metrics.hpp"

#include <cmath>

#include "doctest.h"
#include "vcforge/common.hpp"

using namespace vc;

namespace {

FeatureTrack log_track(std::initializer_list<std::initializer_list<double>> rows) {
  return FeatureTrack(Matrix(rows), 0.005);
}

FeatureTrack f0_track(const std::vector<double>& f0) {
  Matrix m(f0.size(), 2);
  for (std::size_t t = 0; t < f0.size(); ++t) {
    m(t, 0) = f0[t];
    m(t, 1) = f0[t] > 0.0 ? 1.0 : 0.0;
  }
  return FeatureTrack(std::move(m), 0.005);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("lsd is 0 when converted equals target, 100 when it equals source") {
  DetRng rng(3);
  Matrix src(8, 4), tgt(8, 4);
  for (std::size_t i = 0; i < src.size(); ++i) {
    src.data()[i] = rng.gaussian();
    tgt.data()[i] = rng.gaussian();
  }
  FeatureTrack s(src, 0.005), t(tgt, 0.005);
  CHECK(lsd_ratio(s, t, t, SpectrumDomain::kLog) == doctest::Approx(0.0));
  CHECK(lsd_ratio(s, s, t, SpectrumDomain::kLog) == doctest::Approx(100.0));
}

TEST_CASE("worked micro-case gives 25 percent") {
  FeatureTrack source = log_track({{0.0, 0.0}});
  FeatureTrack target = log_track({{1.0, 1.0}});
  FeatureTrack converted = log_track({{0.5, 0.5}});
  CHECK(lsd_ratio(source, converted, target, SpectrumDomain::kLog) ==
        doctest::Approx(25.0));
}

TEST_CASE("linear-magnitude domain takes logs first") {
  FeatureTrack source = log_track({{1.0, 1.0}});
  FeatureTrack target = log_track({{std::exp(1.0), std::exp(1.0)}});
  FeatureTrack converted = log_track({{std::exp(0.5), std::exp(0.5)}});
  CHECK(lsd_ratio(source, converted, target,
                  SpectrumDomain::kLinearMagnitude) == doctest::Approx(25.0));
}

TEST_CASE("zero-denominator frames are excluded; all-zero is an error") {
  // Second frame identical in source and target: excluded from both sums.
  FeatureTrack source = log_track({{0.0, 0.0}, {3.0, 3.0}});
  FeatureTrack target = log_track({{1.0, 1.0}, {3.0, 3.0}});
  FeatureTrack converted = log_track({{0.5, 0.5}, {9.0, 9.0}});
  CHECK(lsd_ratio(source, converted, target, SpectrumDomain::kLog) ==
        doctest::Approx(25.0));

  FeatureTrack same = log_track({{2.0, 2.0}});
  CHECK_THROWS_AS(lsd_ratio(same, same, same, SpectrumDomain::kLog),
                  NumericError);
}

TEST_CASE("lsd scale sensitivity follows the log-domain definition") {
  DetRng rng(5);
  Matrix src(6, 3), tgt(6, 3), conv(6, 3);
  for (std::size_t i = 0; i < src.size(); ++i) {
    src.data()[i] = rng.gaussian();
    tgt.data()[i] = rng.gaussian();
    conv.data()[i] = rng.gaussian();
  }
  FeatureTrack s(src, 0.005), t(tgt, 0.005), c(conv, 0.005);
  double base = lsd_ratio(s, c, t, SpectrumDomain::kLog);
  // Shifting converted by log(k) changes each numerator term by that
  // offset; recompute directly and compare.
  const double shift = std::log(1.7);
  Matrix conv2 = conv;
  for (std::size_t i = 0; i < conv2.size(); ++i) conv2.data()[i] += shift;
  FeatureTrack c2(conv2, 0.005);
  double num = 0.0, den = 0.0;
  for (std::size_t f = 0; f < 6; ++f) {
    for (std::size_t i = 0; i < 3; ++i) {
      num += std::pow(conv(f, i) + shift - tgt(f, i), 2.0);
      den += std::pow(src(f, i) - tgt(f, i), 2.0);
    }
  }
  CHECK(lsd_ratio(s, c2, t, SpectrumDomain::kLog) ==
        doctest::Approx(100.0 * num / den).epsilon(1e-12));
  CHECK(lsd_ratio(s, c2, t, SpectrumDomain::kLog) != doctest::Approx(base));
}

TEST_CASE("metrics are permutation-invariant over frames") {
  DetRng rng(7);
  Matrix src(5, 2), tgt(5, 2), conv(5, 2);
  for (std::size_t i = 0; i < src.size(); ++i) {
    src.data()[i] = rng.gaussian();
    tgt.data()[i] = rng.gaussian();
    conv.data()[i] = rng.gaussian();
  }
  double before = lsd_ratio(FeatureTrack(src, 0.005),
                            FeatureTrack(conv, 0.005),
                            FeatureTrack(tgt, 0.005), SpectrumDomain::kLog);
  std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
  Matrix src_p(5, 2), tgt_p(5, 2), conv_p(5, 2);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      src_p(r, c) = src(perm[r], c);
      tgt_p(r, c) = tgt(perm[r], c);
      conv_p(r, c) = conv(perm[r], c);
    }
  }
  double after = lsd_ratio(FeatureTrack(src_p, 0.005),
                           FeatureTrack(conv_p, 0.005),
                           FeatureTrack(tgt_p, 0.005), SpectrumDomain::kLog);
  CHECK(before == doctest::Approx(after).epsilon(1e-12));
}

TEST_CASE("f0 rmse basics") {
  FeatureTrack a = f0_track({100, 200, 0, 150});
  CHECK(f0_rmse(a, a).rmse_hz == doctest::Approx(0.0));

  FeatureTrack b = f0_track({110, 210, 0, 160});
  CHECK(f0_rmse(b, a).rmse_hz == doctest::Approx(10.0));

  FeatureTrack c = f0_track({100, 200});
  FeatureTrack d = f0_track({104, 197});
  CHECK(f0_rmse(c, d).rmse_hz ==
        doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
}

TEST_CASE("voicing mismatches are excluded and counted") {
  FeatureTrack conv = f0_track({100, 0, 120, 130});
  FeatureTrack tgt = f0_track({104, 118, 0, 127});
  F0RmseResult r = f0_rmse(conv, tgt);
  CHECK(r.shared_voiced_frames == 2);
  CHECK(r.voicing_mismatch_frames == 2);
  CHECK(r.rmse_hz == doctest::Approx(std::sqrt((16.0 + 9.0) / 2.0)));

  FeatureTrack all_unvoiced = f0_track({0, 0, 0, 0});
  CHECK_THROWS_AS(f0_rmse(conv, all_unvoiced), NumericError);
}

TEST_CASE("report aggregation averages over utterances") {
  std::vector<UtteranceEval> rows(2);
  rows[0].utt_id = "a";
  rows[0].lsd_percent = 40.0;
  rows[0].f0_rmse_hz = 10.0;
  rows[1].utt_id = "b";
  rows[1].lsd_percent = 60.0;
  rows[1].f0_rmse_hz = 20.0;
  EvalReport report = aggregate_report(rows, 256);
  CHECK(report.lsd_percent == doctest::Approx(50.0));
  CHECK(report.f0_rmse_hz == doctest::Approx(15.0));
  CHECK(report.env_bins == 256);
  CHECK(report.per_utterance.size() == 2);
}

}  // TEST_SUITE
