// include/srmr/level.hpp
//
// ITU-T P.56 Method B active speech level measurement and level
// normalization. 0 dBov is the RMS of a full-scale square wave (RMS 1.0).

// Copyright 2026  The srmr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SRMR_LEVEL_HPP_
#define SRMR_LEVEL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "srmr/audio.hpp"
#include "srmr/common.hpp"

namespace srmr {

struct ActiveLevelResult {
  double active_level_dbov = 0.0;
  double activity_factor = 0.0;  // fraction of samples counted active
  double rms_level_dbov = 0.0;
};

// Method B constants.
constexpr double kP56TimeConstant = 0.03;  // envelope smoothing, seconds
constexpr double kP56Hangover = 0.2;       // seconds
constexpr double kP56Margin = 15.9;        // dB
constexpr int kP56NumThresholds = 16;      // full scale down to 2^-15

// Measures the active speech level of a single-channel clip per P.56
// Method B: double-exponential envelope smoothing, hangover-extended
// activity counts at a geometric ladder of thresholds, and linear
// interpolation in (level - threshold) to hit the 15.9 dB margin.
inline ActiveLevelResult ActiveSpeechLevel(const AudioClip& clip) {
  clip.Validate();
  if (clip.num_channels() != 1)
    throw InputError("active_speech_level: expects a single channel");
  const std::vector<double>& x = clip.channels[0];
  const int fs = clip.sample_rate;
  if (clip.duration() < 0.25) throw DataError("insufficient duration");

  const size_t n = x.size();
  double sq = 0.0;
  for (double v : x) sq += v * v;
  if (sq == 0.0) throw DataError("no activity");

  const double g = std::exp(-1.0 / (fs * kP56TimeConstant));
  const long hangover = std::lround(kP56Hangover * fs);

  std::array<long, kP56NumThresholds> active_count{};
  std::array<long, kP56NumThresholds> hang{};
  std::array<double, kP56NumThresholds> threshold{};
  for (int j = 0; j < kP56NumThresholds; ++j) {
    threshold[j] = std::pow(2.0, -j);
    hang[j] = hangover;  // no pending hangover at start
  }

  double p = 0.0, q = 0.0;
  for (size_t i = 0; i < n; ++i) {
    p = g * p + (1.0 - g) * std::fabs(x[i]);
    q = g * q + (1.0 - g) * p;
    for (int j = 0; j < kP56NumThresholds; ++j) {
      if (q >= threshold[j]) {
        ++active_count[j];
        hang[j] = 0;
      } else if (hang[j] < hangover) {
        ++active_count[j];
        ++hang[j];
      }
    }
  }

  const double total = static_cast<double>(n);
  bool have_prev = false;
  double prev_level = 0.0, prev_delta = 0.0;
  double active_level = 0.0;
  bool found = false;
  for (int j = 0; j < kP56NumThresholds; ++j) {
    if (active_count[j] == 0) continue;
    const double level = PowerToDb(sq / static_cast<double>(active_count[j]));
    const double thr_db = AmplitudeToDb(threshold[j]);
    const double delta = level - thr_db;
    if (delta >= kP56Margin) {
      if (!have_prev || delta == prev_delta) {
        active_level = level;
      } else {
        active_level = prev_level + (level - prev_level) *
                                        (kP56Margin - prev_delta) /
                                        (delta - prev_delta);
      }
      found = true;
      break;
    }
    prev_level = level;
    prev_delta = delta;
    have_prev = true;
  }
  if (!found) throw DataError("no activity");

  ActiveLevelResult r;
  r.active_level_dbov = active_level;
  r.rms_level_dbov = PowerToDb(sq / total);
  r.activity_factor =
      std::clamp(sq / DbToPower(active_level) / total, 0.0, 1.0);
  return r;
}

struct NormalizeResult {
  AudioClip clip;
  double gain = 1.0;
  long clipped_samples = 0;  // samples pushed past |1.0| by the gain
};

// Scales all channels by one common gain so that channel 1's active level
// hits the target. Inter-channel level ratios are preserved; clipping is
// allowed but counted.
inline NormalizeResult NormalizeTo(const AudioClip& clip, double target_dbov) {
  clip.Validate();
  AudioClip reference = AudioClip::Mono(clip.channels[0], clip.sample_rate);
  const ActiveLevelResult level = ActiveSpeechLevel(reference);
  const double gain = DbToAmplitude(target_dbov - level.active_level_dbov);

  NormalizeResult out;
  out.gain = gain;
  out.clip.sample_rate = clip.sample_rate;
  out.clip.channels.reserve(clip.num_channels());
  for (const auto& ch : clip.channels) {
    std::vector<double> scaled(ch.size());
    for (size_t i = 0; i < ch.size(); ++i) {
      scaled[i] = ch[i] * gain;
      if (std::fabs(scaled[i]) > 1.0) ++out.clipped_samples;
    }
    out.clip.channels.push_back(std::move(scaled));
  }
  return out;
}

}  // namespace srmr

#endif  // SRMR_LEVEL_HPP_
