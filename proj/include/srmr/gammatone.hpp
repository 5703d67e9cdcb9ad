// include/srmr/gammatone.hpp
//
// Critical-band gammatone filterbank. Center frequencies are equally spaced
// on the ERB-rate scale; each channel is a 4th-order gammatone realized as a
// cascade of four second-order sections (impulse-invariant design after
// Slaney's formulation of the Patterson-Holdsworth filterbank), with the
// passband gain normalized to unity at the center frequency.

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

#ifndef SRMR_GAMMATONE_HPP_
#define SRMR_GAMMATONE_HPP_

#include <cmath>
#include <complex>
#include <vector>

#include "srmr/common.hpp"

namespace srmr {

// Glasberg-Moore equivalent rectangular bandwidth, Hz.
inline double ErbHz(double f_hz) { return 24.7 * (4.37 * f_hz / 1000.0 + 1.0); }

// ERB-rate (ERB-number) scale.
inline double ErbRate(double f_hz) {
  return 21.4 * std::log10(4.37 * f_hz / 1000.0 + 1.0);
}

inline double ErbRateToHz(double erb_rate) {
  return (std::pow(10.0, erb_rate / 21.4) - 1.0) * 1000.0 / 4.37;
}

struct Biquad {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;  // numerator
  double a1 = 0.0, a2 = 0.0;            // denominator, a0 = 1
};

struct GammatoneChannel {
  double cf_hz = 0.0;
  double bandwidth_hz = 0.0;  // 1.019 * ERB(cf)
  Biquad sections[4];
  double gain = 1.0;  // applied once, normalizes |H(cf)| to 1

  std::complex<double> Response(double f_hz, double sample_rate) const {
    const std::complex<double> z1 =
        std::exp(std::complex<double>(0.0, -2.0 * kPi * f_hz / sample_rate));
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h = gain;
    for (const Biquad& s : sections) {
      h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    }
    return h;
  }

  std::vector<double> Filter(const std::vector<double>& x) const {
    std::vector<double> y = x;
    for (const Biquad& s : sections) {
      double w1 = 0.0, w2 = 0.0;  // transposed direct form II state
      for (double& v : y) {
        const double in = v;
        const double out = s.b0 * in + w1;
        w1 = s.b1 * in - s.a1 * out + w2;
        w2 = s.b2 * in - s.a2 * out;
        v = out;
      }
    }
    for (double& v : y) v *= gain;
    return y;
  }
};

inline GammatoneChannel DesignGammatoneChannel(double cf_hz,
                                               double sample_rate) {
  GammatoneChannel ch;
  ch.cf_hz = cf_hz;
  ch.bandwidth_hz = 1.019 * ErbHz(cf_hz);

  const double T = 1.0 / sample_rate;
  const double B = 2.0 * kPi * ch.bandwidth_hz;
  const double w = 2.0 * kPi * cf_hz * T;
  const double exp_bt = std::exp(B * T);
  const double cos_w = std::cos(w);
  const double sin_w = std::sin(w);
  const double a1 = -2.0 * cos_w / exp_bt;
  const double a2 = std::exp(-2.0 * B * T);
  const double s_wide = std::sqrt(3.0 + std::pow(2.0, 1.5));
  const double s_narrow = std::sqrt(3.0 - std::pow(2.0, 1.5));

  const double zeros[4] = {
      (cos_w + s_wide * sin_w) / exp_bt,
      (cos_w - s_wide * sin_w) / exp_bt,
      (cos_w + s_narrow * sin_w) / exp_bt,
      (cos_w - s_narrow * sin_w) / exp_bt,
  };
  for (int i = 0; i < 4; ++i) {
    ch.sections[i].b0 = T;
    ch.sections[i].b1 = -T * zeros[i];
    ch.sections[i].b2 = 0.0;
    ch.sections[i].a1 = a1;
    ch.sections[i].a2 = a2;
  }
  const double mag = std::abs(ch.Response(cf_hz, sample_rate));
  ch.gain = 1.0 / mag;
  return ch;
}

// Designs num_bands channels equally spaced on the ERB-rate scale between
// cf_min and cf_max inclusive.
inline std::vector<GammatoneChannel> DesignGammatoneBank(double cf_min_hz,
                                                         double cf_max_hz,
                                                         int num_bands,
                                                         double sample_rate) {
  if (num_bands < 1) throw InputError("gammatone: need at least one band");
  if (!(cf_min_hz > 0.0 && cf_min_hz < cf_max_hz))
    throw InputError("gammatone: need 0 < cf_min < cf_max");
  if (cf_max_hz >= sample_rate / 2.0)
    throw InputError("gammatone: cf_max must be below Nyquist");

  const double e_lo = ErbRate(cf_min_hz);
  const double e_hi = ErbRate(cf_max_hz);
  std::vector<GammatoneChannel> bank;
  bank.reserve(num_bands);
  for (int i = 0; i < num_bands; ++i) {
    const double e = num_bands == 1
                         ? 0.5 * (e_lo + e_hi)
                         : e_lo + (e_hi - e_lo) * i / (num_bands - 1);
    double cf = ErbRateToHz(e);
    if (i == 0) cf = cf_min_hz;                 // pin endpoints exactly
    if (i == num_bands - 1) cf = cf_max_hz;
    bank.push_back(DesignGammatoneChannel(cf, sample_rate));
  }
  return bank;
}

}  // namespace srmr

#endif  // SRMR_GAMMATONE_HPP_
