// include/srmr/room.hpp
//
// Synthetic reverberation: Allen-Berkley image-method room impulse
// responses, seeded exponential-decay RIRs, Schroeder-integration RT60,
// direct-to-reverberant ratio, convolution, and noise mixing at a
// prescribed SNR.

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

#ifndef SRMR_ROOM_HPP_
#define SRMR_ROOM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "srmr/audio.hpp"
#include "srmr/common.hpp"
#include "srmr/fft.hpp"
#include "srmr/level.hpp"

namespace srmr {

constexpr double kSpeedOfSound = 343.0;  // m/s

struct Rir {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string meta;  // free-form description of the generation parameters

  void Validate() const {
    if (sample_rate <= 0) throw InputError("Rir: sample_rate must be > 0");
    if (samples.empty()) throw InputError("Rir: empty");
    bool any = false;
    for (double v : samples) {
      if (!std::isfinite(v)) throw InputError("Rir: non-finite sample");
      if (v != 0.0) any = true;
    }
    if (!any) throw DataError("Rir: all-zero");
  }
};

struct RirStats {
  double rt60_s = 0.0;
  double drr_db = 0.0;
  bool direct_only = false;  // no reverberant energy outside the direct window
};

namespace room_detail {

inline double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// Adds amplitude * windowed-sinc centered at fractional sample position tau.
// The window is a Hann taper over +-4 samples, which removes the
// delay-quantization bias of nearest-sample insertion.
inline void AddFractionalImpulse(std::vector<double>* h, double tau,
                                 double amplitude) {
  const int lo = static_cast<int>(std::ceil(tau - 4.0));
  const int hi = static_cast<int>(std::floor(tau + 4.0));
  const int n = static_cast<int>(h->size());
  for (int t = std::max(0, lo); t <= std::min(n - 1, hi); ++t) {
    const double u = t - tau;
    const double w = 0.5 * (1.0 + std::cos(kPi * u / 4.0));
    (*h)[t] += amplitude * w * Sinc(u);
  }
}

}  // namespace room_detail

// Allen-Berkley image-source RIR for a shoebox room. beta holds the wall
// reflection coefficients ordered {x0, x1, y0, y1, z0, z1}. Every image
// whose direct-path arrival falls inside `duration` contributes amplitude
// (reflection product)/(4*pi*d) at delay d/c via fractional-delay sinc
// insertion.
inline Rir ImageRir(const std::array<double, 3>& room_m,
                    const std::array<double, 3>& source_m,
                    const std::array<double, 3>& mic_m,
                    const std::array<double, 6>& beta, int sample_rate,
                    double duration_s) {
  for (int d = 0; d < 3; ++d) {
    if (!(room_m[d] > 0)) throw InputError("image_rir: bad room dimensions");
    if (!(source_m[d] > 0 && source_m[d] < room_m[d]))
      throw InputError("image_rir: source outside the room");
    if (!(mic_m[d] > 0 && mic_m[d] < room_m[d]))
      throw InputError("image_rir: microphone outside the room");
  }
  if (source_m == mic_m) throw InputError("image_rir: source equals mic");
  for (double b : beta)
    if (!(b >= 0.0 && b < 1.0))
      throw InputError("image_rir: reflection coefficients must be in [0,1)");
  if (duration_s < 0.1) throw InputError("image_rir: duration below 0.1 s");

  const int n = static_cast<int>(std::lround(duration_s * sample_rate));
  Rir rir;
  rir.sample_rate = sample_rate;
  rir.samples.assign(n, 0.0);

  const double max_dist = kSpeedOfSound * duration_s;
  const int nx = static_cast<int>(std::ceil(max_dist / (2.0 * room_m[0])));
  const int ny = static_cast<int>(std::ceil(max_dist / (2.0 * room_m[1])));
  const int nz = static_cast<int>(std::ceil(max_dist / (2.0 * room_m[2])));

  const double fs = static_cast<double>(sample_rate);
  for (int mx = -nx; mx <= nx; ++mx) {
    for (int my = -ny; my <= ny; ++my) {
      for (int mz = -nz; mz <= nz; ++mz) {
        for (int q = 0; q <= 1; ++q) {
          const double dx =
              (1 - 2 * q) * source_m[0] - mic_m[0] + 2.0 * mx * room_m[0];
          const double rx = std::pow(beta[0], std::abs(mx - q)) *
                            std::pow(beta[1], std::abs(mx));
          if (rx == 0.0) continue;
          for (int jj = 0; jj <= 1; ++jj) {
            const double dy =
                (1 - 2 * jj) * source_m[1] - mic_m[1] + 2.0 * my * room_m[1];
            const double ry = std::pow(beta[2], std::abs(my - jj)) *
                              std::pow(beta[3], std::abs(my));
            if (ry == 0.0) continue;
            for (int kk = 0; kk <= 1; ++kk) {
              const double dz =
                  (1 - 2 * kk) * source_m[2] - mic_m[2] + 2.0 * mz * room_m[2];
              const double rz = std::pow(beta[4], std::abs(mz - kk)) *
                                std::pow(beta[5], std::abs(mz));
              if (rz == 0.0) continue;
              const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
              const double delay_s = dist / kSpeedOfSound;
              if (delay_s >= duration_s) continue;
              const double amp = rx * ry * rz / (4.0 * kPi * dist);
              room_detail::AddFractionalImpulse(&rir.samples, delay_s * fs,
                                                amp);
            }
          }
        }
      }
    }
  }
  rir.meta = "image";
  rir.Validate();
  return rir;
}

// White-Gaussian exponential decay, deterministic per seed. Serves as the
// oracle RIR for the decay estimator: RT60 is 6.908 * tau.
inline Rir SynthExponentialRir(double tau_s, int sample_rate,
                               double duration_s, uint64_t seed) {
  if (tau_s <= 0.0) throw InputError("synth_exponential_rir: tau must be > 0");
  const int n = static_cast<int>(std::lround(duration_s * sample_rate));
  if (n < 1) throw InputError("synth_exponential_rir: empty duration");
  Rir rir;
  rir.sample_rate = sample_rate;
  rir.samples.resize(n);
  GaussianSource gauss(seed);
  const double rate = 1.0 / (tau_s * sample_rate);
  for (int i = 0; i < n; ++i)
    rir.samples[i] = std::exp(-i * rate) * gauss.Next();
  rir.meta = "exponential";
  return rir;
}

// Schroeder backward-integration RT60: fit a line to the energy decay curve
// between -5 dB and -35 dB and extrapolate to -60 dB.
inline double SchroederRt60(const Rir& rir) {
  rir.Validate();
  const size_t n = rir.samples.size();
  std::vector<double> edc(n);
  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    const double v = rir.samples[i];
    acc += v * v;
    edc[i] = acc;
  }
  const double total = edc[0];
  size_t i5 = n, i35 = n;
  for (size_t i = 0; i < n; ++i) {
    const double db = PowerToDb(edc[i] / total);
    if (i5 == n && db <= -5.0) i5 = i;
    if (db <= -35.0) {
      i35 = i;
      break;
    }
  }
  if (i35 == n) throw DataError("insufficient decay");
  const double fs = static_cast<double>(rir.sample_rate);
  if ((i35 - i5) < static_cast<size_t>(0.001 * fs))
    throw DataError("degenerate decay");

  // Least-squares line of EDC dB against time over [i5, i35].
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const size_t count = i35 - i5 + 1;
  for (size_t i = i5; i <= i35; ++i) {
    const double x = static_cast<double>(i) / fs;
    const double y = PowerToDb(edc[i] / total);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) throw DataError("degenerate decay");
  const double slope = (count * sxy - sx * sy) / denom;  // dB per second
  if (slope >= 0.0) throw DataError("degenerate decay");
  return -60.0 / slope;
}

// Direct-to-reverberant energy ratio: direct window spans [-0.5 ms, +2.5 ms]
// around the strongest sample.
inline RirStats Drr(const Rir& rir) {
  rir.Validate();
  const size_t n = rir.samples.size();
  size_t peak = 0;
  double peak_mag = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double m = std::fabs(rir.samples[i]);
    if (m > peak_mag) {
      peak_mag = m;
      peak = i;
    }
  }
  const double fs = static_cast<double>(rir.sample_rate);
  const int64_t lo =
      std::max<int64_t>(0, static_cast<int64_t>(peak) -
                               static_cast<int64_t>(std::lround(0.0005 * fs)));
  const int64_t hi =
      std::min<int64_t>(static_cast<int64_t>(n) - 1,
                        static_cast<int64_t>(peak) +
                            static_cast<int64_t>(std::lround(0.0025 * fs)));
  double direct = 0.0, rest = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = rir.samples[i] * rir.samples[i];
    if (static_cast<int64_t>(i) >= lo && static_cast<int64_t>(i) <= hi)
      direct += e;
    else
      rest += e;
  }
  RirStats s;
  if (rest <= 0.0) {
    s.direct_only = true;
    s.drr_db = std::numeric_limits<double>::infinity();
  } else {
    s.drr_db = PowerToDb(direct / rest);
  }
  return s;
}

inline RirStats AnalyzeRir(const Rir& rir) {
  RirStats s = Drr(rir);
  s.rt60_s = SchroederRt60(rir);
  return s;
}

// Full linear convolution of two real sequences via the FFT,
// length |x| + |h| - 1.
inline std::vector<double> FftConvolve(const std::vector<double>& x,
                                       const std::vector<double>& h) {
  const size_t out_len = x.size() + h.size() - 1;
  size_t nfft = 1;
  while (nfft < out_len) nfft <<= 1;
  std::vector<double> a(nfft, 0.0), b(nfft, 0.0);
  std::copy(x.begin(), x.end(), a.begin());
  std::copy(h.begin(), h.end(), b.begin());
  std::vector<std::complex<double>> A(nfft / 2 + 1), B(nfft / 2 + 1);
  fft::RealForward(a.data(), A.data(), nfft);
  fft::RealForward(b.data(), B.data(), nfft);
  for (size_t i = 0; i < A.size(); ++i) A[i] *= B[i];
  std::vector<double> y(nfft);
  fft::RealInverse(A.data(), y.data(), nfft);
  const double scale = 1.0 / static_cast<double>(nfft);
  y.resize(out_len);
  for (double& v : y) v *= scale;
  return y;
}

// Convolves every channel of the clip with the RIR (resampling the RIR to
// the clip's rate when they differ).
inline AudioClip Convolve(const AudioClip& clip, const Rir& rir) {
  clip.Validate();
  rir.Validate();
  std::vector<double> h = rir.samples;
  if (rir.sample_rate != clip.sample_rate)
    h = ResampleChannel(h, rir.sample_rate, clip.sample_rate);
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.channels.reserve(clip.num_channels());
  for (const auto& ch : clip.channels)
    out.channels.push_back(FftConvolve(ch, h));
  return out;
}

// Adds noise to speech so that the speech's P.56 active level exceeds the
// noise's RMS level by snr_db. A seeded offset picks the noise segment;
// noise shorter than the speech is tiled. Each channel pairs with the
// matching noise channel (noise channels are recycled when fewer).
inline AudioClip MixNoiseAtSnr(const AudioClip& speech, const AudioClip& noise,
                               double snr_db, uint64_t seed) {
  speech.Validate();
  noise.Validate();
  const AudioClip ref = AudioClip::Mono(speech.channels[0], speech.sample_rate);
  const double speech_level = ActiveSpeechLevel(ref).active_level_dbov;

  GaussianSource rng(seed);
  AudioClip out;
  out.sample_rate = speech.sample_rate;
  out.channels.reserve(speech.num_channels());
  const size_t n = speech.num_frames();
  for (size_t c = 0; c < speech.num_channels(); ++c) {
    const std::vector<double>& nz =
        noise.channels[c % noise.num_channels()];
    const size_t offset = rng.NextIndex(nz.size());
    std::vector<double> seg(n);
    for (size_t i = 0; i < n; ++i) seg[i] = nz[(offset + i) % nz.size()];
    const double seg_power = SumOfSquares(seg) / static_cast<double>(n);
    if (seg_power <= 0.0) throw DataError("silent noise");
    const double noise_level = PowerToDb(seg_power);
    const double gain = DbToAmplitude(speech_level - snr_db - noise_level);
    std::vector<double> mixed(n);
    for (size_t i = 0; i < n; ++i)
      mixed[i] = speech.channels[c][i] + gain * seg[i];
    out.channels.push_back(std::move(mixed));
  }
  return out;
}

}  // namespace srmr

#endif  // SRMR_ROOM_HPP_
