// include/srmr/modspec.hpp
//
// Modulation spectral decomposition of reverberant speech. A single-channel
// clip is split by the gammatone filterbank, each band's Hilbert envelope is
// decimated to the envelope rate, framed with a 256 ms Hamming window every
// 32 ms, transformed with a zero-padded DFT, and the squared-magnitude bins
// are grouped into 8 log-spaced modulation bands. The result is the energy
// tensor indexed (acoustic band j, modulation band k, frame m).
//
// Two configurations exist: the original mode covers modulation frequencies
// 4-128 Hz with every frame active; the normalized mode narrows the range to
// 4-40 Hz and discards frames whose total energy falls more than 30 dB below
// the peak frame.

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

#ifndef SRMR_MODSPEC_HPP_
#define SRMR_MODSPEC_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "srmr/audio.hpp"
#include "srmr/common.hpp"
#include "srmr/fft.hpp"
#include "srmr/gammatone.hpp"

namespace srmr {

enum class PipelineMode { kOriginal, kNormalized };

inline const char* ModeName(PipelineMode m) {
  return m == PipelineMode::kOriginal ? "original" : "normalized";
}

struct PipelineConfig {
  PipelineMode mode = PipelineMode::kOriginal;
  int num_acoustic_bands = 23;
  double cf_min_hz = 125.0;
  double cf_max_hz = 6400.0;
  double frame_len_s = 0.256;
  double frame_hop_s = 0.032;
  int num_mod_bands = 8;
  double mod_low_hz = 4.0;
  double mod_high_hz = 128.0;
  double energy_floor_db = 0.0;  // 0 disables; normalized mode uses 30
  int envelope_rate_hz = 500;
  int dft_size = 1024;

  static PipelineConfig Original() { return PipelineConfig{}; }

  static PipelineConfig Normalized() {
    PipelineConfig c;
    c.mode = PipelineMode::kNormalized;
    c.mod_high_hz = 40.0;
    c.energy_floor_db = 30.0;
    return c;
  }

  static PipelineConfig ForMode(PipelineMode m) {
    return m == PipelineMode::kOriginal ? Original() : Normalized();
  }

  int frame_len_samples() const {
    return static_cast<int>(std::lround(frame_len_s * envelope_rate_hz));
  }
  int frame_hop_samples() const {
    return static_cast<int>(std::lround(frame_hop_s * envelope_rate_hz));
  }

  void Validate(double sample_rate) const {
    if (!(cf_min_hz > 0 && cf_min_hz < cf_max_hz && cf_max_hz < sample_rate / 2))
      throw InputError("config: need 0 < cf_min < cf_max < Nyquist");
    if (frame_hop_s > frame_len_s)
      throw InputError("config: frame hop exceeds frame length");
    if (!(mod_low_hz > 0 && mod_low_hz < mod_high_hz &&
          mod_high_hz < envelope_rate_hz / 2.0))
      throw InputError("config: modulation range must sit below envelope Nyquist");
    if (num_acoustic_bands < 1 || num_mod_bands < 2)
      throw InputError("config: band counts out of range");
    if (dft_size < frame_len_samples())
      throw InputError("config: dft_size smaller than the frame");
    if (static_cast<int>(sample_rate) % envelope_rate_hz != 0)
      throw InputError("config: envelope rate must divide the sample rate");
  }
};

struct ModulationTensor {
  int num_acoustic = 0;   // J
  int num_modulation = 0; // K
  int num_frames = 0;     // M
  std::vector<double> energies;     // J*K*M, index (j*K + k)*M + m
  std::vector<uint8_t> active;      // length M
  PipelineConfig config;

  double At(int j, int k, int m) const {
    return energies[(static_cast<size_t>(j) * num_modulation + k) * num_frames + m];
  }
  double& At(int j, int k, int m) {
    return energies[(static_cast<size_t>(j) * num_modulation + k) * num_frames + m];
  }
  int NumActiveFrames() const {
    int n = 0;
    for (uint8_t a : active) n += a ? 1 : 0;
    return n;
  }
};

// Log-spaced modulation filterbank center frequencies over [lo, hi].
inline std::vector<double> ModulationCenterFrequencies(double lo, double hi,
                                                       int count) {
  std::vector<double> cfs(count);
  for (int i = 0; i < count; ++i)
    cfs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return cfs;
}

// Band edges: geometric midpoints between neighbours, with the outermost
// edges pinned to the configured modulation range. Bins are assigned to
// half-open intervals [edge_k, edge_{k+1}).
inline std::vector<double> ModulationBandEdges(const PipelineConfig& cfg) {
  const auto cfs = ModulationCenterFrequencies(cfg.mod_low_hz, cfg.mod_high_hz,
                                               cfg.num_mod_bands);
  std::vector<double> edges(cfg.num_mod_bands + 1);
  edges.front() = cfg.mod_low_hz;
  edges.back() = cfg.mod_high_hz;
  for (int k = 1; k < cfg.num_mod_bands; ++k)
    edges[k] = std::sqrt(cfs[k - 1] * cfs[k]);
  return edges;
}

// Hilbert envelope decimated to the envelope rate. The analytic magnitude is
// taken over the whole sequence, anti-alias filtered with a Kaiser-windowed
// sinc (cutoff 0.4 * envelope rate), and sampled every sample_rate /
// envelope_rate points. The FIR is centered so the envelope stays aligned.
inline std::vector<double> TemporalEnvelope(const std::vector<double>& signal,
                                            int sample_rate,
                                            int envelope_rate_hz) {
  if (signal.empty()) throw InputError("temporal_envelope: empty signal");
  if (sample_rate % envelope_rate_hz != 0)
    throw InputError("temporal_envelope: envelope rate must divide sample rate");
  const int factor = sample_rate / envelope_rate_hz;

  const std::vector<double> mag = fft::AnalyticMagnitude(signal);

  // Anti-alias FIR: cutoff 0.4 * envelope rate, Kaiser window. 1025 taps at
  // 16 kHz gives > 80 dB stopband by the envelope Nyquist.
  const double fc = 0.4 * envelope_rate_hz / sample_rate;
  const int taps = 1025;
  const int half = taps / 2;
  static thread_local std::vector<double> fir;
  static thread_local double fir_fc = -1.0;
  if (fir_fc != fc) {
    fir.assign(taps, 0.0);
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
      const double t = i - half;
      const double u = t / (half + 1.0);
      fir[i] = 2.0 * fc * resample_detail::Sinc(2.0 * fc * t) *
               resample_detail::KaiserI0Ratio(u, 8.6);
      sum += fir[i];
    }
    for (double& v : fir) v /= sum;  // exact unit DC gain
    fir_fc = fc;
  }

  const size_t n = mag.size();
  const size_t n_out = (n + factor - 1) / factor;
  std::vector<double> env(n_out, 0.0);
  for (size_t o = 0; o < n_out; ++o) {
    const int64_t center = static_cast<int64_t>(o) * factor;
    const int64_t lo = std::max<int64_t>(0, center - half);
    const int64_t hi = std::min<int64_t>(static_cast<int64_t>(n) - 1, center + half);
    double acc = 0.0;
    for (int64_t i = lo; i <= hi; ++i)
      acc += mag[i] * fir[i - center + half];
    env[o] = acc;
  }
  return env;
}

// Hamming-windowed, zero-padded squared-magnitude modulation spectra.
// Returns M frames of dft_size/2 + 1 bins, flattened frame-major.
struct FrameSpectra {
  int num_frames = 0;
  int num_bins = 0;
  std::vector<double> power;  // num_frames * num_bins
  double bin_hz = 0.0;
};

inline FrameSpectra FrameAndDft(const std::vector<double>& envelope,
                                const PipelineConfig& cfg) {
  const int frame_len = cfg.frame_len_samples();
  const int hop = cfg.frame_hop_samples();
  const int nfft = cfg.dft_size;
  if (static_cast<int>(envelope.size()) < frame_len)
    throw DataError("utterance too short");

  const int num_frames =
      static_cast<int>((envelope.size() - frame_len) / hop) + 1;
  const int num_bins = nfft / 2 + 1;

  std::vector<double> window(frame_len);
  for (int i = 0; i < frame_len; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (frame_len - 1));

  FrameSpectra out;
  out.num_frames = num_frames;
  out.num_bins = num_bins;
  out.bin_hz = static_cast<double>(cfg.envelope_rate_hz) / nfft;
  out.power.assign(static_cast<size_t>(num_frames) * num_bins, 0.0);

  std::vector<double> buf(nfft, 0.0);
  std::vector<std::complex<double>> spec(num_bins);
  for (int m = 0; m < num_frames; ++m) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const int start = m * hop;
    for (int i = 0; i < frame_len; ++i)
      buf[i] = envelope[start + i] * window[i];
    fft::RealForward(buf.data(), spec.data(), nfft);
    double* row = &out.power[static_cast<size_t>(m) * num_bins];
    for (int b = 0; b < num_bins; ++b) row[b] = std::norm(spec[b]);
  }
  return out;
}

// Sums squared-magnitude bins into the K modulation bands for one acoustic
// channel; writes into tensor slice j.
inline void GroupModulationBands(const FrameSpectra& spectra,
                                 const PipelineConfig& cfg, int j,
                                 ModulationTensor* tensor) {
  const auto edges = ModulationBandEdges(cfg);
  const int K = cfg.num_mod_bands;
  // Precompute bin ranges per band.
  std::vector<int> lo_bin(K), hi_bin(K);
  for (int k = 0; k < K; ++k) {
    lo_bin[k] = static_cast<int>(std::ceil(edges[k] / spectra.bin_hz));
    // half-open upper edge
    const double hi = edges[k + 1] / spectra.bin_hz;
    hi_bin[k] = static_cast<int>(std::ceil(hi)) - 1;
    if (std::abs(hi - std::round(hi)) < 1e-12)
      hi_bin[k] = static_cast<int>(std::round(hi)) - 1;
    hi_bin[k] = std::min(hi_bin[k], spectra.num_bins - 1);
    if (hi_bin[k] < lo_bin[k])
      throw DataError("modulation band has no DFT bins");
  }
  for (int m = 0; m < spectra.num_frames; ++m) {
    const double* row = &spectra.power[static_cast<size_t>(m) * spectra.num_bins];
    for (int k = 0; k < K; ++k) {
      double s = 0.0;
      for (int b = lo_bin[k]; b <= hi_bin[k]; ++b) s += row[b];
      tensor->At(j, k, m) = s;
    }
  }
}

// Marks frames whose total energy sits more than floor_db below the peak
// frame as inactive. No-op when floor_db <= 0.
inline void ApplyEnergyFloor(ModulationTensor* tensor, double floor_db) {
  const int M = tensor->num_frames;
  tensor->active.assign(M, 1);
  if (floor_db <= 0.0) return;
  std::vector<double> total(M, 0.0);
  double peak = 0.0;
  for (int m = 0; m < M; ++m) {
    double s = 0.0;
    for (int j = 0; j < tensor->num_acoustic; ++j)
      for (int k = 0; k < tensor->num_modulation; ++k) s += tensor->At(j, k, m);
    total[m] = s;
    peak = std::max(peak, s);
  }
  if (peak <= 0.0) throw DataError("silent input");
  const double cutoff = peak * DbToPower(-floor_db);
  for (int m = 0; m < M; ++m) tensor->active[m] = total[m] >= cutoff ? 1 : 0;
}

// Full pipeline for one channel: gammatone bank -> Hilbert envelope ->
// framing + DFT -> band grouping -> (normalized mode) energy floor.
inline ModulationTensor Analyze(const AudioClip& clip,
                                const PipelineConfig& cfg) {
  clip.Validate();
  if (clip.num_channels() != 1)
    throw InputError("analyze: expects a single channel");
  AudioClip work = clip.sample_rate == kInternalRate
                       ? clip
                       : Resample(clip, kInternalRate);
  const double fs = static_cast<double>(work.sample_rate);
  cfg.Validate(fs);
  if (work.duration() < 0.3) throw DataError("utterance too short");
  if (SumOfSquares(work.channels[0]) == 0.0) throw DataError("silent input");

  const auto bank = DesignGammatoneBank(cfg.cf_min_hz, cfg.cf_max_hz,
                                        cfg.num_acoustic_bands, fs);

  ModulationTensor tensor;
  tensor.config = cfg;
  tensor.num_acoustic = cfg.num_acoustic_bands;
  tensor.num_modulation = cfg.num_mod_bands;

  for (int j = 0; j < cfg.num_acoustic_bands; ++j) {
    const std::vector<double> band = bank[j].Filter(work.channels[0]);
    const std::vector<double> env =
        TemporalEnvelope(band, work.sample_rate, cfg.envelope_rate_hz);
    const FrameSpectra spectra = FrameAndDft(env, cfg);
    if (j == 0) {
      tensor.num_frames = spectra.num_frames;
      tensor.energies.assign(static_cast<size_t>(cfg.num_acoustic_bands) *
                                 cfg.num_mod_bands * spectra.num_frames,
                             0.0);
    }
    GroupModulationBands(spectra, cfg, j, &tensor);
  }
  ApplyEnergyFloor(&tensor,
                   cfg.mode == PipelineMode::kNormalized ? cfg.energy_floor_db
                                                         : 0.0);
  return tensor;
}

// Debug/golden-test dump: one row per (frame, acoustic_band, mod_band).
inline void WriteTensorCsv(const ModulationTensor& t, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw InputError("cannot open file for writing: " + path);
  f << "frame,acoustic_band,mod_band,energy,active\n";
  char buf[64];
  for (int m = 0; m < t.num_frames; ++m) {
    for (int j = 0; j < t.num_acoustic; ++j) {
      for (int k = 0; k < t.num_modulation; ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", t.At(j, k, m));
        f << m << ',' << j + 1 << ',' << k + 1 << ',' << buf << ','
          << (t.active[m] ? 1 : 0) << '\n';
      }
    }
  }
}

}  // namespace srmr

#endif  // SRMR_MODSPEC_HPP_
