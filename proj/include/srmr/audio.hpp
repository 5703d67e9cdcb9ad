// include/srmr/audio.hpp
//
// Multi-channel audio container, RIFF/WAVE decode and encode, and a
// band-limited polyphase resampler. Everything downstream of this header
// works on AudioClip; sample data never enters the pipeline any other way.

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

#ifndef SRMR_AUDIO_HPP_
#define SRMR_AUDIO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "srmr/common.hpp"

namespace srmr {

// The fixed internal pipeline rate. Inputs are resampled to this on load so
// the filterbank design and framing arithmetic are done once.
constexpr int kInternalRate = 16000;

struct AudioClip {
  std::vector<std::vector<double>> channels;
  int sample_rate = 0;

  size_t num_channels() const { return channels.size(); }
  size_t num_frames() const { return channels.empty() ? 0 : channels[0].size(); }
  double duration() const {
    return sample_rate > 0
               ? static_cast<double>(num_frames()) / sample_rate
               : 0.0;
  }

  static AudioClip Mono(std::vector<double> samples, int rate) {
    AudioClip c;
    c.channels.push_back(std::move(samples));
    c.sample_rate = rate;
    return c;
  }

  void Validate() const {
    if (sample_rate <= 0) throw InputError("AudioClip: sample_rate must be > 0");
    if (channels.empty() || channels[0].empty())
      throw InputError("AudioClip: no sample data");
    const size_t n = channels[0].size();
    for (const auto& ch : channels) {
      if (ch.size() != n)
        throw InputError("AudioClip: channels differ in length");
      for (double v : ch) {
        if (!std::isfinite(v))
          throw InputError("AudioClip: non-finite sample");
      }
    }
  }
};

namespace wav_detail {

inline uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}
inline uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0]) | (static_cast<uint16_t>(p[1]) << 8);
}
inline void PutU32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}
inline void PutU16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace wav_detail

// Decodes a RIFF/WAVE file. Supported codecs: PCM 16/24/32-bit integer and
// 32-bit IEEE float, little-endian, 1-32 channels (WAVE_FORMAT_EXTENSIBLE
// wrapping either is accepted). Amplitudes are normalized by the format's
// full-scale value, so 16-bit -32768 maps to -1.0.
inline AudioClip ReadWav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  using wav_detail::ReadU16;
  using wav_detail::ReadU32;

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw InputError("not a RIFF/WAVE file: " + path);

  uint16_t format_tag = 0, num_channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const uint8_t* data_ptr = nullptr;
  uint32_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    uint32_t len = ReadU32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (body + 16 > bytes.size() || len < 16)
        throw InputError("truncated fmt chunk: " + path);
      format_tag = ReadU16(bytes.data() + body);
      num_channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      if (format_tag == 0xFFFE) {  // WAVE_FORMAT_EXTENSIBLE
        if (len < 40 || body + 40 > bytes.size())
          throw InputError("truncated extensible fmt chunk: " + path);
        format_tag = ReadU16(bytes.data() + body + 24);  // subformat GUID head
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (body + len > bytes.size())
        throw InputError("truncated data chunk: " + path);
      data_ptr = bytes.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw InputError("missing fmt chunk: " + path);
  if (data_ptr == nullptr) throw InputError("missing data chunk: " + path);
  if (data_len == 0) throw InputError("zero-length data chunk: " + path);
  if (num_channels < 1 || num_channels > 32)
    throw InputError("unsupported channel count: " + path);
  if (rate == 0) throw InputError("zero sample rate: " + path);

  const bool is_float = format_tag == 3;
  if (format_tag != 1 && !is_float)
    throw InputError("unsupported codec (not PCM or float): " + path);
  if (is_float && bits != 32)
    throw InputError("unsupported float width: " + path);
  if (!is_float && bits != 16 && bits != 24 && bits != 32)
    throw InputError("unsupported PCM width: " + path);

  const uint32_t bytes_per_sample = bits / 8;
  const uint32_t frame_bytes = bytes_per_sample * num_channels;
  if (data_len % frame_bytes != 0)
    throw InputError("data chunk not a whole number of frames: " + path);
  const size_t frames = data_len / frame_bytes;
  if (frames == 0) throw InputError("zero-length data chunk: " + path);

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.channels.assign(num_channels, std::vector<double>(frames));
  const uint8_t* p = data_ptr;
  for (size_t i = 0; i < frames; ++i) {
    for (uint16_t c = 0; c < num_channels; ++c) {
      double v = 0.0;
      if (is_float) {
        float fv;
        std::memcpy(&fv, p, 4);
        v = static_cast<double>(fv);
      } else if (bits == 16) {
        int16_t s = static_cast<int16_t>(ReadU16(p));
        v = s / 32768.0;
      } else if (bits == 24) {
        int32_t s = static_cast<int32_t>(p[0]) | (static_cast<int32_t>(p[1]) << 8) |
                    (static_cast<int32_t>(p[2]) << 16);
        if (s & 0x800000) s |= ~0xFFFFFF;  // sign extend
        v = s / 8388608.0;
      } else {  // 32-bit int
        int32_t s = static_cast<int32_t>(ReadU32(p));
        v = s / 2147483648.0;
      }
      clip.channels[c][i] = v;
      p += bytes_per_sample;
    }
  }
  clip.Validate();
  return clip;
}

enum class WavEncoding { kPcm16, kFloat32 };

// Writes a WAV file. Float32 preserves samples exactly; PCM16 rounds to the
// nearest code and clamps at full scale.
inline void WriteWav(const std::string& path, const AudioClip& clip,
                     WavEncoding enc = WavEncoding::kPcm16) {
  clip.Validate();
  using wav_detail::PutU16;
  using wav_detail::PutU32;
  const uint16_t channels = static_cast<uint16_t>(clip.num_channels());
  const size_t frames = clip.num_frames();
  const uint16_t bits = enc == WavEncoding::kPcm16 ? 16 : 32;
  const uint16_t tag = enc == WavEncoding::kPcm16 ? 1 : 3;
  const uint32_t frame_bytes = channels * bits / 8;
  const uint32_t data_len = static_cast<uint32_t>(frames * frame_bytes);

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  PutU32(out, 36 + data_len);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, tag);
  PutU16(out, channels);
  PutU32(out, static_cast<uint32_t>(clip.sample_rate));
  PutU32(out, static_cast<uint32_t>(clip.sample_rate) * frame_bytes);
  PutU16(out, static_cast<uint16_t>(frame_bytes));
  PutU16(out, bits);
  out += "data";
  PutU32(out, data_len);
  for (size_t i = 0; i < frames; ++i) {
    for (uint16_t c = 0; c < channels; ++c) {
      const double v = clip.channels[c][i];
      if (enc == WavEncoding::kPcm16) {
        long s = std::lround(v * 32768.0);
        s = std::clamp(s, -32768L, 32767L);
        PutU16(out, static_cast<uint16_t>(static_cast<int16_t>(s)));
      } else {
        float fv = static_cast<float>(v);
        uint32_t u;
        std::memcpy(&u, &fv, 4);
        PutU32(out, u);
      }
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open file for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw InputError("short write: " + path);
}

namespace resample_detail {

inline double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

inline double KaiserI0Ratio(double u, double beta) {
  // I0(beta*sqrt(1-u^2)) / I0(beta), |u| <= 1.
  return std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - u * u))) /
         std::cyl_bessel_i(0.0, beta);
}

}  // namespace resample_detail

// Band-limited rational resampler: Kaiser-windowed sinc prototype with 64
// taps per phase and cutoff at 0.45 of the lower Nyquist rate.
inline std::vector<double> ResampleChannel(const std::vector<double>& x,
                                           int source_rate, int target_rate) {
  if (source_rate <= 0 || target_rate <= 0)
    throw InputError("resample: rates must be positive");
  if (source_rate == target_rate) return x;

  const int g = std::gcd(source_rate, target_rate);
  const int up = target_rate / g;    // interpolation factor L
  const int down = source_rate / g;  // decimation factor M

  constexpr int kTapsPerPhase = 64;
  constexpr double kKaiserBeta = 8.6;
  const double cutoff_hz = 0.45 * std::min(source_rate, target_rate);
  // Prototype low-pass at the virtual rate up * source_rate. Odd length
  // keeps the group delay at an integer number of virtual samples.
  const double fc = cutoff_hz / (static_cast<double>(up) * source_rate);
  const int total_taps = kTapsPerPhase * up + 1;
  const int delay = (total_taps - 1) / 2;
  std::vector<double> proto(total_taps);
  for (int i = 0; i < total_taps; ++i) {
    const double t = i - delay;
    const double u = t / (delay + 1.0);
    proto[i] = 2.0 * fc * resample_detail::Sinc(2.0 * fc * t) *
               resample_detail::KaiserI0Ratio(u, kKaiserBeta);
  }
  // Unity passband gain after zero-stuffing: scale by up.
  for (double& v : proto) v *= up;

  const size_t n_in = x.size();
  const size_t n_out = static_cast<size_t>(std::llround(
      static_cast<double>(n_in) * target_rate / source_rate));
  std::vector<double> y(n_out, 0.0);
  for (size_t i = 0; i < n_out; ++i) {
    // Output sample i sits at virtual-rate index v = i*down; the prototype
    // delay is folded in so the output stays time-aligned with the input.
    const int64_t v = static_cast<int64_t>(i) * down;
    // y[i] = sum_j x[j] * proto[v + delay - j*up], tap index in [0, T).
    int64_t j_lo = (v + delay - (total_taps - 1) + up - 1) / up;
    int64_t j_hi = (v + delay) / up;
    j_lo = std::max<int64_t>(0, j_lo);
    j_hi = std::min<int64_t>(static_cast<int64_t>(n_in) - 1, j_hi);
    double acc = 0.0;
    for (int64_t j = j_lo; j <= j_hi; ++j) {
      const int64_t tap = v + delay - j * up;
      acc += x[j] * proto[tap];
    }
    y[i] = acc;
  }
  return y;
}

inline AudioClip Resample(const AudioClip& clip, int target_rate) {
  clip.Validate();
  if (target_rate <= 0) throw InputError("resample: target rate must be > 0");
  if (clip.sample_rate == target_rate) return clip;
  AudioClip out;
  out.sample_rate = target_rate;
  out.channels.reserve(clip.num_channels());
  for (const auto& ch : clip.channels)
    out.channels.push_back(ResampleChannel(ch, clip.sample_rate, target_rate));
  return out;
}

}  // namespace srmr

#endif  // SRMR_AUDIO_HPP_
