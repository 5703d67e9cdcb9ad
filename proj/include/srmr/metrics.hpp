// include/srmr/metrics.hpp
//
// The SRMR family of modulation energy ratios computed from a
// ModulationTensor, and the multi-channel feature average. All sums run
// over active frames only; in original mode every frame is active.

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

#ifndef SRMR_METRICS_HPP_
#define SRMR_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "srmr/common.hpp"
#include "srmr/modspec.hpp"

namespace srmr {

enum class Variant {
  kSrmrKVector,  // [SRMR_5 .. SRMR_8], original mode
  kOsrmr,        // band 1 over bands 5-8, original mode
  kSrmr,         // bands 1-4 over bands 5-8, original mode
  kNsrmr,        // SRMR on the normalized pipeline
  kNosrmr,       // OSRMR on the normalized pipeline
  kNsrmrStarK,   // per-(j,m) ratio, normalized pipeline, k = 5
};

inline const char* VariantName(Variant v) {
  switch (v) {
    case Variant::kSrmrKVector: return "srmr-k";
    case Variant::kOsrmr: return "osrmr";
    case Variant::kSrmr: return "srmr";
    case Variant::kNsrmr: return "nsrmr";
    case Variant::kNosrmr: return "nosrmr";
    case Variant::kNsrmrStarK: return "nsrmr-star";
  }
  return "?";
}

inline Variant VariantFromName(const std::string& name) {
  if (name == "srmr-k") return Variant::kSrmrKVector;
  if (name == "osrmr") return Variant::kOsrmr;
  if (name == "srmr") return Variant::kSrmr;
  if (name == "nsrmr") return Variant::kNsrmr;
  if (name == "nosrmr") return Variant::kNosrmr;
  if (name == "nsrmr-star") return Variant::kNsrmrStarK;
  throw InputError("unknown variant: " + name);
}

inline PipelineMode VariantMode(Variant v) {
  switch (v) {
    case Variant::kSrmrKVector:
    case Variant::kOsrmr:
    case Variant::kSrmr:
      return PipelineMode::kOriginal;
    default:
      return PipelineMode::kNormalized;
  }
}

struct SrmrFeatures {
  Variant variant = Variant::kSrmr;
  PipelineMode mode = PipelineMode::kOriginal;
  int k = 0;  // modulation band index where applicable (0 = n/a)
  std::vector<double> values;

  size_t dim() const { return values.size(); }
};

namespace metric_detail {

// Sum of band k over all acoustic bands and active frames.
inline double BandSum(const ModulationTensor& t, int k) {
  double s = 0.0;
  for (int j = 0; j < t.num_acoustic; ++j)
    for (int m = 0; m < t.num_frames; ++m)
      if (t.active[m]) s += t.At(j, k, m);
  return s;
}

inline void RequireActive(const ModulationTensor& t) {
  if (t.NumActiveFrames() < 1) throw DataError("degenerate tensor: no active frames");
}

}  // namespace metric_detail

// Eq. 1 ratio: band 1 energy over band k energy (1-based k in 5..8).
inline double SrmrK(const ModulationTensor& t, int k) {
  if (k < 5 || k > t.num_modulation)
    throw InputError("srmr_k: k must be in 5..8");
  metric_detail::RequireActive(t);
  const double num = metric_detail::BandSum(t, 0);
  const double den = metric_detail::BandSum(t, k - 1);
  if (den <= 0.0) throw DataError("degenerate tensor: zero band energy");
  return num / den;
}

inline std::vector<double> SrmrKVector(const ModulationTensor& t) {
  std::vector<double> v;
  v.reserve(4);
  for (int k = 5; k <= 8; ++k) v.push_back(SrmrK(t, k));
  return v;
}

// Eq. 2: band 1 over the sum of bands 5-8.
inline double Osrmr(const ModulationTensor& t) {
  metric_detail::RequireActive(t);
  const double num = metric_detail::BandSum(t, 0);
  double den = 0.0;
  for (int k = 4; k < 8; ++k) den += metric_detail::BandSum(t, k);
  if (den <= 0.0) throw DataError("degenerate tensor: zero band energy");
  return num / den;
}

// Eq. 3: bands 1-4 over bands 5-8. On a normalized-mode tensor this is
// NSRMR; the OSRMR counterpart is NOSRMR.
inline double Srmr(const ModulationTensor& t) {
  metric_detail::RequireActive(t);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 4; ++k) num += metric_detail::BandSum(t, k);
  for (int k = 4; k < 8; ++k) den += metric_detail::BandSum(t, k);
  if (den <= 0.0) throw DataError("degenerate tensor: zero band energy");
  return num / den;
}

// Eq. 4: marginalize over modulation bands first. Per-cell ratios of band 1
// to band k are summed over acoustic bands and active frames and divided by
// the active-frame count. Denominators are guarded by a relative floor of
// 1e-12 times the tensor's peak energy.
inline double NsrmrStar(const ModulationTensor& t, int k = 5) {
  if (t.config.mode != PipelineMode::kNormalized)
    throw InputError("nsrmr_star: requires a normalized-mode tensor");
  if (k < 1 || k > t.num_modulation) throw InputError("nsrmr_star: bad k");
  metric_detail::RequireActive(t);
  double peak = 0.0;
  for (double v : t.energies) peak = std::max(peak, v);
  if (peak <= 0.0) throw DataError("degenerate tensor: all zero");
  const double floor = 1e-12 * peak;
  double sum = 0.0;
  int m_active = 0;
  for (int m = 0; m < t.num_frames; ++m) {
    if (!t.active[m]) continue;
    ++m_active;
    for (int j = 0; j < t.num_acoustic; ++j)
      sum += t.At(j, 0, m) / std::max(t.At(j, k - 1, m), floor);
  }
  return sum / static_cast<double>(m_active);
}

// Dispatch a variant against a tensor of the matching mode.
inline SrmrFeatures ComputeFeature(const ModulationTensor& t, Variant variant) {
  if (t.config.mode != VariantMode(variant))
    throw InputError(std::string("variant ") + VariantName(variant) +
                     " requires the " + ModeName(VariantMode(variant)) +
                     " pipeline mode");
  SrmrFeatures f;
  f.variant = variant;
  f.mode = t.config.mode;
  switch (variant) {
    case Variant::kSrmrKVector:
      f.values = SrmrKVector(t);
      break;
    case Variant::kOsrmr:
    case Variant::kNosrmr:
      f.values = {Osrmr(t)};
      break;
    case Variant::kSrmr:
    case Variant::kNsrmr:
      f.values = {Srmr(t)};
      break;
    case Variant::kNsrmrStarK:
      f.k = 5;
      f.values = {NsrmrStar(t, 5)};
      break;
  }
  return f;
}

// Elementwise arithmetic mean across channels; all entries must carry the
// same variant/mode/k and dimension.
inline SrmrFeatures AverageChannelFeatures(
    const std::vector<SrmrFeatures>& features) {
  if (features.empty())
    throw InputError("average_channel_features: empty input");
  const SrmrFeatures& first = features.front();
  SrmrFeatures out = first;
  for (size_t i = 1; i < features.size(); ++i) {
    const SrmrFeatures& f = features[i];
    if (f.variant != first.variant || f.mode != first.mode ||
        f.k != first.k || f.dim() != first.dim())
      throw InputError("heterogeneous features");
    for (size_t d = 0; d < out.values.size(); ++d)
      out.values[d] += f.values[d];
  }
  const double inv = 1.0 / static_cast<double>(features.size());
  for (double& v : out.values) v *= inv;
  return out;
}

}  // namespace srmr

#endif  // SRMR_METRICS_HPP_
