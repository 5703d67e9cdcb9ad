// include/srmr/fft.hpp
//
// Thin wrapper over FFTW3 with per-thread plan caching. FFTW's planner is
// not thread-safe, so plan creation is serialized behind a global mutex;
// execution runs lock-free on thread-local buffers. Plans use FFTW_ESTIMATE,
// which keeps planning deterministic across runs.

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

#ifndef SRMR_FFT_HPP_
#define SRMR_FFT_HPP_

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <vector>

namespace srmr {
namespace fft {

inline std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

namespace detail {

struct ComplexPlan {
  fftw_plan plan = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  size_t n = 0;

  ComplexPlan(size_t size, int sign) : n(size) {
    in = fftw_alloc_complex(size);
    out = fftw_alloc_complex(size);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = fftw_plan_dft_1d(static_cast<int>(size), in, out, sign,
                            FFTW_ESTIMATE);
  }
  ComplexPlan(const ComplexPlan&) = delete;
  ComplexPlan& operator=(const ComplexPlan&) = delete;
  ~ComplexPlan() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    if (plan) fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
};

struct RealForwardPlan {
  fftw_plan plan = nullptr;
  double* in = nullptr;
  fftw_complex* out = nullptr;
  size_t n = 0;

  explicit RealForwardPlan(size_t size) : n(size) {
    in = fftw_alloc_real(size);
    out = fftw_alloc_complex(size / 2 + 1);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(size), in, out,
                                FFTW_ESTIMATE);
  }
  RealForwardPlan(const RealForwardPlan&) = delete;
  RealForwardPlan& operator=(const RealForwardPlan&) = delete;
  ~RealForwardPlan() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    if (plan) fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
};

struct RealInversePlan {
  fftw_plan plan = nullptr;
  fftw_complex* in = nullptr;
  double* out = nullptr;
  size_t n = 0;

  explicit RealInversePlan(size_t size) : n(size) {
    in = fftw_alloc_complex(size / 2 + 1);
    out = fftw_alloc_real(size);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(size), in, out,
                                FFTW_ESTIMATE);
  }
  RealInversePlan(const RealInversePlan&) = delete;
  RealInversePlan& operator=(const RealInversePlan&) = delete;
  ~RealInversePlan() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    if (plan) fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
};

template <typename PlanT, typename... Args>
PlanT& CachedPlan(std::map<size_t, std::unique_ptr<PlanT>>& cache, size_t n,
                  Args... args) {
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<PlanT>(n, args...)).first;
  }
  return *it->second;
}

}  // namespace detail

// Unnormalized complex DFT. inverse=true applies the +i convention without
// the 1/N factor; callers scale where needed.
inline void Transform(const std::complex<double>* in, std::complex<double>* out,
                      size_t n, bool inverse) {
  thread_local std::map<size_t, std::unique_ptr<detail::ComplexPlan>> fwd;
  thread_local std::map<size_t, std::unique_ptr<detail::ComplexPlan>> bwd;
  auto& cache = inverse ? bwd : fwd;
  auto& p = detail::CachedPlan(cache, n, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  std::memcpy(p.in, in, n * sizeof(fftw_complex));
  fftw_execute(p.plan);
  std::memcpy(out, p.out, n * sizeof(fftw_complex));
}

// Real-to-complex DFT; returns n/2+1 bins.
inline void RealForward(const double* in, std::complex<double>* out, size_t n) {
  thread_local std::map<size_t, std::unique_ptr<detail::RealForwardPlan>> cache;
  auto& p = detail::CachedPlan(cache, n);
  std::memcpy(p.in, in, n * sizeof(double));
  fftw_execute(p.plan);
  std::memcpy(out, p.out, (n / 2 + 1) * sizeof(fftw_complex));
}

// Complex-to-real inverse (unnormalized). Destroys nothing caller-side; the
// spectrum is copied into the plan's buffer first.
inline void RealInverse(const std::complex<double>* in, double* out, size_t n) {
  thread_local std::map<size_t, std::unique_ptr<detail::RealInversePlan>> cache;
  auto& p = detail::CachedPlan(cache, n);
  std::memcpy(p.in, in, (n / 2 + 1) * sizeof(fftw_complex));
  fftw_execute(p.plan);
  std::memcpy(out, p.out, n * sizeof(double));
}

// Magnitude of the analytic signal, computed with the frequency-domain
// Hilbert method over the whole sequence.
inline std::vector<double> AnalyticMagnitude(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> buf(n);
  for (size_t i = 0; i < n; ++i) buf[i] = {x[i], 0.0};
  std::vector<std::complex<double>> spec(n);
  Transform(buf.data(), spec.data(), n, false);
  // One-sided multiplier: DC (and Nyquist for even n) kept, positive
  // frequencies doubled, negative frequencies zeroed.
  const size_t half = n / 2;
  for (size_t i = 1; i < (n + 1) / 2; ++i) spec[i] *= 2.0;
  if (n % 2 == 0 && half > 0) {
    // spec[half] kept as-is.
  }
  for (size_t i = half + 1; i < n; ++i) spec[i] = {0.0, 0.0};
  Transform(spec.data(), buf.data(), n, true);
  std::vector<double> mag(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) mag[i] = std::abs(buf[i]) * scale;
  return mag;
}

}  // namespace fft
}  // namespace srmr

#endif  // SRMR_FFT_HPP_
