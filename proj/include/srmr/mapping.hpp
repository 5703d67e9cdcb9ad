// include/srmr/mapping.hpp
//
// Feature-to-parameter regressions: ordinary least squares for DRR (dB
// targets) and a normal-family GLM with logarithmic link for RT60 (positive
// seconds), fitted by iteratively reweighted least squares. Models persist
// as JSON with full-precision coefficients and an embedded self-test
// prediction.

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

#ifndef SRMR_MAPPING_HPP_
#define SRMR_MAPPING_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "srmr/common.hpp"
#include "srmr/metrics.hpp"

namespace srmr {

enum class MappingKind { kLinear, kGlmLog };

inline const char* MappingKindName(MappingKind k) {
  return k == MappingKind::kLinear ? "linear" : "glm-log";
}

struct MappingModel {
  MappingKind kind = MappingKind::kLinear;
  Variant variant = Variant::kSrmr;
  int k = 0;
  double intercept = 0.0;
  std::vector<double> weights;
  int n_train = 0;
  double deviance = 0.0;

  size_t dim() const { return weights.size(); }
};

constexpr int kModelFormatVersion = 1;

namespace mapping_detail {

inline Eigen::MatrixXd DesignMatrix(const std::vector<std::vector<double>>& x) {
  const int n = static_cast<int>(x.size());
  const int d = static_cast<int>(x[0].size());
  Eigen::MatrixXd X(n, d + 1);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    if (static_cast<int>(x[i].size()) != d)
      throw InputError("fit: ragged feature matrix");
    for (int j = 0; j < d; ++j) X(i, j + 1) = x[i][j];
  }
  return X;
}

inline Eigen::VectorXd SolveWeightedLs(const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& z,
                                       const Eigen::VectorXd& sqrt_w) {
  const Eigen::MatrixXd Xw = sqrt_w.asDiagonal() * X;
  const Eigen::VectorXd zw = sqrt_w.asDiagonal() * z;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
  if (qr.rank() < X.cols()) throw DataError("singular design");
  return qr.solve(zw);
}

}  // namespace mapping_detail

// Ordinary least squares with intercept, solved by QR factorization.
inline MappingModel FitLinear(const std::vector<std::vector<double>>& x,
                              const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size())
    throw InputError("fit_linear: need matching nonempty x and y");
  const size_t d = x[0].size();
  if (x.size() < d + 1)
    throw InputError("fit_linear: need at least dim+1 samples");

  const Eigen::MatrixXd X = mapping_detail::DesignMatrix(x);
  Eigen::VectorXd yv(y.size());
  for (size_t i = 0; i < y.size(); ++i) yv(static_cast<int>(i)) = y[i];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw DataError("singular design");
  const Eigen::VectorXd beta = qr.solve(yv);

  MappingModel m;
  m.kind = MappingKind::kLinear;
  m.intercept = beta(0);
  m.weights.assign(beta.data() + 1, beta.data() + beta.size());
  m.n_train = static_cast<int>(x.size());
  m.deviance = (yv - X * beta).squaredNorm();
  return m;
}

// Normal-family GLM with log link: y ~ N(exp(Xb), s^2). Initialized by an
// OLS fit to log(y), then IRLS with weights mu^2 and working response
// eta + (y - mu)/mu. Step-halving keeps the deviance non-increasing;
// three consecutive non-improving iterations abort the fit.
inline MappingModel FitGlmLog(const std::vector<std::vector<double>>& x,
                              const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size())
    throw InputError("fit_glm_log: need matching nonempty x and y");
  const size_t d = x[0].size();
  if (x.size() < d + 1)
    throw InputError("fit_glm_log: need at least dim+1 samples");
  for (double v : y)
    if (!(v > 0.0)) throw InputError("fit_glm_log: targets must be positive");

  const Eigen::MatrixXd X = mapping_detail::DesignMatrix(x);
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd yv(n), logy(n);
  for (int i = 0; i < n; ++i) {
    yv(i) = y[i];
    logy(i) = std::log(y[i]);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr0(X);
  if (qr0.rank() < X.cols()) throw DataError("singular design");
  Eigen::VectorXd beta = qr0.solve(logy);

  auto deviance_of = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd mu = (X * b).array().exp();
    return (yv - mu).squaredNorm();
  };

  double dev = deviance_of(beta);
  int bad_steps = 0;
  constexpr int kMaxIter = 100;
  constexpr double kRelTol = 1e-8;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd eta = X * beta;
    const Eigen::VectorXd mu = eta.array().exp();
    const Eigen::VectorXd z = eta.array() + (yv - mu).array() / mu.array();
    const Eigen::VectorXd sqrt_w = mu;  // sqrt(mu^2)
    Eigen::VectorXd beta_new;
    try {
      beta_new = mapping_detail::SolveWeightedLs(X, z, sqrt_w);
    } catch (const DataError&) {
      throw DataError("no convergence: singular reweighted design");
    }

    double dev_new = deviance_of(beta_new);
    // Step-halving toward the previous iterate when the deviance rises.
    int halvings = 0;
    while (dev_new > dev && halvings < 30) {
      beta_new = 0.5 * (beta_new + beta);
      dev_new = deviance_of(beta_new);
      ++halvings;
    }
    if (dev_new > dev) {
      if (++bad_steps >= 3) throw DataError("no convergence");
      beta_new = beta;
      dev_new = dev;
    } else {
      bad_steps = 0;
    }

    const double rel_change =
        std::fabs(dev - dev_new) / std::max(dev, 1e-300);
    beta = beta_new;
    dev = dev_new;
    if (rel_change < kRelTol) break;
  }

  MappingModel m;
  m.kind = MappingKind::kGlmLog;
  m.intercept = beta(0);
  m.weights.assign(beta.data() + 1, beta.data() + beta.size());
  m.n_train = n;
  m.deviance = dev;
  return m;
}

inline double Predict(const MappingModel& m, const std::vector<double>& x) {
  if (x.size() != m.dim())
    throw InputError("predict: feature dimension mismatch");
  double eta = m.intercept;
  for (size_t i = 0; i < x.size(); ++i) eta += m.weights[i] * x[i];
  return m.kind == MappingKind::kGlmLog ? std::exp(eta) : eta;
}

inline void SaveModel(const MappingModel& m, const std::string& path) {
  nlohmann::json j;
  j["version"] = kModelFormatVersion;
  j["kind"] = MappingKindName(m.kind);
  j["variant"] = VariantName(m.variant);
  j["k"] = m.k;
  std::vector<double> coeffs;
  coeffs.push_back(m.intercept);
  coeffs.insert(coeffs.end(), m.weights.begin(), m.weights.end());
  j["coeffs"] = coeffs;
  j["n_train"] = m.n_train;
  j["deviance"] = m.deviance;
  // Self-test probe: predicting this input must reproduce this output.
  const std::vector<double> probe(m.dim(), 1.0);
  j["self_test"] = {{"x", probe}, {"y", Predict(m, probe)}};
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw InputError("cannot open file for writing: " + path);
  f << j.dump(2) << "\n";
}

inline MappingModel LoadModel(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw InputError("model file version mismatch");
    MappingModel m;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear")
      m.kind = MappingKind::kLinear;
    else if (kind == "glm-log")
      m.kind = MappingKind::kGlmLog;
    else
      throw InputError("model file has unknown kind: " + kind);
    m.variant = VariantFromName(j.at("variant").get<std::string>());
    m.k = j.at("k").get<int>();
    const std::vector<double> coeffs =
        j.at("coeffs").get<std::vector<double>>();
    if (coeffs.empty()) throw InputError("model file has no coefficients");
    m.intercept = coeffs[0];
    m.weights.assign(coeffs.begin() + 1, coeffs.end());
    m.n_train = j.value("n_train", 0);
    m.deviance = j.value("deviance", 0.0);
    if (j.contains("self_test")) {
      const auto probe = j["self_test"].at("x").get<std::vector<double>>();
      const double expected = j["self_test"].at("y").get<double>();
      const double got = Predict(m, probe);
      const double tol = 1e-9 * std::max(1.0, std::fabs(expected));
      if (std::fabs(got - expected) > tol)
        throw InputError("model file failed its self-test");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace srmr

#endif  // SRMR_MAPPING_HPP_
