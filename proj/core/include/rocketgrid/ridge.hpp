// Copyright 2026 The rocketgrid Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rocketgrid/features.hpp"

namespace rocketgrid {

/// Read-only row-major matrix.
struct MatrixView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  static MatrixView of(const FeatureMatrix& fm) { return {fm.values(), fm.rows(), fm.cols()}; }
};

/// Solves min ||X W - Y||^2 + alpha ||W||^2 for W (cols(X) x cols(Y),
/// row-major) with a Cholesky factorization in double precision. Uses the
/// primal system (X^T X + alpha I) W = X^T Y when X has no more columns than
/// rows, otherwise the dual (X X^T + alpha I) A = Y with W = X^T A.
std::vector<double> solve_ridge(MatrixView x, MatrixView y, double alpha);

struct RidgeOptions {
  double alpha = 1.0;
  /// Scale features to unit variance (zero-variance features keep scale 1).
  bool standardize = true;
  /// Centre features and targets and learn per-output intercepts.
  bool fit_intercept = true;
};

/// Linear model over (optionally standardized) features. Classifiers are
/// one-vs-rest with +1/-1 targets and class_names sorted; regressors have a
/// single output and no class names.
class RidgeModel {
 public:
  enum class Task : std::uint8_t { kClassification = 1, kRegression = 2 };

  Task task() const noexcept { return task_; }
  std::size_t n_features() const noexcept { return feature_means_.size(); }
  std::size_t n_outputs() const noexcept { return intercepts_.size(); }
  double alpha() const noexcept { return alpha_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  /// n_features x n_outputs, row-major, in standardized feature space.
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& intercepts() const noexcept { return intercepts_; }
  const std::vector<double>& feature_means() const noexcept { return feature_means_; }
  const std::vector<double>& feature_scales() const noexcept { return feature_scales_; }

  /// Weights and intercepts expressed on the raw (unstandardized) features.
  std::vector<double> raw_weights() const;
  std::vector<double> raw_intercepts() const;

  /// Per-output scores, n_rows x n_outputs row-major. Throws InvalidInput on
  /// a feature-count mismatch.
  std::vector<double> decision_function(MatrixView features) const;

  /// Class of the highest score per row; ties go to the lowest class index.
  std::vector<std::string> predict(MatrixView features) const;
  /// Single-output predictions of a regressor.
  std::vector<double> predict_values(MatrixView features) const;

  bool operator==(const RidgeModel&) const = default;

  /// Versioned little-endian binary ("RGRM").
  void save(std::ostream& out) const;
  static RidgeModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static RidgeModel load_file(const std::string& path);

  /// Assembles a model from parts; used by fit and load. Throws InvalidInput
  /// on inconsistent shapes or non-positive scales.
  static RidgeModel from_parts(Task task, double alpha, std::vector<std::string> class_names,
                               std::vector<double> weights, std::vector<double> intercepts,
                               std::vector<double> feature_means, std::vector<double> feature_scales);

 private:
  Task task_ = Task::kClassification;
  double alpha_ = 1.0;
  std::vector<std::string> class_names_;
  std::vector<double> weights_;
  std::vector<double> intercepts_;
  std::vector<double> feature_means_;
  std::vector<double> feature_scales_;
};

/// One-vs-rest ridge classifier. Throws InvalidInput with fewer than two
/// rows or classes, non-finite features, or a label count mismatch.
RidgeModel fit_classifier(MatrixView features, std::span<const std::string> labels,
                          const RidgeOptions& options = {});

/// Single-output ridge regressor.
RidgeModel fit_regressor(MatrixView features, std::span<const double> targets,
                         const RidgeOptions& options = {});

/// Fraction of predictions equal to the truth; InvalidInput on size mismatch.
double accuracy(std::span<const std::string> predicted, std::span<const std::string> truth);

struct AlphaSearch {
  double best_alpha = 0.0;
  std::vector<double> validation_accuracy;  // one per grid entry
};

/// Fits on (train) for each alpha and scores on (validation). The first alpha
/// reaching the highest accuracy wins.
AlphaSearch select_alpha(MatrixView train, std::span<const std::string> train_labels,
                         MatrixView validation, std::span<const std::string> validation_labels,
                         std::span<const double> alphas, RidgeOptions base = {});

}  // namespace rocketgrid
