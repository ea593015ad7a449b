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

#include "rocketgrid/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rocketgrid/binary_io.hpp"
#include "rocketgrid/error.hpp"

namespace rocketgrid {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr char kModelMagic[5] = "RGRM";
constexpr std::uint32_t kModelVersion = 1;

Eigen::Map<const RowMatrix> as_eigen(MatrixView m) {
  return Eigen::Map<const RowMatrix>(m.data.data(), static_cast<Eigen::Index>(m.rows),
                                     static_cast<Eigen::Index>(m.cols));
}

void check_view(MatrixView m, const char* what) {
  if (m.data.size() != m.rows * m.cols) {
    throw InvalidInput(std::string(what) + " buffer does not match its shape");
  }
}

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  // Only reachable when alpha is tiny relative to rounding in the Gram matrix.
  return a.ldlt().solve(b);
}

Eigen::MatrixXd solve_ridge_impl(const Eigen::Ref<const RowMatrix>& x,
                                 const Eigen::Ref<const RowMatrix>& y, double alpha) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (p <= n) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += alpha;
    return spd_solve(gram, x.transpose() * y);
  }
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);
  kernel.selfadjointView<Eigen::Lower>().rankUpdate(x);
  kernel = kernel.selfadjointView<Eigen::Lower>();
  kernel.diagonal().array() += alpha;
  return x.transpose() * spd_solve(kernel, y);
}

struct Prepared {
  RowMatrix z;
  std::vector<double> means;
  std::vector<double> scales;
};

Prepared prepare_features(MatrixView features, const RidgeOptions& options) {
  check_view(features, "feature");
  if (features.rows < 2) throw InvalidInput("ridge fit needs at least two instances");
  if (features.cols == 0) throw InvalidInput("ridge fit needs at least one feature");
  if (!(options.alpha > 0.0) || !std::isfinite(options.alpha)) {
    throw InvalidInput("ridge alpha must be positive and finite");
  }
  if (!std::all_of(features.data.begin(), features.data.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidInput("features must be finite");
  }
  Prepared prep;
  prep.z = as_eigen(features);
  const auto n = static_cast<double>(features.rows);
  prep.means.assign(features.cols, 0.0);
  prep.scales.assign(features.cols, 1.0);
  if (options.fit_intercept || options.standardize) {
    const Eigen::RowVectorXd mean = prep.z.colwise().sum() / n;
    prep.z.rowwise() -= mean;
    for (std::size_t j = 0; j < features.cols; ++j) prep.means[j] = mean(static_cast<Eigen::Index>(j));
  }
  if (options.standardize) {
    const Eigen::RowVectorXd sd = (prep.z.colwise().squaredNorm() / n).cwiseSqrt();
    for (std::size_t j = 0; j < features.cols; ++j) {
      const double s = sd(static_cast<Eigen::Index>(j));
      // Features that are constant up to rounding keep scale 1.
      const double scale = s > 1e-12 * (1.0 + std::abs(prep.means[j])) ? s : 1.0;
      prep.scales[j] = scale;
      prep.z.col(static_cast<Eigen::Index>(j)) /= scale;
    }
  }
  return prep;
}

RidgeModel fit_impl(MatrixView features, RowMatrix targets, const RidgeOptions& options,
                    RidgeModel::Task task, std::vector<std::string> class_names) {
  Prepared prep = prepare_features(features, options);
  Eigen::RowVectorXd target_mean = Eigen::RowVectorXd::Zero(targets.cols());
  if (options.fit_intercept) {
    target_mean = targets.colwise().sum() / static_cast<double>(targets.rows());
    targets.rowwise() -= target_mean;
  }
  const Eigen::MatrixXd w = solve_ridge_impl(prep.z, targets, options.alpha);

  std::vector<double> weights(static_cast<std::size_t>(w.size()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      weights[static_cast<std::size_t>(r * w.cols() + c)] = w(r, c);
    }
  }
  std::vector<double> intercepts(target_mean.data(), target_mean.data() + target_mean.size());
  return RidgeModel::from_parts(task, options.alpha, std::move(class_names), std::move(weights),
                                std::move(intercepts), std::move(prep.means), std::move(prep.scales));
}

}  // namespace

std::vector<double> solve_ridge(MatrixView x, MatrixView y, double alpha) {
  check_view(x, "design");
  check_view(y, "target");
  if (x.rows != y.rows) throw InvalidInput("design and target row counts differ");
  if (!(alpha > 0.0)) throw InvalidInput("ridge alpha must be positive");
  const Eigen::MatrixXd w = solve_ridge_impl(as_eigen(x), as_eigen(y), alpha);
  std::vector<double> out(x.cols * y.cols);
  for (std::size_t r = 0; r < x.cols; ++r) {
    for (std::size_t c = 0; c < y.cols; ++c) {
      out[r * y.cols + c] = w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

RidgeModel RidgeModel::from_parts(Task task, double alpha, std::vector<std::string> class_names,
                                  std::vector<double> weights, std::vector<double> intercepts,
                                  std::vector<double> feature_means,
                                  std::vector<double> feature_scales) {
  const std::size_t p = feature_means.size();
  const std::size_t m = intercepts.size();
  if (feature_scales.size() != p || weights.size() != p * m || m == 0) {
    throw InvalidInput("ridge model parts have inconsistent shapes");
  }
  if (task == Task::kClassification ? class_names.size() != m : (m != 1 || !class_names.empty())) {
    throw InvalidInput("ridge model outputs do not match its task");
  }
  if (!std::all_of(feature_scales.begin(), feature_scales.end(), [](double s) { return s > 0.0; })) {
    throw InvalidInput("ridge feature scales must be positive");
  }
  RidgeModel model;
  model.task_ = task;
  model.alpha_ = alpha;
  model.class_names_ = std::move(class_names);
  model.weights_ = std::move(weights);
  model.intercepts_ = std::move(intercepts);
  model.feature_means_ = std::move(feature_means);
  model.feature_scales_ = std::move(feature_scales);
  return model;
}

std::vector<double> RidgeModel::raw_weights() const {
  std::vector<double> raw(weights_.size());
  const std::size_t m = n_outputs();
  for (std::size_t j = 0; j < n_features(); ++j) {
    for (std::size_t c = 0; c < m; ++c) raw[j * m + c] = weights_[j * m + c] / feature_scales_[j];
  }
  return raw;
}

std::vector<double> RidgeModel::raw_intercepts() const {
  const std::vector<double> raw = raw_weights();
  std::vector<double> out = intercepts_;
  const std::size_t m = n_outputs();
  for (std::size_t j = 0; j < n_features(); ++j) {
    for (std::size_t c = 0; c < m; ++c) out[c] -= raw[j * m + c] * feature_means_[j];
  }
  return out;
}

std::vector<double> RidgeModel::decision_function(MatrixView features) const {
  check_view(features, "feature");
  if (features.cols != n_features()) {
    throw InvalidInput("model expects " + std::to_string(n_features()) + " features, got " +
                       std::to_string(features.cols));
  }
  const std::size_t m = n_outputs();
  std::vector<double> scores(features.rows * m);
  std::vector<double> z(n_features());
  for (std::size_t i = 0; i < features.rows; ++i) {
    for (std::size_t j = 0; j < n_features(); ++j) {
      z[j] = (features(i, j) - feature_means_[j]) / feature_scales_[j];
    }
    for (std::size_t c = 0; c < m; ++c) {
      double s = intercepts_[c];
      for (std::size_t j = 0; j < n_features(); ++j) s += z[j] * weights_[j * m + c];
      scores[i * m + c] = s;
    }
  }
  return scores;
}

std::vector<std::string> RidgeModel::predict(MatrixView features) const {
  if (task_ != Task::kClassification) throw InvalidInput("predict() needs a classifier");
  const std::vector<double> scores = decision_function(features);
  const std::size_t m = n_outputs();
  std::vector<std::string> out;
  out.reserve(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < m; ++c) {
      if (scores[i * m + c] > scores[i * m + best]) best = c;
    }
    out.push_back(class_names_[best]);
  }
  return out;
}

std::vector<double> RidgeModel::predict_values(MatrixView features) const {
  if (task_ != Task::kRegression) throw InvalidInput("predict_values() needs a regressor");
  return decision_function(features);
}

void RidgeModel::save(std::ostream& out) const {
  using namespace binio;
  write_header(out, kModelMagic, kModelVersion);
  write<std::uint8_t>(out, static_cast<std::uint8_t>(task_));
  write<double>(out, alpha_);
  write<std::uint64_t>(out, n_features());
  write<std::uint64_t>(out, n_outputs());
  write<std::uint64_t>(out, class_names_.size());
  for (const auto& c : class_names_) write_string(out, c);
  write_array<double>(out, feature_means_);
  write_array<double>(out, feature_scales_);
  write_array<double>(out, weights_);
  write_array<double>(out, intercepts_);
  if (!out) throw std::runtime_error("failed writing ridge model");
}

RidgeModel RidgeModel::load(std::istream& in) {
  using namespace binio;
  read_header(in, kModelMagic, kModelVersion);
  const auto task = read<std::uint8_t>(in);
  if (task != 1 && task != 2) throw ParseError("unknown ridge model task");
  const double alpha = read<double>(in);
  const auto p = read<std::uint64_t>(in);
  const auto m = read<std::uint64_t>(in);
  const auto n_classes = read<std::uint64_t>(in);
  std::vector<std::string> names;
  for (std::uint64_t i = 0; i < n_classes; ++i) names.push_back(read_string(in));
  auto means = read_array<double>(in, p);
  auto scales = read_array<double>(in, p);
  auto weights = read_array<double>(in, p * m);
  auto intercepts = read_array<double>(in, m);
  try {
    return from_parts(static_cast<Task>(task), alpha, std::move(names), std::move(weights),
                      std::move(intercepts), std::move(means), std::move(scales));
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("invalid ridge model: ") + e.what());
  }
}

void RidgeModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save(out);
}

RidgeModel RidgeModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

RidgeModel fit_classifier(MatrixView features, std::span<const std::string> labels,
                          const RidgeOptions& options) {
  if (labels.size() != features.rows) throw InvalidInput("need one label per feature row");
  std::vector<std::string> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw InvalidInput("classification needs at least two classes");

  RowMatrix targets = RowMatrix::Constant(static_cast<Eigen::Index>(features.rows),
                                          static_cast<Eigen::Index>(classes.size()), -1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto c = std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin();
    targets(static_cast<Eigen::Index>(i), c) = 1.0;
  }
  return fit_impl(features, std::move(targets), options, RidgeModel::Task::kClassification,
                  std::move(classes));
}

RidgeModel fit_regressor(MatrixView features, std::span<const double> targets,
                         const RidgeOptions& options) {
  if (targets.size() != features.rows) throw InvalidInput("need one target per feature row");
  if (!std::all_of(targets.begin(), targets.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidInput("targets must be finite");
  }
  RowMatrix y(static_cast<Eigen::Index>(targets.size()), 1);
  for (std::size_t i = 0; i < targets.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = targets[i];
  return fit_impl(features, std::move(y), options, RidgeModel::Task::kRegression, {});
}

double accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
  if (predicted.size() != truth.size()) throw InvalidInput("prediction and truth sizes differ");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

AlphaSearch select_alpha(MatrixView train, std::span<const std::string> train_labels,
                         MatrixView validation, std::span<const std::string> validation_labels,
                         std::span<const double> alphas, RidgeOptions base) {
  if (alphas.empty()) throw InvalidInput("alpha grid is empty");
  AlphaSearch search;
  double best = -1.0;
  for (const double alpha : alphas) {
    base.alpha = alpha;
    const RidgeModel model = fit_classifier(train, train_labels, base);
    const double acc = accuracy(model.predict(validation), validation_labels);
    search.validation_accuracy.push_back(acc);
    if (acc > best) {
      best = acc;
      search.best_alpha = alpha;
    }
  }
  return search;
}

}  // namespace rocketgrid
