#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emgpr/errors.hpp"
#include "emgpr/features.hpp"
#include "emgpr/labels.hpp"

namespace emgpr {

// Per-class Gaussian statistics: sample mean, unbiased covariance, count.
struct ClassModel {
  MotionLabel label;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::uint32_t count = 0;

  int dimension() const { return static_cast<int>(mean.size()); }
};

// How class covariances combine into the shared matrix. kSum adds them
// (extension is then a single matrix addition); kWeighted is the
// (n_k - 1)-weighted textbook estimate. With balanced classes and uniform
// priors the two produce the same decisions.
enum class PoolingMode { kSum, kWeighted };

// Shared-covariance linear discriminant classifier, extensible one class at a
// time without touching existing class statistics. Immutable after
// construction; extension produces a new model value.
class PooledModel {
 public:
  PooledModel() = default;

  const std::vector<ClassModel>& classes() const { return classes_; }
  const Eigen::MatrixXd& pooled_cov() const { return pooled_cov_; }
  const std::vector<double>& priors() const { return priors_; }
  double ridge() const { return ridge_; }
  PoolingMode pooling() const { return pooling_; }
  int dimension() const { return static_cast<int>(pooled_cov_.rows()); }
  std::size_t class_count() const { return classes_.size(); }

  bool has_label(std::uint16_t id) const {
    for (const auto& c : classes_)
      if (c.label.id == id) return true;
    return false;
  }

  // alpha_k(x) = w_k . x + c_k for every class, in class order.
  std::vector<double> discriminants(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension())
      throw DimensionError("feature vector dimension does not match model");
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    std::vector<double> scores(classes_.size());
    for (std::size_t k = 0; k < classes_.size(); ++k)
      scores[k] = weights_[k].dot(xv) + offsets_[k];
    return scores;
  }

  // Label of the maximal discriminant; exact ties go to the lowest class id.
  MotionLabel predict(std::span<const double> x) const {
    if (classes_.empty()) throw ModelError("predict on empty model");
    const std::vector<double> scores = discriminants(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
      if (scores[k] > scores[best] ||
          (scores[k] == scores[best] && classes_[k].label.id < classes_[best].label.id))
        best = k;
    }
    return classes_[best].label;
  }

  MotionLabel predict(const FeatureVector& fv) const { return predict(std::span(fv.values)); }

 private:
  friend PooledModel build_pooled(std::vector<ClassModel>, PoolingMode);
  friend PooledModel add_class(const PooledModel&, ClassModel);
  friend PooledModel assemble_model(std::vector<ClassModel>, Eigen::MatrixXd, double, PoolingMode);

  // Recomputes priors and the cached solve against pooled_cov + ridge*I.
  // When `fixed_ridge` is negative the ridge starts at 1e-6 * trace/d and
  // escalates by 10x up to 1e-2 * trace/d before giving up.
  void finalize(double fixed_ridge) {
    const int d = dimension();
    std::uint64_t total = 0;
    for (const auto& c : classes_) total += c.count;
    priors_.resize(classes_.size());
    for (std::size_t k = 0; k < classes_.size(); ++k)
      priors_[k] = static_cast<double>(classes_[k].count) / static_cast<double>(total);

    double scale = pooled_cov_.trace() / static_cast<double>(d);
    if (!(scale > 0.0)) scale = 1.0;  // all-zero covariances: fall back to unit scale

    Eigen::LLT<Eigen::MatrixXd> llt;
    if (fixed_ridge >= 0.0) {
      ridge_ = fixed_ridge;
      llt.compute(regularized(ridge_));
      if (llt.info() != Eigen::Success)
        throw ModelError("pooled covariance not factorizable at stored ridge");
    } else {
      bool ok = false;
      for (double r = 1e-6 * scale; r <= 1.000001e-2 * scale; r *= 10.0) {
        llt.compute(regularized(r));
        if (llt.info() == Eigen::Success && llt.matrixLLT().allFinite()) {
          ridge_ = r;
          ok = true;
          break;
        }
      }
      if (!ok) throw ModelError("pooled covariance singular even at maximum ridge");
    }

    weights_.resize(classes_.size());
    offsets_.resize(classes_.size());
    for (std::size_t k = 0; k < classes_.size(); ++k) {
      weights_[k] = llt.solve(classes_[k].mean);
      offsets_[k] = -0.5 * classes_[k].mean.dot(weights_[k]) + std::log(priors_[k]);
    }
  }

  Eigen::MatrixXd regularized(double r) const {
    Eigen::MatrixXd m = pooled_cov_;
    m.diagonal().array() += r;
    return m;
  }

  void compute_pooled() {
    const int d = classes_.front().dimension();
    pooled_cov_ = Eigen::MatrixXd::Zero(d, d);
    if (pooling_ == PoolingMode::kSum) {
      for (const auto& c : classes_) pooled_cov_ += c.cov;
    } else {
      std::uint64_t total = 0;
      for (const auto& c : classes_) total += c.count;
      const double denom = static_cast<double>(total) - static_cast<double>(classes_.size());
      if (denom <= 0) throw ModelError("weighted pooling needs more samples than classes");
      for (const auto& c : classes_) pooled_cov_ += (static_cast<double>(c.count) - 1.0) * c.cov;
      pooled_cov_ /= denom;
    }
  }

  std::vector<ClassModel> classes_;
  Eigen::MatrixXd pooled_cov_;
  std::vector<double> priors_;
  double ridge_ = 0.0;
  PoolingMode pooling_ = PoolingMode::kSum;
  std::vector<Eigen::VectorXd> weights_;  // solve(pooled + ridge I, mean_k)
  std::vector<double> offsets_;           // -mean_k . w_k / 2 + ln prior_k
};

// Sample mean and unbiased covariance of one class.
inline ClassModel fit_class(const std::vector<FeatureVector>& samples, MotionLabel label) {
  if (samples.size() < 2) throw ModelError("fit_class needs at least 2 samples");
  const std::size_t d = samples.front().values.size();
  for (const auto& s : samples)
    if (s.values.size() != d) throw DimensionError("mixed feature dimensions in class samples");

  ClassModel cm;
  cm.label = std::move(label);
  cm.count = static_cast<std::uint32_t>(samples.size());
  cm.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (const auto& s : samples)
    cm.mean += Eigen::Map<const Eigen::VectorXd>(s.values.data(), static_cast<Eigen::Index>(d));
  cm.mean /= static_cast<double>(samples.size());

  cm.cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& s : samples) {
    const Eigen::VectorXd dev =
        Eigen::Map<const Eigen::VectorXd>(s.values.data(), static_cast<Eigen::Index>(d)) - cm.mean;
    cm.cov.noalias() += dev * dev.transpose();
  }
  cm.cov /= static_cast<double>(samples.size() - 1);
  return cm;
}

inline PooledModel build_pooled(std::vector<ClassModel> classes,
                                PoolingMode pooling = PoolingMode::kSum) {
  if (classes.size() < 2) throw ModelError("build_pooled needs at least 2 classes");
  const int d = classes.front().dimension();
  for (const auto& c : classes) {
    if (c.dimension() != d || c.cov.rows() != d || c.cov.cols() != d)
      throw DimensionError("inconsistent class dimensions");
    if (c.count < 2) throw ModelError("class '" + c.label.name + "' has fewer than 2 samples");
  }
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = i + 1; j < classes.size(); ++j)
      if (classes[i].label.id == classes[j].label.id)
        throw ModelError("duplicate class label id " + std::to_string(classes[i].label.id));

  PooledModel m;
  m.classes_ = std::move(classes);
  m.pooling_ = pooling;
  m.compute_pooled();
  m.finalize(-1.0);
  return m;
}

// Folds one new class into an existing model. In sum mode the shared matrix
// is extended by a single addition; existing class statistics are copied
// untouched either way.
inline PooledModel add_class(const PooledModel& model, ClassModel new_class) {
  if (new_class.dimension() != model.dimension())
    throw DimensionError("new class dimension does not match model");
  if (new_class.count < 2)
    throw ModelError("class '" + new_class.label.name + "' has fewer than 2 samples");
  if (model.has_label(new_class.label.id))
    throw ModelError("label id " + std::to_string(new_class.label.id) + " already in model");

  PooledModel out;
  out.classes_ = model.classes_;
  out.pooling_ = model.pooling_;
  if (model.pooling_ == PoolingMode::kSum) {
    out.pooled_cov_ = model.pooled_cov_ + new_class.cov;
    out.classes_.push_back(std::move(new_class));
  } else {
    out.classes_.push_back(std::move(new_class));
    out.compute_pooled();
  }
  out.finalize(-1.0);
  return out;
}

// Reassembles a model from its stored parts (deserialization path): class
// statistics, the shared covariance as written, and the ridge that was in
// force when the model was saved.
inline PooledModel assemble_model(std::vector<ClassModel> classes, Eigen::MatrixXd pooled_cov,
                                  double ridge, PoolingMode pooling = PoolingMode::kSum) {
  if (classes.empty()) throw ModelError("model needs at least one class");
  PooledModel m;
  m.classes_ = std::move(classes);
  m.pooled_cov_ = std::move(pooled_cov);
  m.pooling_ = pooling;
  m.finalize(ridge);
  return m;
}

inline std::vector<double> discriminants(const PooledModel& m, std::span<const double> x) {
  return m.discriminants(x);
}

inline MotionLabel predict(const PooledModel& m, std::span<const double> x) {
  return m.predict(x);
}

}  // namespace emgpr
