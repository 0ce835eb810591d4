#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace degroot {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Row-major so that a sample is a contiguous span.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when a computation cannot produce a finite answer
/// (singular systems, non-finite intermediate values).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Labeled feature matrix owned by one agent. Immutable after construction.
class Dataset {
 public:
  /// Throws std::invalid_argument unless rows == labels.size() >= 1 and
  /// every value is finite.
  Dataset(FeatureMatrix features, Vector labels);

  Index size() const { return labels_.size(); }
  Index dimension() const { return features_.cols(); }

  const FeatureMatrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }

  std::span<const double> row(Index i) const {
    return {features_.data() + i * features_.cols(), static_cast<std::size_t>(features_.cols())};
  }
  double label(Index i) const { return labels_[i]; }

  /// Rows in the given order; indices may repeat.
  Dataset subset(std::span<const Index> rows) const;

 private:
  FeatureMatrix features_;
  Vector labels_;
};

/// Test point x' at which the ensemble is queried.
class QueryPoint {
 public:
  explicit QueryPoint(std::vector<double> coordinates);
  explicit QueryPoint(std::span<const double> coordinates)
      : QueryPoint(std::vector<double>(coordinates.begin(), coordinates.end())) {}

  std::span<const double> coordinates() const { return coords_; }
  Index dimension() const { return static_cast<Index>(coords_.size()); }

 private:
  std::vector<double> coords_;
};

/// A trained regressor. Implementations must be deterministic and
/// thread-safe for concurrent predict() calls.
class PredictiveModel {
 public:
  virtual ~PredictiveModel() = default;

  /// Throws std::invalid_argument when x.size() != dimension().
  virtual double predict(std::span<const double> x) const = 0;
  virtual Index dimension() const = 0;

  double predict(const QueryPoint& x) const { return predict(x.coordinates()); }

 protected:
  void check_dimension(std::span<const double> x) const;
};

using ModelPtr = std::shared_ptr<const PredictiveModel>;

/// Predictions of `model` on every row of `data`.
Vector predict_all(const PredictiveModel& model, const Dataset& data);

struct Agent {
  std::shared_ptr<const Dataset> data;
  ModelPtr model;
};

/// Ordered list of K >= 2 agents sharing one feature dimension.
class Ensemble {
 public:
  explicit Ensemble(std::vector<Agent> agents);

  Index size() const { return static_cast<Index>(agents_.size()); }
  Index dimension() const { return agents_.front().data->dimension(); }
  const Agent& operator[](Index k) const { return agents_[static_cast<std::size_t>(k)]; }
  const std::vector<Agent>& agents() const { return agents_; }

  std::vector<ModelPtr> models() const;
  /// f_k(x) for every agent k.
  Vector predictions(const QueryPoint& x) const;

 private:
  std::vector<Agent> agents_;
};

/// Mean squared difference. Throws std::invalid_argument on length
/// mismatch or empty input.
double mse(std::span<const double> predictions, std::span<const double> labels);
double mse(const Vector& predictions, const Vector& labels);

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace degroot
