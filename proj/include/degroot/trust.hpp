#pragma once

#include "degroot/core.hpp"

#include <functional>

namespace degroot {

/// Distance between a sample and the query point. Only the induced ordering
/// matters, so monotone transforms of a metric are acceptable.
using DistanceFn = std::function<double(std::span<const double>, std::span<const double>)>;

double squared_euclidean(std::span<const double> a, std::span<const double> b);

struct TrustConfig {
  /// Neighborhood size N of the local validation set.
  Index neighbors = 5;
  /// Division guard for zero local MSE.
  double mse_floor = 1e-12;
  /// Empty means Euclidean.
  DistanceFn distance;

  void validate() const;
};

/// K x K matrix; entry (i, j) is the MSE of model j on agent i's local
/// validation set.
class LocalScoreMatrix {
 public:
  explicit LocalScoreMatrix(Matrix scores);
  const Matrix& scores() const { return scores_; }
  Index size() const { return scores_.rows(); }
  double operator()(Index i, Index j) const { return scores_(i, j); }

 private:
  Matrix scores_;
};

/// K x K row-stochastic matrix with strictly positive entries.
class TrustMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  /// Validates; throws std::invalid_argument on non-square, non-positive or
  /// non-stochastic input.
  explicit TrustMatrix(Matrix tau);
  /// Scales each row of a strictly positive matrix to sum to one.
  static TrustMatrix from_positive(const Matrix& weights);

  const Matrix& matrix() const { return tau_; }
  Index size() const { return tau_.rows(); }
  double operator()(Index i, Index j) const { return tau_(i, j); }

 private:
  Matrix tau_;
};

/// Indices of the min(N, n) samples closest to x, nearest first; equal
/// distances are ordered by sample index.
std::vector<Index> nearest_indices(const Dataset& data, const QueryPoint& x, Index neighbors,
                                   const DistanceFn& distance = {});

Dataset local_validation_set(const Dataset& data, const QueryPoint& x, Index neighbors,
                             const DistanceFn& distance = {});

/// Entry j is the MSE of models[j] over the validation set.
Vector local_mse_row(const Dataset& validation, std::span<const ModelPtr> models);

/// Normalized inverse MSE: (1/max(mse_j, eps)) / sum_l (1/max(mse_l, eps)).
Vector trust_row(const Vector& mse_row, double eps);

struct TrustBuild {
  TrustMatrix trust;
  LocalScoreMatrix scores;
};

/// Each agent scores every model (its own included) on the N nearest
/// neighbors of x in its own data.
TrustBuild build_trust_matrix(const Ensemble& ensemble, const QueryPoint& x,
                              const TrustConfig& cfg);

}  // namespace degroot
