#pragma once

#include "degroot/trust.hpp"

namespace degroot {

/// Nonnegative weights summing to one (within 1e-9).
class WeightVector {
 public:
  explicit WeightVector(Vector weights);
  /// Normalizes a nonnegative vector with positive sum.
  static WeightVector normalized(const Vector& raw);

  const Vector& weights() const { return weights_; }
  Index size() const { return weights_.size(); }
  double operator[](Index j) const { return weights_[j]; }

  /// sum_j w_j p_j
  double combine(const Vector& predictions) const;

 private:
  Vector weights_;
};

/// Equally weighted model averaging (M-avg).
double mean_average(const Vector& predictions);

/// Inverse-MSE weights from the full shared validation set (CV-static).
WeightVector cv_static_weights(std::span<const ModelPtr> models, const Dataset& validation,
                               double eps);

/// Inverse-MSE weights from the N validation points nearest to x
/// (CV-adaptive); neighbors are chosen exactly as for trust scores.
WeightVector cv_adaptive_weights(std::span<const ModelPtr> models, const Dataset& validation,
                                 const QueryPoint& x, Index neighbors, double eps,
                                 const DistanceFn& distance = {});

/// Column means of the trust matrix (tau-avg).
WeightVector tau_average_weights(const TrustMatrix& trust);

/// w_j proportional to 1 / max(sum_i MSE_ij, eps) (MSE-avg).
WeightVector mse_average_weights(const LocalScoreMatrix& scores, double eps);

}  // namespace degroot
