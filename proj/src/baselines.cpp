#include "degroot/baselines.hpp"

#include <cmath>

namespace degroot {

WeightVector::WeightVector(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() < 1) throw std::invalid_argument("weight vector must be nonempty");
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw std::invalid_argument("weights must be finite and nonnegative");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-9) throw std::invalid_argument("weights must sum to 1");
}

WeightVector WeightVector::normalized(const Vector& raw) {
  const double total = raw.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("cannot normalize weights with nonpositive sum");
  }
  return WeightVector(raw / total);
}

double WeightVector::combine(const Vector& predictions) const {
  if (predictions.size() != weights_.size()) {
    throw std::invalid_argument("prediction count does not match weight count");
  }
  return weights_.dot(predictions);
}

double mean_average(const Vector& predictions) {
  if (predictions.size() < 1) throw std::invalid_argument("mean_average needs predictions");
  return predictions.mean();
}

namespace {

WeightVector inverse_mse(const Vector& mse_values, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  Vector inv(mse_values.size());
  for (Index j = 0; j < mse_values.size(); ++j) inv[j] = 1.0 / std::max(mse_values[j], eps);
  return WeightVector::normalized(inv);
}

}  // namespace

WeightVector cv_static_weights(std::span<const ModelPtr> models, const Dataset& validation,
                               double eps) {
  return inverse_mse(local_mse_row(validation, models), eps);
}

WeightVector cv_adaptive_weights(std::span<const ModelPtr> models, const Dataset& validation,
                                 const QueryPoint& x, Index neighbors, double eps,
                                 const DistanceFn& distance) {
  // Saturated neighborhood: keep the original row order so the result is
  // bit-identical to the static weights.
  if (neighbors >= validation.size()) return cv_static_weights(models, validation, eps);
  const Dataset local = local_validation_set(validation, x, neighbors, distance);
  return inverse_mse(local_mse_row(local, models), eps);
}

WeightVector tau_average_weights(const TrustMatrix& trust) {
  return WeightVector::normalized(trust.matrix().colwise().mean().transpose());
}

WeightVector mse_average_weights(const LocalScoreMatrix& scores, double eps) {
  return inverse_mse(scores.scores().colwise().sum().transpose(), eps);
}

}  // namespace degroot
