#include "degroot/trust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace degroot {

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void TrustConfig::validate() const {
  if (neighbors < 1) throw std::invalid_argument("neighbors must be >= 1");
  if (!(mse_floor > 0.0)) throw std::invalid_argument("mse_floor must be > 0");
}

LocalScoreMatrix::LocalScoreMatrix(Matrix scores) : scores_(std::move(scores)) {
  if (scores_.rows() != scores_.cols() || scores_.rows() < 1) {
    throw std::invalid_argument("score matrix must be square and nonempty");
  }
  if (!scores_.allFinite() || (scores_.array() < 0.0).any()) {
    throw std::invalid_argument("score matrix entries must be finite and nonnegative");
  }
}

TrustMatrix::TrustMatrix(Matrix tau) : tau_(std::move(tau)) {
  if (tau_.rows() != tau_.cols() || tau_.rows() < 1) {
    throw std::invalid_argument("trust matrix must be square and nonempty");
  }
  if (!tau_.allFinite() || !(tau_.array() > 0.0).all()) {
    throw std::invalid_argument("trust matrix entries must be finite and strictly positive");
  }
  for (Index i = 0; i < tau_.rows(); ++i) {
    if (std::abs(tau_.row(i).sum() - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("trust matrix row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

TrustMatrix TrustMatrix::from_positive(const Matrix& weights) {
  Matrix tau = weights;
  for (Index i = 0; i < tau.rows(); ++i) tau.row(i) /= tau.row(i).sum();
  return TrustMatrix(std::move(tau));
}

std::vector<Index> nearest_indices(const Dataset& data, const QueryPoint& x, Index neighbors,
                                   const DistanceFn& distance) {
  if (neighbors < 1) throw std::invalid_argument("neighbors must be >= 1");
  if (x.dimension() != data.dimension()) {
    throw std::invalid_argument("query dimension does not match dataset dimension");
  }
  const Index n = data.size();
  std::vector<std::pair<double, Index>> keyed(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double dist = distance ? distance(data.row(i), x.coordinates())
                                 : squared_euclidean(data.row(i), x.coordinates());
    keyed[static_cast<std::size_t>(i)] = {dist, i};
  }
  const auto take = static_cast<std::size_t>(std::min(neighbors, n));
  // Pair ordering is total: distance first, then sample index.
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take), keyed.end());
  std::vector<Index> out(take);
  for (std::size_t i = 0; i < take; ++i) out[i] = keyed[i].second;
  return out;
}

Dataset local_validation_set(const Dataset& data, const QueryPoint& x, Index neighbors,
                             const DistanceFn& distance) {
  const auto idx = nearest_indices(data, x, neighbors, distance);
  return data.subset(idx);
}

Vector local_mse_row(const Dataset& validation, std::span<const ModelPtr> models) {
  Vector row(static_cast<Index>(models.size()));
  for (std::size_t j = 0; j < models.size(); ++j) {
    const Vector pred = predict_all(*models[j], validation);
    row[static_cast<Index>(j)] = mse(pred, validation.labels());
  }
  return row;
}

Vector trust_row(const Vector& mse_row, double eps) {
  if (mse_row.size() < 1) throw std::invalid_argument("trust_row needs a nonempty row");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  Vector inv(mse_row.size());
  for (Index j = 0; j < mse_row.size(); ++j) {
    if (!(mse_row[j] >= 0.0)) throw std::invalid_argument("local MSE must be nonnegative");
    inv[j] = 1.0 / std::max(mse_row[j], eps);
  }
  return inv / inv.sum();
}

TrustBuild build_trust_matrix(const Ensemble& ensemble, const QueryPoint& x,
                              const TrustConfig& cfg) {
  cfg.validate();
  const Index k = ensemble.size();
  const auto models = ensemble.models();
  Matrix scores(k, k);
  Matrix tau(k, k);
  for (Index i = 0; i < k; ++i) {
    const Dataset local = local_validation_set(*ensemble[i].data, x, cfg.neighbors, cfg.distance);
    const Vector row = local_mse_row(local, models);
    scores.row(i) = row.transpose();
    tau.row(i) = trust_row(row, cfg.mse_floor).transpose();
  }
  return {TrustMatrix(std::move(tau)), LocalScoreMatrix(std::move(scores))};
}

}  // namespace degroot
