#pragma once

#include "degroot/core.hpp"
#include "degroot/rng.hpp"
#include "degroot/trust.hpp"

#include <algorithm>
#include <functional>
#include <initializer_list>
#include <memory>
#include <vector>

namespace testing {

using namespace degroot;

inline Dataset make_dataset(std::initializer_list<std::initializer_list<double>> rows,
                            std::initializer_list<double> labels) {
  const Index n = static_cast<Index>(rows.size());
  const Index d = n > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
  FeatureMatrix x(n, d);
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) x(i, j++) = v;
    ++i;
  }
  Vector y(n);
  i = 0;
  for (double v : labels) y[i++] = v;
  return Dataset(std::move(x), std::move(y));
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

/// Random strictly positive row-stochastic matrix; entries start in [lo, 1).
inline TrustMatrix random_trust(Rng& rng, Index k, double lo = 0.01) {
  Matrix m(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) m(i, j) = lo + (1.0 - lo) * rng.uniform();
  return TrustMatrix::from_positive(m);
}

/// Doubly stochastic matrix by Sinkhorn balancing of a random positive matrix.
inline TrustMatrix random_doubly_stochastic(Rng& rng, Index k) {
  Matrix m(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) m(i, j) = 0.05 + rng.uniform();
  for (int it = 0; it < 10000; ++it) {
    m.array().colwise() /= m.rowwise().sum().array();
    m.array().rowwise() /= m.colwise().sum().array();
    if ((m.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15) break;
  }
  return TrustMatrix::from_positive(m);
}

/// Row-stochastic matrix whose rows all rank the columns in the same order:
/// column order[0] gets each row's largest entry, order[1] the next, and so on.
inline TrustMatrix random_order_shared(Rng& rng, Index k, std::vector<Index>& order) {
  order.resize(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) order[static_cast<std::size_t>(j)] = j;
  rng.shuffle(order);
  Matrix m(k, k);
  for (Index i = 0; i < k; ++i) {
    std::vector<double> v(static_cast<std::size_t>(k));
    for (auto& x : v) x = 0.01 + rng.uniform();
    std::sort(v.begin(), v.end(), std::greater<>());
    for (Index r = 0; r < k; ++r) m(i, order[static_cast<std::size_t>(r)]) = v[static_cast<std::size_t>(r)];
  }
  return TrustMatrix::from_positive(m);
}

inline Vector random_vector(Rng& rng, Index k, double scale = 1.0) {
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = scale * rng.normal();
  return v;
}

inline Dataset random_dataset(Rng& rng, Index n, Index d, double noise = 0.1) {
  FeatureMatrix x(n, d);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index j = 0; j < d; ++j) {
      x(i, j) = rng.normal();
      s += (j + 1) * x(i, j);
    }
    y[i] = 0.5 + s + noise * rng.normal();
  }
  return Dataset(std::move(x), std::move(y));
}

/// Stationary distribution by solving (T^T - I) w = 0 with the last equation
/// replaced by sum(w) = 1.
inline Vector stationary_by_solve(const Matrix& t) {
  const Index k = t.rows();
  Matrix a = t.transpose() - Matrix::Identity(k, k);
  a.row(k - 1).setOnes();
  Vector b = Vector::Zero(k);
  b[k - 1] = 1.0;
  return a.fullPivLu().solve(b);
}

/// Model returning a fixed affine function of the first coordinate.
class AffineModel final : public PredictiveModel {
 public:
  AffineModel(Index dimension, double slope, double offset)
      : dimension_(dimension), slope_(slope), offset_(offset) {}
  double predict(std::span<const double> x) const override {
    check_dimension(x);
    return slope_ * x[0] + offset_;
  }
  Index dimension() const override { return dimension_; }

 private:
  Index dimension_;
  double slope_;
  double offset_;
};

inline ModelPtr affine(Index d, double slope, double offset) {
  return std::make_shared<AffineModel>(d, slope, offset);
}

}  // namespace testing
