#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace testing;

TEST_CASE("mse examples") {
  CHECK(mse(vec({1, 2}), vec({1, 2})) == 0.0);
  CHECK(mse(vec({0, 0}), vec({1, 1})) == 1.0);
  CHECK(mse(vec({1, 3}), vec({2, 1})) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("mse rejects empty and mismatched input") {
  CHECK_THROWS_AS(mse(Vector(), Vector()), std::invalid_argument);
  CHECK_THROWS_AS(mse(vec({1, 2}), vec({1})), std::invalid_argument);
}

TEST_CASE("mse is symmetric, zero on the diagonal and permutation invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(30));
    const Vector a = random_vector(rng, n, 3.0);
    const Vector b = random_vector(rng, n, 3.0);
    CHECK(mse(a, b) == mse(b, a));
    CHECK(mse(a, a) == 0.0);
    CHECK(mse(a, b) >= 0.0);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    Vector pa(n), pb(n);
    for (Index i = 0; i < n; ++i) {
      pa[i] = a[perm[static_cast<std::size_t>(i)]];
      pb[i] = b[perm[static_cast<std::size_t>(i)]];
    }
    CHECK(mse(pa, pb) == doctest::Approx(mse(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset(FeatureMatrix(0, 2), Vector()), std::invalid_argument);
  CHECK_THROWS_AS(Dataset(FeatureMatrix::Zero(3, 2), Vector::Zero(2)), std::invalid_argument);
  FeatureMatrix x = FeatureMatrix::Zero(2, 1);
  x(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset(x, Vector::Zero(2)), std::invalid_argument);
  Vector y = Vector::Zero(2);
  y[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Dataset(FeatureMatrix::Zero(2, 1), y), std::invalid_argument);
  CHECK_THROWS_AS(QueryPoint(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("dataset rows and subsets") {
  const Dataset d = make_dataset({{1, 2}, {3, 4}, {5, 6}}, {7, 8, 9});
  CHECK(d.size() == 3);
  CHECK(d.dimension() == 2);
  CHECK(d.row(1)[0] == 3.0);
  CHECK(d.row(1)[1] == 4.0);
  const std::vector<Index> rows{2, 0};
  const Dataset s = d.subset(rows);
  CHECK(s.size() == 2);
  CHECK(s.row(0)[1] == 6.0);
  CHECK(s.label(1) == 7.0);
}

TEST_CASE("ensemble requires two agents of one dimension") {
  auto d1 = std::make_shared<const Dataset>(make_dataset({{0}}, {0}));
  auto d2 = std::make_shared<const Dataset>(make_dataset({{0, 1}}, {0}));
  CHECK_THROWS_AS(Ensemble({{d1, affine(1, 1, 0)}}), std::invalid_argument);
  CHECK_THROWS_AS(Ensemble({{d1, affine(1, 1, 0)}, {d2, affine(2, 1, 0)}}), std::invalid_argument);
  const Ensemble e({{d1, affine(1, 1, 0)}, {d1, affine(1, 2, 1)}});
  const Vector p = e.predictions(QueryPoint(std::vector<double>{2.0}));
  CHECK(p[0] == 2.0);
  CHECK(p[1] == 5.0);
}

TEST_CASE("prediction dimension is checked") {
  const ModelPtr m = affine(2, 1, 0);
  CHECK_THROWS_AS(m->predict(QueryPoint(std::vector<double>{1.0})), std::invalid_argument);
}
