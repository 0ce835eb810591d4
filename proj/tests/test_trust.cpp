#include "degroot/datagen.hpp"
#include "degroot/models.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace testing;

namespace {

QueryPoint at(std::initializer_list<double> c) { return QueryPoint(std::vector<double>(c)); }

std::vector<double> labels_of(const Dataset& d) { return {d.labels().data(), d.labels().data() + d.size()}; }

}  // namespace

TEST_CASE("local validation set examples") {
  const Dataset d = make_dataset({{0}, {1}, {2}, {3}}, {0, 1, 2, 3});
  CHECK(labels_of(local_validation_set(d, at({2.2}), 2)) == std::vector<double>{2, 3});
  CHECK(local_validation_set(d, at({2.2}), 10).size() == 4);
  CHECK(labels_of(local_validation_set(d, at({1.0}), 1)) == std::vector<double>{1});
}

TEST_CASE("equidistant neighbors are broken by lower index") {
  const Dataset d = make_dataset({{2}, {0}, {1}, {3}}, {0, 1, 2, 3});
  CHECK(nearest_indices(d, at({1.5}), 1) == std::vector<Index>{0});
  CHECK(nearest_indices(d, at({1.5}), 3) == std::vector<Index>{0, 2, 1});
  CHECK(nearest_indices(d, at({1.0}), 3) == std::vector<Index>{2, 0, 1});
}

TEST_CASE("nearest indices agree with an exhaustive stable sort") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(40));
    FeatureMatrix x(n, 2);
    // Coarse grid so that ties are frequent.
    for (Index i = 0; i < n; ++i) x.row(i) << static_cast<double>(rng.index(5)), static_cast<double>(rng.index(5));
    const Dataset d(x, Vector::Zero(n));
    const QueryPoint q(std::vector<double>{static_cast<double>(rng.index(5)), 2.0});
    std::vector<Index> all(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    auto dist = [&](Index i) { return squared_euclidean(d.row(i), q.coordinates()); };
    std::stable_sort(all.begin(), all.end(), [&](Index a, Index b) { return dist(a) < dist(b); });
    const Index k = 1 + static_cast<Index>(rng.index(static_cast<std::uint64_t>(n) + 3));
    all.resize(static_cast<std::size_t>(std::min(k, n)));
    CHECK(nearest_indices(d, q, k) == all);
  }
}

TEST_CASE("custom distance hook") {
  const Dataset d = make_dataset({{0, 10}, {1, 0}}, {0, 1});
  const DistanceFn first_only = [](std::span<const double> a, std::span<const double> b) {
    return std::abs(a[0] - b[0]);
  };
  CHECK(nearest_indices(d, at({0, 0}), 1) == std::vector<Index>{1});
  CHECK(nearest_indices(d, at({0, 0}), 1, first_only) == std::vector<Index>{0});
}

TEST_CASE("local mse row examples") {
  const Dataset v = make_dataset({{1}, {2}}, {1, 2});
  const std::vector<ModelPtr> models{affine(1, 1, 0), affine(1, 0, 0)};
  const Vector row = local_mse_row(v, models);
  CHECK(row[0] == 0.0);
  CHECK(row[1] == doctest::Approx(2.5).epsilon(1e-15));
  const Vector ones = local_mse_row(make_dataset({{1}, {2}}, {1, 1}), std::vector<ModelPtr>{affine(1, 0, 0)});
  CHECK(ones[0] == 1.0);
}

TEST_CASE("trust row examples") {
  const Vector u = trust_row(vec({2, 2, 2, 2}), 1e-12);
  for (Index j = 0; j < 4; ++j) CHECK(u[j] == doctest::Approx(0.25).epsilon(1e-15));
  const Vector r = trust_row(vec({1, 1, 2}), 1e-12);
  CHECK(r[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r[2] == doctest::Approx(0.2).epsilon(1e-15));
  const Vector p = trust_row(vec({0, 1}), 1e-12);
  CHECK(std::abs(p[0] - 1.0) < 1e-9);
  CHECK(p[1] > 0.0);
}

TEST_CASE("trust row properties") {
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const Index k = 2 + static_cast<Index>(rng.index(7));
    Vector m(k);
    for (Index j = 0; j < k; ++j) m[j] = 1e-3 + rng.uniform();
    const Vector t = trust_row(m, 1e-12);
    CHECK(std::abs(t.sum() - 1.0) < 1e-9);
    CHECK((t.array() > 0).all());
    // Scale invariance.
    const Vector scaled = trust_row(m * (0.01 + 100 * rng.uniform()), 1e-12);
    CHECK((scaled - t).cwiseAbs().maxCoeff() <= 1e-12);
    // Monotonicity in one entry.
    const Index j = static_cast<Index>(rng.index(static_cast<std::uint64_t>(k)));
    Vector lower = m;
    lower[j] *= 0.5;
    CHECK(trust_row(lower, 1e-12)[j] > t[j]);
  }
}

TEST_CASE("matrix type invariants") {
  CHECK_THROWS_AS(TrustMatrix(mat({{0.5, 0.5}, {0.6, 0.5}})), std::invalid_argument);
  CHECK_THROWS_AS(TrustMatrix(mat({{1.0, 0.0}, {0.5, 0.5}})), std::invalid_argument);
  CHECK_THROWS_AS(TrustMatrix(mat({{0.5, 0.5}})), std::invalid_argument);
  CHECK_THROWS_AS(LocalScoreMatrix(mat({{1.0, -1.0}, {0.0, 0.0}})), std::invalid_argument);
  CHECK_NOTHROW(LocalScoreMatrix(mat({{0.0, 0.0}, {0.0, 0.0}})));
  TrustConfig cfg;
  cfg.neighbors = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("build trust matrix examples") {
  auto data = std::make_shared<const Dataset>(make_dataset({{0}, {1}, {2}}, {0, 1, 3}));
  const Ensemble twins({{data, affine(1, 1, 0)}, {data, affine(1, 1, 0)}});
  TrustConfig cfg;
  cfg.neighbors = 2;
  const TrustBuild b = build_trust_matrix(twins, at({1.0}), cfg);
  CHECK((b.trust.matrix().array() - 0.5).abs().maxCoeff() == 0.0);

  auto d2 = std::make_shared<const Dataset>(make_dataset({{5}, {6}}, {5, 6}));
  auto exact = std::make_shared<const Dataset>(make_dataset({{0}, {1}, {2}}, {0, 1, 2}));
  const Ensemble dominant({{exact, affine(1, 1, 0)}, {d2, affine(1, 1, 0.5)}});
  const TrustBuild c = build_trust_matrix(dominant, at({3.0}), cfg);
  for (Index i = 0; i < 2; ++i) CHECK(c.trust(i, 0) > c.trust(i, 1));
  CHECK(c.scores(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("trust is permutation equivariant") {
  Rng rng(17);
  std::vector<Agent> agents;
  for (int k = 0; k < 4; ++k) {
    auto d = std::make_shared<const Dataset>(random_dataset(rng, 30, 2, 0.3));
    agents.push_back({d, std::make_shared<LinearModel>(fit_ridge(*d, 0.5 * k))});
  }
  const std::vector<Index> perm{2, 0, 3, 1};
  std::vector<Agent> permuted;
  for (Index p : perm) permuted.push_back(agents[static_cast<std::size_t>(p)]);
  TrustConfig cfg;
  cfg.neighbors = 4;
  const QueryPoint x = at({0.3, -0.2});
  const TrustBuild a = build_trust_matrix(Ensemble(agents), x, cfg);
  const TrustBuild b = build_trust_matrix(Ensemble(permuted), x, cfg);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      CHECK(b.trust(i, j) == doctest::Approx(a.trust(perm[i], perm[j])).epsilon(1e-14));
      CHECK(b.scores(i, j) == a.scores(perm[i], perm[j]));
    }
}

TEST_CASE("synthetic task: leftmost agent is most trusted on the far left") {
  SyntheticConfig cfg = SyntheticConfig::defaults();
  cfg.seed = 2024;
  const SyntheticTask task = generate_synthetic(cfg);
  std::vector<Agent> agents;
  for (const auto& d : task.agents) {
    auto data = std::make_shared<const Dataset>(d);
    agents.push_back({data, std::make_shared<LinearModel>(fit_ridge(*data, 0.0))});
  }
  const Ensemble ensemble(agents);
  const QueryPoint x = at({-3.5, -3.5});  // xi = -7
  TrustConfig tc;
  const TrustBuild b = build_trust_matrix(ensemble, x, tc);
  // Exhaustive check of the local MSE on agent 0's own neighborhood.
  const Dataset local = local_validation_set(task.agents[0], x, 5);
  Index best = 0;
  double best_mse = 1e300;
  for (Index j = 0; j < 5; ++j) {
    const double e = mse(predict_all(*ensemble[j].model, local), local.labels());
    if (e < best_mse) { best_mse = e; best = j; }
  }
  CHECK(best == 0);
  Index argmax = 0;
  b.trust.matrix().row(0).maxCoeff(&argmax);
  CHECK(argmax == 0);
  for (Index i = 0; i < 5; ++i) CHECK(std::abs(b.trust.matrix().row(i).sum() - 1.0) < 1e-9);
}
