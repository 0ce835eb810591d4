#include "degroot/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace degroot {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LeastSquares: return "least-squares";
    case ModelKind::Ridge: return "ridge";
    case ModelKind::Lasso: return "lasso";
    case ModelKind::Tree: return "tree";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "least-squares") return ModelKind::LeastSquares;
  if (name == "ridge") return ModelKind::Ridge;
  if (name == "lasso") return ModelKind::Lasso;
  if (name == "tree") return ModelKind::Tree;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (lasso_max_iter < 1) throw std::invalid_argument("lasso_max_iter must be >= 1");
  if (!(lasso_tol > 0.0)) throw std::invalid_argument("lasso_tol must be > 0");
}

// ---------------------------------------------------------------------------
// Linear models

LinearModel::LinearModel(Vector weights, double intercept, bool converged, int iterations)
    : weights_(std::move(weights)), intercept_(intercept), converged_(converged),
      iterations_(iterations) {
  if (!weights_.allFinite() || !std::isfinite(intercept_)) {
    throw NumericalError("linear model has non-finite parameters");
  }
}

double LinearModel::predict(std::span<const double> x) const {
  check_dimension(x);
  double acc = intercept_;
  for (Index j = 0; j < weights_.size(); ++j) acc += weights_[j] * x[static_cast<std::size_t>(j)];
  return acc;
}

namespace {

// Column-major copy of the design, centered (and optionally scaled).
struct CenteredDesign {
  Matrix x;
  Vector mean;
  Vector scale;
  Vector y;
  double y_mean = 0.0;
};

CenteredDesign center(const Dataset& data, bool standardize) {
  CenteredDesign c;
  c.x = data.features();
  c.mean = c.x.colwise().mean().transpose();
  c.x.rowwise() -= c.mean.transpose();
  c.scale = Vector::Ones(c.x.cols());
  if (standardize) {
    for (Index j = 0; j < c.x.cols(); ++j) {
      const double sd = std::sqrt(c.x.col(j).squaredNorm() / static_cast<double>(c.x.rows()));
      if (sd > 0.0) {
        c.scale[j] = sd;
        c.x.col(j) /= sd;
      }
    }
  }
  c.y_mean = data.labels().mean();
  c.y = data.labels().array() - c.y_mean;
  return c;
}

LinearModel to_original_scale(const CenteredDesign& c, const Vector& w_scaled, bool converged,
                              int iterations) {
  Vector w = w_scaled.cwiseQuotient(c.scale);
  const double b = c.y_mean - c.mean.dot(w);
  return LinearModel(std::move(w), b, converged, iterations);
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace

LinearModel fit_ridge(const Dataset& data, double lambda, bool standardize) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  const CenteredDesign c = center(data, standardize);
  Vector w;
  if (lambda == 0.0) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(c.x);
    w = cod.solve(c.y);
  } else {
    Matrix gram = c.x.transpose() * c.x;
    gram.diagonal().array() += lambda;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success) throw NumericalError("ridge normal equations are singular");
    w = ldlt.solve(c.x.transpose() * c.y);
  }
  if (!w.allFinite()) throw NumericalError("ridge solve produced non-finite weights");
  return to_original_scale(c, w, true, 0);
}

LinearModel fit_lasso(const Dataset& data, double lambda, int max_iter, double tol,
                      bool standardize) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");

  const CenteredDesign c = center(data, standardize);
  const Index n = c.x.rows();
  const Index d = c.x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Vector col_sq(d);
  for (Index j = 0; j < d; ++j) col_sq[j] = c.x.col(j).squaredNorm() * inv_n;

  Vector w = Vector::Zero(d);
  // Intercept of the centered problem; the exact mean-residual step keeps it
  // at the residual mean after every sweep.
  double b = 0.0;
  Vector r = c.y;
  bool converged = false;
  int sweep = 0;
  while (sweep < max_iter) {
    ++sweep;
    double max_delta = 0.0;
    for (Index j = 0; j < d; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double old = w[j];
      const double rho = c.x.col(j).dot(r) * inv_n + col_sq[j] * old;
      const double updated = soft_threshold(rho, lambda) / col_sq[j];
      const double delta = updated - old;
      if (delta != 0.0) {
        r.noalias() -= delta * c.x.col(j);
        w[j] = updated;
      }
      max_delta = std::max(max_delta, std::abs(delta));
    }
    const double shift = r.mean();
    b += shift;
    r.array() -= shift;
    max_delta = std::max(max_delta, std::abs(shift));
    if (max_delta <= tol) {
      converged = true;
      break;
    }
  }
  if (!w.allFinite()) throw NumericalError("lasso produced non-finite weights");
  LinearModel centered_fit = to_original_scale(c, w, converged, sweep);
  return LinearModel(centered_fit.weights(), centered_fit.intercept() + b, converged, sweep);
}

// ---------------------------------------------------------------------------
// Regression tree

TreeModel::TreeModel(std::vector<Node> nodes, Index dimension, int max_depth)
    : nodes_(std::move(nodes)), dimension_(dimension), max_depth_(max_depth) {
  if (nodes_.empty()) throw std::invalid_argument("tree must have at least one node");
}

int TreeModel::leaf_index(std::span<const double> x) const {
  check_dimension(x);
  int at = 0;
  while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
    const Node& n = nodes_[static_cast<std::size_t>(at)];
    at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return at;
}

double TreeModel::predict(std::span<const double> x) const {
  return nodes_[static_cast<std::size_t>(leaf_index(x))].value;
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = -1.0;  // sum over children of (label sum)^2 / count, labels node-centered
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, int max_depth) : data_(data), max_depth_(max_depth) {}

  std::vector<TreeModel::Node> build() {
    std::vector<Index> all(static_cast<std::size_t>(data_.size()));
    std::iota(all.begin(), all.end(), Index{0});
    grow(std::move(all), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<Index> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0, lo = data_.label(rows.front()), hi = lo;
    for (Index r : rows) {
      const double y = data_.label(r);
      sum += y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    const double mean = sum / static_cast<double>(rows.size());
    nodes_[static_cast<std::size_t>(id)].value = mean;
    nodes_[static_cast<std::size_t>(id)].depth = depth;

    if (depth >= max_depth_ || rows.size() < 2 || lo == hi) return id;
    const SplitChoice split = best_split(rows, mean);
    if (split.feature < 0) return id;

    std::vector<Index> left, right;
    for (Index r : rows) {
      (data_.features()(r, split.feature) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  // Minimizing the children's total SSE is equivalent to maximizing
  // S_L^2/n_L + S_R^2/n_R on node-centered labels. Features and thresholds are
  // scanned in ascending order and only strict improvements are taken, so
  // ties go to the lowest feature index, then the lowest threshold.
  SplitChoice best_split(const std::vector<Index>& rows, double mean) const {
    SplitChoice best;
    const std::size_t n = rows.size();
    std::vector<std::pair<double, double>> column(n);  // (feature value, centered label)
    for (Index f = 0; f < data_.dimension(); ++f) {
      for (std::size_t i = 0; i < n; ++i) {
        column[i] = {data_.features()(rows[i], f), data_.label(rows[i]) - mean};
      }
      std::stable_sort(column.begin(), column.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      double total = 0.0;
      for (const auto& c : column) total += c.second;
      double left = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left += column[i].second;
        if (!(column[i].first < column[i + 1].first)) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(n - i - 1);
        const double right = total - left;
        const double score = left * left / nl + right * right / nr;
        if (best.feature < 0 || score > best.score + 1e-12 * std::max(1.0, best.score)) {
          const double a = column[i].first, b = column[i + 1].first;
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best = {static_cast<int>(f), mid, score};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  int max_depth_;
  std::vector<TreeModel::Node> nodes_;
};

}  // namespace

TreeModel fit_tree(const Dataset& data, int max_depth) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  TreeBuilder builder(data, max_depth);
  return TreeModel(builder.build(), data.dimension(), max_depth);
}

ModelPtr fit_model(const ModelSpec& spec, const Dataset& data) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::LeastSquares:
      return std::make_shared<LinearModel>(fit_ridge(data, 0.0, spec.standardize));
    case ModelKind::Ridge:
      return std::make_shared<LinearModel>(fit_ridge(data, spec.lambda, spec.standardize));
    case ModelKind::Lasso:
      return std::make_shared<LinearModel>(
          fit_lasso(data, spec.lambda, spec.lasso_max_iter, spec.lasso_tol, spec.standardize));
    case ModelKind::Tree:
      return std::make_shared<TreeModel>(fit_tree(data, spec.max_depth));
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace degroot
