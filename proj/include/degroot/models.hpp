#pragma once

#include "degroot/core.hpp"

#include <string_view>

namespace degroot {

enum class ModelKind { LeastSquares, Ridge, Lasso, Tree };

std::string_view to_string(ModelKind kind);
/// Accepts "least-squares", "ridge", "lasso", "tree".
ModelKind parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::LeastSquares;
  double lambda = 0.0;
  int max_depth = 4;
  int lasso_max_iter = 10000;
  double lasso_tol = 1e-6;
  /// Fit linear models on unit-variance columns, mapping coefficients
  /// back to the original scale afterwards. Ignored by trees.
  bool standardize = false;

  void validate() const;
};

class LinearModel final : public PredictiveModel {
 public:
  LinearModel(Vector weights, double intercept, bool converged = true, int iterations = 0);

  double predict(std::span<const double> x) const override;
  Index dimension() const override { return weights_.size(); }

  const Vector& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  /// False when an iterative fit stopped at its sweep limit.
  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }

 private:
  Vector weights_;
  double intercept_;
  bool converged_;
  int iterations_;
};

class TreeModel final : public PredictiveModel {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // mean training label reaching this node
    int depth = 0;
  };

  TreeModel(std::vector<Node> nodes, Index dimension, int max_depth);

  double predict(std::span<const double> x) const override;
  Index dimension() const override { return dimension_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  int max_depth() const { return max_depth_; }
  /// Index of the leaf that x is routed to.
  int leaf_index(std::span<const double> x) const;

 private:
  std::vector<Node> nodes_;
  Index dimension_;
  int max_depth_;
};

/// argmin ||y - Xw - b||^2 + lambda ||w||^2 with b unpenalized. lambda == 0
/// gives ordinary least squares (minimum-norm on rank deficiency).
LinearModel fit_ridge(const Dataset& data, double lambda, bool standardize = false);

/// Cyclic coordinate descent on (1/2n) ||y - Xw - b||^2 + lambda ||w||_1.
/// Stops when no coordinate moves by more than tol in a sweep, or after
/// max_iter sweeps (returned with converged() == false).
LinearModel fit_lasso(const Dataset& data, double lambda, int max_iter, double tol,
                      bool standardize = false);

/// Greedy CART regression tree with squared-error splits.
TreeModel fit_tree(const Dataset& data, int max_depth);

ModelPtr fit_model(const ModelSpec& spec, const Dataset& data);

}  // namespace degroot
