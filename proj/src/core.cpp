#include "degroot/core.hpp"

#include <cmath>
#include <string>

namespace degroot {

Dataset::Dataset(FeatureMatrix features, Vector labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (labels_.size() < 1) {
    throw std::invalid_argument("dataset must contain at least one sample");
  }
  if (features_.rows() != labels_.size()) {
    throw std::invalid_argument("feature rows (" + std::to_string(features_.rows()) +
                                ") do not match label count (" +
                                std::to_string(labels_.size()) + ")");
  }
  if (!features_.allFinite() || !labels_.allFinite()) {
    throw std::invalid_argument("dataset contains non-finite values");
  }
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  FeatureMatrix f(static_cast<Index>(rows.size()), features_.cols());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index src = rows[r];
    if (src < 0 || src >= size()) throw std::out_of_range("subset row index out of range");
    f.row(static_cast<Index>(r)) = features_.row(src);
    y[static_cast<Index>(r)] = labels_[src];
  }
  return Dataset(std::move(f), std::move(y));
}

QueryPoint::QueryPoint(std::vector<double> coordinates) : coords_(std::move(coordinates)) {
  for (double c : coords_) {
    if (!std::isfinite(c)) throw std::invalid_argument("query point has non-finite coordinate");
  }
}

void PredictiveModel::check_dimension(std::span<const double> x) const {
  if (static_cast<Index>(x.size()) != dimension()) {
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(dimension()));
  }
}

Vector predict_all(const PredictiveModel& model, const Dataset& data) {
  Vector out(data.size());
  for (Index i = 0; i < data.size(); ++i) out[i] = model.predict(data.row(i));
  return out;
}

Ensemble::Ensemble(std::vector<Agent> agents) : agents_(std::move(agents)) {
  if (agents_.size() < 2) throw std::invalid_argument("an ensemble needs at least two agents");
  const Index d = agents_.front().data ? agents_.front().data->dimension() : -1;
  for (const auto& a : agents_) {
    if (!a.data || !a.model) throw std::invalid_argument("agent is missing data or model");
    if (a.data->dimension() != d || a.model->dimension() != d) {
      throw std::invalid_argument("all agents must share one feature dimension");
    }
  }
}

std::vector<ModelPtr> Ensemble::models() const {
  std::vector<ModelPtr> out;
  out.reserve(agents_.size());
  for (const auto& a : agents_) out.push_back(a.model);
  return out;
}

Vector Ensemble::predictions(const QueryPoint& x) const {
  Vector p(size());
  for (Index k = 0; k < size(); ++k) p[k] = (*this)[k].model->predict(x);
  return p;
}

double mse(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw std::invalid_argument("mse needs two nonempty vectors of equal length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double r = predictions[i] - labels[i];
    acc += r * r;
  }
  return acc / static_cast<double>(predictions.size());
}

double mse(const Vector& predictions, const Vector& labels) {
  return mse(as_span(predictions), as_span(labels));
}

}  // namespace degroot
