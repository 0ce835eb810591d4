#include "degroot/consensus.hpp"

#include <cmath>
#include <string>

namespace degroot {

std::string_view to_string(ConsensusMethod method) {
  return method == ConsensusMethod::Pooling ? "pooling" : "power-iteration";
}

ConsensusMethod parse_consensus_method(std::string_view name) {
  if (name == "pooling") return ConsensusMethod::Pooling;
  if (name == "power-iteration") return ConsensusMethod::PowerIteration;
  throw std::invalid_argument("unknown consensus method '" + std::string(name) + "'");
}

void ConsensusConfig::validate() const {
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
}

namespace {

void check_predictions(const Vector& predictions, const TrustMatrix& trust) {
  if (predictions.size() != trust.size()) {
    throw std::invalid_argument("got " + std::to_string(predictions.size()) +
                                " predictions for a trust matrix of size " +
                                std::to_string(trust.size()));
  }
  if (!predictions.allFinite()) throw std::invalid_argument("predictions must be finite");
}

}  // namespace

BeliefVector pool_step(const BeliefVector& beliefs, const TrustMatrix& trust) {
  if (beliefs.beliefs.size() != trust.size()) {
    throw std::invalid_argument("belief vector length does not match trust matrix");
  }
  return {trust.matrix() * beliefs.beliefs, beliefs.round + 1};
}

StationaryWeights stationary_weights(const TrustMatrix& trust, const ConsensusConfig& cfg) {
  cfg.validate();
  const Index k = trust.size();
  const Matrix tt = trust.matrix().transpose();
  Vector w = Vector::Constant(k, 1.0 / static_cast<double>(k));
  StationaryWeights out;
  double change = 0.0;
  for (int t = 0; t < cfg.max_rounds; ++t) {
    Vector next = tt * w;
    next /= next.sum();
    change = (next - w).lpNorm<1>();
    w = std::move(next);
    out.rounds = t + 1;
    if (cfg.early_stop && change <= cfg.tolerance) break;
  }
  if (!w.allFinite()) throw NumericalError("power iteration diverged");
  out.converged = change <= cfg.tolerance;
  out.weights = std::move(w);
  return out;
}

ConsensusResult consensus_predict(const Vector& predictions, const TrustMatrix& trust,
                                  const ConsensusConfig& cfg) {
  cfg.validate();
  check_predictions(predictions, trust);
  StationaryWeights stationary = stationary_weights(trust, cfg);

  ConsensusResult result;
  if (cfg.method == ConsensusMethod::PowerIteration) {
    result.prediction = stationary.weights.dot(predictions);
    result.rounds_run = stationary.rounds;
    result.converged = stationary.converged;
    if (cfg.record_trace) result.trace = std::vector<BeliefVector>{{predictions, 0}};
  } else {
    BeliefVector current{predictions, 0};
    std::vector<BeliefVector> trace;
    if (cfg.record_trace) trace.push_back(current);
    for (int t = 0; t < cfg.max_rounds; ++t) {
      BeliefVector next = pool_step(current, trust);
      const double delta = (next.beliefs - current.beliefs).lpNorm<Eigen::Infinity>();
      current = std::move(next);
      if (cfg.record_trace) trace.push_back(current);
      if (cfg.early_stop && delta <= cfg.tolerance) break;
    }
    // Mean of the beliefs rather than any single one, so a partially
    // converged run still returns a sensible value.
    result.prediction = current.beliefs.mean();
    result.rounds_run = current.round;
    result.converged =
        (current.beliefs.array() - result.prediction).abs().maxCoeff() <= cfg.tolerance;
    if (cfg.record_trace) result.trace = std::move(trace);
  }
  if (!std::isfinite(result.prediction)) throw NumericalError("consensus prediction is not finite");
  result.weights = std::move(stationary.weights);
  return result;
}

std::vector<BeliefVector> pooling_trace(const Vector& predictions, const TrustMatrix& trust,
                                        int rounds) {
  if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
  check_predictions(predictions, trust);
  std::vector<BeliefVector> trace;
  trace.reserve(static_cast<std::size_t>(rounds) + 1);
  trace.push_back({predictions, 0});
  for (int t = 0; t < rounds; ++t) trace.push_back(pool_step(trace.back(), trust));
  return trace;
}

}  // namespace degroot
