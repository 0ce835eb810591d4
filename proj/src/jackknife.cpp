#include "degroot/jackknife.hpp"

#include <cmath>
#include <string>

namespace degroot {

TrustMatrix delete_one_matrix(const TrustMatrix& trust, Index agent) {
  const Index k = trust.size();
  if (k < 3) throw std::invalid_argument("delete-one jackknife needs at least 3 agents");
  if (agent < 0 || agent >= k) {
    throw std::invalid_argument("agent index " + std::to_string(agent) + " out of range");
  }
  Matrix sub(k - 1, k - 1);
  for (Index i = 0, si = 0; i < k; ++i) {
    if (i == agent) continue;
    for (Index j = 0, sj = 0; j < k; ++j) {
      if (j == agent) continue;
      sub(si, sj++) = trust(i, j);
    }
    ++si;
  }
  return TrustMatrix::from_positive(sub);
}

JackknifeResult jackknife_se(const Vector& predictions, const TrustMatrix& trust,
                             const ConsensusConfig& cfg) {
  const Index k = trust.size();
  if (k < 3) throw std::invalid_argument("delete-one jackknife needs at least 3 agents");
  if (predictions.size() != k) {
    throw std::invalid_argument("prediction count does not match trust matrix");
  }
  ConsensusConfig power = cfg;
  power.method = ConsensusMethod::PowerIteration;
  power.record_trace = false;

  JackknifeResult out;
  out.delete_one_predictions.resize(k);
  Vector rest(k - 1);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0, s = 0; j < k; ++j) {
      if (j != i) rest[s++] = predictions[j];
    }
    const StationaryWeights v = stationary_weights(delete_one_matrix(trust, i), power);
    out.delete_one_predictions[i] = v.weights.dot(rest);
  }
  out.mean_delete_one = out.delete_one_predictions.mean();
  const double ss = (out.delete_one_predictions.array() - out.mean_delete_one).square().sum();
  out.standard_error =
      std::sqrt(static_cast<double>(k - 1) / static_cast<double>(k) * ss);
  return out;
}

}  // namespace degroot
