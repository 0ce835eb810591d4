#pragma once

#include "degroot/trust.hpp"

#include <optional>
#include <string_view>

namespace degroot {

enum class ConsensusMethod { Pooling, PowerIteration };

std::string_view to_string(ConsensusMethod method);
/// Accepts "pooling" and "power-iteration".
ConsensusMethod parse_consensus_method(std::string_view name);

struct ConsensusConfig {
  /// Round cap t_p.
  int max_rounds = 30;
  double tolerance = 1e-10;
  ConsensusMethod method = ConsensusMethod::PowerIteration;
  /// Stop as soon as an update moves by no more than `tolerance`
  /// (L1 change of w for power iteration, per-agent change for pooling).
  /// When false exactly max_rounds rounds are run.
  bool early_stop = true;
  /// Keep every pooling round in ConsensusResult::trace.
  bool record_trace = false;

  void validate() const;
};

struct BeliefVector {
  Vector beliefs;
  int round = 0;
};

/// One synchronous update: belief_i <- sum_j tau_ij belief_j.
BeliefVector pool_step(const BeliefVector& beliefs, const TrustMatrix& trust);

struct StationaryWeights {
  Vector weights;
  int rounds = 0;
  bool converged = false;
};

/// Left eigenvector w = wT, sum(w) = 1, by power iteration from the uniform
/// vector. A non-converged iterate is returned with converged == false.
StationaryWeights stationary_weights(const TrustMatrix& trust, const ConsensusConfig& cfg);

struct ConsensusResult {
  double prediction = 0.0;
  /// Stationary weights of the trust matrix, for either method.
  Vector weights;
  int rounds_run = 0;
  bool converged = false;
  std::optional<std::vector<BeliefVector>> trace;
};

/// Pooling: iterate pool_step from the initial predictions and return the
/// agents' mean belief. Power iteration: sum_j w_j p_j.
ConsensusResult consensus_predict(const Vector& predictions, const TrustMatrix& trust,
                                  const ConsensusConfig& cfg);

/// Beliefs after rounds 0..rounds (rounds + 1 entries).
std::vector<BeliefVector> pooling_trace(const Vector& predictions, const TrustMatrix& trust,
                                        int rounds);

}  // namespace degroot
