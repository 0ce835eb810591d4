#pragma once

#include "degroot/consensus.hpp"

namespace degroot {

struct JackknifeResult {
  /// Consensus of the K-1 agents left after deleting agent i.
  Vector delete_one_predictions;
  double mean_delete_one = 0.0;
  double standard_error = 0.0;
};

/// Principal submatrix without row/column `agent`, rows renormalized to one.
/// Requires K >= 3.
TrustMatrix delete_one_matrix(const TrustMatrix& trust, Index agent);

/// Delete-one-agent jackknife standard error of the consensus prediction:
/// sqrt((K-1)/K * sum_i (p_{-i} - mean)^2). Only reuses the trust matrix and
/// the agents' predictions; no model is queried again. Requires K >= 3.
JackknifeResult jackknife_se(const Vector& predictions, const TrustMatrix& trust,
                             const ConsensusConfig& cfg);

}  // namespace degroot
