#pragma once

#include "degroot/consensus.hpp"
#include "degroot/datagen.hpp"
#include "degroot/models.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace degroot {

/// Invalid or unreadable experiment configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { DeGroot, MAvg, CvStatic, CvAdaptive, TauAvg, MseAvg };

std::string_view to_string(Scheme scheme);
/// Accepts "degroot", "m-avg", "cv-static", "cv-adaptive", "tau-avg", "mse-avg".
Scheme parse_scheme(std::string_view name);
/// Comma separated list of scheme names.
std::vector<Scheme> parse_scheme_list(std::string_view list);

enum class SourceKind { Synthetic, File, Surrogate };
std::string_view to_string(SourceKind kind);

struct FileSource {
  std::string path;
  /// "libsvm" or "csv"
  std::string format = "libsvm";
  int label_column = -1;
};

/// Neighborhood size: an absolute N, or max(floor, ceil(fraction * n_local)).
struct NeighborRule {
  std::optional<Index> absolute;
  double fraction = 0.01;
  Index floor = 2;

  Index resolve(Index local_size) const;
};

/// Held-out test size for pooled sources: max(fraction n, minimum), capped
/// at max_fraction of the data so that training samples remain.
struct TestPolicy {
  double fraction = 0.15;
  Index minimum = 500;
  double max_fraction = 0.5;

  Index resolve(Index samples) const;
};

enum class ValidationPolicy {
  /// A shared validation set the size of one partition is always held out.
  PartitionSize,
  /// No validation data; CV schemes are unavailable.
  None,
};

struct ExperimentConfig {
  SourceKind source = SourceKind::Synthetic;
  SyntheticConfig synthetic = SyntheticConfig::defaults();
  FileSource file;
  SurrogateConfig surrogate;
  /// Pooled sources only; the seed is replaced per replication.
  PartitionScheme partition;
  /// Required for pooled sources; synthetic runs use one agent per mean.
  std::optional<Index> agents;
  ModelSpec model;
  std::optional<HeterogeneityLambdaRule> lambda_rule;
  NeighborRule neighbors;
  double mse_floor = 1e-12;
  ConsensusConfig consensus;
  std::vector<Scheme> schemes{Scheme::DeGroot, Scheme::MAvg};
  bool jackknife = false;
  ValidationPolicy validation = ValidationPolicy::PartitionSize;
  TestPolicy test;
  int replications = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  /// Worker threads for test-point evaluation; 0 picks the hardware count.
  int threads = 0;

  /// Default synthetic experiment: five linear agents, N = 5.
  static ExperimentConfig synthetic_defaults();

  Index agent_count() const;
  bool uses_validation() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Strict parse: unknown keys, wrong types and invalid values raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

}  // namespace degroot
