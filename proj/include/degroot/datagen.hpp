#pragma once

#include "degroot/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace degroot {

/// Gaussian agents on a logistic regression surface
/// y = 1 / (1 + exp(alpha . x)) + Normal(0, label_noise_sd^2).
struct SyntheticConfig {
  std::vector<std::vector<double>> agent_means;
  /// Sigma_k = cov_scale * I for every agent.
  double cov_scale = 1.0;
  std::vector<double> alpha;
  double label_noise_sd = 0.1;
  Index samples_per_agent = 200;
  Index test_samples = 200;
  std::uint64_t seed = 0;

  /// Five agents spread along the diagonal of the plane.
  static SyntheticConfig defaults();
  Index agents() const { return static_cast<Index>(agent_means.size()); }
  Index dimension() const { return static_cast<Index>(alpha.size()); }
  void validate() const;
};

/// Noiseless label of the synthetic surface.
double logistic_label(std::span<const double> alpha, std::span<const double> x);

struct SyntheticTask {
  std::vector<Dataset> agents;
  /// Drawn from the uniform mixture of the agent distributions, noiseless labels.
  Dataset test;
};

/// Agent k draws from stream derive_seed(seed, "synthetic/agent", k); the
/// test set from derive_seed(seed, "synthetic/test").
SyntheticTask generate_synthetic(const SyntheticConfig& cfg);

/// `count` points from the uniform mixture of the agent distributions using
/// the given stream seed. Labels carry noise only when `noisy` is set.
Dataset sample_synthetic_mixture(const SyntheticConfig& cfg, Index count, bool noisy,
                                 std::uint64_t stream_seed);

/// Abalone-like pooled set for when no benchmark file is present. Integer
/// ring counts (log-normal around 9.5, clipped to 1..29) drive a shell length
/// that grows concavely and saturates with age; the 8 features are a sex code
/// (1 male, 2 female, 3 infant), length, diameter, height and four weights
/// that scale with length cubed. The label is the ring count.
struct SurrogateConfig {
  Index samples = 4177;
  /// Individual variation of shell length around the growth curve.
  double size_noise_sd = 0.06;

  void validate() const;
};

Dataset generate_surrogate(const SurrogateConfig& cfg, std::uint64_t seed);

enum class PartitionKind { Random, SortedLabel, SortedFeature };

std::string_view to_string(PartitionKind kind);
/// Accepts "random", "sorted-label", "sorted-feature".
PartitionKind parse_partition_kind(std::string_view name);

struct PartitionScheme {
  PartitionKind kind = PartitionKind::Random;
  /// Fraction p of the samples that is sorted before splitting.
  double sort_fraction = 0.0;
  /// Column sorted by the sorted-feature scheme (0-based).
  Index feature_index = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Shuffles the samples, sorts the first floor(p n) of them (by label or by
/// the chosen feature) and cuts them into K contiguous blocks in agent order;
/// the shuffled remainder is dealt round-robin so partition sizes differ by at
/// most one. Throws std::invalid_argument when n < K.
std::vector<Dataset> partition(const Dataset& data, Index agents, const PartitionScheme& scheme);

/// lambda_k = base_lambda * (1 + (k - pivot) / K)^exponent for k = 1..K.
struct HeterogeneityLambdaRule {
  double base_lambda = 1.0;
  double exponent = 0.0;
  int pivot = 3;

  void validate() const;
};

Vector lambda_schedule(const HeterogeneityLambdaRule& rule, Index agents);

/// Parse failure with 1-based line (and column, 0 when not applicable).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// "<label> <index>:<value> ..." with 1-based ascending indices. Absent
/// indices are zero; the dimension is the largest index seen (or
/// `min_dimension` when larger). Blank lines and '#' comments are skipped.
Dataset parse_libsvm(std::istream& in, Index min_dimension = 0);
/// Writes nonzero entries plus the last column so the dimension survives a
/// round trip. Reals use the shortest round-trip representation.
void write_libsvm(const Dataset& data, std::ostream& out);

/// Comma separated reals; a first row with any non-numeric cell is taken as
/// a header. Negative label_column counts from the end (-1 = last).
Dataset parse_csv(std::istream& in, int label_column = -1);
/// Header x0..x{d-1},y; label in the last column.
void write_csv(const Dataset& data, std::ostream& out);

}  // namespace degroot
