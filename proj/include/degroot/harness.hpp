#pragma once

#include "degroot/report.hpp"

namespace degroot {

/// Reads a LIBSVM or CSV file; unreadable or malformed files raise ConfigError.
Dataset load_dataset(const FileSource& source);

/// Runs every replication of the experiment.
///
/// Seeds: replication r draws from derive_seed(seed, "replication", r), split
/// into the named streams "synthetic", "validation", "split" and "partition".
/// The surrogate pool comes from derive_seed(seed, "surrogate") and is shared
/// by all replications. Every stream is consumed whether or not the scheme
/// that needs it is selected, so toggling baselines or the jackknife never
/// changes the DeGroot predictions.
///
/// Pooled sources are shuffled, then cut into validation (one partition's
/// size, under the partition-size policy), test and training data, in that
/// order; training data is partitioned across the agents.
///
/// Per-point failures are recorded in the report. A replication whose setup
/// fails is listed in Report::aborted; if every replication aborts a
/// NumericalError is thrown.
Report run_experiment(const ExperimentConfig& cfg);

enum class SweepAxis { SortFraction, LambdaExponent, CovScale, Neighbors, AgentCount };

std::string_view to_string(SweepAxis axis);
/// Accepts "p", "q", "sigma2", "N", "K" or the long names "sort_fraction",
/// "lambda_exponent", "cov_scale", "neighbors", "agent_count".
SweepAxis parse_sweep_axis(std::string_view name);

/// Copy of cfg with the axis set to value; ConfigError when the axis does not
/// apply to the data source.
ExperimentConfig apply_axis(const ExperimentConfig& cfg, SweepAxis axis, double value);

struct SweepResult {
  SweepAxis axis = SweepAxis::SortFraction;
  std::vector<double> values;
  std::vector<Report> reports;
};

/// One report per value, all with the same master seed.
SweepResult run_sweep(const ExperimentConfig& cfg, SweepAxis axis, std::span<const double> values);

/// One row per (value, scheme): MSE mean/sd and gain over M-avg.
void write_sweep_summary_csv(const SweepResult& sweep, std::ostream& out);
nlohmann::json sweep_summary_json(const SweepResult& sweep);

/// Emits every report as sweep_<i> plus sweep_summary.{csv,json}.
std::vector<std::filesystem::path> emit_sweep(const SweepResult& sweep, ReportFormat format,
                                              const std::filesystem::path& dir);

}  // namespace degroot
