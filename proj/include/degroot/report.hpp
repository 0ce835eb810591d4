#pragma once

#include "degroot/config.hpp"

#include <filesystem>

namespace degroot {

/// One evaluated test point of one replication.
struct PointRecord {
  int replication = 0;
  Index index = 0;
  std::vector<double> x;
  /// alpha . x for synthetic runs.
  std::optional<double> xi;
  double label = 0.0;
  /// Aligned with Report::schemes; NaN when the point failed.
  std::vector<double> predictions;
  std::vector<double> squared_errors;
  /// f_k(x) for every agent.
  std::vector<double> agent_predictions;
  /// DeGroot consensus weights.
  std::vector<double> weights;
  int consensus_rounds = 0;
  bool consensus_converged = false;
  std::optional<double> standard_error;
  std::optional<std::string> error;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and sample standard deviation (0 for a single value).
MeanSd mean_sd(std::span<const double> values);

struct SchemeSummary {
  std::string scheme;
  std::vector<double> mse_per_replication;
  MeanSd mse;
  /// 100 (MSE_degroot - MSE_scheme) / MSE_degroot; positive means lower
  /// MSE than DeGroot. Present when DeGroot was evaluated.
  std::optional<MeanSd> gain_vs_degroot;
  /// 100 (MSE_m-avg - MSE_scheme) / MSE_m-avg; positive means lower MSE than
  /// M-avg. Present when M-avg was evaluated.
  std::optional<MeanSd> gain_over_mavg;
};

struct PhaseTimings {
  double data_seconds = 0.0;
  double fit_seconds = 0.0;
  double evaluate_seconds = 0.0;
  double total_seconds = 0.0;
};

struct Report {
  nlohmann::json config;
  std::uint64_t seed = 0;
  /// "synthetic", "surrogate" or "file:<path>".
  std::string data_source;
  Index agents = 0;
  Index neighbors = 0;
  std::vector<std::string> schemes;
  std::vector<SchemeSummary> summary;
  /// Test MSE of each individual agent model, per replication.
  std::vector<std::vector<double>> agent_mse;
  /// Oracle selection: lowest individual test MSE per replication.
  MeanSd best_single_mse;
  std::vector<PointRecord> points;
  int failed_points = 0;
  /// Replications that could not be run at all, with the reason.
  std::vector<std::pair<int, std::string>> aborted;
  /// Wall clock; not part of the JSON document, which must be reproducible.
  PhaseTimings timings;

  const SchemeSummary* find(std::string_view scheme) const;
};

nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
/// Pretty-printed JSON text, newline terminated.
std::string report_json_text(const Report& report);

enum class ReportFormat { Json, Csv };
ReportFormat parse_report_format(std::string_view name);

void write_points_csv(const Report& report, std::ostream& out);
void write_summary_csv(const Report& report, std::ostream& out);

/// Writes <dir>/<name>.json, or <dir>/<name>_points.csv and
/// <dir>/<name>_summary.csv, plus <dir>/<name>_timing.json in both cases.
/// Returns the written paths. IO failures throw std::runtime_error naming the path.
std::vector<std::filesystem::path> emit_report(const Report& report, ReportFormat format,
                                               const std::filesystem::path& dir,
                                               const std::string& name = "report");

}  // namespace degroot
