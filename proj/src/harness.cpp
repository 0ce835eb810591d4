#include "degroot/harness.hpp"

#include "degroot/baselines.hpp"
#include "degroot/jackknife.hpp"
#include "degroot/rng.hpp"
#include "degroot/text.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace degroot {

using nlohmann::json;

Dataset load_dataset(const FileSource& source) {
  std::ifstream in(source.path);
  if (!in) throw ConfigError("cannot open dataset '" + source.path + "'");
  try {
    if (source.format == "csv") return parse_csv(in, source.label_column);
    return parse_libsvm(in);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read dataset '" + source.path + "': " + e.what());
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicationData {
  std::vector<Dataset> agents;
  Dataset test;
  std::optional<Dataset> validation;
};

ReplicationData synthetic_replication(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  SyntheticConfig syn = cfg.synthetic;
  syn.seed = derive_seed(rep_seed, "synthetic");
  SyntheticTask task = generate_synthetic(syn);
  // Always drawn so that the stream layout is independent of the schemes.
  Dataset validation = sample_synthetic_mixture(syn, syn.samples_per_agent, true,
                                                derive_seed(rep_seed, "validation"));
  ReplicationData out{std::move(task.agents), std::move(task.test), std::nullopt};
  if (cfg.uses_validation()) out.validation = std::move(validation);
  return out;
}

ReplicationData pooled_replication(const ExperimentConfig& cfg, const Dataset& pool,
                                   std::uint64_t rep_seed) {
  const Index n = pool.size();
  const Index k = cfg.agent_count();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(derive_seed(rep_seed, "split"));
  rng.shuffle(order);

  const Index n_test = cfg.test.resolve(n);
  const Index remaining = n - n_test;
  const Index n_val = cfg.uses_validation() ? remaining / (k + 1) : 0;
  if (remaining - n_val < k || (cfg.uses_validation() && n_val < 1)) {
    throw ConfigError("dataset of " + std::to_string(n) + " samples is too small for " +
                      std::to_string(k) + " agents");
  }
  auto slice = [&](Index from, Index count) {
    return pool.subset(std::span<const Index>(order.data() + from, static_cast<std::size_t>(count)));
  };
  std::optional<Dataset> validation;
  if (n_val > 0) validation = slice(0, n_val);
  Dataset test = slice(n_val, n_test);
  Dataset train = slice(n_val + n_test, remaining - n_val);

  PartitionScheme scheme = cfg.partition;
  scheme.seed = derive_seed(rep_seed, "partition");
  return {partition(train, k, scheme), std::move(test), std::move(validation)};
}

bool has(const std::vector<Scheme>& schemes, Scheme s) {
  return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

struct PointContext {
  const ExperimentConfig& cfg;
  const Ensemble& ensemble;
  const std::vector<ModelPtr>& models;
  const std::optional<Dataset>& validation;
  const std::optional<WeightVector>& static_weights;
  TrustConfig trust;
};

void evaluate_point(const PointContext& ctx, const Dataset& test, Index i, PointRecord& rec) {
  const QueryPoint x(test.row(i));
  rec.x.assign(x.coordinates().begin(), x.coordinates().end());
  rec.label = test.label(i);
  if (ctx.cfg.source == SourceKind::Synthetic) {
    double xi = 0.0;
    for (std::size_t j = 0; j < rec.x.size(); ++j) xi += ctx.cfg.synthetic.alpha[j] * rec.x[j];
    rec.xi = xi;
  }
  const std::size_t n_schemes = ctx.cfg.schemes.size();
  rec.predictions.assign(n_schemes, kNaN);
  rec.squared_errors.assign(n_schemes, kNaN);
  try {
    const Vector preds = ctx.ensemble.predictions(x);
    rec.agent_predictions.assign(preds.data(), preds.data() + preds.size());
    const TrustBuild built = build_trust_matrix(ctx.ensemble, x, ctx.trust);
    const ConsensusResult consensus = consensus_predict(preds, built.trust, ctx.cfg.consensus);
    rec.weights.assign(consensus.weights.data(), consensus.weights.data() + consensus.weights.size());
    rec.consensus_rounds = consensus.rounds_run;
    rec.consensus_converged = consensus.converged;

    std::vector<double> out(n_schemes);
    for (std::size_t s = 0; s < n_schemes; ++s) {
      switch (ctx.cfg.schemes[s]) {
        case Scheme::DeGroot: out[s] = consensus.prediction; break;
        case Scheme::MAvg: out[s] = mean_average(preds); break;
        case Scheme::CvStatic: out[s] = ctx.static_weights->combine(preds); break;
        case Scheme::CvAdaptive:
          out[s] = cv_adaptive_weights(ctx.models, *ctx.validation, x, ctx.trust.neighbors,
                                       ctx.cfg.mse_floor, ctx.trust.distance)
                       .combine(preds);
          break;
        case Scheme::TauAvg: out[s] = tau_average_weights(built.trust).combine(preds); break;
        case Scheme::MseAvg:
          out[s] = mse_average_weights(built.scores, ctx.cfg.mse_floor).combine(preds);
          break;
      }
    }
    std::optional<double> se;
    if (ctx.cfg.jackknife) se = jackknife_se(preds, built.trust, ctx.cfg.consensus).standard_error;

    for (std::size_t s = 0; s < n_schemes; ++s) {
      rec.predictions[s] = out[s];
      rec.squared_errors[s] = (out[s] - rec.label) * (out[s] - rec.label);
    }
    rec.standard_error = se;
  } catch (const std::exception& e) {
    rec.predictions.assign(n_schemes, kNaN);
    rec.squared_errors.assign(n_schemes, kNaN);
    rec.error = e.what();
  }
}

template <typename Fn>
void parallel_for(Index count, int threads, Fn&& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp<int>(workers, 1, static_cast<int>(std::max<Index>(count, 1)));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = w; i < count; i += workers) fn(i);
    });
  }
}

struct ReplicationOutcome {
  std::vector<PointRecord> points;
  std::vector<double> scheme_mse;
  std::vector<double> agent_mse;
  Index neighbors = 0;
  int failed = 0;
};

ReplicationOutcome run_replication(const ExperimentConfig& cfg, const Dataset* pool, int r,
                                   PhaseTimings& timings) {
  const std::uint64_t rep_seed = derive_seed(cfg.seed, "replication", static_cast<std::uint64_t>(r));
  auto t0 = Clock::now();
  ReplicationData data = cfg.source == SourceKind::Synthetic
                             ? synthetic_replication(cfg, rep_seed)
                             : pooled_replication(cfg, *pool, rep_seed);
  timings.data_seconds += seconds_since(t0);

  t0 = Clock::now();
  const Index k = static_cast<Index>(data.agents.size());
  const Vector lambdas = cfg.lambda_rule ? lambda_schedule(*cfg.lambda_rule, k)
                                         : Vector::Constant(k, cfg.model.lambda);
  std::vector<Agent> agents;
  std::vector<ModelPtr> models;
  Index smallest = std::numeric_limits<Index>::max();
  for (Index a = 0; a < k; ++a) {
    ModelSpec spec = cfg.model;
    spec.lambda = lambdas[a];
    auto dataset = std::make_shared<const Dataset>(std::move(data.agents[static_cast<std::size_t>(a)]));
    models.push_back(fit_model(spec, *dataset));
    smallest = std::min(smallest, dataset->size());
    agents.push_back({std::move(dataset), models.back()});
  }
  const Ensemble ensemble(std::move(agents));
  std::optional<WeightVector> static_weights;
  if (has(cfg.schemes, Scheme::CvStatic)) {
    static_weights = cv_static_weights(models, *data.validation, cfg.mse_floor);
  }
  timings.fit_seconds += seconds_since(t0);

  t0 = Clock::now();
  PointContext ctx{cfg, ensemble, models, data.validation, static_weights, {}};
  ctx.trust.neighbors = cfg.neighbors.resolve(smallest);
  ctx.trust.mse_floor = cfg.mse_floor;

  ReplicationOutcome out;
  out.neighbors = ctx.trust.neighbors;
  const Index n_test = data.test.size();
  out.points.resize(static_cast<std::size_t>(n_test));
  parallel_for(n_test, cfg.threads, [&](Index i) {
    PointRecord& rec = out.points[static_cast<std::size_t>(i)];
    rec.replication = r;
    rec.index = i;
    evaluate_point(ctx, data.test, i, rec);
  });

  const std::size_t n_schemes = cfg.schemes.size();
  std::vector<double> scheme_sum(n_schemes, 0.0);
  std::vector<double> agent_sum(static_cast<std::size_t>(k), 0.0);
  Index ok = 0;
  for (const auto& p : out.points) {
    if (p.error) {
      ++out.failed;
      continue;
    }
    ++ok;
    for (std::size_t s = 0; s < n_schemes; ++s) scheme_sum[s] += p.squared_errors[s];
    for (std::size_t a = 0; a < agent_sum.size(); ++a) {
      const double e = p.agent_predictions[a] - p.label;
      agent_sum[a] += e * e;
    }
  }
  if (ok == 0) throw NumericalError("every test point failed in replication " + std::to_string(r));
  for (double v : scheme_sum) out.scheme_mse.push_back(v / static_cast<double>(ok));
  for (double v : agent_sum) out.agent_mse.push_back(v / static_cast<double>(ok));
  timings.evaluate_seconds += seconds_since(t0);
  return out;
}

std::string describe_source(const ExperimentConfig& cfg) {
  switch (cfg.source) {
    case SourceKind::Synthetic: return "synthetic";
    case SourceKind::Surrogate: return "surrogate";
    case SourceKind::File: return "file:" + cfg.file.path;
  }
  return "unknown";
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  Report report;
  report.config = config_to_json(cfg);
  report.seed = cfg.seed;
  report.data_source = describe_source(cfg);
  report.agents = cfg.agent_count();
  for (Scheme s : cfg.schemes) report.schemes.emplace_back(to_string(s));

  std::optional<Dataset> pool;
  auto t0 = Clock::now();
  if (cfg.source == SourceKind::File) pool = load_dataset(cfg.file);
  if (cfg.source == SourceKind::Surrogate) pool = generate_surrogate(cfg.surrogate, derive_seed(cfg.seed, "surrogate"));
  report.timings.data_seconds += seconds_since(t0);

  const std::size_t n_schemes = cfg.schemes.size();
  std::vector<std::vector<double>> mse_by_scheme(n_schemes);
  std::vector<double> best_single;
  for (int r = 0; r < cfg.replications; ++r) {
    ReplicationOutcome outcome;
    try {
      outcome = run_replication(cfg, pool ? &*pool : nullptr, r, report.timings);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      report.aborted.emplace_back(r, e.what());
      continue;
    }
    report.neighbors = outcome.neighbors;
    report.failed_points += outcome.failed;
    for (std::size_t s = 0; s < n_schemes; ++s) mse_by_scheme[s].push_back(outcome.scheme_mse[s]);
    best_single.push_back(*std::min_element(outcome.agent_mse.begin(), outcome.agent_mse.end()));
    report.agent_mse.push_back(std::move(outcome.agent_mse));
    std::move(outcome.points.begin(), outcome.points.end(), std::back_inserter(report.points));
  }
  if (static_cast<int>(report.aborted.size()) == cfg.replications) {
    throw NumericalError("all replications aborted; first error: " + report.aborted.front().second);
  }

  const auto index_of = [&](Scheme s) -> std::optional<std::size_t> {
    const auto it = std::find(cfg.schemes.begin(), cfg.schemes.end(), s);
    if (it == cfg.schemes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cfg.schemes.begin());
  };
  const auto degroot = index_of(Scheme::DeGroot);
  const auto mavg = index_of(Scheme::MAvg);
  auto gains = [&](std::size_t reference, std::size_t s) {
    std::vector<double> g;
    for (std::size_t r = 0; r < mse_by_scheme[s].size(); ++r) {
      const double ref = mse_by_scheme[reference][r];
      g.push_back(100.0 * (ref - mse_by_scheme[s][r]) / ref);
    }
    return mean_sd(g);
  };
  for (std::size_t s = 0; s < n_schemes; ++s) {
    SchemeSummary summary;
    summary.scheme = report.schemes[s];
    summary.mse_per_replication = mse_by_scheme[s];
    summary.mse = mean_sd(mse_by_scheme[s]);
    if (degroot) summary.gain_vs_degroot = gains(*degroot, s);
    if (mavg) summary.gain_over_mavg = gains(*mavg, s);
    report.summary.push_back(std::move(summary));
  }
  report.best_single_mse = mean_sd(best_single);
  report.timings.total_seconds = seconds_since(start);
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SortFraction: return "sort_fraction";
    case SweepAxis::LambdaExponent: return "lambda_exponent";
    case SweepAxis::CovScale: return "cov_scale";
    case SweepAxis::Neighbors: return "neighbors";
    case SweepAxis::AgentCount: return "agent_count";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "p" || name == "sort_fraction") return SweepAxis::SortFraction;
  if (name == "q" || name == "lambda_exponent") return SweepAxis::LambdaExponent;
  if (name == "sigma2" || name == "cov_scale") return SweepAxis::CovScale;
  if (name == "N" || name == "neighbors") return SweepAxis::Neighbors;
  if (name == "K" || name == "agent_count") return SweepAxis::AgentCount;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

ExperimentConfig apply_axis(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig out = cfg;
  const bool pooled = cfg.source != SourceKind::Synthetic;
  auto as_count = [&](const char* what) {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw ConfigError(std::string(what) + " must be a positive integer");
    }
    return static_cast<Index>(value);
  };
  switch (axis) {
    case SweepAxis::SortFraction:
      if (!pooled) throw ConfigError("sort_fraction applies to file and surrogate sources only");
      if (out.partition.kind == PartitionKind::Random) {
        throw ConfigError("sort_fraction needs a sorted-label or sorted-feature partition");
      }
      out.partition.sort_fraction = value;
      break;
    case SweepAxis::LambdaExponent:
      if (!out.lambda_rule) {
        if (!(out.model.lambda > 0.0)) throw ConfigError("lambda_exponent needs a lambda_rule or lambda > 0");
        out.lambda_rule = HeterogeneityLambdaRule{out.model.lambda, 0.0, 3};
      }
      out.lambda_rule->exponent = value;
      break;
    case SweepAxis::CovScale:
      if (pooled) throw ConfigError("cov_scale applies to the synthetic source only");
      out.synthetic.cov_scale = value;
      break;
    case SweepAxis::Neighbors:
      out.neighbors.absolute = as_count("neighbors");
      break;
    case SweepAxis::AgentCount:
      if (!pooled) throw ConfigError("agent_count applies to file and surrogate sources only");
      out.agents = as_count("agent_count");
      break;
  }
  out.validate();
  return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg, SweepAxis axis, std::span<const double> values) {
  if (values.empty()) throw ConfigError("a sweep needs at least one value");
  SweepResult result;
  result.axis = axis;
  result.values.assign(values.begin(), values.end());
  std::vector<ExperimentConfig> configs;
  for (double v : values) configs.push_back(apply_axis(cfg, axis, v));
  for (const auto& c : configs) result.reports.push_back(run_experiment(c));
  return result;
}

namespace {

std::string opt_cell(const std::optional<MeanSd>& m, bool sd) {
  if (!m) return {};
  const double v = sd ? m->sd : m->mean;
  return std::isnan(v) ? std::string() : format_real(v);
}

}  // namespace

void write_sweep_summary_csv(const SweepResult& sweep, std::ostream& out) {
  out << to_string(sweep.axis)
      << ",scheme,mse_mean,mse_sd,gain_over_mavg_mean,gain_over_mavg_sd,"
         "gain_vs_degroot_mean,gain_vs_degroot_sd\n";
  for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
    for (const auto& s : sweep.reports[i].summary) {
      out << format_real(sweep.values[i]) << ',' << s.scheme << ',' << format_real(s.mse.mean) << ','
          << format_real(s.mse.sd) << ',' << opt_cell(s.gain_over_mavg, false) << ','
          << opt_cell(s.gain_over_mavg, true) << ',' << opt_cell(s.gain_vs_degroot, false) << ','
          << opt_cell(s.gain_vs_degroot, true) << '\n';
    }
  }
}

json sweep_summary_json(const SweepResult& sweep) {
  json rows = json::array();
  for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
    const Report& r = sweep.reports[i];
    json schemes = json::object();
    for (const auto& s : r.summary) {
      json entry = {{"mse_mean", s.mse.mean}, {"mse_sd", s.mse.sd}};
      if (s.gain_over_mavg) {
        entry["gain_over_mavg_mean"] = s.gain_over_mavg->mean;
        entry["gain_over_mavg_sd"] = s.gain_over_mavg->sd;
      }
      schemes[s.scheme] = std::move(entry);
    }
    rows.push_back({{"value", sweep.values[i]},
                    {"schemes", std::move(schemes)},
                    {"best_single_mse_mean", r.best_single_mse.mean}});
  }
  return {{"axis", std::string(to_string(sweep.axis))}, {"rows", std::move(rows)}};
}

std::vector<std::filesystem::path> emit_sweep(const SweepResult& sweep, ReportFormat format,
                                              const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
    auto paths = emit_report(sweep.reports[i], format, dir, "sweep_" + std::to_string(i));
    written.insert(written.end(), paths.begin(), paths.end());
  }
  std::ostringstream csv;
  write_sweep_summary_csv(sweep, csv);
  const std::pair<std::filesystem::path, std::string> files[] = {
      {dir / "sweep_summary.csv", csv.str()},
      {dir / "sweep_summary.json", sweep_summary_json(sweep).dump(2) + "\n"}};
  for (const auto& [path, text] : files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
    written.push_back(path);
  }
  return written;
}

}  // namespace degroot
