// Command-line front end: run, sweep and gen.

#include "degroot/harness.hpp"
#include "degroot/rng.hpp"
#include "degroot/text.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace degroot;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "json";
  std::optional<std::string> schemes;
  bool jackknife = false;
  std::optional<Index> agents;
  std::optional<Index> neighbors;
  std::optional<double> sort_fraction;
  std::optional<double> lambda_exponent;
  std::optional<double> cov_scale;
  std::optional<int> replications;
  std::optional<int> threads;
};

void add_common(CLI::App* app, CommonOptions& o, bool experiment) {
  app->add_option("--config", o.config_path, "JSON config file");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--out", o.out, "output directory");
  if (!experiment) return;
  app->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--schemes", o.schemes, "comma list of degroot,m-avg,cv-static,cv-adaptive,tau-avg,mse-avg");
  app->add_flag("--jackknife", o.jackknife, "compute jackknife standard errors");
  app->add_option("-K,--agents", o.agents, "number of agents (pooled sources)");
  app->add_option("-N,--neighbors", o.neighbors, "absolute neighbor count");
  app->add_option("-p,--sort-fraction", o.sort_fraction, "sorted fraction for partitioning");
  app->add_option("-q,--lambda-exponent", o.lambda_exponent, "exponent of the lambda schedule");
  app->add_option("--sigma2,--cov-scale", o.cov_scale, "synthetic covariance scale");
  app->add_option("--replications", o.replications, "number of replications");
  app->add_option("--threads", o.threads, "evaluation threads (0 = all cores)");
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig::synthetic_defaults()
                                               : load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  if (o.schemes) cfg.schemes = parse_scheme_list(*o.schemes);
  if (o.jackknife) cfg.jackknife = true;
  if (o.replications) cfg.replications = *o.replications;
  if (o.threads) cfg.threads = *o.threads;
  if (o.agents) cfg = apply_axis(cfg, SweepAxis::AgentCount, static_cast<double>(*o.agents));
  if (o.neighbors) cfg = apply_axis(cfg, SweepAxis::Neighbors, static_cast<double>(*o.neighbors));
  if (o.sort_fraction) cfg = apply_axis(cfg, SweepAxis::SortFraction, *o.sort_fraction);
  if (o.lambda_exponent) cfg = apply_axis(cfg, SweepAxis::LambdaExponent, *o.lambda_exponent);
  if (o.cov_scale) cfg = apply_axis(cfg, SweepAxis::CovScale, *o.cov_scale);
  cfg.validate();
  return cfg;
}

void print_summary(const Report& report) {
  std::cout << "source " << report.data_source << ", K=" << report.agents
            << ", N=" << report.neighbors << '\n';
  for (const auto& s : report.summary) {
    std::cout << "  " << s.scheme << ": mse " << format_real(s.mse.mean) << " (sd "
              << format_real(s.mse.sd) << ")";
    if (s.gain_over_mavg) std::cout << ", gain over m-avg " << format_real(s.gain_over_mavg->mean) << "%";
    std::cout << '\n';
  }
  if (report.failed_points > 0) std::cout << "  failed points: " << report.failed_points << '\n';
  for (const auto& [r, why] : report.aborted) std::cout << "  replication " << r << " aborted: " << why << '\n';
}

void write_dataset(const Dataset& data, const fs::path& path, bool csv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  if (csv) write_csv(data, out);
  else write_libsvm(data, out);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
  std::cout << path.string() << '\n';
}

void generate_files(const ExperimentConfig& cfg, const std::string& format) {
  const bool csv = format == "csv";
  const std::string ext = csv ? ".csv" : ".libsvm";
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  if (cfg.source == SourceKind::Synthetic) {
    SyntheticConfig syn = cfg.synthetic;
    syn.seed = derive_seed(cfg.seed, "synthetic");
    const SyntheticTask task = generate_synthetic(syn);
    for (std::size_t k = 0; k < task.agents.size(); ++k) {
      write_dataset(task.agents[k], dir / ("agent" + std::to_string(k) + ext), csv);
    }
    write_dataset(task.test, dir / ("test" + ext), csv);
  } else if (cfg.source == SourceKind::Surrogate) {
    write_dataset(generate_surrogate(cfg.surrogate, derive_seed(cfg.seed, "surrogate")),
                  dir / ("surrogate" + ext), csv);
  } else {
    throw ConfigError("gen needs a synthetic or surrogate source");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DeGroot consensus aggregation of ensemble regressors"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run, run_opts, true);

  CommonOptions sweep_opts;
  std::string axis_name;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "run one experiment per axis value");
  add_common(sweep, sweep_opts, true);
  sweep->add_option("--axis", axis_name, "p, q, sigma2, N or K")->required();
  sweep->add_option("--values", values, "axis values")->required()->delimiter(',');

  CommonOptions gen_opts;
  std::string gen_format = "libsvm";
  auto* gen = app.add_subcommand("gen", "write the synthetic or surrogate data to files");
  add_common(gen, gen_opts, false);
  gen->add_option("--format", gen_format, "file format")->check(CLI::IsMember({"libsvm", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const ExperimentConfig cfg = build_config(run_opts);
      const Report report = run_experiment(cfg);
      fs::create_directories(cfg.output_dir);
      for (const auto& p : emit_report(report, parse_report_format(run_opts.format), cfg.output_dir)) {
        std::cout << p.string() << '\n';
      }
      print_summary(report);
    } else if (sweep->parsed()) {
      const ExperimentConfig cfg = build_config(sweep_opts);
      const SweepAxis axis = parse_sweep_axis(axis_name);
      const SweepResult result = run_sweep(cfg, axis, values);
      fs::create_directories(cfg.output_dir);
      emit_sweep(result, parse_report_format(sweep_opts.format), cfg.output_dir);
      write_sweep_summary_csv(result, std::cout);
    } else if (gen->parsed()) {
      generate_files(build_config(gen_opts), gen_format);
    }
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
