#include "degroot/harness.hpp"
#include "degroot/text.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace testing;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_synthetic() {
  ExperimentConfig cfg = ExperimentConfig::synthetic_defaults();
  cfg.synthetic.test_samples = 60;
  cfg.synthetic.samples_per_agent = 80;
  cfg.replications = 2;
  cfg.seed = 99;
  cfg.threads = 2;
  return cfg;
}

ExperimentConfig small_surrogate() {
  ExperimentConfig cfg;
  cfg.source = SourceKind::Surrogate;
  cfg.surrogate.samples = 900;
  cfg.agents = 4;
  cfg.model.kind = ModelKind::Lasso;
  cfg.model.lambda = 0.05;
  cfg.partition.kind = PartitionKind::SortedLabel;
  cfg.partition.sort_fraction = 0.5;
  cfg.test.minimum = 100;
  cfg.replications = 2;
  cfg.seed = 7;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("degroot_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("neighbor and test-size rules") {
  NeighborRule n;
  CHECK(n.resolve(100) == 2);
  CHECK(n.resolve(199) == 2);
  CHECK(n.resolve(201) == 3);
  CHECK(n.resolve(1000) == 10);
  n.absolute = 7;
  CHECK(n.resolve(1000) == 7);
  TestPolicy t;
  CHECK(t.resolve(4000) == 600);
  CHECK(t.resolve(2000) == 500);
  CHECK(t.resolve(600) == 300);
}

TEST_CASE("config JSON round-trip and strictness") {
  ExperimentConfig cfg = small_surrogate();
  cfg.lambda_rule = HeterogeneityLambdaRule{0.05, 2.0, 3};
  cfg.schemes = {Scheme::DeGroot, Scheme::MAvg, Scheme::CvStatic, Scheme::TauAvg};
  cfg.jackknife = true;
  const nlohmann::json j = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(j);
  CHECK(config_to_json(back).dump() == j.dump());
  CHECK(back.schemes == cfg.schemes);
  CHECK(back.lambda_rule->exponent == 2.0);

  nlohmann::json extra = j;
  extra["trust"]["bogus"] = 1;
  CHECK_THROWS_AS(config_from_json(extra), ConfigError);
  nlohmann::json top = j;
  top["unexpected"] = true;
  CHECK_THROWS_AS(config_from_json(top), ConfigError);
  nlohmann::json wrong = j;
  wrong["replications"] = "three";
  CHECK_THROWS_AS(config_from_json(wrong), ConfigError);
  nlohmann::json none = j;
  none["schemes"] = nlohmann::json::array();
  CHECK_THROWS_AS(config_from_json(none), ConfigError);
  nlohmann::json zero = j;
  zero["replications"] = 0;
  CHECK_THROWS_AS(config_from_json(zero), ConfigError);

  // A partial document fills in defaults.
  const ExperimentConfig partial = config_from_json(nlohmann::json{{"replications", 3}});
  CHECK(partial.replications == 3);
  CHECK(partial.source == SourceKind::Synthetic);
  CHECK(parse_scheme_list("degroot,cv-adaptive") == std::vector<Scheme>{Scheme::DeGroot, Scheme::CvAdaptive});
  CHECK_THROWS_AS(parse_scheme_list("degroot,oracle"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_surrogate();
  cfg.agents.reset();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_surrogate();
  cfg.validation = ValidationPolicy::None;
  cfg.schemes = {Scheme::DeGroot, Scheme::CvStatic};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_synthetic();
  cfg.agents = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("experiment report bookkeeping") {
  ExperimentConfig cfg = small_synthetic();
  cfg.schemes = {Scheme::DeGroot, Scheme::MAvg, Scheme::CvStatic, Scheme::CvAdaptive, Scheme::TauAvg, Scheme::MseAvg};
  cfg.jackknife = true;
  const Report r = run_experiment(cfg);
  CHECK(r.points.size() == 120);
  CHECK(r.failed_points == 0);
  CHECK(r.neighbors == 5);
  CHECK(r.agents == 5);
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    const SchemeSummary& sum = r.summary[s];
    REQUIRE(sum.mse_per_replication.size() == 2);
    for (int rep = 0; rep < 2; ++rep) {
      double acc = 0.0;
      int n = 0;
      for (const auto& p : r.points) {
        if (p.replication != rep) continue;
        CHECK(p.squared_errors[s] == doctest::Approx((p.predictions[s] - p.label) * (p.predictions[s] - p.label)).epsilon(1e-15));
        acc += p.squared_errors[s];
        ++n;
      }
      CHECK(std::abs(sum.mse_per_replication[static_cast<std::size_t>(rep)] - acc / n) <= 1e-9);
    }
    const double mean = (sum.mse_per_replication[0] + sum.mse_per_replication[1]) / 2;
    CHECK(sum.mse.mean == doctest::Approx(mean).epsilon(1e-14));
    CHECK(sum.mse.sd == doctest::Approx(std::abs(sum.mse_per_replication[0] - sum.mse_per_replication[1]) / std::sqrt(2.0)).epsilon(1e-12));
  }
  const SchemeSummary* dg = r.find("degroot");
  const SchemeSummary* mavg = r.find("m-avg");
  REQUIRE(dg);
  REQUIRE(mavg);
  CHECK(dg->gain_vs_degroot->mean == 0.0);
  CHECK(mavg->gain_over_mavg->mean == 0.0);
  const double g0 = 100 * (mavg->mse_per_replication[0] - dg->mse_per_replication[0]) / mavg->mse_per_replication[0];
  const double g1 = 100 * (mavg->mse_per_replication[1] - dg->mse_per_replication[1]) / mavg->mse_per_replication[1];
  CHECK(dg->gain_over_mavg->mean == doctest::Approx((g0 + g1) / 2).epsilon(1e-12));
  for (const auto& p : r.points) {
    REQUIRE(p.xi);
    CHECK(*p.xi == doctest::Approx(p.x[0] + p.x[1]).epsilon(1e-15));
    CHECK(p.standard_error);
    CHECK(std::abs(std::accumulate(p.weights.begin(), p.weights.end(), 0.0) - 1.0) < 1e-9);
    double dgp = 0.0;
    for (std::size_t k = 0; k < p.weights.size(); ++k) dgp += p.weights[k] * p.agent_predictions[k];
    CHECK(p.predictions[0] == doctest::Approx(dgp).epsilon(1e-12));
  }
}

TEST_CASE("experiments are deterministic and schemes are isolated") {
  ExperimentConfig cfg = small_synthetic();
  const Report a = run_experiment(cfg);
  CHECK(report_json_text(a) == report_json_text(run_experiment(cfg)));
  // The thread count is echoed in the config but must not change any result.
  cfg.threads = 1;
  nlohmann::json serial = report_to_json(run_experiment(cfg));
  nlohmann::json parallel = report_to_json(a);
  serial.erase("config");
  parallel.erase("config");
  CHECK(serial.dump() == parallel.dump());

  ExperimentConfig more = small_synthetic();
  more.schemes = {Scheme::CvAdaptive, Scheme::MseAvg, Scheme::DeGroot, Scheme::CvStatic};
  more.jackknife = true;
  const Report c = run_experiment(more);
  ExperimentConfig fewer = small_synthetic();
  fewer.schemes = {Scheme::DeGroot};
  fewer.validation = ValidationPolicy::PartitionSize;
  const Report d = run_experiment(fewer);
  REQUIRE(c.points.size() == a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].predictions[0] == c.points[i].predictions[2]);
    CHECK(a.points[i].predictions[0] == d.points[i].predictions[0]);
  }

  ExperimentConfig pooled = small_surrogate();
  pooled.schemes = {Scheme::DeGroot};
  const Report e = run_experiment(pooled);
  pooled.schemes = {Scheme::DeGroot, Scheme::CvStatic, Scheme::CvAdaptive};
  pooled.jackknife = true;
  const Report f = run_experiment(pooled);
  REQUIRE(e.points.size() == f.points.size());
  for (std::size_t i = 0; i < e.points.size(); ++i) CHECK(e.points[i].predictions[0] == f.points[i].predictions[0]);

  ExperimentConfig other = small_synthetic();
  other.seed = 100;
  CHECK(run_experiment(other).summary[0].mse.mean != a.summary[0].mse.mean);
}

TEST_CASE("pooled sources split test, validation and training data") {
  const ExperimentConfig cfg = small_surrogate();
  const Report r = run_experiment(cfg);
  // n = 900: test = max(135, 100); validation = (900 - 135) / 5.
  CHECK(r.points.size() == 2 * 135);
  CHECK(r.data_source == "surrogate");
  CHECK(r.neighbors == 2);
  CHECK(r.agent_mse.size() == 2);
  CHECK(r.agent_mse[0].size() == 4);
  CHECK(r.best_single_mse.mean > 0.0);
  CHECK_FALSE(r.points[0].xi);
}

TEST_CASE("report JSON and CSV emission") {
  ExperimentConfig cfg = small_synthetic();
  cfg.schemes = {Scheme::DeGroot, Scheme::MAvg, Scheme::TauAvg};
  cfg.jackknife = true;
  const Report r = run_experiment(cfg);

  const std::string text = report_json_text(r);
  const Report back = report_from_json(nlohmann::json::parse(text));
  CHECK(report_json_text(back) == text);

  const fs::path dir = scratch("emit");
  const auto json_files = emit_report(r, ReportFormat::Json, dir);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "report_timing.json"));
  CHECK(slurp(dir / "report.json") == text);
  CHECK(json_files.size() == 2);

  emit_report(r, ReportFormat::Csv, dir);
  std::istringstream points(slurp(dir / "report_points.csv"));
  std::string line;
  std::getline(points, line);
  const auto header = split(line);
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  REQUIRE(col("degroot_sqerr") < header.size());
  std::vector<double> sum(3, 0.0);
  std::vector<int> count(3, 0);
  int rows = 0;
  while (std::getline(points, line)) {
    const auto cells = split(line);
    CHECK(cells.size() == header.size());
    const int rep = std::stoi(cells[col("replication")]);
    sum[0] += parse_real(cells[col("degroot_sqerr")]).value();
    sum[rep + 1] += parse_real(cells[col("tau-avg_sqerr")]).value();
    ++count[rep + 1];
    ++rows;
  }
  CHECK(rows == 120);
  const SchemeSummary* dg = r.find("degroot");
  CHECK(std::abs(sum[0] / rows - dg->mse.mean) <= 1e-9);
  const SchemeSummary* tau = r.find("tau-avg");
  for (int rep = 0; rep < 2; ++rep) {
    CHECK(std::abs(sum[static_cast<std::size_t>(rep + 1)] / count[static_cast<std::size_t>(rep + 1)] -
                   tau->mse_per_replication[static_cast<std::size_t>(rep)]) <= 1e-9);
  }

  std::istringstream summary(slurp(dir / "report_summary.csv"));
  int summary_rows = -1;
  while (std::getline(summary, line)) ++summary_rows;
  CHECK(summary_rows == 3);
}

TEST_CASE("empty reports give header-only CSV") {
  Report r;
  std::ostringstream points, summary;
  write_points_csv(r, points);
  write_summary_csv(r, summary);
  const std::string p = points.str(), q = summary.str();
  CHECK(std::count(p.begin(), p.end(), '\n') == 1);
  CHECK(std::count(q.begin(), q.end(), '\n') == 1);
  const fs::path dir = scratch("blocked");
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS(emit_report(r, ReportFormat::Json, dir / "file" / "sub"));
}

TEST_CASE("file sources") {
  const fs::path dir = scratch("files");
  SurrogateConfig sc;
  sc.samples = 700;
  const Dataset data = generate_surrogate(sc, 3);
  {
    std::ofstream out(dir / "data.libsvm");
    write_libsvm(data, out);
    std::ofstream csv(dir / "data.csv");
    write_csv(data, csv);
  }
  ExperimentConfig cfg = small_surrogate();
  cfg.source = SourceKind::File;
  cfg.file.path = (dir / "data.libsvm").string();
  const Report a = run_experiment(cfg);
  cfg.file.path = (dir / "data.csv").string();
  cfg.file.format = "csv";
  const Report b = run_experiment(cfg);
  CHECK(a.summary[0].mse.mean == b.summary[0].mse.mean);
  CHECK(a.data_source == "file:" + (dir / "data.libsvm").string());

  cfg.file.path = (dir / "missing.csv").string();
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "1,2\n3\n";
  }
  cfg.file.path = (dir / "bad.csv").string();
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.agents = 600;
  cfg.file.path = (dir / "data.csv").string();
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("sweeps") {
  CHECK(parse_sweep_axis("p") == SweepAxis::SortFraction);
  CHECK(parse_sweep_axis("sigma2") == SweepAxis::CovScale);
  CHECK(parse_sweep_axis("agent_count") == SweepAxis::AgentCount);
  CHECK_THROWS_AS(parse_sweep_axis("r"), ConfigError);

  const ExperimentConfig syn = small_synthetic();
  CHECK_THROWS_AS(apply_axis(syn, SweepAxis::SortFraction, 0.5), ConfigError);
  CHECK_THROWS_AS(apply_axis(syn, SweepAxis::AgentCount, 3), ConfigError);
  CHECK_THROWS_AS(apply_axis(syn, SweepAxis::Neighbors, 2.5), ConfigError);
  CHECK(apply_axis(syn, SweepAxis::CovScale, 4.0).synthetic.cov_scale == 4.0);
  CHECK(*apply_axis(syn, SweepAxis::Neighbors, 9).neighbors.absolute == 9);

  const ExperimentConfig pooled = small_surrogate();
  CHECK_THROWS_AS(apply_axis(pooled, SweepAxis::CovScale, 2.0), ConfigError);
  CHECK_THROWS_AS(apply_axis(pooled, SweepAxis::SortFraction, 1.5), ConfigError);
  const ExperimentConfig q = apply_axis(pooled, SweepAxis::LambdaExponent, 2.0);
  REQUIRE(q.lambda_rule);
  CHECK(q.lambda_rule->base_lambda == 0.05);
  CHECK(q.lambda_rule->exponent == 2.0);

  const std::vector<double> values{0.0, 1.0};
  const SweepResult s = run_sweep(pooled, SweepAxis::SortFraction, values);
  REQUIRE(s.reports.size() == 2);
  CHECK(s.reports[1].config["partition"]["sort_fraction"] == 1.0);
  std::ostringstream csv;
  write_sweep_summary_csv(s, csv);
  const std::string table = csv.str();
  CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 2 * 2);
  CHECK(sweep_summary_json(s)["rows"].size() == 2);
  const fs::path dir = scratch("sweep");
  emit_sweep(s, ReportFormat::Json, dir);
  CHECK(fs::exists(dir / "sweep_0.json"));
  CHECK(fs::exists(dir / "sweep_1.json"));
  CHECK(fs::exists(dir / "sweep_summary.csv"));
  CHECK(fs::exists(dir / "sweep_summary.json"));
  CHECK_THROWS_AS(run_sweep(pooled, SweepAxis::SortFraction, {}), ConfigError);
}
