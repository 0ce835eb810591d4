#include "degroot/report.hpp"

#include "degroot/text.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace degroot {

using nlohmann::json;

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

const SchemeSummary* Report::find(std::string_view scheme) const {
  for (const auto& s : summary) {
    if (s.scheme == scheme) return &s;
  }
  return nullptr;
}

namespace {

// NaN travels as null.
json real(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json reals(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(real(x));
  return out;
}

std::vector<double> reals_from(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(real_from(x));
  return out;
}

json mean_sd_json(const MeanSd& m) { return {{"mean", real(m.mean)}, {"sd", real(m.sd)}}; }
MeanSd mean_sd_from(const json& j) { return {real_from(j.at("mean")), real_from(j.at("sd"))}; }

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json report_to_json(const Report& r) {
  json j;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["data_source"] = r.data_source;
  j["agents"] = r.agents;
  j["neighbors"] = r.neighbors;
  j["schemes"] = r.schemes;
  json summary = json::array();
  for (const auto& s : r.summary) {
    summary.push_back({{"scheme", s.scheme},
                       {"mse_per_replication", reals(s.mse_per_replication)},
                       {"mse", mean_sd_json(s.mse)},
                       {"gain_vs_degroot", s.gain_vs_degroot ? mean_sd_json(*s.gain_vs_degroot) : json(nullptr)},
                       {"gain_over_mavg", s.gain_over_mavg ? mean_sd_json(*s.gain_over_mavg) : json(nullptr)}});
  }
  j["summary"] = std::move(summary);
  json agent_mse = json::array();
  for (const auto& rep : r.agent_mse) agent_mse.push_back(reals(rep));
  j["agent_mse"] = std::move(agent_mse);
  j["best_single_mse"] = mean_sd_json(r.best_single_mse);
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"replication", p.replication},
                      {"index", p.index},
                      {"x", reals(p.x)},
                      {"xi", p.xi ? real(*p.xi) : json(nullptr)},
                      {"label", real(p.label)},
                      {"predictions", reals(p.predictions)},
                      {"squared_errors", reals(p.squared_errors)},
                      {"agent_predictions", reals(p.agent_predictions)},
                      {"weights", reals(p.weights)},
                      {"consensus_rounds", p.consensus_rounds},
                      {"consensus_converged", p.consensus_converged},
                      {"standard_error", p.standard_error ? real(*p.standard_error) : json(nullptr)},
                      {"error", optional_json(p.error)}});
  }
  j["points"] = std::move(points);
  j["failed_points"] = r.failed_points;
  json aborted = json::array();
  for (const auto& [rep, why] : r.aborted) aborted.push_back({{"replication", rep}, {"error", why}});
  j["aborted_replications"] = std::move(aborted);
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  r.config = j.at("config");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.data_source = j.at("data_source").get<std::string>();
  r.agents = j.at("agents").get<Index>();
  r.neighbors = j.at("neighbors").get<Index>();
  r.schemes = j.at("schemes").get<std::vector<std::string>>();
  for (const auto& s : j.at("summary")) {
    SchemeSummary out;
    out.scheme = s.at("scheme").get<std::string>();
    out.mse_per_replication = reals_from(s.at("mse_per_replication"));
    out.mse = mean_sd_from(s.at("mse"));
    if (!s.at("gain_vs_degroot").is_null()) out.gain_vs_degroot = mean_sd_from(s.at("gain_vs_degroot"));
    if (!s.at("gain_over_mavg").is_null()) out.gain_over_mavg = mean_sd_from(s.at("gain_over_mavg"));
    r.summary.push_back(std::move(out));
  }
  for (const auto& rep : j.at("agent_mse")) r.agent_mse.push_back(reals_from(rep));
  r.best_single_mse = mean_sd_from(j.at("best_single_mse"));
  for (const auto& p : j.at("points")) {
    PointRecord out;
    out.replication = p.at("replication").get<int>();
    out.index = p.at("index").get<Index>();
    out.x = reals_from(p.at("x"));
    if (!p.at("xi").is_null()) out.xi = p.at("xi").get<double>();
    out.label = real_from(p.at("label"));
    out.predictions = reals_from(p.at("predictions"));
    out.squared_errors = reals_from(p.at("squared_errors"));
    out.agent_predictions = reals_from(p.at("agent_predictions"));
    out.weights = reals_from(p.at("weights"));
    out.consensus_rounds = p.at("consensus_rounds").get<int>();
    out.consensus_converged = p.at("consensus_converged").get<bool>();
    if (!p.at("standard_error").is_null()) out.standard_error = p.at("standard_error").get<double>();
    if (!p.at("error").is_null()) out.error = p.at("error").get<std::string>();
    r.points.push_back(std::move(out));
  }
  r.failed_points = j.at("failed_points").get<int>();
  for (const auto& a : j.at("aborted_replications")) {
    r.aborted.emplace_back(a.at("replication").get<int>(), a.at("error").get<std::string>());
  }
  return r;
}

std::string report_json_text(const Report& report) {
  return report_to_json(report).dump(2) + "\n";
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw std::invalid_argument("unknown report format '" + std::string(name) + "'");
}

namespace {

std::string cell(double v) { return std::isnan(v) ? std::string() : format_real(v); }

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_points_csv(const Report& r, std::ostream& out) {
  const std::size_t dim =
      r.points.empty() ? static_cast<std::size_t>(0) : r.points.front().x.size();
  out << "replication,point";
  for (std::size_t j = 0; j < dim; ++j) out << ",x" << j;
  out << ",xi,label";
  for (const auto& s : r.schemes) out << ',' << s << "_pred," << s << "_sqerr";
  for (Index k = 0; k < r.agents; ++k) out << ",agent" << k << "_pred";
  for (Index k = 0; k < r.agents; ++k) out << ",w" << k;
  out << ",se,rounds,converged,error\n";
  for (const auto& p : r.points) {
    out << p.replication << ',' << p.index;
    for (double v : p.x) out << ',' << cell(v);
    out << ',' << (p.xi ? cell(*p.xi) : std::string()) << ',' << cell(p.label);
    for (std::size_t s = 0; s < r.schemes.size(); ++s) {
      out << ',' << cell(s < p.predictions.size() ? p.predictions[s] : std::nan(""))
          << ',' << cell(s < p.squared_errors.size() ? p.squared_errors[s] : std::nan(""));
    }
    for (Index k = 0; k < r.agents; ++k) {
      const auto i = static_cast<std::size_t>(k);
      out << ',' << cell(i < p.agent_predictions.size() ? p.agent_predictions[i] : std::nan(""));
    }
    for (Index k = 0; k < r.agents; ++k) {
      const auto i = static_cast<std::size_t>(k);
      out << ',' << cell(i < p.weights.size() ? p.weights[i] : std::nan(""));
    }
    out << ',' << (p.standard_error ? cell(*p.standard_error) : std::string()) << ','
        << p.consensus_rounds << ',' << (p.consensus_converged ? 1 : 0) << ','
        << (p.error ? csv_quote(*p.error) : std::string()) << '\n';
  }
}

void write_summary_csv(const Report& r, std::ostream& out) {
  out << "scheme,mse_mean,mse_sd,gain_vs_degroot_mean,gain_vs_degroot_sd,"
         "gain_over_mavg_mean,gain_over_mavg_sd\n";
  for (const auto& s : r.summary) {
    out << s.scheme << ',' << cell(s.mse.mean) << ',' << cell(s.mse.sd) << ','
        << (s.gain_vs_degroot ? cell(s.gain_vs_degroot->mean) : "") << ','
        << (s.gain_vs_degroot ? cell(s.gain_vs_degroot->sd) : "") << ','
        << (s.gain_over_mavg ? cell(s.gain_over_mavg->mean) : "") << ','
        << (s.gain_over_mavg ? cell(s.gain_over_mavg->sd) : "") << '\n';
  }
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const Report& report, ReportFormat format,
                                               const std::filesystem::path& dir,
                                               const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  if (format == ReportFormat::Json) {
    written.push_back(dir / (name + ".json"));
    write_file(written.back(), report_json_text(report));
  } else {
    std::ostringstream points, summary;
    write_points_csv(report, points);
    write_summary_csv(report, summary);
    written.push_back(dir / (name + "_points.csv"));
    write_file(written.back(), points.str());
    written.push_back(dir / (name + "_summary.csv"));
    write_file(written.back(), summary.str());
  }
  const json timing = {{"data_seconds", report.timings.data_seconds},
                       {"fit_seconds", report.timings.fit_seconds},
                       {"evaluate_seconds", report.timings.evaluate_seconds},
                       {"total_seconds", report.timings.total_seconds}};
  written.push_back(dir / (name + "_timing.json"));
  write_file(written.back(), timing.dump(2) + "\n");
  return written;
}

}  // namespace degroot
