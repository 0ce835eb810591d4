#include "degroot/datagen.hpp"

#include "degroot/rng.hpp"
#include "degroot/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace degroot {

// ---------------------------------------------------------------------------
// Synthetic logistic task

SyntheticConfig SyntheticConfig::defaults() {
  SyntheticConfig cfg;
  cfg.agent_means = {{-3.0, -4.0}, {-2.0, -2.0}, {-1.0, -1.0}, {0.0, 0.0}, {3.0, 2.0}};
  cfg.alpha = {1.0, 1.0};
  return cfg;
}

void SyntheticConfig::validate() const {
  if (agent_means.empty()) throw std::invalid_argument("synthetic config needs agent means");
  if (alpha.empty()) throw std::invalid_argument("synthetic config needs alpha");
  for (const auto& m : agent_means) {
    if (m.size() != alpha.size()) {
      throw std::invalid_argument("agent means and alpha must share one dimension");
    }
  }
  if (!(cov_scale > 0.0)) throw std::invalid_argument("cov_scale must be > 0");
  if (!(label_noise_sd >= 0.0)) throw std::invalid_argument("label_noise_sd must be >= 0");
  if (samples_per_agent < 1) throw std::invalid_argument("samples_per_agent must be >= 1");
  if (test_samples < 1) throw std::invalid_argument("test_samples must be >= 1");
}

double logistic_label(std::span<const double> alpha, std::span<const double> x) {
  double z = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) z += alpha[j] * x[j];
  return 1.0 / (1.0 + std::exp(z));
}

namespace {

void draw_point(Rng& rng, const std::vector<double>& mean, double sd, double* out) {
  for (std::size_t j = 0; j < mean.size(); ++j) out[j] = rng.normal(mean[j], sd);
}

}  // namespace

Dataset sample_synthetic_mixture(const SyntheticConfig& cfg, Index count, bool noisy,
                                 std::uint64_t stream_seed) {
  cfg.validate();
  Rng rng(stream_seed);
  const Index d = cfg.dimension();
  const double sd = std::sqrt(cfg.cov_scale);
  FeatureMatrix x(count, d);
  Vector y(count);
  for (Index i = 0; i < count; ++i) {
    const auto component = rng.index(static_cast<std::uint64_t>(cfg.agents()));
    draw_point(rng, cfg.agent_means[component], sd, x.row(i).data());
    y[i] = logistic_label(cfg.alpha, {x.row(i).data(), static_cast<std::size_t>(d)});
    if (noisy) y[i] += rng.normal(0.0, cfg.label_noise_sd);
  }
  return Dataset(std::move(x), std::move(y));
}

SyntheticTask generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const Index d = cfg.dimension();
  const Index n = cfg.samples_per_agent;
  const double sd = std::sqrt(cfg.cov_scale);
  std::vector<Dataset> agents;
  agents.reserve(cfg.agent_means.size());
  for (std::size_t k = 0; k < cfg.agent_means.size(); ++k) {
    Rng rng(derive_seed(cfg.seed, "synthetic/agent", k));
    FeatureMatrix x(n, d);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
      draw_point(rng, cfg.agent_means[k], sd, x.row(i).data());
      y[i] = logistic_label(cfg.alpha, {x.row(i).data(), static_cast<std::size_t>(d)}) +
             rng.normal(0.0, cfg.label_noise_sd);
    }
    agents.emplace_back(std::move(x), std::move(y));
  }
  Dataset test = sample_synthetic_mixture(cfg, cfg.test_samples, false,
                                          derive_seed(cfg.seed, "synthetic/test"));
  return {std::move(agents), std::move(test)};
}

// ---------------------------------------------------------------------------
// Surrogate tabular set

void SurrogateConfig::validate() const {
  if (samples < 2) throw std::invalid_argument("surrogate needs at least 2 samples");
  if (!(size_noise_sd >= 0.0)) throw std::invalid_argument("surrogate size_noise_sd must be >= 0");
}

Dataset generate_surrogate(const SurrogateConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  FeatureMatrix x(cfg.samples, 8);
  Vector y(cfg.samples);
  for (Index i = 0; i < cfg.samples; ++i) {
    const double rings = std::clamp(std::round(std::exp(std::log(9.5) + 0.3 * rng.normal())), 1.0, 29.0);
    const double length =
        std::clamp(0.75 * (1.0 - std::exp(-rings / 5.5)) + cfg.size_noise_sd * rng.normal(), 0.07, 0.82);
    const double diameter = 0.8 * length + 0.015 * rng.normal();
    const double height = 0.27 * length + 0.012 * rng.normal();
    const double whole = std::abs(2.2 * length * length * length * (1.0 + 0.12 * rng.normal()));
    const double shucked = whole * 0.43 * (1.0 + 0.08 * rng.normal());
    const double viscera = whole * 0.22 * (1.0 + 0.08 * rng.normal());
    const double shell = whole * 0.29 * (1.0 + 0.08 * rng.normal());
    const bool infant = rng.uniform() < 1.0 / (1.0 + std::exp((length - 0.45) / 0.05));
    const double sex = infant ? 3.0 : static_cast<double>(1 + rng.index(2));
    x.row(i) << sex, length, diameter, height, whole, shucked, viscera, shell;
    y[i] = rings;
  }
  return Dataset(std::move(x), std::move(y));
}

// ---------------------------------------------------------------------------
// Partitioning

std::string_view to_string(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::Random: return "random";
    case PartitionKind::SortedLabel: return "sorted-label";
    case PartitionKind::SortedFeature: return "sorted-feature";
  }
  return "unknown";
}

PartitionKind parse_partition_kind(std::string_view name) {
  if (name == "random") return PartitionKind::Random;
  if (name == "sorted-label") return PartitionKind::SortedLabel;
  if (name == "sorted-feature") return PartitionKind::SortedFeature;
  throw std::invalid_argument("unknown partition kind '" + std::string(name) + "'");
}

void PartitionScheme::validate() const {
  if (!(sort_fraction >= 0.0 && sort_fraction <= 1.0)) {
    throw std::invalid_argument("sort_fraction must lie in [0, 1]");
  }
  if (feature_index < 0) throw std::invalid_argument("feature_index must be >= 0");
}

std::vector<Dataset> partition(const Dataset& data, Index agents, const PartitionScheme& scheme) {
  scheme.validate();
  const Index n = data.size();
  if (agents < 1) throw std::invalid_argument("partition needs at least one agent");
  if (n < agents) {
    throw std::invalid_argument("cannot split " + std::to_string(n) + " samples across " +
                                std::to_string(agents) + " agents");
  }
  if (scheme.kind == PartitionKind::SortedFeature && scheme.feature_index >= data.dimension()) {
    throw std::invalid_argument("sort feature index out of range");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(derive_seed(scheme.seed, "partition"));
  rng.shuffle(order);

  const Index sorted_count =
      scheme.kind == PartitionKind::Random
          ? 0
          : static_cast<Index>(std::floor(scheme.sort_fraction * static_cast<double>(n)));
  auto key = [&](Index i) {
    return scheme.kind == PartitionKind::SortedLabel ? data.label(i)
                                                     : data.features()(i, scheme.feature_index);
  };
  std::stable_sort(order.begin(), order.begin() + sorted_count,
                   [&](Index a, Index b) { return key(a) < key(b); });

  std::vector<std::vector<Index>> parts(static_cast<std::size_t>(agents));
  const Index base = sorted_count / agents;
  const Index extra = sorted_count % agents;
  Index at = 0;
  for (Index k = 0; k < agents; ++k) {
    const Index len = base + (k < extra ? 1 : 0);
    auto& part = parts[static_cast<std::size_t>(k)];
    part.insert(part.end(), order.begin() + at, order.begin() + at + len);
    at += len;
  }
  // Start dealing at the first agent that got the shorter block.
  for (Index k = extra; at < n; ++at, k = (k + 1) % agents) {
    parts[static_cast<std::size_t>(k)].push_back(order[static_cast<std::size_t>(at)]);
  }

  std::vector<Dataset> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.push_back(data.subset(p));
  return out;
}

// ---------------------------------------------------------------------------
// Regularizer heterogeneity

void HeterogeneityLambdaRule::validate() const {
  if (!(base_lambda > 0.0)) throw std::invalid_argument("base_lambda must be > 0");
  if (!std::isfinite(exponent)) throw std::invalid_argument("exponent must be finite");
}

Vector lambda_schedule(const HeterogeneityLambdaRule& rule, Index agents) {
  rule.validate();
  if (agents < 1) throw std::invalid_argument("lambda_schedule needs at least one agent");
  Vector out(agents);
  for (Index k = 1; k <= agents; ++k) {
    const double base =
        1.0 + static_cast<double>(k - rule.pivot) / static_cast<double>(agents);
    if (!(base > 0.0)) {
      throw std::invalid_argument("lambda schedule base is nonpositive for agent " +
                                  std::to_string(k));
    }
    out[k - 1] = rule.base_lambda * std::pow(base, rule.exponent);
  }
  return out;
}

// ---------------------------------------------------------------------------
// File formats

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) +
                         (column ? ", column " + std::to_string(column) : std::string()) +
                         ": " + what),
      line_(line), column_(column) {}

namespace {

Dataset assemble(const std::vector<std::vector<double>>& rows, const std::vector<double>& labels,
                 Index dimension) {
  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Index>(rows.size()), dimension);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  Vector y = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
  return Dataset(std::move(x), std::move(y));
}

}  // namespace

Dataset parse_libsvm(std::istream& in, Index min_dimension) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  Index dimension = min_dimension;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    std::vector<double> row;
    bool have_label = false;
    Index last_index = 0;
    std::size_t pos = 0;
    while (pos < view.size()) {
      const auto start = view.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto end = view.find_first_of(" \t", start);
      if (end == std::string_view::npos) end = view.size();
      const std::string_view token = view.substr(start, end - start);
      pos = end;
      if (!have_label) {
        const auto label = parse_real(token);
        if (!label || !std::isfinite(*label)) {
          throw ParseError(line_no, start + 1, "invalid label '" + std::string(token) + "'");
        }
        labels.push_back(*label);
        have_label = true;
        continue;
      }
      const auto colon = token.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, start + 1, "expected <index>:<value>, got '" + std::string(token) + "'");
      }
      long long index = 0;
      const auto idx_text = token.substr(0, colon);
      const auto res = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
      if (res.ec != std::errc{} || res.ptr != idx_text.data() + idx_text.size() || index < 1) {
        throw ParseError(line_no, start + 1, "invalid feature index '" + std::string(idx_text) + "'");
      }
      if (index <= last_index) {
        throw ParseError(line_no, start + 1, "feature indices must be strictly ascending");
      }
      const auto value = parse_real(token.substr(colon + 1));
      if (!value || !std::isfinite(*value)) {
        throw ParseError(line_no, start + colon + 2, "invalid feature value in '" + std::string(token) + "'");
      }
      row.resize(static_cast<std::size_t>(index), 0.0);
      row[static_cast<std::size_t>(index - 1)] = *value;
      last_index = static_cast<Index>(index);
    }
    dimension = std::max(dimension, last_index);
    rows.push_back(std::move(row));
  }
  if (labels.empty()) throw ParseError(line_no, 0, "no samples found");
  return assemble(rows, labels, dimension);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  const Index d = data.dimension();
  for (Index i = 0; i < data.size(); ++i) {
    out << format_real(data.label(i));
    for (Index j = 0; j < d; ++j) {
      const double v = data.features()(i, j);
      if (v != 0.0 || j == d - 1) out << ' ' << (j + 1) << ':' << format_real(v);
    }
    out << '\n';
  }
}

Dataset parse_csv(std::istream& in, int label_column) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::size_t label_at = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;

    std::vector<std::string_view> cells;
    for (std::size_t start = 0;;) {
      const auto comma = view.find(',', start);
      cells.push_back(trim(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    std::vector<double> values;
    values.reserve(cells.size());
    std::size_t bad_cell = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_real(cells[c]);
      if (!v || !std::isfinite(*v)) {
        bad_cell = c + 1;
        break;
      }
      values.push_back(*v);
    }

    if (first) {
      first = false;
      width = cells.size();
      if (width < 2) throw ParseError(line_no, 0, "need at least one feature and one label column");
      const long resolved = label_column < 0 ? static_cast<long>(width) + label_column : label_column;
      if (resolved < 0 || resolved >= static_cast<long>(width)) {
        throw ParseError(line_no, 0, "label column " + std::to_string(label_column) + " out of range");
      }
      label_at = static_cast<std::size_t>(resolved);
      if (bad_cell) continue;  // header row
    } else if (cells.size() != width) {
      throw ParseError(line_no, 0, "expected " + std::to_string(width) + " cells, found " +
                                       std::to_string(cells.size()));
    }
    if (bad_cell) {
      throw ParseError(line_no, bad_cell, "non-numeric cell '" + std::string(cells[bad_cell - 1]) + "'");
    }
    labels.push_back(values[label_at]);
    values.erase(values.begin() + static_cast<std::ptrdiff_t>(label_at));
    rows.push_back(std::move(values));
  }
  if (labels.empty()) throw ParseError(line_no, 0, "no samples found");
  return assemble(rows, labels, static_cast<Index>(width - 1));
}

void write_csv(const Dataset& data, std::ostream& out) {
  const Index d = data.dimension();
  for (Index j = 0; j < d; ++j) out << 'x' << j << ',';
  out << "y\n";
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < d; ++j) out << format_real(data.features()(i, j)) << ',';
    out << format_real(data.label(i)) << '\n';
  }
}

}  // namespace degroot
