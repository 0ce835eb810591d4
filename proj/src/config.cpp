#include "degroot/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace degroot {

using nlohmann::json;

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::DeGroot: return "degroot";
    case Scheme::MAvg: return "m-avg";
    case Scheme::CvStatic: return "cv-static";
    case Scheme::CvAdaptive: return "cv-adaptive";
    case Scheme::TauAvg: return "tau-avg";
    case Scheme::MseAvg: return "mse-avg";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::DeGroot, Scheme::MAvg, Scheme::CvStatic, Scheme::CvAdaptive,
                   Scheme::TauAvg, Scheme::MseAvg}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

std::vector<Scheme> parse_scheme_list(std::string_view list) {
  std::vector<Scheme> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto item = list.substr(start, comma == std::string_view::npos ? list.npos : comma - start);
    if (!item.empty()) out.push_back(parse_scheme(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Synthetic: return "synthetic";
    case SourceKind::File: return "file";
    case SourceKind::Surrogate: return "surrogate";
  }
  return "unknown";
}

Index NeighborRule::resolve(Index local_size) const {
  if (absolute) return *absolute;
  const auto scaled = static_cast<Index>(std::ceil(fraction * static_cast<double>(local_size)));
  return std::max(floor, scaled);
}

Index TestPolicy::resolve(Index samples) const {
  const auto wanted = std::max(static_cast<Index>(std::floor(fraction * static_cast<double>(samples))), minimum);
  const auto cap = static_cast<Index>(std::floor(max_fraction * static_cast<double>(samples)));
  return std::max<Index>(1, std::min(wanted, cap));
}

ExperimentConfig ExperimentConfig::synthetic_defaults() {
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::LeastSquares;
  cfg.neighbors.absolute = 5;
  return cfg;
}

Index ExperimentConfig::agent_count() const {
  if (source == SourceKind::Synthetic) return synthetic.agents();
  return agents.value_or(0);
}

bool ExperimentConfig::uses_validation() const {
  return validation == ValidationPolicy::PartitionSize;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  try {
    if (source == SourceKind::Synthetic) {
      synthetic.validate();
      if (agents && *agents != synthetic.agents()) {
        fail("synthetic runs use one agent per mean; 'agents' disagrees with agent_means");
      }
    } else {
      if (!agents) fail("'agents' is required for file and surrogate sources");
      if (source == SourceKind::File && file.path.empty()) fail("file source needs a path");
      if (source == SourceKind::File && file.format != "libsvm" && file.format != "csv") {
        fail("file format must be 'libsvm' or 'csv'");
      }
      if (source == SourceKind::Surrogate) surrogate.validate();
      partition.validate();
    }
    if (agent_count() < 2) fail("an experiment needs at least two agents");
    model.validate();
    if (lambda_rule) {
      lambda_rule->validate();
      lambda_schedule(*lambda_rule, agent_count());
    }
    if (neighbors.absolute && *neighbors.absolute < 1) fail("trust.neighbors must be >= 1");
    if (!(neighbors.fraction > 0.0)) fail("trust.neighbor_fraction must be > 0");
    if (neighbors.floor < 1) fail("trust.min_neighbors must be >= 1");
    if (!(mse_floor > 0.0)) fail("trust.mse_floor must be > 0");
    consensus.validate();
    if (schemes.empty()) fail("select at least one scheme");
    const std::set<Scheme> unique(schemes.begin(), schemes.end());
    if (unique.size() != schemes.size()) fail("schemes must not repeat");
    if (!uses_validation() && (unique.count(Scheme::CvStatic) || unique.count(Scheme::CvAdaptive))) {
      fail("CV schemes need validation policy 'partition-size'");
    }
    if (jackknife && agent_count() < 3) fail("the jackknife needs at least three agents");
    if (!(test.fraction >= 0.0) || test.minimum < 0 || !(test.max_fraction > 0.0 && test.max_fraction < 1.0)) {
      fail("invalid test policy");
    }
    if (replications < 1) fail("replications must be >= 1");
    if (threads < 0) fail("threads must be >= 0");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

/// Reads keys from one JSON object and rejects any it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      target = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  template <typename T>
  void read_optional(const std::string& key, std::optional<T>& target) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      target.reset();
      return;
    }
    try {
      target = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + path_ + "." + key);
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename E, typename Parse>
void read_enum(ObjectReader& r, const std::string& key, E& target, Parse parse) {
  std::optional<std::string> name;
  r.read_optional(key, name);
  if (!name) return;
  try {
    target = parse(*name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg = ExperimentConfig::synthetic_defaults();
  ObjectReader root(j, "config");

  read_enum(root, "source", cfg.source, [](const std::string& s) {
    if (s == "synthetic") return SourceKind::Synthetic;
    if (s == "file") return SourceKind::File;
    if (s == "surrogate") return SourceKind::Surrogate;
    throw std::invalid_argument("unknown source '" + s + "'");
  });
  if (const json* s = root.child("synthetic")) {
    ObjectReader r(*s, "config.synthetic");
    r.read("agent_means", cfg.synthetic.agent_means);
    r.read("cov_scale", cfg.synthetic.cov_scale);
    r.read("alpha", cfg.synthetic.alpha);
    r.read("label_noise_sd", cfg.synthetic.label_noise_sd);
    r.read("samples_per_agent", cfg.synthetic.samples_per_agent);
    r.read("test_samples", cfg.synthetic.test_samples);
    r.finish();
  }
  if (const json* f = root.child("file")) {
    ObjectReader r(*f, "config.file");
    r.read("path", cfg.file.path);
    r.read("format", cfg.file.format);
    r.read("label_column", cfg.file.label_column);
    r.finish();
  }
  if (const json* s = root.child("surrogate")) {
    ObjectReader r(*s, "config.surrogate");
    r.read("samples", cfg.surrogate.samples);
    r.read("size_noise_sd", cfg.surrogate.size_noise_sd);
    r.finish();
  }
  if (const json* p = root.child("partition")) {
    ObjectReader r(*p, "config.partition");
    read_enum(r, "kind", cfg.partition.kind, parse_partition_kind);
    r.read("sort_fraction", cfg.partition.sort_fraction);
    r.read("feature_index", cfg.partition.feature_index);
    r.finish();
  }
  root.read_optional("agents", cfg.agents);
  if (const json* m = root.child("model")) {
    ObjectReader r(*m, "config.model");
    read_enum(r, "kind", cfg.model.kind, parse_model_kind);
    r.read("lambda", cfg.model.lambda);
    r.read("max_depth", cfg.model.max_depth);
    r.read("lasso_max_iter", cfg.model.lasso_max_iter);
    r.read("lasso_tol", cfg.model.lasso_tol);
    r.read("standardize", cfg.model.standardize);
    r.finish();
  }
  if (const json* l = root.child("lambda_rule"); l && !l->is_null()) {
    ObjectReader r(*l, "config.lambda_rule");
    HeterogeneityLambdaRule rule;
    r.read("base_lambda", rule.base_lambda);
    r.read("exponent", rule.exponent);
    r.read("pivot", rule.pivot);
    r.finish();
    cfg.lambda_rule = rule;
  }
  if (const json* t = root.child("trust")) {
    ObjectReader r(*t, "config.trust");
    r.read_optional("neighbors", cfg.neighbors.absolute);
    r.read("neighbor_fraction", cfg.neighbors.fraction);
    r.read("min_neighbors", cfg.neighbors.floor);
    r.read("mse_floor", cfg.mse_floor);
    r.finish();
  }
  if (const json* c = root.child("consensus")) {
    ObjectReader r(*c, "config.consensus");
    r.read("max_rounds", cfg.consensus.max_rounds);
    r.read("tolerance", cfg.consensus.tolerance);
    read_enum(r, "method", cfg.consensus.method, parse_consensus_method);
    r.read("early_stop", cfg.consensus.early_stop);
    r.finish();
  }
  if (const json* s = root.child("schemes")) {
    if (!s->is_array()) throw ConfigError("config.schemes must be an array");
    cfg.schemes.clear();
    for (const auto& item : *s) {
      if (!item.is_string()) throw ConfigError("config.schemes entries must be strings");
      cfg.schemes.push_back(parse_scheme(item.get<std::string>()));
    }
  }
  root.read("jackknife", cfg.jackknife);
  read_enum(root, "validation", cfg.validation, [](const std::string& s) {
    if (s == "partition-size") return ValidationPolicy::PartitionSize;
    if (s == "none") return ValidationPolicy::None;
    throw std::invalid_argument("unknown validation policy '" + s + "'");
  });
  if (const json* t = root.child("test")) {
    ObjectReader r(*t, "config.test");
    r.read("fraction", cfg.test.fraction);
    r.read("minimum", cfg.test.minimum);
    r.read("max_fraction", cfg.test.max_fraction);
    r.finish();
  }
  root.read("replications", cfg.replications);
  root.read("seed", cfg.seed);
  root.read("output_dir", cfg.output_dir);
  root.read("threads", cfg.threads);
  root.finish();

  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["source"] = std::string(to_string(cfg.source));
  j["synthetic"] = {{"agent_means", cfg.synthetic.agent_means},
                    {"cov_scale", cfg.synthetic.cov_scale},
                    {"alpha", cfg.synthetic.alpha},
                    {"label_noise_sd", cfg.synthetic.label_noise_sd},
                    {"samples_per_agent", cfg.synthetic.samples_per_agent},
                    {"test_samples", cfg.synthetic.test_samples}};
  j["file"] = {{"path", cfg.file.path},
               {"format", cfg.file.format},
               {"label_column", cfg.file.label_column}};
  j["surrogate"] = {{"samples", cfg.surrogate.samples},
                    {"size_noise_sd", cfg.surrogate.size_noise_sd}};
  j["partition"] = {{"kind", std::string(to_string(cfg.partition.kind))},
                    {"sort_fraction", cfg.partition.sort_fraction},
                    {"feature_index", cfg.partition.feature_index}};
  j["agents"] = cfg.agents ? json(*cfg.agents) : json(nullptr);
  j["model"] = {{"kind", std::string(to_string(cfg.model.kind))},
                {"lambda", cfg.model.lambda},
                {"max_depth", cfg.model.max_depth},
                {"lasso_max_iter", cfg.model.lasso_max_iter},
                {"lasso_tol", cfg.model.lasso_tol},
                {"standardize", cfg.model.standardize}};
  if (cfg.lambda_rule) {
    j["lambda_rule"] = {{"base_lambda", cfg.lambda_rule->base_lambda},
                        {"exponent", cfg.lambda_rule->exponent},
                        {"pivot", cfg.lambda_rule->pivot}};
  } else {
    j["lambda_rule"] = nullptr;
  }
  j["trust"] = {{"neighbors", cfg.neighbors.absolute ? json(*cfg.neighbors.absolute) : json(nullptr)},
                {"neighbor_fraction", cfg.neighbors.fraction},
                {"min_neighbors", cfg.neighbors.floor},
                {"mse_floor", cfg.mse_floor}};
  j["consensus"] = {{"max_rounds", cfg.consensus.max_rounds},
                    {"tolerance", cfg.consensus.tolerance},
                    {"method", std::string(to_string(cfg.consensus.method))},
                    {"early_stop", cfg.consensus.early_stop}};
  json schemes = json::array();
  for (Scheme s : cfg.schemes) schemes.push_back(std::string(to_string(s)));
  j["schemes"] = std::move(schemes);
  j["jackknife"] = cfg.jackknife;
  j["validation"] = cfg.validation == ValidationPolicy::PartitionSize ? "partition-size" : "none";
  j["test"] = {{"fraction", cfg.test.fraction},
               {"minimum", cfg.test.minimum},
               {"max_fraction", cfg.test.max_fraction}};
  j["replications"] = cfg.replications;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["threads"] = cfg.threads;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace degroot
