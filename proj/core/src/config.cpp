#include "bwk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace bwk {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config " + where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected an object");
}

void reject_unknown_keys(const json& j, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!keys.contains(key)) config_error(where, "unknown key '" + key + "'");
}

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) config_error(where, std::string("missing '") + key + "'");
  if (!j.at(key).is_number()) config_error(where, std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::optional<double> get_optional_number(const json& j, const char* key,
                                          const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_number(j, key, where);
}

std::size_t get_index(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) config_error(where, std::string("missing '") + key + "'");
  if (!j.at(key).is_number_unsigned())
    config_error(where, std::string("'") + key + "' must be a nonnegative integer");
  return j.at(key).get<std::size_t>();
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) config_error(where, std::string("missing '") + key + "'");
  if (!j.at(key).is_string()) config_error(where, std::string("'") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

PolicyConfig parse_policy(const json& j, const std::string& where) {
  require_object(j, where);
  const std::string type = get_string(j, "type", where);
  PolicyConfig p;
  if (type == "exp3_bwk") {
    reject_unknown_keys(j, where, {"type", "gamma"});
    p.kind = PolicyKind::kExp3Bwk;
    p.gamma = get_optional_number(j, "gamma", where);
  } else if (type == "exp3pp_bwk") {
    reject_unknown_keys(j, where, {"type", "alpha", "beta", "lambda"});
    p.kind = PolicyKind::kExp3PPBwk;
    p.alpha = get_optional_number(j, "alpha", where).value_or(3.0);
    p.beta = get_optional_number(j, "beta", where);
    p.lambda = get_optional_number(j, "lambda", where);
  } else if (type == "fixed_arm") {
    reject_unknown_keys(j, where, {"type", "arm"});
    p.kind = PolicyKind::kFixedArm;
    p.arm = get_index(j, "arm", where);
  } else if (type == "uniform") {
    reject_unknown_keys(j, where, {"type"});
    p.kind = PolicyKind::kUniform;
  } else {
    config_error(where, "unknown policy type '" + type + "'");
  }
  return p;
}

Distribution parse_distribution(const json& j, const std::string& where) {
  require_object(j, where);
  const std::string kind = get_string(j, "dist", where);
  if (kind == "point") {
    reject_unknown_keys(j, where, {"dist", "value"});
    return PointMass{get_number(j, "value", where)};
  }
  if (kind == "uniform") {
    reject_unknown_keys(j, where, {"dist", "low", "high"});
    return UniformInterval{get_number(j, "low", where), get_number(j, "high", where)};
  }
  if (kind == "bernoulli") {
    reject_unknown_keys(j, where, {"dist", "p", "low", "high"});
    return ScaledBernoulli{get_optional_number(j, "low", where).value_or(0.0),
                           get_optional_number(j, "high", where).value_or(1.0),
                           get_number(j, "p", where)};
  }
  config_error(where, "unknown distribution '" + kind + "'");
}

json distribution_json(const Distribution& dist) {
  if (const auto* d = std::get_if<PointMass>(&dist)) return {{"dist", "point"}, {"value", d->value}};
  if (const auto* d = std::get_if<UniformInterval>(&dist))
    return {{"dist", "uniform"}, {"low", d->low}, {"high", d->high}};
  const auto& b = std::get<ScaledBernoulli>(dist);
  return {{"dist", "bernoulli"}, {"p", b.p}, {"low", b.low}, {"high", b.high}};
}

json arms_json(const std::vector<ArmDistributions>& arms) {
  json out = json::array();
  for (const auto& a : arms)
    out.push_back({{"reward", distribution_json(a.reward)}, {"cost", distribution_json(a.cost)}});
  return out;
}

EnvironmentConfig parse_environment(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "environment";
  require_object(j, where);
  const std::string type = get_string(j, "type", where);
  if (type == "stochastic") {
    reject_unknown_keys(j, where, {"type", "c_min", "c_max", "arms"});
    StochasticEnvConfig s;
    s.c_min = get_number(j, "c_min", where);
    s.c_max = get_optional_number(j, "c_max", where).value_or(1.0);
    if (!j.contains("arms") || !j.at("arms").is_array() || j.at("arms").empty())
      config_error(where, "'arms' must be a nonempty array");
    std::size_t i = 0;
    for (const auto& arm : j.at("arms")) {
      const std::string w = where + ".arms[" + std::to_string(i++) + "]";
      require_object(arm, w);
      reject_unknown_keys(arm, w, {"reward", "cost"});
      if (!arm.contains("reward") || !arm.contains("cost"))
        config_error(w, "needs 'reward' and 'cost'");
      s.arms.push_back({parse_distribution(arm.at("reward"), w + ".reward"),
                        parse_distribution(arm.at("cost"), w + ".cost")});
    }
    return s;
  }
  if (type == "matrix_file") {
    reject_unknown_keys(j, where, {"type", "path", "c_min", "c_max"});
    MatrixFileEnvConfig m;
    m.path = get_string(j, "path", where);
    if (m.path.is_relative() && !base_dir.empty()) m.path = base_dir / m.path;
    m.c_min = get_optional_number(j, "c_min", where);
    m.c_max = get_optional_number(j, "c_max", where);
    return m;
  }
  if (type == "thm2") {
    reject_unknown_keys(j, where, {"type", "K", "c_min", "realize"});
    Thm2EnvConfig t;
    t.num_arms = get_index(j, "K", where);
    t.c_min = get_number(j, "c_min", where);
    if (j.contains("realize")) {
      if (!j.at("realize").is_boolean()) config_error(where, "'realize' must be a boolean");
      t.realize = j.at("realize").get<bool>();
    }
    return t;
  }
  if (type == "thm5") {
    reject_unknown_keys(j, where, {"type", "alpha", "optimal_arm"});
    Thm5EnvConfig t;
    t.alpha = get_number(j, "alpha", where);
    if (j.contains("optimal_arm") && !j.at("optimal_arm").is_null())
      t.optimal_arm = get_index(j, "optimal_arm", where);
    return t;
  }
  config_error(where, "unknown environment type '" + type + "'");
}

// c_min the policies will see, when it is known without reading files.
std::optional<double> known_c_min(const EnvironmentConfig& env) {
  if (const auto* s = std::get_if<StochasticEnvConfig>(&env)) return s->c_min;
  if (const auto* m = std::get_if<MatrixFileEnvConfig>(&env)) return m->c_min;
  if (const auto* t = std::get_if<Thm2EnvConfig>(&env)) return t->c_min;
  return 1.0;
}

std::size_t known_num_arms(const EnvironmentConfig& env) {
  if (const auto* s = std::get_if<StochasticEnvConfig>(&env)) return s->arms.size();
  if (const auto* t = std::get_if<Thm2EnvConfig>(&env)) return t->num_arms;
  if (std::holds_alternative<Thm5EnvConfig>(env)) return 2;
  return 0;  // unknown until the file is read
}

}  // namespace

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kExp3Bwk: return "EXP3_BWK";
    case PolicyKind::kExp3PPBwk: return "EXP3PP_BWK";
    case PolicyKind::kFixedArm: return "FIXED_ARM";
    case PolicyKind::kUniform: return "UNIFORM";
  }
  return "UNKNOWN";
}

std::string PolicyConfig::label() const {
  if (kind == PolicyKind::kFixedArm) return std::string(to_string(kind)) + ":" + std::to_string(arm);
  return to_string(kind);
}

bool is_stochastic(const EnvironmentConfig& env) {
  if (std::holds_alternative<StochasticEnvConfig>(env)) return true;
  if (const auto* t = std::get_if<Thm2EnvConfig>(&env)) return !t->realize;
  return false;
}

void ExperimentConfig::validate() const {
  if (policies.empty()) throw std::invalid_argument("config: no policies");
  if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
  if (budgets.empty()) throw std::invalid_argument("config: budgets must be nonempty");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (!(budgets[i] > 0.0)) throw std::invalid_argument("config: budgets must be positive");
    if (i > 0 && !(budgets[i] > budgets[i - 1]))
      throw std::invalid_argument("config: budgets must be strictly increasing");
  }
  const std::size_t k = known_num_arms(environment);
  std::set<std::string> labels;
  for (const auto& p : policies) {
    if (p.kind == PolicyKind::kFixedArm && k != 0 && p.arm >= k)
      throw std::invalid_argument("config: fixed arm " + std::to_string(p.arm) + " out of range");
    if (!labels.insert(p.label()).second)
      throw std::invalid_argument("config: duplicate policy " + p.label());
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  require_object(doc, "root");
  reject_unknown_keys(doc, "root",
                      {"policy", "environment", "budgets", "replications", "base_seed", "output"});

  ExperimentConfig config;
  if (!doc.contains("policy")) config_error("root", "missing 'policy'");
  const json& policy = doc.at("policy");
  if (policy.is_array()) {
    for (std::size_t i = 0; i < policy.size(); ++i)
      config.policies.push_back(parse_policy(policy[i], "policy[" + std::to_string(i) + "]"));
  } else {
    config.policies.push_back(parse_policy(policy, "policy"));
  }

  if (!doc.contains("environment")) config_error("root", "missing 'environment'");
  config.environment = parse_environment(doc.at("environment"), base_dir);

  if (!doc.contains("budgets") || !doc.at("budgets").is_array())
    config_error("root", "'budgets' must be an array");
  for (const auto& b : doc.at("budgets")) {
    if (!b.is_number()) config_error("budgets", "entries must be numbers");
    config.budgets.push_back(b.get<double>());
  }
  config.replications = doc.contains("replications") ? get_index(doc, "replications", "root") : 1;
  if (doc.contains("base_seed")) {
    if (!doc.at("base_seed").is_number_unsigned())
      config_error("root", "'base_seed' must be a nonnegative integer");
    config.base_seed = doc.at("base_seed").get<std::uint64_t>();
  }
  if (doc.contains("output")) config.output = get_string(doc, "output", "root");
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str(), path.parent_path());
}

std::string resolved_config_json(const ExperimentConfig& config) {
  const std::optional<double> c_min = known_c_min(config.environment);
  auto optional_or_null = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };

  json policies = json::array();
  for (const auto& p : config.policies) {
    switch (p.kind) {
      case PolicyKind::kExp3Bwk:
        policies.push_back({{"type", "exp3_bwk"}, {"gamma", optional_or_null(p.gamma)}});
        break;
      case PolicyKind::kExp3PPBwk: {
        std::optional<double> beta = p.beta, lambda = p.lambda;
        if (!beta && c_min) beta = 256.0 / (*c_min * *c_min);
        if (!lambda && c_min) lambda = c_min;
        policies.push_back({{"type", "exp3pp_bwk"},
                            {"alpha", p.alpha},
                            {"beta", optional_or_null(beta)},
                            {"lambda", optional_or_null(lambda)}});
        break;
      }
      case PolicyKind::kFixedArm:
        policies.push_back({{"type", "fixed_arm"}, {"arm", p.arm}});
        break;
      case PolicyKind::kUniform:
        policies.push_back({{"type", "uniform"}});
        break;
    }
  }

  json env;
  if (const auto* s = std::get_if<StochasticEnvConfig>(&config.environment)) {
    env = {{"type", "stochastic"}, {"c_min", s->c_min}, {"c_max", s->c_max}, {"arms", arms_json(s->arms)}};
  } else if (const auto* m = std::get_if<MatrixFileEnvConfig>(&config.environment)) {
    env = {{"type", "matrix_file"},
           {"path", m->path.generic_string()},
           {"c_min", optional_or_null(m->c_min)},
           {"c_max", optional_or_null(m->c_max)}};
  } else if (const auto* t2 = std::get_if<Thm2EnvConfig>(&config.environment)) {
    env = {{"type", "thm2"}, {"K", t2->num_arms}, {"c_min", t2->c_min}, {"realize", t2->realize}};
  } else {
    const auto& t5 = std::get<Thm5EnvConfig>(config.environment);
    env = {{"type", "thm5"},
           {"alpha", t5.alpha},
           {"optimal_arm", t5.optimal_arm ? json(*t5.optimal_arm) : json(nullptr)}};
  }

  json doc = {{"policy", policies},
              {"environment", env},
              {"budgets", config.budgets},
              {"replications", config.replications},
              {"base_seed", config.base_seed},
              {"output", config.output}};
  return doc.dump(2) + "\n";
}

std::string stochastic_spec_json(const StochasticEnvSpec& spec) {
  json doc = {{"type", "stochastic"},
              {"c_min", spec.params.c_min},
              {"c_max", spec.params.c_max},
              {"arms", arms_json(spec.arms)}};
  json out = {{"environment", doc},
              {"B", spec.params.budget},
              {"planted_optimal_arm", spec.planted_optimal_arm ? json(*spec.planted_optimal_arm)
                                                               : json(nullptr)}};
  return out.dump(2) + "\n";
}

}  // namespace bwk
