#include <set>

#include "json.hpp"

#include "gridtrend/digest.hpp"
#include "gridtrend/error.hpp"
#include "gridtrend/simulator.hpp"

namespace gridtrend {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + (where.empty() ? "config" : where));
    }
  }
}

std::string path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + " must be a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError(where + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

void read_law(const json& j, const std::string& where, NormalLaw& law) {
  only_keys(j, where, {"mean", "sd"});
  if (j.contains("mean")) law.mean = number(j["mean"], where + ".mean");
  if (j.contains("sd")) law.sd = number(j["sd"], where + ".sd");
}

json law_json(const NormalLaw& law) { return {{"mean", law.mean}, {"sd", law.sd}}; }

void read_linear_group(const json& j, const std::string& where, LinearGroupLaws& g) {
  only_keys(j, where, {"beta0", "beta1", "rho"});
  if (j.contains("beta0")) read_law(j["beta0"], where + ".beta0", g.beta0);
  if (j.contains("beta1")) read_law(j["beta1"], where + ".beta1", g.beta1);
  if (j.contains("rho")) read_law(j["rho"], where + ".rho", g.rho);
}

void read_break_group(const json& j, const std::string& where, BreakGroupLaws& g) {
  only_keys(j, where, {"alpha0", "alpha1", "gamma1", "gamma2", "rho", "break_lo", "break_hi"});
  if (j.contains("alpha0")) read_law(j["alpha0"], where + ".alpha0", g.alpha0);
  if (j.contains("alpha1")) read_law(j["alpha1"], where + ".alpha1", g.alpha1);
  if (j.contains("gamma1")) read_law(j["gamma1"], where + ".gamma1", g.gamma1);
  if (j.contains("gamma2")) read_law(j["gamma2"], where + ".gamma2", g.gamma2);
  if (j.contains("rho")) read_law(j["rho"], where + ".rho", g.rho);
  if (j.contains("break_lo")) g.break_lo = number(j["break_lo"], where + ".break_lo");
  if (j.contains("break_hi")) g.break_hi = number(j["break_hi"], where + ".break_hi");
}

std::vector<Alternative> read_alternatives(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of labels");
  std::vector<Alternative> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw ConfigError(where + " entries must be strings");
    out.push_back(parse_alternative(item.get<std::string>()));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  only_keys(root, "", {"seed", "replications", "workers", "periods", "n1", "n2", "noise",
                       "linear", "break", "observation", "tests", "sweep"});
  ExperimentConfig cfg;
  if (!root.contains("seed")) throw ConfigError("missing mandatory key 'seed'");
  if (!root["seed"].is_number_unsigned() && !(root["seed"].is_number_integer() &&
                                               root["seed"].get<long long>() >= 0)) {
    throw ConfigError("seed must be a non-negative integer");
  }
  cfg.seed = root["seed"].get<std::uint64_t>();
  if (root.contains("replications")) cfg.replications = count(root["replications"], "replications");
  if (root.contains("workers")) {
    cfg.workers = static_cast<unsigned>(count(root["workers"], "workers"));
  }
  for (const char* key : {"periods", "n1", "n2"}) {
    if (!root.contains(key)) continue;
    const std::size_t v = count(root[key], key);
    std::string k = key;
    if (k == "periods") cfg.linear.periods = cfg.broken.periods = v;
    if (k == "n1") cfg.linear.n1 = cfg.broken.n1 = v;
    if (k == "n2") cfg.linear.n2 = cfg.broken.n2 = v;
  }
  if (root.contains("noise")) {
    read_law(root["noise"], "noise", cfg.linear.noise);
    cfg.broken.noise = cfg.linear.noise;
  }
  if (root.contains("linear")) {
    const auto& j = root["linear"];
    only_keys(j, "linear", {"group1", "group2"});
    if (j.contains("group1")) read_linear_group(j["group1"], "linear.group1", cfg.linear.group1);
    if (j.contains("group2")) read_linear_group(j["group2"], "linear.group2", cfg.linear.group2);
  }
  if (root.contains("break")) {
    const auto& j = root["break"];
    only_keys(j, "break", {"group1", "group2"});
    if (j.contains("group1")) read_break_group(j["group1"], "break.group1", cfg.broken.group1);
    if (j.contains("group2")) read_break_group(j["group2"], "break.group2", cfg.broken.group2);
  }
  if (root.contains("observation")) {
    const auto& j = root["observation"];
    const std::string w = "observation";
    only_keys(j, w, {"alternatives", "t_star", "transition", "initial_observed_fraction",
                     "absorbing"});
    auto& o = cfg.observation;
    if (j.contains("alternatives")) cfg.alternatives = read_alternatives(j["alternatives"], path(w, "alternatives"));
    if (j.contains("t_star")) o.t_star = count(j["t_star"], path(w, "t_star"));
    if (j.contains("transition")) {
      const auto& p = j["transition"];
      if (!p.is_array() || p.size() != 2 || !p[0].is_array() || !p[1].is_array() ||
          p[0].size() != 2 || p[1].size() != 2) {
        throw ConfigError("observation.transition must be a 2 x 2 array");
      }
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) o.transition[a][b] = number(p[a][b], "observation.transition");
      }
    }
    if (j.contains("initial_observed_fraction")) {
      o.initial_observed_fraction =
          number(j["initial_observed_fraction"], path(w, "initial_observed_fraction"));
    }
    if (j.contains("absorbing")) {
      if (!j["absorbing"].is_boolean()) throw ConfigError("observation.absorbing must be a boolean");
      o.absorbing = j["absorbing"].get<bool>();
    }
  }
  if (root.contains("tests")) {
    const auto& j = root["tests"];
    only_keys(j, "tests", {"level", "trimming", "max_lag"});
    if (j.contains("level")) cfg.tests.level = number(j["level"], "tests.level");
    if (j.contains("trimming")) cfg.tests.trimming = number(j["trimming"], "tests.trimming");
    if (j.contains("max_lag") && !j["max_lag"].is_null()) {
      cfg.tests.max_lag = static_cast<int>(count(j["max_lag"], "tests.max_lag"));
    }
  }
  if (root.contains("sweep")) {
    const auto& j = root["sweep"];
    only_keys(j, "sweep", {"fractions", "alternative"});
    if (j.contains("fractions")) {
      if (!j["fractions"].is_array()) throw ConfigError("sweep.fractions must be an array");
      cfg.sweep.fractions.clear();
      for (const auto& f : j["fractions"]) cfg.sweep.fractions.push_back(number(f, "sweep.fractions"));
    }
    if (j.contains("alternative")) {
      if (!j["alternative"].is_string()) throw ConfigError("sweep.alternative must be a string");
      cfg.sweep.alternative = parse_alternative(j["alternative"].get<std::string>());
    }
  }
  cfg.validate();
  return cfg;
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  json lin = {
      {"group1", {{"beta0", law_json(cfg.linear.group1.beta0)},
                  {"beta1", law_json(cfg.linear.group1.beta1)},
                  {"rho", law_json(cfg.linear.group1.rho)}}},
      {"group2", {{"beta0", law_json(cfg.linear.group2.beta0)},
                  {"beta1", law_json(cfg.linear.group2.beta1)},
                  {"rho", law_json(cfg.linear.group2.rho)}}},
  };
  auto break_group = [](const BreakGroupLaws& g) {
    return json{{"alpha0", law_json(g.alpha0)}, {"alpha1", law_json(g.alpha1)},
                {"gamma1", law_json(g.gamma1)}, {"gamma2", law_json(g.gamma2)},
                {"rho", law_json(g.rho)},       {"break_lo", g.break_lo},
                {"break_hi", g.break_hi}};
  };
  json alts = json::array();
  for (auto a : cfg.alternatives) alts.push_back(alternative_label(a));
  const auto& o = cfg.observation;
  json root = {
      {"seed", cfg.seed},
      {"replications", cfg.replications},
      {"periods", cfg.linear.periods},
      {"n1", cfg.linear.n1},
      {"n2", cfg.linear.n2},
      {"noise", law_json(cfg.linear.noise)},
      {"linear", lin},
      {"break", {{"group1", break_group(cfg.broken.group1)},
                 {"group2", break_group(cfg.broken.group2)}}},
      {"observation",
       {{"alternatives", alts},
        {"t_star", o.resolved_t_star(cfg.linear.periods)},
        {"transition", {{o.transition[0][0], o.transition[0][1]},
                        {o.transition[1][0], o.transition[1][1]}}},
        {"initial_observed_fraction", o.initial_observed_fraction},
        {"absorbing", o.absorbing}}},
      {"tests", {{"level", cfg.tests.level},
                 {"trimming", cfg.tests.trimming},
                 {"max_lag", cfg.tests.max_lag ? json(*cfg.tests.max_lag) : json(nullptr)}}},
      {"sweep", {{"fractions", cfg.sweep.fractions},
                 {"alternative", alternative_label(cfg.sweep.alternative)}}},
  };
  return root.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  return sha256_hex(resolved_config_json(cfg));
}

}  // namespace gridtrend
