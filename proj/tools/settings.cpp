#include "settings.hpp"

#include <fstream>
#include <set>

#include "crfve/errors.hpp"

namespace crfve::cli {

using nlohmann::json;

Diagonal parse_diagonal(const std::string& name) {
  if (name == "sw-ne") return Diagonal::kSouthWestToNorthEast;
  if (name == "se-nw") return Diagonal::kSouthEastToNorthWest;
  throw InvalidParameter("unknown diagonal '" + name + "' (expected sw-ne or se-nw)");
}

std::string to_string(Diagonal diagonal) {
  return diagonal == Diagonal::kSouthWestToNorthEast ? "sw-ne" : "se-nw";
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidParameter("config must be a JSON object");
  static const std::set<std::string> known = {"n",    "m",   "freq",  "alpha1",   "red_mask",
                                              "preset", "variant", "tol", "maxit", "stopping",
                                              "f",    "seed", "diagonal"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw InvalidParameter("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    c.n = doc.value("n", c.n);
    c.m = doc.value("m", c.m);
    c.freq = doc.value("freq", c.freq);
    c.alpha1 = doc.value("alpha1", c.alpha1);
    c.red_mask = doc.value("red_mask", c.red_mask);
    c.preset = doc.value("preset", c.preset);
    c.tol = doc.value("tol", c.tol);
    c.maxit = doc.value("maxit", c.maxit);
    c.f = doc.value("f", c.f);
    c.seed = doc.value("seed", c.seed);
    if (doc.contains("variant")) c.variant = parse_variant(doc.at("variant").get<std::string>());
    if (doc.contains("stopping")) c.stopping = parse_stopping_rule(doc.at("stopping").get<std::string>());
    if (doc.contains("diagonal")) c.diagonal = parse_diagonal(doc.at("diagonal").get<std::string>());
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("config: ") + e.what());
  }
  return c;
}

void apply(const Overrides& o, ExperimentConfig& c) {
  if (o.n) c.n = *o.n;
  if (o.m) c.m = *o.m;
  if (o.freq) c.freq = *o.freq;
  if (o.alpha1) c.alpha1 = *o.alpha1;
  if (o.variant) c.variant = parse_variant(*o.variant);
  if (o.tol) c.tol = *o.tol;
  if (o.maxit) c.maxit = *o.maxit;
  if (o.preset) c.preset = *o.preset;
  if (o.stopping) c.stopping = parse_stopping_rule(*o.stopping);
  if (o.diagonal) c.diagonal = parse_diagonal(*o.diagonal);
  if (o.red_mask) c.red_mask = *o.red_mask;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidParameter("config file '" + path + "': " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  ExperimentConfig config = path.empty() ? ExperimentConfig{} : config_from_json(read_json_file(path));
  apply(overrides, config);
  config.validate();
  return config;
}

json to_json(const ExperimentConfig& c) {
  return json{{"n", c.n},
              {"m", c.m},
              {"freq", c.freq},
              {"alpha1", c.alpha1},
              {"red_mask", c.resolved_mask()},
              {"preset", c.preset},
              {"variant", to_string(c.variant)},
              {"tol", c.tol},
              {"maxit", c.maxit},
              {"stopping", to_string(c.stopping)},
              {"f", c.f},
              {"seed", c.seed},
              {"diagonal", to_string(c.diagonal)}};
}

json to_json(const Report& r, bool with_histories) {
  json out{{"config", to_json(r.config)},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"total_dofs", r.total_dofs},
           {"free_dofs", r.free_dofs},
           {"seconds",
            {{"assembly", r.seconds.assembly}, {"setup", r.seconds.setup}, {"solve", r.seconds.solve}}},
           {"final_residual",
            {{"unpreconditioned_l2", r.residual_l2.empty() ? 0.0 : r.residual_l2.back()},
             {"preconditioned_l2",
              r.residual_preconditioned_l2.empty() ? 0.0 : r.residual_preconditioned_l2.back()},
             {"energy", r.residual_energy.empty() ? 0.0 : r.residual_energy.back()}}}};
  if (r.estimates) {
    out["cp_est"] = r.estimates->cp;
    out["Cp_est"] = r.estimates->Cp;
  } else {
    out["cp_est"] = nullptr;
    out["Cp_est"] = nullptr;
  }
  if (with_histories) {
    out["residual_history"] = {{"unpreconditioned_l2", r.residual_l2},
                               {"preconditioned_l2", r.residual_preconditioned_l2},
                               {"energy", r.residual_energy}};
  }
  return out;
}

json to_json(const VerifyReport& report) {
  json checks = json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"expected", c.expected},
                      {"detail", c.detail}});
  }
  return json{{"passed", report.passed()}, {"checks", checks}, {"warnings", report.warnings}};
}

}  // namespace crfve::cli
