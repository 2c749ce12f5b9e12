#ifndef CRFVE_TOOLS_SETTINGS_HPP_
#define CRFVE_TOOLS_SETTINGS_HPP_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crfve/experiment.hpp"
#include "crfve/verify.hpp"

namespace crfve::cli {

// Command-line values that take precedence over the JSON config file.
struct Overrides {
  std::optional<int> n;
  std::optional<int> m;
  std::optional<int> freq;
  std::optional<double> alpha1;
  std::optional<std::string> variant;
  std::optional<double> tol;
  std::optional<int> maxit;
  std::optional<std::string> preset;
  std::optional<std::string> stopping;
  std::optional<std::string> diagonal;
  std::optional<std::vector<int>> red_mask;
};

// Keys: n, m, freq, alpha1, red_mask, preset, variant, tol, maxit, stopping,
// f, seed, diagonal. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
void apply(const Overrides& overrides, ExperimentConfig& config);

// Reads the file when `path` is nonempty, otherwise returns defaults; then
// applies the overrides and validates.
ExperimentConfig load_config(const std::string& path, const Overrides& overrides);
nlohmann::json read_json_file(const std::string& path);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const Report& report, bool with_histories);
nlohmann::json to_json(const VerifyReport& report);

Diagonal parse_diagonal(const std::string& name);
std::string to_string(Diagonal diagonal);

}  // namespace crfve::cli

#endif  // CRFVE_TOOLS_SETTINGS_HPP_
