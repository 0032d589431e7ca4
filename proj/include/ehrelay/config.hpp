#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehrelay/model.hpp"
#include "ehrelay/optimizers.hpp"
#include "ehrelay/simulator.hpp"

namespace ehrelay {

using Json = nlohmann::json;

/// Everything a CLI run can read from its config file.
struct ExperimentConfig {
  SystemParams params;
  std::optional<Policy> policy;
  std::vector<double> alpha_grid;
  SimConfig sim;
  double eps = 0.01;
};

/// Errors in shape or range surface as InvalidParams.
SystemParams params_from_json(const Json& j);
Policy policy_from_json(const Json& j, const SystemParams& params);
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

/// "start:step:stop" (inclusive, tolerant to rounding) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

Json to_json(const SystemParams& params);
Json to_json(const Policy& policy);
Json to_json(const OptimizationResult& result, bool include_trace = true);
Json to_json(const SimStats& stats);

/// 12 significant digits, '.' decimal, independent of locale.
std::string format_real(double value);

}  // namespace ehrelay
