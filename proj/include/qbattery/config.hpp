#pragma once

// Run configuration for the qb command-line tool: a JSON document merged
// over defaults, then overridden by flags.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qbattery/analysis.hpp"
#include "qbattery/model.hpp"

namespace qbattery {

struct ScalingSet {
  std::string label;
  ModelParams params;
};

struct SyntheticLaw {
  double alpha = 0.0;
  double beta = 0.0;
};

struct RunConfig {
  std::string command;
  ModelParams params;
  ChargingProtocol protocol;
  std::vector<SweepAxis> axes;  // sweep and phase: exactly two
  SweepQuantity quantity = SweepQuantity::e_max;
  int n_min = 1;
  int n_max = 30;
  std::vector<ScalingSet> scaling_sets;  // empty: one set from `params`
  std::optional<SyntheticLaw> synthetic;  // scaling test hook, skips the physics
  std::vector<int> factors{4, 5};
  std::vector<std::string> only;  // reproduce sub-jobs, empty means all
  std::filesystem::path out_dir = "qb_out";
  std::set<std::string> formats{"csv", "json"};
  int threads = 0;
  std::size_t max_dim = kDefaultMaxDim;
};

/// Merges a config document into `config`. Unknown keys and ill-typed values
/// raise InvalidArgument.
void merge_config(RunConfig& config, const nlohmann::json& doc);

/// "g=0.1,0.5,2" (explicit values) or "eta=-10:10:101" (start:stop:count).
SweepAxis parse_axis(std::string_view text);

/// "1:30" -> {1, 30}
std::pair<int, int> parse_int_range(std::string_view text);

std::vector<std::string> split_list(std::string_view text);

/// Validates command-specific requirements (axis count, ranges, formats).
void validate_config(const RunConfig& config);

nlohmann::ordered_json to_json(const ModelParams& params);
nlohmann::ordered_json to_json(const ChargingProtocol& protocol, const ModelParams& params);
nlohmann::ordered_json to_json(const SweepAxis& axis);

/// ModelParams unit conventions recorded in every sidecar.
nlohmann::ordered_json units_json();

}  // namespace qbattery
