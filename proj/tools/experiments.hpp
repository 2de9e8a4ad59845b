#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace freectl::cli {

using nlohmann::json;

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RunContext {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // CSVs written, relative to output_dir

  /// Opens output_dir/name for writing and records it.
  std::ofstream csv(const std::string& name);
};

struct ExperimentResult {
  json results = json::object();
  std::vector<Check> checks;
};

struct Experiment {
  std::string kind;
  std::string summary;
  /// Every accepted parameter with its default; user blocks may only override these keys.
  json defaults;
  std::function<ExperimentResult(const json& params, RunContext& ctx)> run;
};

const std::vector<Experiment>& experiments();
const Experiment* find_experiment(const std::string& kind);

/// defaults overlaid with `user`; throws io::SchemaError on unknown keys or
/// mismatched JSON types.
json merge_params(const json& defaults, const json& user, const std::string& where);

}  // namespace freectl::cli
