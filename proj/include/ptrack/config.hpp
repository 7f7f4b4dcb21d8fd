#pragma once

#include "ptrack/eval.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace ptrack {

enum class Method { greedy, lp, both };

Method parse_method(const std::string& name);
std::string to_string(Method m);

/// Everything the command-line front end reads from a config file.
struct RunConfig {
    ExperimentConfig experiment;
    Method method = Method::both;
};

/// Objects merge key by key; every other value, null included, replaces
/// what is in `base`. Null is how a config spells "none" (no noise, no
/// threshold), so it must survive the merge.
void merge_overrides(nlohmann::json& base, const nlohmann::json& patch);

/// Defaults merged with `overrides` through merge_overrides.
RunConfig load_config(const nlohmann::json& overrides);
RunConfig load_config_file(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);

/// Module-level invariants. The chirp-band check of the experiment only
/// runs when `for_experiment` is set.
void validate(const RunConfig& cfg, bool for_experiment);

} // namespace ptrack
