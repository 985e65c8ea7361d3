#pragma once

#include "maintcast/date.hpp"
#include "maintcast/eval.hpp"
#include "maintcast/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace maintcast {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    struct Paths {
        std::filesystem::path events;
        std::filesystem::path metadata;
        std::filesystem::path dependencies;
        std::filesystem::path library_map;
        std::filesystem::path output_dir = "out";
    } paths;

    DateRange period{make_date(2021, 1, 1), make_date(2023, 12, 31)};
    double selection_fraction = 0.01;
    GridSpec grid;

    bool gate_boundary_inclusive = true;
    bool calendar_months = false;
    bool forest_median = false;
    bool reverse_pagerank_edges = false;
    /// Evaluate only repos behind the selected libraries (needs dependencies).
    bool restrict_to_selection = false;

    // model knobs
    int forest_trees = 100;
    int lstm_max_epochs = 50;
    double ridge_lambda = 1.0;

    MixedPreset synth;

    struct Fetch {
        std::string endpoint = "https://api.github.com/graphql";
        std::string token_env = "GITHUB_TOKEN";
        int request_budget = 50;
        std::vector<std::string> repos;
    } fetch;
};

/// INI text with sections [paths] [period] [selection] [grid] [flags]
/// [models] [synth] [fetch]. Unknown keys are rejected. Throws InvalidConfig.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical INI rendering; parse_config(format_config(c)) reproduces c.
std::string format_config(const RunConfig& config);
/// FNV-1a of the canonical rendering, 16 hex digits.
std::string config_hash(const RunConfig& config);

enum class PathCheck { None, Inputs, InputsAndDependencies };

/// Every problem found, not only the first.
std::vector<std::string> validate_config(const RunConfig& config, PathCheck check = PathCheck::None);

/// Throws InvalidConfig on anything but YYYY-MM-DD (or a full timestamp).
Date config_date(const std::string& text);

/// "3,5,7" or "3-12" or a mix such as "3-5,9".
std::vector<int> parse_int_list(const std::string& text);

}  // namespace maintcast
