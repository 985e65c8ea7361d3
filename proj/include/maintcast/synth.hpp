#pragma once

#include "maintcast/date.hpp"
#include "maintcast/ingest.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace maintcast {

struct Persistent {
    int level = 10;
};
struct Decaying {
    double start = 10.0;  // initial score level
    double half_life_days = 180.0;
};
struct Bursty {
    double base_rate = 0.02;  // expected activities per day outside bursts
    double burst_rate = 0.4;
    double burst_prob = 0.3;  // per 30-day segment
};
struct Abandoned {
    int active_days = 180;
};
struct Noise {
    double rate = 0.05;
};

using Regime = std::variant<Persistent, Decaying, Bursty, Abandoned, Noise>;

std::string regime_name(const Regime& r);

struct RegimeSpec {
    std::string repo_id;
    Regime regime;
    std::uint64_t seed = 0;
    Date created_on{};
    std::optional<Date> archived_on;
    int n_days = 365;

    /// Empty when valid.
    std::vector<std::string> problems() const;
    DateRange span() const { return {created_on, add_days(created_on, n_days - 1)}; }
};

struct SyntheticRepo {
    RepoMetadata meta;
    std::vector<ActivityEvent> events;  // canonical order
};

/// Throws InvalidSpec. Persistent(level) places round(level * 9 / 7)
/// activities evenly in every 90-day period, so each trailing window holds
/// the same count.
SyntheticRepo generate_repo_activity(const RegimeSpec& spec);

/// Corpus period is the union of all spans. Throws InvalidSpec on an empty list.
Corpus generate_corpus(const std::vector<RegimeSpec>& specs);

struct MixedPreset {
    int persistent = 120;  // levels cycle 1, 4, 5, 6, 9
    int decaying = 40;
    int bursty = 40;
    std::uint64_t seed = 7;
    Date created_on = make_date(2020, 10, 1);
    int n_days = 1187;  // through 2023-12-31
};

std::vector<RegimeSpec> mixed_preset(const MixedPreset& preset = {});

/// One library per repo plus a few without a repo; edges point from a
/// dependent to its dependency.
DependencySnapshot synthetic_dependencies(const std::vector<std::string>& repo_ids, std::uint64_t seed,
                                          int unlinked_libraries = 5);
std::string format_dependency_edges(const DependencySnapshot& snapshot);
std::string format_library_map(const DependencySnapshot& snapshot);

}  // namespace maintcast
