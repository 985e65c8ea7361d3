#pragma once

#include "maintcast/labels.hpp"
#include "maintcast/targets.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace maintcast {

/// Per-block inputs: mean score, commit count, issue count, gated fraction.
inline constexpr int kBaseFeatureCount = 4;

std::array<double, kBaseFeatureCount> base_features(const MonthlyPoint& p);

struct SampleOrigin {
    std::string repo_id;
    int last_input_block = 0;
};

/// Supervised samples shaped (n, window, features), stored block-major.
struct SampleSet {
    Representation task = Representation::Raw;
    int window = 0;
    int features = kBaseFeatureCount;
    std::vector<double> inputs;
    std::vector<double> targets;
    std::vector<int> horizons;
    std::vector<SampleOrigin> origins;

    std::size_t size() const { return targets.size(); }
    bool empty() const { return targets.empty(); }
    std::size_t row_width() const { return static_cast<std::size_t>(window) * static_cast<std::size_t>(features); }
    std::span<const double> row(std::size_t i) const { return {inputs.data() + i * row_width(), row_width()}; }
    int first_input_block(std::size_t i) const { return origins[i].last_input_block - window + 1; }
    int target_block(std::size_t i) const { return origins[i].last_input_block + horizons[i]; }

    void push_back(std::span<const double> row, double target, int horizon, SampleOrigin origin);
    SampleSet subset(std::span<const std::size_t> indices) const;
};

/// Inclusive block range.
struct BlockRange {
    int first = 0;
    int last = -1;

    bool contains(int b) const { return first <= b && b <= last; }
};

/// Target of `task` at `block`, or nullopt when a needed block is missing.
/// Slope and trend targets use the difference to the previous block.
std::optional<double> target_at(const std::vector<const MonthlyPoint*>& by_block, Representation task, int block,
                                double epsilon);

/// Pooled direct-forecast samples from every repo: window blocks
/// [e - window + 1, e] predict block e + horizon, with all blocks inside
/// `range`. Ordered by repo id then block. Throws EmptySampleSet.
SampleSet make_windowed_samples(const MonthlyTable& monthly, Representation task, int window, int horizon,
                                BlockRange range, double epsilon = 0.5);

/// Number of features varma_feature_expand emits for a (window, features) slice.
std::size_t varma_feature_count(int window, int features);

/// Fixed-order expansion of one (window, features) slice:
///   lags of every feature (block-major), per-feature mean/std/min/max,
///   per-feature first differences, pairwise products of feature means,
///   per-feature last-minus-first trend.
/// std is the population standard deviation.
std::vector<double> varma_feature_expand(std::span<const double> window, int t, int f);

/// Row-major 2-D table.
struct Table {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// (n, t, f) -> (n, t * f), block-major then feature.
Table flatten_samples(const SampleSet& samples);
std::vector<double> unflatten(const Table& table, int t, int f);

Table varma_table(const SampleSet& samples);

/// Column standardization fitted on training rows only. Constant columns keep
/// scale 1 so they map to 0.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Table& table);
    static Standardizer fit_columns(std::span<const double> data, std::size_t cols);
    void apply_inplace(std::span<double> row) const;
    Table apply(const Table& table) const;
};

/// `repo,last_input_block,horizon,target,<features...>` for debugging.
std::string format_samples_csv(const SampleSet& samples);

}  // namespace maintcast
