#pragma once

#include "maintcast/features.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace maintcast {

struct ForestParams {
    int n_trees = 100;
    int max_depth = 0;  // 0 = unrestricted
    int min_samples_split = 2;
    bool bootstrap = true;
    bool median = false;  // aggregate trees by median instead of mean

    void validate() const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

/// CART regression tree with sum-of-squared-error splits over every feature.
/// `weights` holds per-row multiplicities (bootstrap counts); rows with weight
/// 0 are ignored. `presorted[j]` lists all row indices ordered by column j.
class RegressionTree {
public:
    static RegressionTree fit(const Table& x, std::span<const double> y, std::span<const std::uint32_t> weights,
                              const std::vector<std::vector<std::uint32_t>>& presorted, int max_depth,
                              int min_samples_split);

    double predict(std::span<const double> row) const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t depth() const;

    static RegressionTree from_nodes(std::vector<TreeNode> nodes);

private:
    std::vector<TreeNode> nodes_;
};

std::vector<std::vector<std::uint32_t>> presort_columns(const Table& x);

class RandomForest {
public:
    /// Tree k draws its bootstrap from derive_seed(seed, {k}).
    static RandomForest fit(const Table& x, std::span<const double> y, const ForestParams& params, std::uint64_t seed);

    double predict(std::span<const double> row) const;
    const std::vector<RegressionTree>& trees() const { return trees_; }
    bool uses_median() const { return median_; }

    static RandomForest from_trees(std::vector<RegressionTree> trees, bool median);

private:
    std::vector<RegressionTree> trees_;
    bool median_ = false;
};

}  // namespace maintcast
