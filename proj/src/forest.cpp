#include "maintcast/forest.hpp"

#include "maintcast/error.hpp"
#include "maintcast/rng.hpp"

#include <algorithm>
#include <numeric>

namespace maintcast {

void ForestParams::validate() const {
    if (n_trees < 1) throw Error(Errc::InvalidConfig, "forest needs at least one tree");
    if (max_depth < 0) throw Error(Errc::InvalidConfig, "max_depth must be >= 0");
    if (min_samples_split < 2) throw Error(Errc::InvalidConfig, "min_samples_split must be >= 2");
}

std::vector<std::vector<std::uint32_t>> presort_columns(const Table& x) {
    std::vector<std::vector<std::uint32_t>> order(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) {
        auto& o = order[j];
        o.resize(x.rows);
        std::iota(o.begin(), o.end(), 0u);
        std::stable_sort(o.begin(), o.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return x.data[a * x.cols + j] < x.data[b * x.cols + j]; });
    }
    return order;
}

namespace {

struct Frame {
    std::size_t lo, hi;  // range into every per-feature order array
    int node;
    int depth;
};

}  // namespace

RegressionTree RegressionTree::fit(const Table& x, std::span<const double> y, std::span<const std::uint32_t> weights,
                                   const std::vector<std::vector<std::uint32_t>>& presorted, int max_depth,
                                   int min_samples_split) {
    const std::size_t F = x.cols;
    auto value = [&](std::uint32_t i, std::size_t j) { return x.data[i * F + j]; };

    // per-feature orders restricted to rows in the sample
    std::vector<std::vector<std::uint32_t>> order(F);
    for (std::size_t j = 0; j < F; ++j) {
        order[j].reserve(x.rows);
        for (auto i : presorted[j])
            if (weights[i] > 0) order[j].push_back(i);
    }
    const std::size_t m = F ? order[0].size() : 0;
    if (m == 0) throw Error(Errc::EmptyTrainingSet, "tree has no weighted rows");

    RegressionTree tree;
    std::vector<std::uint8_t> goes_left(x.rows, 0);
    std::vector<std::uint32_t> scratch(m);
    std::vector<Frame> stack{{0, m, 0, 0}};
    tree.nodes_.emplace_back();

    while (!stack.empty()) {
        const Frame fr = stack.back();
        stack.pop_back();
        const auto& rows = order[0];
        double w = 0.0, wy = 0.0;
        double ymin = y[rows[fr.lo]], ymax = ymin;
        for (std::size_t p = fr.lo; p < fr.hi; ++p) {
            const auto i = rows[p];
            w += weights[i];
            wy += weights[i] * y[i];
            ymin = std::min(ymin, y[i]);
            ymax = std::max(ymax, y[i]);
        }
        tree.nodes_[static_cast<std::size_t>(fr.node)].value = wy / w;
        if (ymin == ymax || w < min_samples_split || (max_depth > 0 && fr.depth >= max_depth)) continue;

        // maximize wy_l^2 / w_l + wy_r^2 / w_r, i.e. minimize child SSE
        double best_score = -1.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;
        for (std::size_t j = 0; j < F; ++j) {
            const auto& o = order[j];
            double wl = 0.0, wyl = 0.0;
            for (std::size_t p = fr.lo; p + 1 < fr.hi; ++p) {
                const auto i = o[p];
                wl += weights[i];
                wyl += weights[i] * y[i];
                const double a = value(i, j), b = value(o[p + 1], j);
                if (!(a < b)) continue;
                const double wr = w - wl, wyr = wy - wyl;
                const double score = wyl * wyl / wl + wyr * wyr / wr;
                if (!found || score > best_score) {
                    found = true;
                    best_score = score;
                    best_feature = j;
                    double mid = a + (b - a) / 2.0;
                    if (!(mid < b)) mid = a;
                    best_threshold = mid;
                }
            }
        }
        if (!found) continue;

        for (std::size_t p = fr.lo; p < fr.hi; ++p) {
            const auto i = order[0][p];
            goes_left[i] = value(i, best_feature) <= best_threshold ? 1 : 0;
        }
        std::size_t n_left = 0;
        for (std::size_t j = 0; j < F; ++j) {
            auto& o = order[j];
            std::size_t l = fr.lo, r = 0;
            for (std::size_t p = fr.lo; p < fr.hi; ++p) {
                if (goes_left[o[p]]) o[l++] = o[p];
                else scratch[r++] = o[p];
            }
            std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(r),
                      o.begin() + static_cast<std::ptrdiff_t>(l));
            n_left = l - fr.lo;
        }

        const int left = static_cast<int>(tree.nodes_.size());
        const int right = left + 1;
        tree.nodes_.emplace_back();
        tree.nodes_.emplace_back();
        auto& node = tree.nodes_[static_cast<std::size_t>(fr.node)];
        node.feature = static_cast<int>(best_feature);
        node.threshold = best_threshold;
        node.left = left;
        node.right = right;
        stack.push_back({fr.lo + n_left, fr.hi, right, fr.depth + 1});
        stack.push_back({fr.lo, fr.lo + n_left, left, fr.depth + 1});
    }
    return tree;
}

double RegressionTree::predict(std::span<const double> row) const {
    std::size_t k = 0;
    while (nodes_[k].feature >= 0) {
        const auto& n = nodes_[k];
        k = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes_[k].value;
}

std::size_t RegressionTree::depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t best = 0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        best = std::max(best, d[k]);
        if (nodes_[k].feature >= 0) {
            d[static_cast<std::size_t>(nodes_[k].left)] = d[k] + 1;
            d[static_cast<std::size_t>(nodes_[k].right)] = d[k] + 1;
        }
    }
    return best;
}

RegressionTree RegressionTree::from_nodes(std::vector<TreeNode> nodes) {
    if (nodes.empty()) throw Error(Errc::ShapeMismatch, "tree without nodes");
    RegressionTree t;
    t.nodes_ = std::move(nodes);
    return t;
}

RandomForest RandomForest::fit(const Table& x, std::span<const double> y, const ForestParams& params,
                               std::uint64_t seed) {
    params.validate();
    if (x.rows == 0 || y.size() != x.rows) throw Error(Errc::EmptyTrainingSet, "forest needs rows and targets");
    const auto presorted = presort_columns(x);
    RandomForest forest;
    forest.median_ = params.median;
    forest.trees_.reserve(static_cast<std::size_t>(params.n_trees));
    std::vector<std::uint32_t> weights(x.rows);
    for (int k = 0; k < params.n_trees; ++k) {
        if (params.bootstrap) {
            std::fill(weights.begin(), weights.end(), 0u);
            Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
            for (std::size_t s = 0; s < x.rows; ++s) ++weights[rng.below(x.rows)];
        } else {
            std::fill(weights.begin(), weights.end(), 1u);
        }
        forest.trees_.push_back(
            RegressionTree::fit(x, y, weights, presorted, params.max_depth, params.min_samples_split));
    }
    return forest;
}

double RandomForest::predict(std::span<const double> row) const {
    std::vector<double> votes;
    votes.reserve(trees_.size());
    for (const auto& t : trees_) votes.push_back(t.predict(row));
    if (median_) {
        std::sort(votes.begin(), votes.end());
        const std::size_t n = votes.size();
        return n % 2 ? votes[n / 2] : 0.5 * (votes[n / 2 - 1] + votes[n / 2]);
    }
    double s = 0.0;
    for (double v : votes) s += v;
    return s / static_cast<double>(votes.size());
}

RandomForest RandomForest::from_trees(std::vector<RegressionTree> trees, bool median) {
    RandomForest f;
    f.trees_ = std::move(trees);
    f.median_ = median;
    return f;
}

}  // namespace maintcast
