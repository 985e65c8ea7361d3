#include "maintcast/features.hpp"

#include "maintcast/error.hpp"
#include "maintcast/textio.hpp"

#include <algorithm>
#include <cmath>

namespace maintcast {

std::array<double, kBaseFeatureCount> base_features(const MonthlyPoint& p) {
    return {p.mean_score, static_cast<double>(p.commit_count), static_cast<double>(p.issue_count), p.gated_fraction};
}

void SampleSet::push_back(std::span<const double> r, double target, int horizon, SampleOrigin origin) {
    if (r.size() != row_width()) throw Error(Errc::ShapeMismatch, "sample row width");
    inputs.insert(inputs.end(), r.begin(), r.end());
    targets.push_back(target);
    horizons.push_back(horizon);
    origins.push_back(std::move(origin));
}

SampleSet SampleSet::subset(std::span<const std::size_t> indices) const {
    SampleSet s;
    s.task = task;
    s.window = window;
    s.features = features;
    for (auto i : indices) s.push_back(row(i), targets[i], horizons[i], origins[i]);
    return s;
}

std::optional<double> target_at(const std::vector<const MonthlyPoint*>& by_block, Representation task, int block,
                                double epsilon) {
    auto at = [&](int b) -> const MonthlyPoint* {
        if (b < 0 || b >= static_cast<int>(by_block.size())) return nullptr;
        return by_block[static_cast<std::size_t>(b)];
    };
    const MonthlyPoint* p = at(block);
    if (!p) return std::nullopt;
    switch (task) {
        case Representation::Raw: return static_cast<double>(p->rounded_score);
        case Representation::Bucket: return static_cast<double>(bucket_of(p->rounded_score));
        case Representation::Slope:
        case Representation::TrendType: {
            const MonthlyPoint* prev = at(block - 1);
            if (!prev) return std::nullopt;
            const double slope = p->mean_score - prev->mean_score;
            if (task == Representation::Slope) return slope;
            return static_cast<double>(trend_of(slope, epsilon));
        }
    }
    return std::nullopt;
}

SampleSet make_windowed_samples(const MonthlyTable& monthly, Representation task, int window, int horizon,
                                BlockRange range, double epsilon) {
    if (window < 1 || horizon < 1) throw Error(Errc::InvalidSpec, "window and horizon must be positive");
    SampleSet out;
    out.task = task;
    out.window = window;
    out.features = kBaseFeatureCount;
    std::vector<double> row(out.row_width());
    for (const auto& [id, points] : monthly) {
        int max_block = -1;
        for (const auto& p : points) max_block = std::max(max_block, p.block_index);
        std::vector<const MonthlyPoint*> by_block(static_cast<std::size_t>(max_block + 1), nullptr);
        for (const auto& p : points)
            if (p.block_index >= 0) by_block[static_cast<std::size_t>(p.block_index)] = &p;

        for (int end = range.first + window - 1; end + horizon <= range.last; ++end) {
            const int target_block = end + horizon;
            bool complete = true;
            for (int b = end - window + 1; b <= end && complete; ++b) {
                if (b >= static_cast<int>(by_block.size()) || !by_block[static_cast<std::size_t>(b)]) {
                    complete = false;
                    break;
                }
                const auto f = base_features(*by_block[static_cast<std::size_t>(b)]);
                std::copy(f.begin(), f.end(), row.begin() + (b - (end - window + 1)) * kBaseFeatureCount);
            }
            if (!complete) continue;
            // slope targets need the previous block inside the permitted range as well
            if ((task == Representation::Slope || task == Representation::TrendType) && target_block - 1 < range.first)
                continue;
            auto target = target_at(by_block, task, target_block, epsilon);
            if (!target) continue;
            out.push_back(row, *target, horizon, {id, end});
        }
    }
    if (out.empty())
        throw Error(Errc::EmptySampleSet, "no repo has " + std::to_string(window + horizon) + " consecutive blocks in [" +
                                              std::to_string(range.first) + ", " + std::to_string(range.last) + "]");
    return out;
}

std::size_t varma_feature_count(int t, int f) {
    const auto T = static_cast<std::size_t>(t), F = static_cast<std::size_t>(f);
    return T * F + 4 * F + (T - 1) * F + F * (F - 1) / 2 + F;
}

std::vector<double> varma_feature_expand(std::span<const double> window, int t, int f) {
    const auto T = static_cast<std::size_t>(t), F = static_cast<std::size_t>(f);
    if (window.size() != T * F) throw Error(Errc::ShapeMismatch, "window size does not match t * f");
    std::vector<double> out;
    out.reserve(varma_feature_count(t, f));
    auto at = [&](std::size_t b, std::size_t j) { return window[b * F + j]; };

    out.insert(out.end(), window.begin(), window.end());

    std::vector<double> means(F);
    for (std::size_t j = 0; j < F; ++j) {
        double sum = 0.0, lo = at(0, j), hi = at(0, j);
        for (std::size_t b = 0; b < T; ++b) {
            sum += at(b, j);
            lo = std::min(lo, at(b, j));
            hi = std::max(hi, at(b, j));
        }
        const double mean = sum / static_cast<double>(T);
        double ss = 0.0;
        for (std::size_t b = 0; b < T; ++b) ss += (at(b, j) - mean) * (at(b, j) - mean);
        means[j] = mean;
        out.push_back(mean);
        out.push_back(std::sqrt(ss / static_cast<double>(T)));
        out.push_back(lo);
        out.push_back(hi);
    }
    for (std::size_t j = 0; j < F; ++j)
        for (std::size_t b = 1; b < T; ++b) out.push_back(at(b, j) - at(b - 1, j));
    for (std::size_t a = 0; a < F; ++a)
        for (std::size_t b = a + 1; b < F; ++b) out.push_back(means[a] * means[b]);
    for (std::size_t j = 0; j < F; ++j) out.push_back(at(T - 1, j) - at(0, j));
    return out;
}

Table flatten_samples(const SampleSet& samples) {
    return {samples.size(), samples.row_width(), samples.inputs};
}

std::vector<double> unflatten(const Table& table, int t, int f) {
    if (table.cols != static_cast<std::size_t>(t) * static_cast<std::size_t>(f))
        throw Error(Errc::ShapeMismatch, "table width does not match t * f");
    return table.data;
}

Table varma_table(const SampleSet& samples) {
    Table t;
    t.rows = samples.size();
    t.cols = varma_feature_count(samples.window, samples.features);
    t.data.reserve(t.rows * t.cols);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto v = varma_feature_expand(samples.row(i), samples.window, samples.features);
        t.data.insert(t.data.end(), v.begin(), v.end());
    }
    return t;
}

Standardizer Standardizer::fit_columns(std::span<const double> data, std::size_t cols) {
    Standardizer s;
    s.mean.assign(cols, 0.0);
    s.scale.assign(cols, 1.0);
    const std::size_t rows = cols ? data.size() / cols : 0;
    if (rows == 0) return s;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) s.mean[j] += data[i * cols + j];
    for (auto& m : s.mean) m /= static_cast<double>(rows);
    std::vector<double> var(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double d = data[i * cols + j] - s.mean[j];
            var[j] += d * d;
        }
    for (std::size_t j = 0; j < cols; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(rows));
        s.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

Standardizer Standardizer::fit(const Table& table) { return fit_columns(table.data, table.cols); }

void Standardizer::apply_inplace(std::span<double> row) const {
    const std::size_t cols = mean.size();
    for (std::size_t k = 0; k < row.size(); ++k) {
        const std::size_t j = k % cols;
        row[k] = (row[k] - mean[j]) / scale[j];
    }
}

Table Standardizer::apply(const Table& table) const {
    if (table.cols != mean.size()) throw Error(Errc::ShapeMismatch, "standardizer width");
    Table out = table;
    apply_inplace(out.data);
    return out;
}

std::string format_samples_csv(const SampleSet& samples) {
    std::string out = "repo,last_input_block,horizon,target";
    for (int b = 0; b < samples.window; ++b)
        for (int j = 0; j < samples.features; ++j) out += ",b" + std::to_string(b) + "_f" + std::to_string(j);
    out += '\n';
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out += samples.origins[i].repo_id + ',' + std::to_string(samples.origins[i].last_input_block) + ',' +
               std::to_string(samples.horizons[i]) + ',' + format_double(samples.targets[i]);
        for (double v : samples.row(i)) out += ',' + format_double(v);
        out += '\n';
    }
    return out;
}

}  // namespace maintcast
