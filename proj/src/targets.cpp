#include "maintcast/targets.hpp"

#include "maintcast/error.hpp"
#include "maintcast/textio.hpp"

#include <algorithm>

namespace maintcast {

namespace {

MonthlyPoint aggregate_block(const ScoreSeries& scores, const DailySignals& signals, std::size_t from,
                             std::size_t len, int index) {
    MonthlyPoint p;
    p.repo_id = scores.repo_id;
    p.block_index = index;
    p.block_start = add_days(scores.start, static_cast<std::int64_t>(from));
    std::int64_t score_sum = 0, gated = 0;
    for (std::size_t t = from; t < from + len; ++t) {
        score_sum += scores.score[t];
        gated += scores.gate[t];
        p.commit_count += signals.commits[t];
        p.issue_count += signals.issue_activity[t];
    }
    p.mean_score = static_cast<double>(score_sum) / static_cast<double>(len);
    p.rounded_score = static_cast<int>(round_half_away(p.mean_score));
    p.gated_fraction = static_cast<double>(gated) / static_cast<double>(len);
    return p;
}

}  // namespace

std::vector<MonthlyPoint> monthly_aggregate(const ScoreSeries& scores, const DailySignals& signals,
                                            BlockScheme scheme) {
    if (signals.start != scores.start || signals.size() != scores.size())
        throw Error(Errc::ShapeMismatch, "scores and signals are not aligned");
    std::vector<MonthlyPoint> out;
    const std::size_t n = scores.size();
    if (scheme == BlockScheme::Fixed30) {
        for (std::size_t from = 0; from + 30 <= n; from += 30)
            out.push_back(aggregate_block(scores, signals, from, 30, static_cast<int>(out.size())));
    } else {
        using namespace std::chrono;
        const DateRange range{scores.start, add_days(scores.start, static_cast<std::int64_t>(n) - 1)};
        year_month ym = year_month_day{scores.start}.year() / year_month_day{scores.start}.month();
        if (year_month_day{scores.start}.day() != day{1}) ym += months{1};
        for (;; ym += months{1}) {
            const Date first = sys_days{ym / 1};
            const Date end = sys_days{ym / std::chrono::last};
            if (end > range.last) break;
            out.push_back(aggregate_block(scores, signals, static_cast<std::size_t>(range.index_of(first)),
                                          static_cast<std::size_t>(days_between(first, end) + 1),
                                          static_cast<int>(out.size())));
        }
    }
    if (out.empty()) throw Error(Errc::TooShort, scores.repo_id + " has no complete block");
    return out;
}

Bucket bucket_of(int score) {
    if (score <= 2) return Bucket::Low;
    if (score <= 7) return Bucket::Moderate;
    return Bucket::High;
}

TargetSeries raw_series(const std::vector<MonthlyPoint>& monthly) {
    TargetSeries s;
    s.representation = Representation::Raw;
    if (!monthly.empty()) s.repo_id = monthly.front().repo_id;
    for (const auto& p : monthly) s.values.push_back(p.rounded_score);
    return s;
}

TargetSeries bucketize(const TargetSeries& raw) {
    if (raw.representation != Representation::Raw) throw Error(Errc::KindMismatch, "bucketize expects raw scores");
    TargetSeries s{raw.repo_id, Representation::Bucket, {}};
    for (double v : raw.values) s.values.push_back(static_cast<double>(bucket_of(static_cast<int>(v))));
    return s;
}

TargetSeries slope_series(const std::vector<double>& means, const std::string& repo_id) {
    if (means.size() < 2) throw Error(Errc::TooShort, "slope needs at least two monthly points");
    TargetSeries s{repo_id, Representation::Slope, {}};
    for (std::size_t i = 0; i + 1 < means.size(); ++i) s.values.push_back(means[i + 1] - means[i]);
    return s;
}

Trend trend_of(double slope, double epsilon) {
    if (slope < -epsilon) return Trend::Downward;
    if (slope > epsilon) return Trend::Upward;
    return Trend::Stable;
}

TargetSeries trend_type(const TargetSeries& slopes, double epsilon) {
    if (slopes.representation != Representation::Slope) throw Error(Errc::KindMismatch, "trend_type expects slopes");
    if (epsilon < 0) throw Error(Errc::InvalidConfig, "epsilon must be >= 0");
    TargetSeries s{slopes.repo_id, Representation::TrendType, {}};
    for (double v : slopes.values) s.values.push_back(static_cast<double>(trend_of(v, epsilon)));
    return s;
}

FilterResult filter_constant_extremes(std::map<std::string, TargetSeries> raw) {
    FilterResult r;
    for (auto& [id, series] : raw) {
        const auto& v = series.values;
        const bool all_zero = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
        const bool all_ten = std::all_of(v.begin(), v.end(), [](double x) { return x == 10.0; });
        if (all_zero || all_ten) {
            ++r.removed;
            r.removed_ids.push_back(id);
        } else {
            r.kept.emplace(id, std::move(series));
        }
    }
    return r;
}

std::string format_targets_csv(const MonthlyTable& monthly, double epsilon) {
    std::string out = "repo,block,mean_score,rounded,bucket,slope,trend\n";
    for (const auto& [id, points] : monthly) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            out += id + ',' + std::to_string(p.block_index) + ',' + format_double(p.mean_score) + ',' +
                   std::to_string(p.rounded_score) + ',' + std::string(to_string(bucket_of(p.rounded_score))) + ',';
            if (i > 0) {
                const double slope = p.mean_score - points[i - 1].mean_score;
                out += format_double(slope) + ',' + std::string(to_string(trend_of(slope, epsilon)));
            } else {
                out += ',';
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace maintcast
