#pragma once

#include "maintcast/labels.hpp"
#include "maintcast/scorecard.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace maintcast {

enum class BlockScheme { Fixed30, CalendarMonth };

struct MonthlyPoint {
    std::string repo_id;
    int block_index = 0;
    Date block_start{};
    double mean_score = 0.0;
    int rounded_score = 0;
    std::int64_t commit_count = 0;
    std::int64_t issue_count = 0;
    double gated_fraction = 0.0;
};

using MonthlyTable = std::map<std::string, std::vector<MonthlyPoint>>;

/// Values are integer codes for Bucket and TrendType.
struct TargetSeries {
    std::string repo_id;
    Representation representation = Representation::Raw;
    std::vector<double> values;
};

/// Fixed30 partitions the period into 30-day blocks from its first day;
/// CalendarMonth uses the calendar months that lie entirely inside the
/// series. Trailing partial blocks are dropped. Throws TooShort when no full
/// block exists.
std::vector<MonthlyPoint> monthly_aggregate(const ScoreSeries& scores, const DailySignals& signals,
                                            BlockScheme scheme = BlockScheme::Fixed30);

Bucket bucket_of(int score);

TargetSeries raw_series(const std::vector<MonthlyPoint>& monthly);
TargetSeries bucketize(const TargetSeries& raw);
/// slope[i] = mean[i + 1] - mean[i]; throws TooShort below two points.
TargetSeries slope_series(const std::vector<double>& means, const std::string& repo_id = {});
Trend trend_of(double slope, double epsilon);
TargetSeries trend_type(const TargetSeries& slopes, double epsilon);

struct FilterResult {
    std::map<std::string, TargetSeries> kept;
    std::size_t removed = 0;
    std::vector<std::string> removed_ids;
};

/// Drops repos whose rounded monthly score is 0 in every block or 10 in every block.
FilterResult filter_constant_extremes(std::map<std::string, TargetSeries> raw);

/// `repo,block,mean_score,rounded,bucket,slope,trend` with header; slope and
/// trend are empty on each repo's first block.
std::string format_targets_csv(const MonthlyTable& monthly, double epsilon);

}  // namespace maintcast
