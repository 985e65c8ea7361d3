#pragma once

#include "maintcast/date.hpp"
#include "maintcast/ingest.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace maintcast {

/// Constants of the Maintained check. The perfect score corresponds to
/// activity_per_week activities per week across the lookback window.
struct ScoreParams {
    int lookback_days = 90;
    int activity_per_week = 1;
    int days_in_one_week = 7;
    /// When true the gate is already open on exactly created_on + lookback_days.
    bool gate_boundary_inclusive = true;

    void validate() const;
};

/// Per-day commit count C and deduplicated core-role issue count I.
struct DailySignals {
    std::string repo_id;
    Date start{};
    std::vector<std::int64_t> commits;
    std::vector<std::int64_t> issue_activity;

    std::size_t size() const { return commits.size(); }
    DateRange range() const { return {start, add_days(start, static_cast<std::int64_t>(size()) - 1)}; }
};

struct RollingSums {
    std::string repo_id;
    Date start{};
    std::vector<std::int64_t> commit_sum;
    std::vector<std::int64_t> issue_sum;

    std::size_t size() const { return commit_sum.size(); }
};

struct Gate {
    Date start{};
    std::vector<std::uint8_t> open;
    Date gate_open{};   // created_on + lookback
    Date gate_close{};  // archival date, else the last day of the period
};

struct ScoreSeries {
    std::string repo_id;
    Date start{};
    std::vector<std::uint8_t> gate;
    std::vector<double> raw_unrounded;
    std::vector<int> score;
    Date gate_open{};
    Date gate_close{};

    std::size_t size() const { return score.size(); }
};

DailySignals build_daily_signals(std::span<const ActivityEvent> events, DateRange period);

/// Sliding sums over [t - (lookback - 1), t]; days before the series start add 0.
RollingSums rolling_window_sums(const DailySignals& signals, const ScoreParams& params = {});

Gate availability_gate(const RepoMetadata& meta, DateRange period, const ScoreParams& params = {});

/// Unrounded score 10 * activity / (activity_per_week * lookback / days_in_week),
/// with the lookback ratio kept exact.
double unrounded_score(std::int64_t activity, const ScoreParams& params = {});

/// round(gate * min(10, unrounded)) computed in integer arithmetic,
/// round-half-away-from-zero.
int maintained_score(std::int64_t activity, bool gate_open, const ScoreParams& params = {});

ScoreSeries maintained_score_series(const RollingSums& sums, const Gate& gate, const ScoreParams& params = {});

/// Everything derived from one repository over the experiment period.
struct RepoScores {
    DailySignals signals;  // in-period slice
    RollingSums sums;      // in-period slice, computed with the full lookback
    ScoreSeries series;
};

RepoScores reconstruct_repo(const RepoData& repo, DateRange period, const ScoreParams& params = {});

/// `repo,date,commit_sum,issue_sum,gate,score` rows (no header).
void append_score_rows(std::string& out, const RollingSums& sums, const ScoreSeries& series);
inline constexpr const char* kScoreCsvHeader = "repo,date,commit_sum,issue_sum,gate,score\n";

}  // namespace maintcast
