#include "maintcast/scorecard.hpp"

#include "maintcast/error.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace maintcast {

void ScoreParams::validate() const {
    if (lookback_days <= 0 || activity_per_week <= 0 || days_in_one_week <= 0)
        throw Error(Errc::InvalidConfig, "score constants must be strictly positive");
}

DailySignals build_daily_signals(std::span<const ActivityEvent> events, DateRange period) {
    if (period.empty()) throw Error(Errc::InvalidSpec, "empty signal period");
    DailySignals out;
    out.start = period.first;
    const auto n = static_cast<std::size_t>(period.size());
    out.commits.assign(n, 0);
    out.issue_activity.assign(n, 0);
    if (!events.empty()) out.repo_id = events.front().repo_id;

    std::set<std::tuple<std::int64_t, AuthorRole, EventKind>> issue_keys;
    for (const auto& ev : events) {
        if (ev.repo_id != out.repo_id) throw Error(Errc::MixedRepos, out.repo_id + " vs " + ev.repo_id);
        if (!period.contains(ev.date)) continue;
        const auto day = period.index_of(ev.date);
        if (ev.kind == EventKind::Commit) {
            ++out.commits[static_cast<std::size_t>(day)];
        } else if (is_core_role(ev.role)) {
            // one count per (date, role, kind)
            if (issue_keys.emplace(day, ev.role, ev.kind).second) ++out.issue_activity[static_cast<std::size_t>(day)];
        }
    }
    return out;
}

RollingSums rolling_window_sums(const DailySignals& signals, const ScoreParams& params) {
    params.validate();
    RollingSums out;
    out.repo_id = signals.repo_id;
    out.start = signals.start;
    const std::size_t n = signals.size();
    out.commit_sum.assign(n, 0);
    out.issue_sum.assign(n, 0);
    const auto window = static_cast<std::size_t>(params.lookback_days);
    std::int64_t c = 0, i = 0;
    for (std::size_t t = 0; t < n; ++t) {
        c += signals.commits[t];
        i += signals.issue_activity[t];
        if (t >= window) {
            c -= signals.commits[t - window];
            i -= signals.issue_activity[t - window];
        }
        out.commit_sum[t] = c;
        out.issue_sum[t] = i;
    }
    return out;
}

Gate availability_gate(const RepoMetadata& meta, DateRange period, const ScoreParams& params) {
    if (period.empty()) throw Error(Errc::InvalidSpec, "empty gate period");
    Gate g;
    g.start = period.first;
    g.gate_open = add_days(meta.created_on, params.lookback_days);
    g.gate_close = meta.archived_on ? *meta.archived_on : period.last;
    g.open.resize(static_cast<std::size_t>(period.size()));
    for (std::size_t t = 0; t < g.open.size(); ++t) {
        const Date d = period.at(static_cast<std::int64_t>(t));
        const bool after_open = params.gate_boundary_inclusive ? g.gate_open <= d : g.gate_open < d;
        g.open[t] = after_open && d <= g.gate_close ? 1 : 0;
    }
    return g;
}

double unrounded_score(std::int64_t activity, const ScoreParams& params) {
    return 10.0 * static_cast<double>(activity) * params.days_in_one_week /
           (static_cast<double>(params.activity_per_week) * params.lookback_days);
}

int maintained_score(std::int64_t activity, bool gate_open, const ScoreParams& params) {
    if (!gate_open || activity <= 0) return 0;
    // 10 * a * w / (p * L) as an exact fraction; floor((2 num + den) / (2 den))
    // is round-half-up, which equals half-away-from-zero for non-negative values.
    const std::int64_t num = 10 * activity * params.days_in_one_week;
    const std::int64_t den = static_cast<std::int64_t>(params.activity_per_week) * params.lookback_days;
    if (num >= 10 * den) return 10;
    return static_cast<int>((2 * num + den) / (2 * den));
}

ScoreSeries maintained_score_series(const RollingSums& sums, const Gate& gate, const ScoreParams& params) {
    params.validate();
    if (sums.start != gate.start || sums.size() != gate.open.size())
        throw Error(Errc::ShapeMismatch, "rolling sums and gate are not aligned");
    ScoreSeries s;
    s.repo_id = sums.repo_id;
    s.start = sums.start;
    s.gate = gate.open;
    s.gate_open = gate.gate_open;
    s.gate_close = gate.gate_close;
    const std::size_t n = sums.size();
    s.raw_unrounded.resize(n);
    s.score.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::int64_t activity = sums.commit_sum[t] + sums.issue_sum[t];
        s.raw_unrounded[t] = unrounded_score(activity, params);
        s.score[t] = maintained_score(activity, gate.open[t] != 0, params);
    }
    return s;
}

namespace {

template <typename T>
std::vector<T> slice(const std::vector<T>& v, std::size_t from, std::size_t n) {
    return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(from),
                          v.begin() + static_cast<std::ptrdiff_t>(from + n));
}

}  // namespace

RepoScores reconstruct_repo(const RepoData& repo, DateRange period, const ScoreParams& params) {
    params.validate();
    const DateRange extended{add_days(period.first, -(params.lookback_days - 1)), period.last};
    DailySignals full = build_daily_signals(repo.events, extended);
    full.repo_id = repo.meta.repo_id;
    RollingSums full_sums = rolling_window_sums(full, params);

    const auto offset = static_cast<std::size_t>(params.lookback_days - 1);
    const auto n = static_cast<std::size_t>(period.size());
    RepoScores out;
    out.signals = {repo.meta.repo_id, period.first, slice(full.commits, offset, n), slice(full.issue_activity, offset, n)};
    out.sums = {repo.meta.repo_id, period.first, slice(full_sums.commit_sum, offset, n),
                slice(full_sums.issue_sum, offset, n)};
    out.series = maintained_score_series(out.sums, availability_gate(repo.meta, period, params), params);
    return out;
}

void append_score_rows(std::string& out, const RollingSums& sums, const ScoreSeries& series) {
    for (std::size_t t = 0; t < series.size(); ++t) {
        out += series.repo_id;
        out += ',';
        out += format_date(add_days(series.start, static_cast<std::int64_t>(t)));
        out += ',';
        out += std::to_string(sums.commit_sum[t]);
        out += ',';
        out += std::to_string(sums.issue_sum[t]);
        out += ',';
        out += series.gate[t] ? '1' : '0';
        out += ',';
        out += std::to_string(series.score[t]);
        out += '\n';
    }
}

}  // namespace maintcast
