#include <doctest.h>

#include "maintcast/error.hpp"
#include "maintcast/rng.hpp"
#include "maintcast/scorecard.hpp"

#include <cmath>

using namespace maintcast;

namespace {

ActivityEvent event(EventKind kind, Date d, AuthorRole role = AuthorRole::Other, std::string repo = "r") {
    ActivityEvent e;
    e.repo_id = std::move(repo);
    e.kind = kind;
    e.date = d;
    e.role = role;
    return e;
}

// Direct per-day re-summation.
std::vector<std::int64_t> naive_sums(const std::vector<std::int64_t>& v, int lookback) {
    std::vector<std::int64_t> out(v.size(), 0);
    for (std::size_t t = 0; t < v.size(); ++t)
        for (int k = 0; k < lookback; ++k)
            if (static_cast<std::int64_t>(t) - k >= 0) out[t] += v[t - static_cast<std::size_t>(k)];
    return out;
}

}  // namespace

TEST_CASE("build_daily_signals deduplicates (date, role, kind)") {
    const DateRange p{make_date(2022, 1, 1), make_date(2022, 1, 10)};
    const Date d = make_date(2022, 1, 3);
    std::vector<ActivityEvent> three_member(3, event(EventKind::IssueComment, d, AuthorRole::Member));
    CHECK(build_daily_signals(three_member, p).issue_activity[2] == 1);

    std::vector<ActivityEvent> mixed{event(EventKind::IssueComment, d, AuthorRole::Member),
                                     event(EventKind::IssueComment, d, AuthorRole::Collaborator),
                                     event(EventKind::IssueCreated, d, AuthorRole::Member)};
    CHECK(build_daily_signals(mixed, p).issue_activity[2] == 3);

    std::vector<ActivityEvent> noncore{event(EventKind::IssueComment, d, AuthorRole::Other),
                                       event(EventKind::Commit, d), event(EventKind::Commit, d)};
    const auto s = build_daily_signals(noncore, p);
    CHECK(s.issue_activity[2] == 0);
    CHECK(s.commits[2] == 2);

    const auto empty = build_daily_signals({}, p);
    CHECK(empty.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(empty.commits[i] + empty.issue_activity[i] == 0);

    std::vector<ActivityEvent> two_repos{event(EventKind::Commit, d), event(EventKind::Commit, d, AuthorRole::Other, "q")};
    CHECK_THROWS_AS(build_daily_signals(two_repos, p), Error);
}

TEST_CASE("rolling_window_sums examples") {
    DailySignals s;
    s.start = make_date(2022, 1, 1);
    s.commits.assign(200, 0);
    s.issue_activity.assign(200, 0);
    for (int i = 0; i < 90; ++i) s.commits[static_cast<std::size_t>(i)] = 1;
    CHECK(rolling_window_sums(s).commit_sum[89] == 90);

    s.commits.assign(200, 0);
    s.commits[50] = 1;
    const auto r = rolling_window_sums(s);
    for (std::size_t t = 0; t < 200; ++t) CHECK(r.commit_sum[t] == ((t >= 50 && t <= 139) ? 1 : 0));
}

TEST_CASE("rolling_window_sums equals naive re-summation on random signals") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        DailySignals s;
        s.start = make_date(2021, 1, 1);
        const std::size_t n = 1 + rng.below(400);
        for (std::size_t i = 0; i < n; ++i) {
            s.commits.push_back(rng.bernoulli(0.3) ? static_cast<std::int64_t>(rng.below(5)) : 0);
            s.issue_activity.push_back(static_cast<std::int64_t>(rng.below(3)));
        }
        const auto r = rolling_window_sums(s);
        CHECK(r.commit_sum == naive_sums(s.commits, 90));
        CHECK(r.issue_sum == naive_sums(s.issue_activity, 90));
    }
}

TEST_CASE("availability_gate") {
    const DateRange p{make_date(2021, 1, 1), make_date(2021, 12, 31)};
    RepoMetadata m{"r", make_date(2021, 1, 1), std::nullopt, ""};
    const auto g = availability_gate(m, p);
    CHECK(g.gate_open == make_date(2021, 4, 1));
    CHECK(g.open[static_cast<std::size_t>(p.index_of(make_date(2021, 3, 31)))] == 0);
    CHECK(g.open[static_cast<std::size_t>(p.index_of(make_date(2021, 4, 1)))] == 1);
    CHECK(g.open.back() == 1);

    ScoreParams strict;
    strict.gate_boundary_inclusive = false;
    CHECK(availability_gate(m, p, strict).open[static_cast<std::size_t>(p.index_of(make_date(2021, 4, 1)))] == 0);

    m.created_on = make_date(2019, 1, 1);
    m.archived_on = make_date(2021, 6, 30);
    const auto a = availability_gate(m, p);
    CHECK(a.open[static_cast<std::size_t>(p.index_of(make_date(2021, 6, 30)))] == 1);
    CHECK(a.open[static_cast<std::size_t>(p.index_of(make_date(2021, 7, 1)))] == 0);
    CHECK(a.gate_close == make_date(2021, 6, 30));

    m.archived_on.reset();
    for (auto v : availability_gate(m, p).open) CHECK(v == 1);
}

TEST_CASE("maintained_score examples") {
    CHECK(maintained_score(0, true) == 0);
    CHECK(maintained_score(13, true) == 10);
    CHECK(unrounded_score(13) == doctest::Approx(10.0 * 13 * 7 / 90));
    CHECK(maintained_score(6, true) == 5);
    CHECK(unrounded_score(6) == doctest::Approx(420.0 / 90.0));
    CHECK(maintained_score(500, false) == 0);
    CHECK(maintained_score(12, true) == 9);  // 9.33
    // integer rounding agrees with floating evaluation away from ties
    for (std::int64_t s = 0; s < 400; ++s) {
        const double m = std::min(10.0, 70.0 * static_cast<double>(s) / 90.0);
        CHECK(maintained_score(s, true) == static_cast<int>(std::floor(m + 0.5)));
    }
}

TEST_CASE("score rounding ties go away from zero") {
    // lookback 14 days, 1 activity per week: M = 10 * S / 2, so S = 1 gives exactly 5
    ScoreParams p;
    p.lookback_days = 14;
    CHECK(unrounded_score(1, p) == 5.0);
    p.lookback_days = 28;  // M = 10 * S / 4; S = 1 -> 2.5
    CHECK(unrounded_score(1, p) == 2.5);
    CHECK(maintained_score(1, true, p) == 3);
}

TEST_CASE("maintained_score_series shape and gate") {
    RollingSums sums;
    sums.start = make_date(2021, 1, 1);
    sums.commit_sum = {0, 13, 6, 500};
    sums.issue_sum = {0, 0, 0, 0};
    Gate g;
    g.start = sums.start;
    g.open = {1, 1, 1, 0};
    const auto s = maintained_score_series(sums, g);
    CHECK(s.score == std::vector<int>{0, 10, 5, 0});
    g.open.pop_back();
    CHECK_THROWS_AS(maintained_score_series(sums, g), Error);
}

TEST_CASE("adding an event never lowers a score") {
    const DateRange p{make_date(2021, 1, 1), make_date(2021, 6, 30)};
    RepoData repo;
    repo.meta = {"r", make_date(2020, 1, 1), std::nullopt, ""};
    Rng rng(11);
    for (int i = 0; i < 40; ++i)
        repo.events.push_back(event(EventKind::Commit, add_days(p.first, static_cast<std::int64_t>(rng.below(181)) - 60)));
    auto before = reconstruct_repo(repo, p).series.score;
    for (int k = 0; k < 30; ++k) {
        repo.events.push_back(event(k % 2 ? EventKind::Commit : EventKind::IssueCreated,
                                    add_days(p.first, static_cast<std::int64_t>(rng.below(181))), AuthorRole::Owner));
        const auto after = reconstruct_repo(repo, p).series.score;
        for (std::size_t t = 0; t < after.size(); ++t) CHECK(after[t] >= before[t]);
        before = after;
    }
}

TEST_CASE("reconstruct_repo uses activity before the period") {
    const DateRange p{make_date(2021, 1, 1), make_date(2021, 1, 31)};
    RepoData repo;
    repo.meta = {"r", make_date(2020, 1, 1), std::nullopt, ""};
    for (int i = 0; i < 13; ++i) repo.events.push_back(event(EventKind::Commit, add_days(p.first, -1 - 6 * i)));
    const auto s = reconstruct_repo(repo, p);
    CHECK(s.series.score.front() == 10);
    CHECK(s.sums.commit_sum.front() == 13);
    CHECK(s.series.size() == 31);
}
