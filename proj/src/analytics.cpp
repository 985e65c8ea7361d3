#include "maintcast/analytics.hpp"

#include "maintcast/error.hpp"
#include "maintcast/textio.hpp"

#include <array>

namespace maintcast {

namespace {

bool counts_as(const ActivityEvent& ev, ActivityKind kind) {
    if (kind == ActivityKind::Commit) return ev.kind == EventKind::Commit;
    return ev.kind != EventKind::Commit && is_core_role(ev.role);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::optional<double> mean_gap_days(std::set<Date> dates) {
    if (dates.size() < 2) return std::nullopt;
    return static_cast<double>(days_between(*dates.begin(), *dates.rbegin())) /
           static_cast<double>(dates.size() - 1);
}

IntervalStats mean_interactivity_days(const Corpus& corpus, int year) {
    IntervalStats st;
    st.year = year;
    std::vector<double> commit_gaps, issue_gaps;
    for (const auto& [id, repo] : corpus.repos) {
        std::set<Date> commit_days, issue_days;
        for (const auto& ev : repo.events) {
            if (year_of(ev.date) != year) continue;
            if (counts_as(ev, ActivityKind::Commit)) commit_days.insert(ev.date);
            else if (counts_as(ev, ActivityKind::Issue)) issue_days.insert(ev.date);
        }
        if (auto g = mean_gap_days(std::move(commit_days))) commit_gaps.push_back(*g);
        if (auto g = mean_gap_days(std::move(issue_days))) issue_gaps.push_back(*g);
    }
    st.mean_commit_gap_days = mean_of(commit_gaps);
    st.active_commit_repos = commit_gaps.size();
    st.mean_issue_gap_days = mean_of(issue_gaps);
    st.active_issue_repos = issue_gaps.size();
    if (!commit_gaps.empty() && !issue_gaps.empty())
        st.overall_mean = (st.mean_commit_gap_days + st.mean_issue_gap_days) / 2.0;
    else
        st.overall_mean = commit_gaps.empty() ? st.mean_issue_gap_days : st.mean_commit_gap_days;
    return st;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& x : a)
        if (b.contains(x)) ++inter;
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

KindStability monthly_contributor_jaccard(const Corpus& corpus, int year, ActivityKind kind) {
    std::vector<double> repo_means;
    for (const auto& [id, repo] : corpus.repos) {
        std::array<std::set<std::string>, 12> months;
        for (const auto& ev : repo.events) {
            if (year_of(ev.date) != year || !counts_as(ev, kind)) continue;
            if (ev.author.empty())
                throw Error(Errc::MissingAuthorField, "event without author in " + id + " on " + format_date(ev.date));
            months[month_of(ev.date) - 1].insert(ev.author);
        }
        double sum = 0.0;
        std::size_t pairs = 0;
        bool consecutive_active = false;
        for (std::size_t m = 0; m + 1 < months.size(); ++m) {
            const auto& a = months[m];
            const auto& b = months[m + 1];
            if (a.empty() && b.empty()) continue;
            if (!a.empty() && !b.empty()) consecutive_active = true;
            sum += jaccard(a, b);
            ++pairs;
        }
        if (consecutive_active) repo_means.push_back(sum / static_cast<double>(pairs));
    }
    return {mean_of(repo_means), repo_means.size()};
}

StabilityStats contributor_stability(const Corpus& corpus, int year) {
    const auto c = monthly_contributor_jaccard(corpus, year, ActivityKind::Commit);
    const auto i = monthly_contributor_jaccard(corpus, year, ActivityKind::Issue);
    return {year, c.mean_jaccard, c.active_repos, i.mean_jaccard, i.active_repos};
}

std::string format_interval_csv(const std::vector<IntervalStats>& rows) {
    std::string out = "year,commit_gap,commit_repos,issue_gap,issue_repos,mean\n";
    for (const auto& r : rows)
        out += std::to_string(r.year) + ',' + format_double(r.mean_commit_gap_days) + ',' +
               std::to_string(r.active_commit_repos) + ',' + format_double(r.mean_issue_gap_days) + ',' +
               std::to_string(r.active_issue_repos) + ',' + format_double(r.overall_mean) + '\n';
    return out;
}

std::string format_stability_csv(const std::vector<StabilityStats>& rows) {
    std::string out = "year,commit_jaccard,commit_repos,issue_jaccard,issue_repos\n";
    for (const auto& r : rows)
        out += std::to_string(r.year) + ',' + format_double(r.mean_commit_jaccard) + ',' +
               std::to_string(r.active_commit_repos) + ',' + format_double(r.mean_issue_jaccard) + ',' +
               std::to_string(r.active_issue_repos) + '\n';
    return out;
}

}  // namespace maintcast
