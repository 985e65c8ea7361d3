#pragma once

#include "maintcast/ingest.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace maintcast {

struct IntervalStats {
    int year = 0;
    double mean_commit_gap_days = 0.0;
    std::size_t active_commit_repos = 0;
    double mean_issue_gap_days = 0.0;
    std::size_t active_issue_repos = 0;
    double overall_mean = 0.0;
};

struct StabilityStats {
    int year = 0;
    double mean_commit_jaccard = 0.0;
    std::size_t active_commit_repos = 0;
    double mean_issue_jaccard = 0.0;
    std::size_t active_issue_repos = 0;
};

enum class ActivityKind { Commit, Issue };

/// Mean spacing of distinct activity dates, (last - first) / (n - 1), for one
/// repo; nullopt when fewer than two distinct dates.
std::optional<double> mean_gap_days(std::set<Date> dates);

/// Activity-interval statistics for one calendar year. Issue activity counts only
/// core-role creations and comments.
IntervalStats mean_interactivity_days(const Corpus& corpus, int year);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct KindStability {
    double mean_jaccard = 0.0;
    std::size_t active_repos = 0;
};

/// Mean month-to-month contributor Jaccard within a calendar year. Pairs where
/// both months are empty are skipped; a repo counts when it has two
/// consecutive non-empty months. Throws MissingAuthorField if a relevant
/// event carries no author.
KindStability monthly_contributor_jaccard(const Corpus& corpus, int year, ActivityKind kind);

StabilityStats contributor_stability(const Corpus& corpus, int year);

/// `year,commit_gap,commit_repos,issue_gap,issue_repos,mean` with header.
std::string format_interval_csv(const std::vector<IntervalStats>& rows);
/// `year,commit_jaccard,commit_repos,issue_jaccard,issue_repos` with header.
std::string format_stability_csv(const std::vector<StabilityStats>& rows);

}  // namespace maintcast
