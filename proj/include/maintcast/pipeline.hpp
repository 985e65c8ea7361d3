#pragma once

#include "maintcast/ingest.hpp"
#include "maintcast/scorecard.hpp"
#include "maintcast/targets.hpp"

#include <set>
#include <string>

namespace maintcast {

/// Scores every repo over the corpus period and aggregates into blocks.
/// Repos too short for a single block are left out.
MonthlyTable build_monthly_table(const Corpus& corpus, const ScoreParams& params = {},
                                 BlockScheme scheme = BlockScheme::Fixed30, unsigned jobs = 1);

/// Applies filter_constant_extremes to the rounded scores and keeps the
/// surviving repos' points.
MonthlyTable drop_constant_extremes(MonthlyTable monthly, FilterResult* report = nullptr);

MonthlyTable restrict_to(MonthlyTable monthly, const std::set<std::string>& repo_ids);

}  // namespace maintcast
