#include "maintcast/pipeline.hpp"

#include "maintcast/error.hpp"
#include "maintcast/parallel.hpp"

#include <optional>
#include <vector>

namespace maintcast {

MonthlyTable build_monthly_table(const Corpus& corpus, const ScoreParams& params, BlockScheme scheme, unsigned jobs) {
    std::vector<const RepoData*> repos;
    for (const auto& [id, data] : corpus.repos) repos.push_back(&data);
    std::vector<std::optional<std::vector<MonthlyPoint>>> points(repos.size());
    parallel_for(repos.size(), jobs, [&](std::size_t i) {
        const auto scores = reconstruct_repo(*repos[i], corpus.period, params);
        try {
            points[i] = monthly_aggregate(scores.series, scores.signals, scheme);
        } catch (const Error& e) {
            if (e.code() != Errc::TooShort) throw;
        }
    });
    MonthlyTable out;
    for (std::size_t i = 0; i < repos.size(); ++i)
        if (points[i]) out.emplace(repos[i]->meta.repo_id, std::move(*points[i]));
    return out;
}

MonthlyTable drop_constant_extremes(MonthlyTable monthly, FilterResult* report) {
    std::map<std::string, TargetSeries> raw;
    for (const auto& [id, pts] : monthly) raw.emplace(id, raw_series(pts));
    auto result = filter_constant_extremes(std::move(raw));
    for (const auto& id : result.removed_ids) monthly.erase(id);
    if (report) *report = std::move(result);
    return monthly;
}

MonthlyTable restrict_to(MonthlyTable monthly, const std::set<std::string>& repo_ids) {
    for (auto it = monthly.begin(); it != monthly.end();)
        it = repo_ids.count(it->first) ? std::next(it) : monthly.erase(it);
    return monthly;
}

}  // namespace maintcast
