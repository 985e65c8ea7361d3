#pragma once

#include "maintcast/date.hpp"
#include "maintcast/ingest.hpp"

#include <string>
#include <vector>

namespace maintcast {

struct FetchOptions {
    std::string endpoint = "https://api.github.com/graphql";
    int request_budget = 50;
    int page_size = 100;
    int timeout_seconds = 30;
    /// Activity window to retrieve; callers pass the experiment period widened
    /// by the 89-day lookback.
    DateRange window{make_date(2020, 10, 3), make_date(2023, 12, 31)};
};

struct RepoExport {
    RepoMetadata meta;
    std::vector<ActivityEvent> events;
    int requests_used = 0;
    bool truncated = false;  // request budget ran out before pagination finished
};

/// "owner/name" from a repository URL or an already-short slug.
std::string repo_slug_from_url(const std::string& repo_url);

/// Query document posted on every page; cursors travel as variables.
std::string build_export_query();

/// Retrieves creation/archival metadata, default-branch commit dates and issue
/// creations plus comments (roles kept verbatim) through a GraphQL endpoint.
/// Requests are issued sequentially and stop at the request budget.
/// Throws AuthFailure, RateLimited(detail = retry seconds), RepoNotFound or
/// TransportError.
RepoExport fetch_repository_export(const std::string& repo_url, const std::string& auth_token,
                                   const FetchOptions& options);

}  // namespace maintcast
