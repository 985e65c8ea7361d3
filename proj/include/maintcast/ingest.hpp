#pragma once

#include "maintcast/date.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace maintcast {

enum class EventKind { Commit, IssueCreated, IssueComment };
enum class AuthorRole { Owner, Member, Collaborator, Other };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

/// Case-insensitive; anything outside OWNER/MEMBER/COLLABORATOR is Other.
AuthorRole parse_author_role(std::string_view text);
inline bool is_core_role(AuthorRole r) { return r != AuthorRole::Other; }

struct ActivityEvent {
    std::string repo_id;
    EventKind kind = EventKind::Commit;
    Date date{};
    AuthorRole role = AuthorRole::Other;
    std::string role_label;  // verbatim role string from the export; empty when absent
    std::string author;      // optional identity, used only by the stability analytics

    friend bool operator==(const ActivityEvent&, const ActivityEvent&) = default;
};

/// Canonical order: repo_id, date, kind, then role label and author.
bool canonical_less(const ActivityEvent& a, const ActivityEvent& b);

struct RepoMetadata {
    std::string repo_id;
    Date created_on{};
    std::optional<Date> archived_on;
    std::string url;

    friend bool operator==(const RepoMetadata&, const RepoMetadata&) = default;
};

struct DependencySnapshot {
    std::vector<std::pair<std::string, std::string>> edges;  // (dependent, dependency)
    std::map<std::string, std::string> library_to_repo;      // empty value: no repository link
    std::size_t self_edges_dropped = 0;
    std::size_t duplicates_collapsed = 0;

    std::optional<std::string> repo_of(const std::string& library) const;
    std::size_t library_count() const;
};

struct RepoData {
    RepoMetadata meta;
    std::vector<ActivityEvent> events;  // canonical order
};

struct Corpus {
    std::map<std::string, RepoData> repos;
    DateRange period{};
    std::size_t dropped_events = 0;  // outside [period.first - (lookback - 1), period.last]
};

/// Parses one event-log line; `line_no` is reported in errors.
ActivityEvent parse_event_line(std::string_view line, std::size_t line_no);
std::vector<ActivityEvent> read_event_log(std::istream& in);
std::vector<ActivityEvent> read_event_log(const std::filesystem::path& path);

/// Canonical form: events sorted by canonical_less, one JSON object per line
/// with fixed key order and date-only timestamps.
std::string format_event_log(std::vector<ActivityEvent> events);
void write_event_log(const std::filesystem::path& path, std::vector<ActivityEvent> events);

std::map<std::string, RepoMetadata> read_repo_metadata(std::istream& in);
std::map<std::string, RepoMetadata> read_repo_metadata(const std::filesystem::path& path);
std::string format_repo_metadata(const std::map<std::string, RepoMetadata>& repos);

/// Edge file holds `dependent,dependency` rows; the optional map file holds
/// `library,repo` rows. A header row naming the columns is skipped.
DependencySnapshot read_dependency_snapshot(std::istream& edges, std::istream* library_map = nullptr);
DependencySnapshot read_dependency_snapshot(const std::filesystem::path& edges_path,
                                            const std::optional<std::filesystem::path>& map_path = std::nullopt);

/// Groups events by repo and clips to the window that can influence an
/// in-period score: [period.first - (lookback_days - 1), period.last].
Corpus build_corpus(std::map<std::string, RepoMetadata> metadata, std::span<const ActivityEvent> events,
                    DateRange period, int lookback_days = 90);

Corpus load_corpus(const std::filesystem::path& events_path, const std::filesystem::path& metadata_path,
                   DateRange period, int lookback_days = 90);

}  // namespace maintcast
