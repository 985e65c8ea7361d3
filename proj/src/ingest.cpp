#include "maintcast/ingest.hpp"

#include "maintcast/error.hpp"
#include "maintcast/textio.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <tuple>

namespace maintcast {

using nlohmann::json;

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Commit: return "commit";
        case EventKind::IssueCreated: return "issue_created";
        case EventKind::IssueComment: return "issue_comment";
    }
    return "commit";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    if (text == "commit") return EventKind::Commit;
    if (text == "issue_created") return EventKind::IssueCreated;
    if (text == "issue_comment") return EventKind::IssueComment;
    return std::nullopt;
}

AuthorRole parse_author_role(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "OWNER") return AuthorRole::Owner;
    if (upper == "MEMBER") return AuthorRole::Member;
    if (upper == "COLLABORATOR") return AuthorRole::Collaborator;
    return AuthorRole::Other;
}

bool canonical_less(const ActivityEvent& a, const ActivityEvent& b) {
    return std::tie(a.repo_id, a.date, a.kind, a.role_label, a.author) <
           std::tie(b.repo_id, b.date, b.kind, b.role_label, b.author);
}

std::optional<std::string> DependencySnapshot::repo_of(const std::string& library) const {
    auto it = library_to_repo.find(library);
    if (it == library_to_repo.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::size_t DependencySnapshot::library_count() const {
    std::set<std::string_view> names;
    for (const auto& [a, b] : edges) {
        names.insert(a);
        names.insert(b);
    }
    return names.size();
}

namespace {

json parse_object(std::string_view line, std::size_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": " + e.what(),
                    static_cast<std::int64_t>(line_no));
    }
    if (!obj.is_object())
        throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": expected an object",
                    static_cast<std::int64_t>(line_no));
    return obj;
}

std::string required_string(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw Error(Errc::MalformedRecord,
                    "line " + std::to_string(line_no) + ": missing string field '" + key + "'",
                    static_cast<std::int64_t>(line_no));
    return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string())
        throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": field '" + key + "' is not a string",
                    static_cast<std::int64_t>(line_no));
    return it->get<std::string>();
}

Date required_date(const std::string& text, std::size_t line_no) {
    auto d = parse_iso_date(text);
    if (!d)
        throw Error(Errc::InvalidDate, "line " + std::to_string(line_no) + ": '" + text + "'",
                    static_cast<std::int64_t>(line_no));
    return *d;
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    return in;
}

}  // namespace

ActivityEvent parse_event_line(std::string_view line, std::size_t line_no) {
    const json obj = parse_object(line, line_no);
    ActivityEvent ev;
    ev.repo_id = required_string(obj, "repo", line_no);
    const auto kind_text = required_string(obj, "kind", line_no);
    auto kind = parse_event_kind(kind_text);
    if (!kind)
        throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": unknown kind '" + kind_text + "'",
                    static_cast<std::int64_t>(line_no));
    ev.kind = *kind;
    ev.date = required_date(required_string(obj, "date", line_no), line_no);
    ev.role_label = optional_string(obj, "role", line_no);
    ev.role = ev.kind == EventKind::Commit ? AuthorRole::Other : parse_author_role(ev.role_label);
    ev.author = optional_string(obj, "author", line_no);
    return ev;
}

std::vector<ActivityEvent> read_event_log(std::istream& in) {
    std::vector<ActivityEvent> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        out.push_back(parse_event_line(line, line_no));
    }
    return out;
}

std::vector<ActivityEvent> read_event_log(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_event_log(in);
}

std::string format_event_log(std::vector<ActivityEvent> events) {
    std::sort(events.begin(), events.end(), canonical_less);
    std::string out;
    for (const auto& ev : events) {
        // ordered_json keeps the key order fixed
        nlohmann::ordered_json obj;
        obj["repo"] = ev.repo_id;
        obj["kind"] = to_string(ev.kind);
        obj["date"] = format_date(ev.date);
        if (!ev.role_label.empty()) obj["role"] = ev.role_label;
        if (!ev.author.empty()) obj["author"] = ev.author;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void write_event_log(const std::filesystem::path& path, std::vector<ActivityEvent> events) {
    write_file_atomic(path, format_event_log(std::move(events)));
}

std::map<std::string, RepoMetadata> read_repo_metadata(std::istream& in) {
    std::map<std::string, RepoMetadata> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const json obj = parse_object(line, line_no);
        RepoMetadata meta;
        meta.repo_id = required_string(obj, "repo", line_no);
        meta.url = optional_string(obj, "url", line_no);
        meta.created_on = required_date(required_string(obj, "created", line_no), line_no);
        const auto archived = optional_string(obj, "archived", line_no);
        if (!archived.empty()) meta.archived_on = required_date(archived, line_no);
        if (meta.archived_on && *meta.archived_on < meta.created_on)
            throw Error(Errc::InconsistentDates, meta.repo_id + " archived before it was created",
                        static_cast<std::int64_t>(line_no));
        if (out.contains(meta.repo_id))
            throw Error(Errc::DuplicateRepo, meta.repo_id, static_cast<std::int64_t>(line_no));
        out.emplace(meta.repo_id, std::move(meta));
    }
    return out;
}

std::map<std::string, RepoMetadata> read_repo_metadata(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_repo_metadata(in);
}

std::string format_repo_metadata(const std::map<std::string, RepoMetadata>& repos) {
    std::string out;
    for (const auto& [id, meta] : repos) {
        nlohmann::ordered_json obj;
        obj["repo"] = meta.repo_id;
        obj["url"] = meta.url;
        obj["created"] = format_date(meta.created_on);
        if (meta.archived_on) obj["archived"] = format_date(*meta.archived_on);
        out += obj.dump();
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::pair<std::size_t, std::vector<std::string>>> read_csv_rows(std::istream& in,
                                                                            std::string_view header_first) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        auto cols = split(trim(line), ',');
        for (auto& c : cols) c = std::string(trim(c));
        if (line_no == 1 && !cols.empty() && cols[0] == header_first) continue;
        rows.emplace_back(line_no, std::move(cols));
    }
    return rows;
}

}  // namespace

DependencySnapshot read_dependency_snapshot(std::istream& edges, std::istream* library_map) {
    DependencySnapshot snap;
    std::set<std::pair<std::string, std::string>> seen;
    for (auto& [line_no, cols] : read_csv_rows(edges, "dependent")) {
        if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
            throw Error(Errc::MalformedRecord, "edge line " + std::to_string(line_no),
                        static_cast<std::int64_t>(line_no));
        if (cols[0] == cols[1]) {
            ++snap.self_edges_dropped;
            continue;
        }
        auto edge = std::make_pair(cols[0], cols[1]);
        if (!seen.insert(edge).second) {
            ++snap.duplicates_collapsed;
            continue;
        }
        snap.edges.push_back(std::move(edge));
    }
    if (library_map) {
        for (auto& [line_no, cols] : read_csv_rows(*library_map, "library")) {
            if (cols.empty() || cols.size() > 2 || cols[0].empty())
                throw Error(Errc::MalformedRecord, "library map line " + std::to_string(line_no),
                            static_cast<std::int64_t>(line_no));
            snap.library_to_repo[cols[0]] = cols.size() == 2 ? cols[1] : std::string{};
        }
    }
    return snap;
}

DependencySnapshot read_dependency_snapshot(const std::filesystem::path& edges_path,
                                            const std::optional<std::filesystem::path>& map_path) {
    auto edges = open_or_throw(edges_path);
    if (!map_path) return read_dependency_snapshot(edges, nullptr);
    auto map = open_or_throw(*map_path);
    return read_dependency_snapshot(edges, &map);
}

Corpus build_corpus(std::map<std::string, RepoMetadata> metadata, std::span<const ActivityEvent> events,
                    DateRange period, int lookback_days) {
    if (period.empty()) throw Error(Errc::InvalidConfig, "period start after period end");
    Corpus corpus;
    corpus.period = period;
    for (auto& [id, meta] : metadata) corpus.repos[id].meta = std::move(meta);
    const Date keep_from = add_days(period.first, -(lookback_days - 1));
    for (const auto& ev : events) {
        auto it = corpus.repos.find(ev.repo_id);
        if (it == corpus.repos.end()) throw Error(Errc::UnknownRepo, "event for repo without metadata: " + ev.repo_id);
        if (ev.date < keep_from || ev.date > period.last) {
            ++corpus.dropped_events;
            continue;
        }
        it->second.events.push_back(ev);
    }
    for (auto& [id, data] : corpus.repos) std::sort(data.events.begin(), data.events.end(), canonical_less);
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& events_path, const std::filesystem::path& metadata_path,
                   DateRange period, int lookback_days) {
    auto meta = read_repo_metadata(metadata_path);
    auto events = read_event_log(events_path);
    return build_corpus(std::move(meta), events, period, lookback_days);
}

}  // namespace maintcast
