#include "maintcast/fetch.hpp"

#include "maintcast/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <regex>

namespace maintcast {

using nlohmann::json;

namespace {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw Error(Errc::InvalidConfig, "bad endpoint URL: " + url);
    return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

std::string iso_start(Date d) { return format_date(d) + "T00:00:00Z"; }
std::string iso_end(Date d) { return format_date(d) + "T23:59:59Z"; }

Date date_field(const json& node, const char* key) {
    auto it = node.find(key);
    if (it == node.end() || !it->is_string()) throw Error(Errc::TransportError, std::string("missing ") + key);
    auto d = parse_iso_date(it->get<std::string>());
    if (!d) throw Error(Errc::InvalidDate, it->get<std::string>());
    return *d;
}

std::string login_of(const json& node) {
    auto it = node.find("author");
    if (it == node.end() || !it->is_object()) return {};
    if (auto l = it->find("login"); l != it->end() && l->is_string()) return l->get<std::string>();
    if (auto u = it->find("user"); u != it->end() && u->is_object())
        if (auto l = u->find("login"); l != u->end() && l->is_string()) return l->get<std::string>();
    return {};
}

std::string string_or_empty(const json& node, const char* key) {
    auto it = node.find(key);
    return it != node.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

long retry_after_seconds(const httplib::Response& res) {
    if (res.has_header("Retry-After")) {
        try {
            return std::stol(res.get_header_value("Retry-After"));
        } catch (...) {
        }
    }
    return 60;
}

}  // namespace

std::string repo_slug_from_url(const std::string& repo_url) {
    static const std::regex re(R"(^(?:https?://[^/]+/)?([^/\s]+)/([^/\s]+?)(?:\.git)?/?$)");
    std::smatch m;
    if (!std::regex_match(repo_url, m, re)) throw Error(Errc::InvalidConfig, "not a repository URL: " + repo_url);
    return m[1].str() + "/" + m[2].str();
}

// TODO: paginate issue comments past the first 100 per issue; busy threads are
// currently truncated.
std::string build_export_query() {
    return R"(query($owner:String!,$name:String!,$since:GitTimestamp!,$until:GitTimestamp!,$issuesSince:DateTime!,$pageSize:Int!,$historyCursor:String,$issuesCursor:String,$withHistory:Boolean!,$withIssues:Boolean!){
  repository(owner:$owner,name:$name){
    url createdAt isArchived archivedAt
    defaultBranchRef{ target{ ... on Commit{
      history(first:$pageSize,since:$since,until:$until,after:$historyCursor) @include(if:$withHistory){
        pageInfo{hasNextPage endCursor}
        nodes{committedDate author{user{login}}}
      }}}}
    issues(first:$pageSize,after:$issuesCursor,filterBy:{since:$issuesSince}) @include(if:$withIssues){
      pageInfo{hasNextPage endCursor}
      nodes{createdAt authorAssociation author{login}
        comments(first:100){nodes{createdAt authorAssociation author{login}}}}
    }
  }
})";
}

RepoExport fetch_repository_export(const std::string& repo_url, const std::string& auth_token,
                                   const FetchOptions& options) {
    const std::string slug = repo_slug_from_url(repo_url);
    const auto slash = slug.find('/');
    const Endpoint ep = split_endpoint(options.endpoint);

    httplib::Client client(ep.base);
    client.set_connection_timeout(options.timeout_seconds);
    client.set_read_timeout(options.timeout_seconds);
    const httplib::Headers headers{{"Authorization", "bearer " + auth_token}, {"User-Agent", "maintcast"}};

    RepoExport out;
    out.meta.repo_id = slug;
    bool have_meta = false;
    std::optional<std::string> history_cursor, issues_cursor;
    bool history_more = true, issues_more = true;

    auto push = [&](EventKind kind, Date d, std::string role, std::string author) {
        if (!options.window.contains(d)) return;
        ActivityEvent ev;
        ev.repo_id = slug;
        ev.kind = kind;
        ev.date = d;
        ev.role = kind == EventKind::Commit ? AuthorRole::Other : parse_author_role(role);
        ev.role_label = std::move(role);
        ev.author = std::move(author);
        out.events.push_back(std::move(ev));
    };

    while (history_more || issues_more) {
        if (out.requests_used >= options.request_budget) {
            out.truncated = true;
            break;
        }
        json vars = {{"owner", slug.substr(0, slash)},
                     {"name", slug.substr(slash + 1)},
                     {"since", iso_start(options.window.first)},
                     {"until", iso_end(options.window.last)},
                     {"issuesSince", iso_start(options.window.first)},
                     {"pageSize", options.page_size},
                     {"withHistory", history_more},
                     {"withIssues", issues_more}};
        vars["historyCursor"] = history_cursor ? json(*history_cursor) : json(nullptr);
        vars["issuesCursor"] = issues_cursor ? json(*issues_cursor) : json(nullptr);
        const json body = {{"query", build_export_query()}, {"variables", vars}};

        ++out.requests_used;
        auto res = client.Post(ep.path, headers, body.dump(), "application/json");
        if (!res) throw Error(Errc::TransportError, "request failed: " + httplib::to_string(res.error()));
        if (res->status == 401) throw Error(Errc::AuthFailure, "endpoint rejected the token");
        if (res->status == 429 || (res->status == 403 && (res->has_header("Retry-After") ||
                                                          res->get_header_value("X-RateLimit-Remaining") == "0"))) {
            const long wait = retry_after_seconds(*res);
            throw Error(Errc::RateLimited, "retry after " + std::to_string(wait) + "s", wait);
        }
        if (res->status == 403) throw Error(Errc::AuthFailure, "forbidden");
        if (res->status == 404) throw Error(Errc::RepoNotFound, slug);
        if (res->status < 200 || res->status >= 300)
            throw Error(Errc::TransportError, "HTTP " + std::to_string(res->status));

        json doc;
        try {
            doc = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw Error(Errc::TransportError, std::string("unparseable response: ") + e.what());
        }
        if (auto errs = doc.find("errors"); errs != doc.end() && errs->is_array() && !errs->empty()) {
            for (const auto& e : *errs)
                if (string_or_empty(e, "type") == "NOT_FOUND") throw Error(Errc::RepoNotFound, slug);
            if (string_or_empty((*errs)[0], "type") == "RATE_LIMITED")
                throw Error(Errc::RateLimited, "graphql rate limit", retry_after_seconds(*res));
            throw Error(Errc::TransportError, string_or_empty((*errs)[0], "message"));
        }
        const json* repo = nullptr;
        if (auto data = doc.find("data"); data != doc.end() && data->is_object())
            if (auto r = data->find("repository"); r != data->end() && r->is_object()) repo = &*r;
        if (!repo) throw Error(Errc::RepoNotFound, slug);

        if (!have_meta) {
            out.meta.url = string_or_empty(*repo, "url");
            out.meta.created_on = date_field(*repo, "createdAt");
            if (auto a = repo->find("archivedAt"); a != repo->end() && a->is_string())
                out.meta.archived_on = date_field(*repo, "archivedAt");
            have_meta = true;
        }

        if (history_more) {
            const json* history = nullptr;
            if (auto br = repo->find("defaultBranchRef"); br != repo->end() && br->is_object())
                if (auto t = br->find("target"); t != br->end() && t->is_object())
                    if (auto h = t->find("history"); h != t->end() && h->is_object()) history = &*h;
            if (!history) {
                history_more = false;
            } else {
                for (const auto& n : history->value("nodes", json::array()))
                    push(EventKind::Commit, date_field(n, "committedDate"), {}, login_of(n));
                const auto& pi = history->value("pageInfo", json::object());
                history_more = pi.value("hasNextPage", false);
                if (history_more) history_cursor = string_or_empty(pi, "endCursor");
            }
        }

        if (issues_more) {
            auto issues = repo->find("issues");
            if (issues == repo->end() || !issues->is_object()) {
                issues_more = false;
            } else {
                for (const auto& n : issues->value("nodes", json::array())) {
                    push(EventKind::IssueCreated, date_field(n, "createdAt"), string_or_empty(n, "authorAssociation"),
                         login_of(n));
                    if (auto c = n.find("comments"); c != n.end() && c->is_object())
                        for (const auto& cm : c->value("nodes", json::array()))
                            push(EventKind::IssueComment, date_field(cm, "createdAt"),
                                 string_or_empty(cm, "authorAssociation"), login_of(cm));
                }
                const auto& pi = issues->value("pageInfo", json::object());
                issues_more = pi.value("hasNextPage", false);
                if (issues_more) issues_cursor = string_or_empty(pi, "endCursor");
            }
        }
    }

    if (out.meta.archived_on && *out.meta.archived_on < out.meta.created_on)
        throw Error(Errc::InconsistentDates, slug);
    std::sort(out.events.begin(), out.events.end(), canonical_less);
    return out;
}

}  // namespace maintcast
