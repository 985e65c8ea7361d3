#include <doctest.h>
#include <httplib.h>

#include "maintcast/error.hpp"
#include "maintcast/fetch.hpp"


#include <functional>
#include <thread>

using namespace maintcast;

namespace {

// Local GraphQL stand-in; the handler decides every response.
class MockEndpoint {
public:
    explicit MockEndpoint(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/graphql", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockEndpoint() {
        server_.stop();
        thread_.join();
    }
    FetchOptions options() const {
        FetchOptions o;
        o.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/graphql";
        o.window = {make_date(2021, 1, 1), make_date(2021, 12, 31)};
        o.timeout_seconds = 5;
        return o;
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

const char* kFixture = R"({"data":{"repository":{
  "url":"https://github.com/acme/widget","createdAt":"2018-05-01T00:00:00Z","archivedAt":null,
  "defaultBranchRef":{"target":{"history":{"pageInfo":{"hasNextPage":false,"endCursor":null},"nodes":[
    {"committedDate":"2021-02-01T10:00:00Z","author":{"user":{"login":"ann"}}},
    {"committedDate":"2021-03-01T10:00:00Z","author":{"user":{"login":"bob"}}},
    {"committedDate":"2021-04-01T10:00:00Z","author":{"user":null}}]}}},
  "issues":{"pageInfo":{"hasNextPage":false,"endCursor":null},"nodes":[
    {"createdAt":"2020-06-01T00:00:00Z","authorAssociation":"OWNER","author":{"login":"ann"},
     "comments":{"nodes":[
       {"createdAt":"2021-05-01T00:00:00Z","authorAssociation":"MEMBER","author":{"login":"cat"}},
       {"createdAt":"2021-05-02T00:00:00Z","authorAssociation":"MAINTAINER","author":{"login":"dan"}}]}}]}}}})";

}  // namespace

TEST_CASE("fetch: fixture of 3 commits and 2 comments yields 5 events with roles kept") {
    std::string seen_auth;
    MockEndpoint mock([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        res.set_content(kFixture, "application/json");
    });
    const auto ex = fetch_repository_export("https://github.com/acme/widget", "tok", mock.options());
    CHECK(seen_auth == "bearer tok");
    CHECK(ex.meta.repo_id == "acme/widget");
    CHECK(ex.meta.created_on == make_date(2018, 5, 1));
    CHECK_FALSE(ex.meta.archived_on);
    REQUIRE(ex.events.size() == 5);
    int commits = 0;
    std::vector<std::string> comment_roles;
    for (const auto& e : ex.events) {
        if (e.kind == EventKind::Commit) ++commits;
        if (e.kind == EventKind::IssueComment) comment_roles.push_back(e.role_label);
    }
    CHECK(commits == 3);
    std::sort(comment_roles.begin(), comment_roles.end());
    CHECK(comment_roles == std::vector<std::string>{"MAINTAINER", "MEMBER"});
    for (const auto& e : ex.events)
        if (e.role_label == "MAINTAINER") CHECK(e.role == AuthorRole::Other);
        else if (e.role_label == "MEMBER") CHECK(e.role == AuthorRole::Member);
    CHECK(ex.requests_used == 1);
    CHECK_FALSE(ex.truncated);
}

TEST_CASE("fetch: 401 maps to AuthFailure") {
    MockEndpoint mock([](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
        res.set_content(R"({"message":"Bad credentials"})", "application/json");
    });
    try {
        fetch_repository_export("acme/widget", "bad", mock.options());
        FAIL("expected AuthFailure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AuthFailure);
    }
}

TEST_CASE("fetch: rate limit carries the retry delay") {
    MockEndpoint mock([](const httplib::Request&, httplib::Response& res) {
        res.status = 429;
        res.set_header("Retry-After", "30");
    });
    try {
        fetch_repository_export("acme/widget", "tok", mock.options());
        FAIL("expected RateLimited");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::RateLimited);
        CHECK(e.detail() == 30);
    }
}

TEST_CASE("fetch: missing repository") {
    MockEndpoint mock([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"data":{"repository":null},"errors":[{"type":"NOT_FOUND"}]})", "application/json");
    });
    try {
        fetch_repository_export("acme/none", "tok", mock.options());
        FAIL("expected RepoNotFound");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::RepoNotFound);
    }
}

TEST_CASE("repo_slug_from_url") {
    CHECK(repo_slug_from_url("https://github.com/acme/widget") == "acme/widget");
    CHECK(repo_slug_from_url("https://github.com/acme/widget.git") == "acme/widget");
    CHECK(repo_slug_from_url("acme/widget") == "acme/widget");
}
