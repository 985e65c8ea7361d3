#include <doctest.h>

#include "maintcast/error.hpp"
#include "maintcast/ingest.hpp"

#include <sstream>

using namespace maintcast;

TEST_CASE("read_event_log: empty input") {
    std::istringstream in("");
    CHECK(read_event_log(in).empty());
}

TEST_CASE("read_event_log: single commit") {
    std::istringstream in(R"({"repo":"r1","kind":"commit","date":"2022-03-01"})");
    const auto ev = read_event_log(in);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].repo_id == "r1");
    CHECK(ev[0].kind == EventKind::Commit);
    CHECK(ev[0].date == make_date(2022, 3, 1));
    CHECK(ev[0].role == AuthorRole::Other);
}

TEST_CASE("role mapping") {
    CHECK(parse_author_role("OWNER") == AuthorRole::Owner);
    CHECK(parse_author_role("member") == AuthorRole::Member);
    CHECK(parse_author_role("Collaborator") == AuthorRole::Collaborator);
    for (const char* other : {"MAINTAINER", "CONTRIBUTOR", "NONE", "FIRST_TIME_CONTRIBUTOR", "", "MANNEQUIN"})
        CHECK(parse_author_role(other) == AuthorRole::Other);
    std::istringstream in(R"({"repo":"r1","kind":"issue_comment","date":"2022-03-01","role":"MAINTAINER"})");
    const auto ev = read_event_log(in);
    CHECK(ev[0].role == AuthorRole::Other);
    CHECK(ev[0].role_label == "MAINTAINER");
}

TEST_CASE("read_event_log errors carry line numbers") {
    std::istringstream bad_json("{\"repo\":\"r\",\"kind\":\"commit\",\"date\":\"2022-01-01\"}\n\n{nope");
    try {
        read_event_log(bad_json);
        FAIL("expected MalformedRecord");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MalformedRecord);
        CHECK(e.detail() == 3);
    }
    std::istringstream bad_date(R"({"repo":"r","kind":"commit","date":"2021-02-30"})");
    try {
        read_event_log(bad_date);
        FAIL("expected InvalidDate");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidDate);
        CHECK(e.detail() == 1);
    }
    std::istringstream bad_kind(R"({"repo":"r","kind":"pull_request","date":"2021-02-01"})");
    CHECK_THROWS_AS(read_event_log(bad_kind), Error);
}

TEST_CASE("event log round-trip is byte-identical") {
    const std::string text =
        R"({"repo":"b","kind":"issue_comment","date":"2022-01-02T10:00:00Z","role":"MEMBER","author":"x"})"
        "\n"
        R"({"repo":"a","kind":"commit","date":"2022-01-03"})"
        "\n"
        R"({"repo":"a","kind":"issue_created","date":"2022-01-01","role":"OWNER"})"
        "\n";
    std::istringstream in(text);
    const auto canonical = format_event_log(read_event_log(in));
    std::istringstream again(canonical);
    CHECK(format_event_log(read_event_log(again)) == canonical);
    CHECK(canonical.rfind(R"({"repo":"a","kind":"issue_created","date":"2022-01-01")", 0) == 0);
}

TEST_CASE("read_repo_metadata") {
    std::istringstream empty("");
    CHECK(read_repo_metadata(empty).empty());

    std::istringstream ok(R"({"repo":"r","url":"u","created":"2020-01-01","archived":"2023-06-15"})");
    const auto m = read_repo_metadata(ok);
    REQUIRE(m.count("r") == 1);
    CHECK(m.at("r").created_on == make_date(2020, 1, 1));
    CHECK(m.at("r").archived_on == make_date(2023, 6, 15));

    std::istringstream bad(R"({"repo":"r","url":"u","created":"2020-01-01","archived":"2019-01-01"})");
    try {
        read_repo_metadata(bad);
        FAIL("expected InconsistentDates");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InconsistentDates);
    }
    std::istringstream dup("{\"repo\":\"r\",\"url\":\"u\",\"created\":\"2020-01-01\"}\n"
                           "{\"repo\":\"r\",\"url\":\"u\",\"created\":\"2020-01-02\"}\n");
    try {
        read_repo_metadata(dup);
        FAIL("expected DuplicateRepo");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DuplicateRepo);
    }
}

TEST_CASE("read_dependency_snapshot") {
    {
        std::istringstream e("a,b\na,b\n");
        const auto s = read_dependency_snapshot(e);
        CHECK(s.edges.size() == 1);
        CHECK(s.duplicates_collapsed == 1);
    }
    {
        std::istringstream e("a,a\n");
        const auto s = read_dependency_snapshot(e);
        CHECK(s.edges.empty());
        CHECK(s.self_edges_dropped == 1);
    }
    {
        std::istringstream e("dependent,dependency\na,b\nb,c\n");
        std::istringstream m("library,repo\na,org/a\nb,\n");
        const auto s = read_dependency_snapshot(e, &m);
        CHECK(s.edges.size() == 2);
        CHECK(s.library_count() == 3);
        CHECK(s.repo_of("a") == std::optional<std::string>("org/a"));
        CHECK_FALSE(s.repo_of("b"));
        CHECK_FALSE(s.repo_of("c"));
    }
    {
        std::istringstream e("a,b,c\n");
        CHECK_THROWS_AS(read_dependency_snapshot(e), Error);
    }
}

TEST_CASE("build_corpus clips to the lookback window and rejects unknown repos") {
    std::map<std::string, RepoMetadata> meta{{"r", {"r", make_date(2019, 1, 1), std::nullopt, ""}}};
    const DateRange period{make_date(2021, 1, 1), make_date(2021, 12, 31)};
    std::vector<ActivityEvent> ev;
    for (Date d : {make_date(2020, 10, 3), make_date(2020, 10, 4), make_date(2021, 12, 31), make_date(2022, 1, 1)}) {
        ActivityEvent e;
        e.repo_id = "r";
        e.date = d;
        ev.push_back(e);
    }
    const auto c = build_corpus(meta, ev, period);
    CHECK(c.dropped_events == 2);
    REQUIRE(c.repos.at("r").events.size() == 2);
    for (const auto& e : c.repos.at("r").events) {
        CHECK(e.date >= add_days(period.first, -89));
        CHECK(e.date <= period.last);
    }
    ev[0].repo_id = "ghost";
    try {
        build_corpus(meta, ev, period);
        FAIL("expected UnknownRepo");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownRepo);
    }
}
