#include <doctest.h>

#include "maintcast/error.hpp"
#include "maintcast/pipeline.hpp"
#include "maintcast/scorecard.hpp"
#include "maintcast/synth.hpp"

using namespace maintcast;

namespace {

RegimeSpec spec_of(std::string id, Regime r, int n_days = 365) {
    RegimeSpec s;
    s.repo_id = std::move(id);
    s.regime = r;
    s.seed = 17;
    s.created_on = make_date(2021, 1, 1);
    s.n_days = n_days;
    return s;
}

ScoreSeries scores_of(const SyntheticRepo& repo, DateRange span) {
    RepoData data{repo.meta, repo.events};
    return reconstruct_repo(data, span).series;
}

}  // namespace

TEST_CASE("Persistent levels are exact on every gated day") {
    for (int level = 0; level <= 10; ++level) {
        const auto spec = spec_of("p", Persistent{level});
        const auto s = scores_of(generate_repo_activity(spec), spec.span());
        for (std::size_t t = 0; t < s.size(); ++t)
            if (s.gate[t]) CHECK(s.score[t] == level);
            else CHECK(s.score[t] == 0);
    }
}

TEST_CASE("Abandoned repos drain within one lookback window") {
    const auto spec = spec_of("a", Abandoned{180});
    const auto repo = generate_repo_activity(spec);
    for (const auto& e : repo.events) CHECK(e.date < add_days(spec.created_on, 180));
    const auto s = scores_of(repo, spec.span());
    for (std::size_t t = 180 + 89; t < s.size(); ++t) CHECK(s.score[t] == 0);
}

TEST_CASE("archived repos emit nothing after archival") {
    auto spec = spec_of("b", Bursty{});
    spec.archived_on = make_date(2021, 6, 30);
    for (const auto& e : generate_repo_activity(spec).events) CHECK(e.date <= *spec.archived_on);
}

TEST_CASE("generation is deterministic and seed-sensitive") {
    const std::vector<RegimeSpec> specs{spec_of("x", Noise{0.2}), spec_of("y", Bursty{}),
                                        spec_of("z", Decaying{10.0, 90.0})};
    const auto a = generate_corpus(specs), b = generate_corpus(specs);
    CHECK(a.repos.size() == 3);
    for (const auto& [id, repo] : a.repos) CHECK(repo.events == b.repos.at(id).events);
    auto reseeded = specs;
    reseeded[0].seed = 18;
    CHECK(generate_corpus(reseeded).repos.at("x").events != a.repos.at("x").events);
    CHECK_THROWS_AS(generate_corpus({}), Error);
}

TEST_CASE("invalid specs are rejected") {
    auto s = spec_of("p", Persistent{11});
    CHECK_FALSE(s.problems().empty());
    CHECK_THROWS_AS(generate_repo_activity(s), Error);
    s = spec_of("", Persistent{3});
    CHECK_FALSE(s.problems().empty());
    s = spec_of("n", Noise{-1.0});
    CHECK_THROWS_AS(generate_repo_activity(s), Error);
}

TEST_CASE("constant-extreme repos are filtered out") {
    std::vector<RegimeSpec> specs;
    for (int i = 0; i < 4; ++i)
        specs.push_back(spec_of("r" + std::to_string(i), Persistent{i % 2 ? 10 : 0}, 500));
    for (auto& s : specs) s.created_on = make_date(2020, 9, 1);
    auto corpus = generate_corpus(specs);
    corpus.period = {make_date(2020, 12, 1), make_date(2021, 12, 31)};
    FilterResult report;
    const auto kept = drop_constant_extremes(build_monthly_table(corpus), &report);
    CHECK(kept.empty());
    CHECK(report.removed == 4);
}

TEST_CASE("mixed preset composition") {
    const auto specs = mixed_preset();
    REQUIRE(specs.size() == 200);
    int persistent = 0, decaying = 0, bursty = 0;
    for (const auto& s : specs) {
        persistent += std::holds_alternative<Persistent>(s.regime);
        decaying += std::holds_alternative<Decaying>(s.regime);
        bursty += std::holds_alternative<Bursty>(s.regime);
        CHECK(s.span().last == make_date(2023, 12, 31));
    }
    CHECK(persistent == 120);
    CHECK(decaying == 40);
    CHECK(bursty == 40);
}

TEST_CASE("synthetic dependencies link every repo") {
    const std::vector<std::string> ids{"a", "b", "c"};
    const auto d = synthetic_dependencies(ids, 1, 2);
    CHECK(d.library_count() >= 5);
    std::size_t linked = 0;
    for (const auto& [lib, repo] : d.library_to_repo) linked += !repo.empty();
    CHECK(linked == 3);
    CHECK(format_dependency_edges(d).rfind("dependent,dependency\n", 0) == 0);
    CHECK(format_library_map(d).rfind("library,repo\n", 0) == 0);
}
