#include <doctest.h>

#include "maintcast/config.hpp"
#include "maintcast/error.hpp"

using namespace maintcast;

TEST_CASE("validate_config") {
    RunConfig c;
    CHECK(validate_config(c).empty());

    c.grid.windows = {3, 13};
    auto p = validate_config(c);
    REQUIRE(p.size() == 1);
    CHECK(p[0].find("window outside 3..12") != std::string::npos);

    c.grid.windows = {3};
    c.grid.horizons = {7};
    p = validate_config(c);
    REQUIRE(p.size() == 1);
    CHECK(p[0].find("horizon outside 1..6") != std::string::npos);

    c.grid.horizons = {1};
    c.selection_fraction = 0.0;
    c.period = {make_date(2022, 1, 1), make_date(2021, 1, 1)};
    CHECK(validate_config(c).size() == 2);

    RunConfig paths;
    CHECK_FALSE(validate_config(paths, PathCheck::Inputs).empty());
}

TEST_CASE("parse_config reads every section and round-trips") {
    const std::string text = R"(
[paths]
events = ev.jsonl
metadata = meta.jsonl
output_dir = results

[period]
start = 2021-01-01
end = 2022-12-31

[grid]
tasks = raw,bucket
models = varma,forest
windows = 3-5,9
horizons = 1,6
shifts = 4
seed = 99

[flags]
calendar_months = true

[models]
forest_trees = 10
)";
    const auto c = parse_config(text);
    CHECK(c.paths.events == "ev.jsonl");
    CHECK(c.paths.output_dir == "results");
    CHECK(c.period.last == make_date(2022, 12, 31));
    CHECK(c.grid.tasks.size() == 2);
    CHECK(c.grid.models == std::vector<ModelKind>{ModelKind::VarmaStat, ModelKind::RandomForest});
    CHECK(c.grid.windows == std::vector<int>{3, 4, 5, 9});
    CHECK(c.grid.horizons == std::vector<int>{1, 6});
    CHECK(c.grid.shifts == 4);
    CHECK(c.grid.seed == 99);
    CHECK(c.calendar_months);
    CHECK(c.forest_trees == 10);

    const auto again = parse_config(format_config(c));
    CHECK(format_config(again) == format_config(c));
    CHECK(config_hash(again) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    CHECK(config_hash(c) != config_hash(RunConfig{}));
}

TEST_CASE("parse_config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config("[grid]\nwindowz = 3\n"), Error);
    CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), Error);
    CHECK_THROWS_AS(parse_config("[period]\nstart = 2021-02-30\n"), Error);
    CHECK_THROWS_AS(parse_config("[grid]\nmodels = svm\n"), Error);
    CHECK_THROWS_AS(parse_config("[grid]\nshifts = many\n"), Error);
}

TEST_CASE("parse_int_list") {
    CHECK(parse_int_list("3-12").size() == 10);
    CHECK(parse_int_list("3,6,12") == std::vector<int>{3, 6, 12});
    CHECK(parse_int_list("5,3-4") == std::vector<int>{3, 4, 5});
    CHECK_THROWS_AS(parse_int_list("4-2"), Error);
    CHECK_THROWS_AS(parse_int_list("a"), Error);
}
