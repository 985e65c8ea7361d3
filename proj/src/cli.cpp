#include "maintcast/cli.hpp"

#include "maintcast/analytics.hpp"
#include "maintcast/config.hpp"
#include "maintcast/depgraph.hpp"
#include "maintcast/error.hpp"
#include "maintcast/eval.hpp"
#include "maintcast/fetch.hpp"
#include "maintcast/ingest.hpp"
#include "maintcast/parallel.hpp"
#include "maintcast/pipeline.hpp"
#include "maintcast/report.hpp"
#include "maintcast/scorecard.hpp"
#include "maintcast/synth.hpp"
#include "maintcast/textio.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>

namespace maintcast {

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::string config_path;
    unsigned jobs = 0;
    std::string out_dir, events, metadata, dependencies, library_map, start, end;
    std::string tasks, models, windows, horizons;
    std::optional<int> shifts, trees, epochs;
    std::optional<std::uint64_t> seed;
};

struct Context {
    RunConfig config;
    unsigned jobs = 1;
    std::ostream& out;
    nlohmann::ordered_json summary;
    std::vector<std::string> written;

    fs::path output(const std::string& name) const { return config.paths.output_dir / name; }

    void write(const std::string& name, std::string_view content) {
        fs::create_directories(config.paths.output_dir);
        write_file_atomic(output(name), content);
        written.push_back(name);
    }
};

RunConfig resolve_config(const Overrides& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (!o.out_dir.empty()) c.paths.output_dir = o.out_dir;
    if (!o.events.empty()) c.paths.events = o.events;
    if (!o.metadata.empty()) c.paths.metadata = o.metadata;
    if (!o.dependencies.empty()) c.paths.dependencies = o.dependencies;
    if (!o.library_map.empty()) c.paths.library_map = o.library_map;
    try {
        if (!o.start.empty()) c.period.first = config_date(o.start);
        if (!o.end.empty()) c.period.last = config_date(o.end);
    } catch (const Error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    // the override strings use the config file syntax
    if (!o.tasks.empty() || !o.models.empty() || !o.windows.empty() || !o.horizons.empty()) {
        std::string ini = "[grid]\n";
        if (!o.tasks.empty()) ini += "tasks = " + o.tasks + "\n";
        if (!o.models.empty()) ini += "models = " + o.models + "\n";
        if (!o.windows.empty()) ini += "windows = " + o.windows + "\n";
        if (!o.horizons.empty()) ini += "horizons = " + o.horizons + "\n";
        const auto g = parse_config(ini).grid;
        if (!o.tasks.empty()) c.grid.tasks = g.tasks;
        if (!o.models.empty()) c.grid.models = g.models;
        if (!o.windows.empty()) c.grid.windows = g.windows;
        if (!o.horizons.empty()) c.grid.horizons = g.horizons;
    }
    if (o.shifts) c.grid.shifts = *o.shifts;
    if (o.seed) c.grid.seed = *o.seed;
    if (o.trees) c.forest_trees = *o.trees;
    if (o.epochs) c.lstm_max_epochs = *o.epochs;
    return c;
}

void require_valid(const RunConfig& c, PathCheck check) {
    const auto problems = validate_config(c, check);
    if (problems.empty()) return;
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(Errc::InvalidConfig, msg);
}

ScoreParams score_params(const RunConfig& c) {
    ScoreParams p;
    p.gate_boundary_inclusive = c.gate_boundary_inclusive;
    return p;
}

BlockScheme block_scheme(const RunConfig& c) {
    return c.calendar_months ? BlockScheme::CalendarMonth : BlockScheme::Fixed30;
}

Corpus load(const RunConfig& c) { return load_corpus(c.paths.events, c.paths.metadata, c.period); }

DependencySnapshot load_snapshot(const RunConfig& c) {
    std::optional<fs::path> map;
    if (!c.paths.library_map.empty()) map = c.paths.library_map;
    return read_dependency_snapshot(c.paths.dependencies, map);
}

SelectionResult rank_libraries(Context& ctx, PageRankReport* report = nullptr) {
    const auto snapshot = load_snapshot(ctx.config);
    auto graph = build_dependency_graph(snapshot, ctx.config.reverse_pagerank_edges);
    const auto rep = pagerank(graph);
    if (report) *report = rep;
    return select_top_fraction(graph, snapshot, ctx.config.selection_fraction);
}

MonthlyTable prepared_monthly(Context& ctx, const Corpus& corpus, FilterResult* filter) {
    auto monthly = build_monthly_table(corpus, score_params(ctx.config), block_scheme(ctx.config), ctx.jobs);
    monthly = drop_constant_extremes(std::move(monthly), filter);
    if (ctx.config.restrict_to_selection) {
        std::set<std::string> ids;
        for (const auto& s : rank_libraries(ctx).selected) ids.insert(s.repo_id);
        monthly = restrict_to(std::move(monthly), ids);
    }
    return monthly;
}

void write_provenance(Context& ctx, const std::string& command) {
    nlohmann::ordered_json p;
    p["tool"] = "maintcast";
    p["tool_version"] = kToolVersion;
    p["command"] = command;
    p["config_hash"] = config_hash(ctx.config);
    p["outputs"] = ctx.written;
    p["config"] = format_config(ctx.config);
    fs::create_directories(ctx.config.paths.output_dir);
    write_file_atomic(ctx.output("provenance_" + command + ".json"), p.dump(2) + "\n");
}

// ---- subcommands ----

void cmd_ingest_check(Context& ctx) {
    require_valid(ctx.config, PathCheck::Inputs);
    const auto corpus = load(ctx.config);
    std::size_t events = 0;
    for (const auto& [id, r] : corpus.repos) events += r.events.size();
    ctx.summary["repos"] = corpus.repos.size();
    ctx.summary["events"] = events;
    ctx.summary["dropped_events"] = corpus.dropped_events;
    if (!ctx.config.paths.dependencies.empty()) {
        const auto snap = load_snapshot(ctx.config);
        ctx.summary["libraries"] = snap.library_count();
        ctx.summary["edges"] = snap.edges.size();
        ctx.summary["self_edges_dropped"] = snap.self_edges_dropped;
        ctx.summary["duplicates_collapsed"] = snap.duplicates_collapsed;
    }
}

void cmd_reconstruct(Context& ctx) {
    require_valid(ctx.config, PathCheck::Inputs);
    const auto corpus = load(ctx.config);
    std::vector<const RepoData*> repos;
    for (const auto& [id, r] : corpus.repos) repos.push_back(&r);
    std::vector<std::string> chunks(repos.size());
    const auto params = score_params(ctx.config);
    parallel_for(repos.size(), ctx.jobs, [&](std::size_t i) {
        const auto s = reconstruct_repo(*repos[i], corpus.period, params);
        append_score_rows(chunks[i], s.sums, s.series);
    });
    std::string csv = kScoreCsvHeader;
    for (const auto& c : chunks) csv += c;
    ctx.write("scores.csv", csv);
    ctx.summary["repos"] = repos.size();
    ctx.summary["days"] = corpus.period.size();
}

void cmd_rank(Context& ctx) {
    require_valid(ctx.config, PathCheck::None);
    if (ctx.config.paths.dependencies.empty()) throw Error(Errc::InvalidConfig, "paths.dependencies is not set");
    PageRankReport rep;
    const auto sel = rank_libraries(ctx, &rep);
    ctx.write("selection.csv", format_selection_csv(sel));
    ctx.summary["selected"] = sel.selected.size();
    ctx.summary["excluded_no_repo"] = sel.excluded_no_repo;
    ctx.summary["iterations"] = rep.iterations;
    ctx.summary["converged"] = rep.converged;
}

void cmd_analyze(Context& ctx) {
    require_valid(ctx.config, PathCheck::Inputs);
    const auto corpus = load(ctx.config);
    std::vector<IntervalStats> intervals;
    std::vector<StabilityStats> stability;
    for (int y = year_of(corpus.period.first); y <= year_of(corpus.period.last); ++y) {
        intervals.push_back(mean_interactivity_days(corpus, y));
        stability.push_back(contributor_stability(corpus, y));
    }
    ctx.write("table1_intervals.csv", format_interval_csv(intervals));
    ctx.write("table2_stability.csv", format_stability_csv(stability));
    ctx.summary["years"] = intervals.size();
}

void cmd_targets(Context& ctx) {
    require_valid(ctx.config, ctx.config.restrict_to_selection ? PathCheck::InputsAndDependencies : PathCheck::Inputs);
    const auto corpus = load(ctx.config);
    FilterResult filter;
    const auto monthly = prepared_monthly(ctx, corpus, &filter);
    ctx.write("targets.csv", format_targets_csv(monthly, ctx.config.grid.epsilon));
    ctx.summary["repos"] = monthly.size();
    ctx.summary["removed_constant_extremes"] = filter.removed;
}

void cmd_evaluate(Context& ctx, bool inject_leak, bool keep_predictions) {
    require_valid(ctx.config, ctx.config.restrict_to_selection ? PathCheck::InputsAndDependencies : PathCheck::Inputs);
    const auto corpus = load(ctx.config);
    FilterResult filter;
    const auto monthly = prepared_monthly(ctx, corpus, &filter);

    GridOptions opt;
    opt.jobs = ctx.jobs;
    opt.keep_predictions = keep_predictions;
    opt.ridge.lambda = ctx.config.ridge_lambda;
    opt.forest.n_trees = ctx.config.forest_trees;
    opt.forest.median = ctx.config.forest_median;
    opt.lstm.max_epochs = ctx.config.lstm_max_epochs;
    if (inject_leak)
        opt.training_hook = [](SampleSet& train, int test_block) {
            if (train.size() > 0) train.origins[0].last_input_block = test_block;
        };
    const auto result = run_grid(ctx.config.grid, monthly, opt);

    ctx.write("records.csv", format_records_csv(result.records));
    const auto summary = aggregate(result.records);
    ctx.write("summary.csv", format_summary_csv(summary));

    std::map<std::pair<Representation, ModelKind>, ConfusionMatrix> confusion;
    for (const auto& r : result.records) confusion[{r.task, r.model}].add(r.confusion);
    for (const auto& [key, m] : confusion)
        ctx.write("confusion_" + std::string(to_string(key.first)) + "_" + std::string(to_string(key.second)) + ".csv",
                  format_confusion_csv(key.first, m));

    std::string skipped = "task,window,horizon,shift,reason\n";
    for (const auto& s : result.skipped)
        skipped += std::string(to_string(s.task)) + ',' + std::to_string(s.window) + ',' + std::to_string(s.horizon) +
                   ',' + std::to_string(s.shift) + ",\"" + s.reason + "\"\n";
    ctx.write("skipped.csv", skipped);

    if (keep_predictions) {
        std::string pred = "task,model,window,horizon,shift,repo,raw,label,truth_value,truth_label\n";
        for (const auto& r : result.records)
            for (const auto& p : r.predictions)
                pred += std::string(to_string(r.task)) + ',' + std::string(to_string(r.model)) + ',' +
                        std::to_string(r.window) + ',' + std::to_string(r.horizon) + ',' + std::to_string(r.shift) +
                        ',' + p.repo_id + ',' + format_double(p.raw) + ',' + format_double(p.label) + ',' +
                        format_double(p.truth_value) + ',' + format_double(p.truth_label) + '\n';
        ctx.write("predictions.csv", pred);
    }
    ctx.summary["repos"] = monthly.size();
    ctx.summary["removed_constant_extremes"] = filter.removed;
    ctx.summary["records"] = result.records.size();
    ctx.summary["skipped"] = result.skipped.size();
}

void cmd_synth(Context& ctx) {
    require_valid(ctx.config, PathCheck::None);
    const auto specs = mixed_preset(ctx.config.synth);
    if (specs.empty()) throw Error(Errc::InvalidConfig, "synth preset has no repos");
    std::vector<SyntheticRepo> repos(specs.size());
    parallel_for(specs.size(), ctx.jobs, [&](std::size_t i) { repos[i] = generate_repo_activity(specs[i]); });
    std::map<std::string, RepoMetadata> meta;
    std::vector<ActivityEvent> events;
    std::vector<std::string> ids;
    for (auto& r : repos) {
        ids.push_back(r.meta.repo_id);
        meta.emplace(r.meta.repo_id, r.meta);
        events.insert(events.end(), r.events.begin(), r.events.end());
    }
    const auto n_events = events.size();
    ctx.write("events.jsonl", format_event_log(std::move(events)));
    ctx.write("metadata.jsonl", format_repo_metadata(meta));
    const auto deps = synthetic_dependencies(ids, ctx.config.synth.seed);
    ctx.write("dependencies.csv", format_dependency_edges(deps));
    ctx.write("libraries.csv", format_library_map(deps));
    ctx.summary["repos"] = ids.size();
    ctx.summary["events"] = n_events;
}

void cmd_report(Context& ctx, const std::string& records_path, bool plots) {
    const fs::path records = records_path.empty() ? ctx.output("records.csv") : fs::path(records_path);
    const auto parsed = parse_records_csv(read_file(records));
    if (parsed.empty()) throw Error(Errc::EmptySampleSet, "no records in " + records.string());
    const auto summary = aggregate(parsed);
    ctx.write("summary.csv", format_summary_csv(summary));
    std::size_t heatmaps = 0;
    if (plots) {
        ctx.write("summary.svg", render_summary_svg(summary));
        const auto dir = records.has_parent_path() ? records.parent_path() : fs::path(".");
        std::vector<fs::path> confusion_files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const auto name = entry.path().filename().string();
            if (name.rfind("confusion_", 0) == 0 && entry.path().extension() == ".csv")
                confusion_files.push_back(entry.path());
        }
        std::sort(confusion_files.begin(), confusion_files.end());
        for (const auto& f : confusion_files) {
            const auto stem = f.stem().string();
            ctx.write(stem + ".svg", render_confusion_svg(stem.substr(10), parse_confusion_csv(read_file(f))));
            ++heatmaps;
        }
    }
    ctx.summary["groups"] = summary.size();
    ctx.summary["heatmaps"] = heatmaps;
}

void cmd_fetch(Context& ctx, std::vector<std::string> repos) {
    require_valid(ctx.config, PathCheck::None);
    if (repos.empty()) repos = ctx.config.fetch.repos;
    if (repos.empty()) throw Error(Errc::InvalidConfig, "no repositories to fetch");
    const char* token = std::getenv(ctx.config.fetch.token_env.c_str());
    if (!token || !*token) throw Error(Errc::InvalidConfig, "environment variable " + ctx.config.fetch.token_env + " is not set");
    FetchOptions opt;
    opt.endpoint = ctx.config.fetch.endpoint;
    opt.request_budget = ctx.config.fetch.request_budget;
    opt.window = {add_days(ctx.config.period.first, -89), ctx.config.period.last};
    std::map<std::string, RepoMetadata> meta;
    std::vector<ActivityEvent> events;
    int requests = 0, truncated = 0;
    for (const auto& url : repos) {
        auto ex = fetch_repository_export(url, token, opt);
        requests += ex.requests_used;
        truncated += ex.truncated ? 1 : 0;
        meta.emplace(ex.meta.repo_id, ex.meta);
        events.insert(events.end(), ex.events.begin(), ex.events.end());
    }
    const auto n_events = events.size();
    ctx.write("events.jsonl", format_event_log(std::move(events)));
    ctx.write("metadata.jsonl", format_repo_metadata(meta));
    ctx.summary["repos"] = meta.size();
    ctx.summary["events"] = n_events;
    ctx.summary["requests"] = requests;
    ctx.summary["truncated"] = truncated;
}

int exit_code(ErrorCategory c) { return static_cast<int>(c); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"maintcast: maintenance-score reconstruction and forecasting toolkit", "maintcast"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides o;
    app.add_option("-c,--config", o.config_path, "INI configuration file");
    app.add_option("-j,--jobs", o.jobs, "worker threads (default: available cores)");
    app.add_option("-o,--out", o.out_dir, "output directory");
    app.add_option("--events", o.events, "event log (JSON lines)");
    app.add_option("--metadata", o.metadata, "repository metadata (JSON lines)");
    app.add_option("--dependencies", o.dependencies, "dependency edge CSV");
    app.add_option("--library-map", o.library_map, "library to repository CSV");
    app.add_option("--start", o.start, "period start (YYYY-MM-DD)");
    app.add_option("--end", o.end, "period end (YYYY-MM-DD)");
    app.add_option("--tasks", o.tasks, "raw,bucket,slope,trend");
    app.add_option("--models", o.models, "varma,forest,lstm,majority");
    app.add_option("--windows", o.windows, "e.g. 3-12 or 3,6,12");
    app.add_option("--horizons", o.horizons, "e.g. 1-6");
    app.add_option("--shifts", o.shifts, "sliding-window shifts");
    app.add_option("--seed", o.seed, "base seed");
    app.add_option("--trees", o.trees, "random forest size");
    app.add_option("--epochs", o.epochs, "recurrent network epoch cap");

    app.add_subcommand("ingest-check", "validate inputs and report counts");
    app.add_subcommand("reconstruct", "daily maintained scores -> scores.csv");
    app.add_subcommand("rank", "PageRank library selection -> selection.csv");
    app.add_subcommand("analyze", "interval and contributor-stability tables");
    app.add_subcommand("targets", "monthly targets -> targets.csv");
    auto* evaluate = app.add_subcommand("evaluate", "walk-forward grid -> records.csv, summary.csv, confusion_*.csv");
    bool inject_leak = false, keep_predictions = false;
    evaluate->add_flag("--keep-predictions", keep_predictions, "also write predictions.csv");
    evaluate->add_flag("--inject-leak", inject_leak)->group("");
    app.add_subcommand("synth", "write a synthetic corpus");
    auto* report = app.add_subcommand("report", "summary and plots from records.csv");
    std::string records_path;
    bool plots = false;
    report->add_option("--records", records_path, "records.csv (default: <out>/records.csv)");
    report->add_flag("--plots", plots, "also render SVG plots");
    auto* fetch = app.add_subcommand("fetch", "export repositories through the GraphQL API");
    std::vector<std::string> fetch_repos;
    fetch->add_option("--repo", fetch_repos, "repository URL or owner/name (repeatable)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    nlohmann::ordered_json line;
    line["command"] = name;
    try {
        Context ctx{resolve_config(o), o.jobs ? o.jobs : default_jobs(), out, {}, {}};
        if (name == "ingest-check") cmd_ingest_check(ctx);
        else if (name == "reconstruct") cmd_reconstruct(ctx);
        else if (name == "rank") cmd_rank(ctx);
        else if (name == "analyze") cmd_analyze(ctx);
        else if (name == "targets") cmd_targets(ctx);
        else if (name == "evaluate") cmd_evaluate(ctx, inject_leak, keep_predictions);
        else if (name == "synth") cmd_synth(ctx);
        else if (name == "report") cmd_report(ctx, records_path, plots);
        else if (name == "fetch") cmd_fetch(ctx, fetch_repos);
        if (!ctx.written.empty()) write_provenance(ctx, name);
        line["status"] = "ok";
        line["config_hash"] = config_hash(ctx.config);
        for (auto& [k, v] : ctx.summary.items()) line[k] = v;
        line["outputs"] = ctx.written;
        out << line.dump() << "\n";
        return 0;
    } catch (const Error& e) {
        line["status"] = "error";
        line["category"] = e.category() == ErrorCategory::Usage ? "usage"
                           : e.category() == ErrorCategory::Data ? "data"
                                                                 : "internal";
        line["error"] = std::string(errc_name(e.code()));
        line["message"] = e.what();
        out << line.dump() << "\n";
        err << "error: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        line["status"] = "error";
        line["category"] = "internal";
        line["message"] = e.what();
        out << line.dump() << "\n";
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace maintcast
