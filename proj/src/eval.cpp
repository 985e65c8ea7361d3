#include "maintcast/eval.hpp"

#include "maintcast/error.hpp"
#include "maintcast/parallel.hpp"
#include "maintcast/rng.hpp"
#include "maintcast/textio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <tuple>

namespace maintcast {

std::vector<std::string> GridSpec::problems() const {
    std::vector<std::string> out;
    if (tasks.empty()) out.emplace_back("no tasks selected");
    if (models.empty()) out.emplace_back("no models selected");
    if (windows.empty()) out.emplace_back("no windows selected");
    if (horizons.empty()) out.emplace_back("no horizons selected");
    for (int w : windows)
        if (w < 3 || w > 12) out.push_back("window outside 3..12: " + std::to_string(w));
    for (int h : horizons)
        if (h < 1 || h > 6) out.push_back("horizon outside 1..6: " + std::to_string(h));
    if (shifts < 1) out.push_back("shifts must be >= 1");
    if (epsilon < 0) out.push_back("epsilon must be >= 0");
    if (!(slope_step > 0)) out.push_back("slope step must be positive");
    return out;
}

namespace {

std::vector<ModelKind> models_with_baseline(const GridSpec& spec) {
    std::set<ModelKind> kinds(spec.models.begin(), spec.models.end());
    kinds.insert(ModelKind::Majority);
    return {kinds.begin(), kinds.end()};
}

}  // namespace

std::vector<GridCell> enumerate_cells(const GridSpec& spec) {
    std::vector<GridCell> cells;
    for (auto task : spec.tasks)
        for (auto model : models_with_baseline(spec))
            for (int w : spec.windows)
                for (int h : spec.horizons)
                    for (int s = 0; s < spec.shifts; ++s) cells.push_back({task, model, w, h, s});
    return cells;
}

int first_usable_block(Representation task) {
    return task == Representation::Slope || task == Representation::TrendType ? 1 : 0;
}

int test_block_for(Representation task, int window, int horizon, int shift) {
    return first_usable_block(task) + window + horizon + shift;
}

int required_blocks(Representation task, int window, int horizon, int shifts) {
    return test_block_for(task, window, horizon, shifts - 1) + 1;
}

bool leakage_check(const SampleSet& training, int test_block) {
    for (std::size_t i = 0; i < training.size(); ++i) {
        if (training.origins[i].last_input_block >= test_block) return false;
        if (training.target_block(i) >= test_block) return false;
    }
    return true;
}

double accuracy(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw Error(Errc::LengthMismatch, "prediction/truth lengths differ");
    if (truth.empty()) throw Error(Errc::LengthMismatch, "accuracy of an empty set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (predicted[i] == truth[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += at(i, i);
    return s;
}

std::vector<double> ConfusionMatrix::row_normalized() const {
    std::vector<double> out(counts.size(), 0.0);
    for (std::size_t r = 0; r < size(); ++r) {
        std::int64_t row = 0;
        for (std::size_t c = 0; c < size(); ++c) row += at(r, c);
        if (row == 0) continue;
        for (std::size_t c = 0; c < size(); ++c)
            out[r * size() + c] = static_cast<double>(at(r, c)) / static_cast<double>(row);
    }
    return out;
}

void ConfusionMatrix::add(const ConfusionMatrix& other) {
    if (counts.empty()) {
        *this = other;
        return;
    }
    if (other.labels != labels) throw Error(Errc::ShapeMismatch, "confusion label spaces differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

ConfusionMatrix confusion_matrix(std::span<const double> predicted, std::span<const double> truth,
                                 std::span<const double> label_space) {
    if (predicted.size() != truth.size()) throw Error(Errc::LengthMismatch, "prediction/truth lengths differ");
    ConfusionMatrix m;
    m.labels.assign(label_space.begin(), label_space.end());
    m.counts.assign(m.size() * m.size(), 0);
    auto index = [&](double label) {
        auto it = std::find(m.labels.begin(), m.labels.end(), label);
        if (it == m.labels.end()) throw Error(Errc::UnknownLabel, "label " + format_double(label));
        return static_cast<std::size_t>(it - m.labels.begin());
    };
    for (std::size_t i = 0; i < truth.size(); ++i) ++m.counts[index(truth[i]) * m.size() + index(predicted[i])];
    return m;
}

double mean_absolute_error(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw Error(Errc::LengthMismatch, "prediction/truth lengths differ");
    if (truth.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) s += std::abs(predicted[i] - truth[i]);
    return s / static_cast<double>(truth.size());
}

double r2_score(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw Error(Errc::LengthMismatch, "prediction/truth lengths differ");
    if (truth.empty()) return 0.0;
    double mean = 0.0;
    for (double t : truth) mean += t;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

double macro_f1(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw Error(Errc::LengthMismatch, "prediction/truth lengths differ");
    std::set<double> labels(truth.begin(), truth.end());
    labels.insert(predicted.begin(), predicted.end());
    if (labels.empty()) return 0.0;
    double sum = 0.0;
    for (double l : labels) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool p = predicted[i] == l, t = truth[i] == l;
            if (p && t) ++tp;
            else if (p) ++fp;
            else if (t) ++fn;
        }
        const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp + fn);
        sum += denom > 0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    }
    return sum / static_cast<double>(labels.size());
}

EvaluationRecord score_predictions(Representation task, std::span<const double> raw, std::span<const double> truth,
                                   double slope_step) {
    if (raw.size() != truth.size()) throw Error(Errc::LengthMismatch, "prediction/truth lengths differ");
    EvaluationRecord r;
    r.task = task;
    r.n_test = truth.size();
    std::vector<double> pred_labels(raw.size()), true_labels(truth.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        pred_labels[i] = discretize(task, raw[i], slope_step);
        true_labels[i] = discretize(task, truth[i], slope_step);
    }
    r.accuracy = accuracy(pred_labels, true_labels);
    const auto space = label_space(task, slope_step);
    r.confusion = confusion_matrix(pred_labels, true_labels, space);
    r.mae = mean_absolute_error(raw, truth);
    r.r2 = r2_score(raw, truth);
    r.macro_f1 = macro_f1(pred_labels, true_labels);
    if (task == Representation::Raw) {
        std::vector<double> pb(raw.size()), tb(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            pb[i] = static_cast<double>(bucket_of(static_cast<int>(pred_labels[i])));
            tb[i] = static_cast<double>(bucket_of(static_cast<int>(true_labels[i])));
        }
        r.coarsened_accuracy = accuracy(pb, tb);
    } else {
        r.coarsened_accuracy = r.accuracy;
    }
    return r;
}

EvaluationRecord majority_baseline_cell(Representation task, std::span<const double> training_targets,
                                        std::span<const double> test_targets, double slope_step) {
    if (training_targets.empty()) throw Error(Errc::EmptyTrainingSet, "baseline without training targets");
    std::vector<double> labels;
    labels.reserve(training_targets.size());
    for (double t : training_targets) labels.push_back(discretize(task, t, slope_step));
    const double mode = majority_label(labels);
    std::vector<double> preds(test_targets.size(), mode);
    auto r = score_predictions(task, preds, test_targets, slope_step);
    r.model = ModelKind::Majority;
    return r;
}

namespace {

struct Unit {
    Representation task;
    ModelKind model;
    int window;
    int horizon;
};

struct UnitResult {
    std::vector<EvaluationRecord> records;
    std::vector<SkippedCell> skipped;
};

int max_block_count(const MonthlyTable& monthly) {
    int best = 0;
    for (const auto& [id, pts] : monthly)
        for (const auto& p : pts) best = std::max(best, p.block_index + 1);
    return best;
}

UnitResult run_unit(const Unit& u, const GridSpec& spec, const MonthlyTable& monthly, const GridOptions& opt,
                    int available_blocks) {
    UnitResult out;
    const int need = required_blocks(u.task, u.window, u.horizon, spec.shifts);
    const auto task_id = static_cast<std::uint64_t>(u.task);
    const auto model_id = static_cast<std::uint64_t>(u.model);
    const auto w = static_cast<std::uint64_t>(u.window), h = static_cast<std::uint64_t>(u.horizon);

    std::optional<TrainedModel> warm;
    for (int s = 0; s < spec.shifts; ++s) {
        const int test_block = test_block_for(u.task, u.window, u.horizon, s);
        if (available_blocks < need) {
            out.skipped.push_back({u.task, u.window, u.horizon, s,
                                   "InsufficientHistory: need " + std::to_string(need) + " blocks, have " +
                                       std::to_string(available_blocks)});
            continue;
        }
        SampleSet train, test;
        try {
            train = make_windowed_samples(monthly, u.task, u.window, u.horizon,
                                          {first_usable_block(u.task), test_block - 1}, spec.epsilon);
            test = make_windowed_samples(monthly, u.task, u.window, u.horizon,
                                         {test_block - u.horizon - u.window + 1, test_block}, spec.epsilon);
        } catch (const Error& e) {
            if (e.code() != Errc::EmptySampleSet) throw;
            out.skipped.push_back({u.task, u.window, u.horizon, s, std::string("InsufficientHistory: ") + e.what()});
            continue;
        }
        if (opt.training_hook) opt.training_hook(train, test_block);
        if (!leakage_check(train, test_block))
            throw Error(Errc::LeakageDetected, "training data reaches block " + std::to_string(test_block) + " (" +
                                                   std::string(to_string(u.task)) + ", window " +
                                                   std::to_string(u.window) + ", horizon " + std::to_string(u.horizon) +
                                                   ", shift " + std::to_string(s) + ")");
        for (std::size_t i = 0; i < test.size(); ++i)
            if (test.target_block(i) != test_block || test.origins[i].last_input_block >= test_block)
                throw Error(Errc::InvariantViolation, "test sample outside its block");

        ModelConfig cfg;
        cfg.kind = u.model;
        cfg.task = u.task;
        cfg.slope_step = spec.slope_step;
        cfg.ridge = opt.ridge;
        cfg.forest = opt.forest;
        cfg.lstm = opt.lstm;
        cfg.seed = u.model == ModelKind::Lstm
                       ? derive_seed(spec.seed, {task_id, model_id, w, h})
                       : derive_seed(spec.seed, {task_id, model_id, w, h, static_cast<std::uint64_t>(s)});

        TrainedModel model = [&] {
            if (u.model == ModelKind::Lstm && warm) return incremental_update(std::move(*warm), train);
            return maintcast::train(cfg, train);
        }();
        const auto raw = predict(model, test);
        if (u.model == ModelKind::Lstm) warm = std::move(model);

        auto rec = score_predictions(u.task, raw, test.targets, spec.slope_step);
        rec.model = u.model;
        rec.window = u.window;
        rec.horizon = u.horizon;
        rec.shift = s;
        rec.test_block = test_block;
        rec.n_train = train.size();
        rec.seed = cfg.seed;
        if (u.task == Representation::Raw && rec.coarsened_accuracy < rec.accuracy)
            throw Error(Errc::InvariantViolation, "bucketing lowered accuracy");
        if (rec.confusion.trace() != static_cast<std::int64_t>(std::llround(rec.accuracy * rec.n_test)) ||
            rec.confusion.total() != static_cast<std::int64_t>(rec.n_test))
            throw Error(Errc::InvariantViolation, "confusion matrix disagrees with accuracy");
        if (opt.keep_predictions) {
            for (std::size_t i = 0; i < test.size(); ++i)
                rec.predictions.push_back({test.origins[i].repo_id, raw[i], discretize(u.task, raw[i], spec.slope_step),
                                           test.targets[i], discretize(u.task, test.targets[i], spec.slope_step)});
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

auto record_key(const EvaluationRecord& r) { return std::make_tuple(r.task, r.model, r.window, r.horizon, r.shift); }

}  // namespace

GridResult run_grid(const GridSpec& spec, const MonthlyTable& monthly, const GridOptions& options) {
    if (auto p = spec.problems(); !p.empty()) throw Error(Errc::InvalidConfig, p.front());
    std::vector<Unit> units;
    for (auto task : spec.tasks)
        for (auto model : models_with_baseline(spec))
            for (int w : spec.windows)
                for (int h : spec.horizons) units.push_back({task, model, w, h});
    // heaviest work first so a pool drains evenly
    std::stable_sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) {
        return (a.model == ModelKind::Lstm) > (b.model == ModelKind::Lstm);
    });

    const int available = max_block_count(monthly);
    std::vector<UnitResult> results(units.size());
    parallel_for(units.size(), options.jobs,
                 [&](std::size_t i) { results[i] = run_unit(units[i], spec, monthly, options, available); });

    GridResult out;
    std::set<std::tuple<Representation, int, int, int>> skipped_seen;
    for (auto& r : results) {
        for (auto& rec : r.records) out.records.push_back(std::move(rec));
        for (auto& sk : r.skipped)
            if (skipped_seen.emplace(sk.task, sk.window, sk.horizon, sk.shift).second) out.skipped.push_back(sk);
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const EvaluationRecord& a, const EvaluationRecord& b) { return record_key(a) < record_key(b); });
    std::sort(out.skipped.begin(), out.skipped.end(), [](const SkippedCell& a, const SkippedCell& b) {
        return std::tie(a.task, a.window, a.horizon, a.shift) < std::tie(b.task, b.window, b.horizon, b.shift);
    });
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(Errc::LengthMismatch, "quantile of nothing");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
}

std::vector<AggregateSummary> aggregate(std::span<const EvaluationRecord> records) {
    std::map<std::pair<Representation, ModelKind>, std::vector<double>> groups;
    for (const auto& r : records) groups[{r.task, r.model}].push_back(r.accuracy);
    std::vector<AggregateSummary> out;
    for (const auto& [key, acc] : groups) {
        AggregateSummary s;
        s.task = key.first;
        s.model = key.second;
        double sum = 0.0;
        for (double a : acc) sum += a;
        s.mean = sum / static_cast<double>(acc.size());
        s.median = quantile(acc, 0.5);
        s.q1 = quantile(acc, 0.25);
        s.q3 = quantile(acc, 0.75);
        s.iqr = s.q3 - s.q1;
        s.min = *std::min_element(acc.begin(), acc.end());
        s.max = *std::max_element(acc.begin(), acc.end());
        s.n_cells = acc.size();
        out.push_back(s);
    }
    return out;
}

std::string format_records_csv(std::span<const EvaluationRecord> records) {
    std::string out = "task,model,window,horizon,shift,n_test,accuracy,mae,r2,macro_f1,seed\n";
    for (const auto& r : records) {
        out += std::string(to_string(r.task)) + ',' + std::string(to_string(r.model)) + ',' + std::to_string(r.window) +
               ',' + std::to_string(r.horizon) + ',' + std::to_string(r.shift) + ',' + std::to_string(r.n_test) + ',' +
               format_double(r.accuracy) + ',' + format_double(r.mae) + ',' + format_double(r.r2) + ',' +
               format_double(r.macro_f1) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

std::string format_summary_csv(std::span<const AggregateSummary> summary) {
    std::string out = "task,model,mean,median,q1,q3,iqr,min,max,n_cells\n";
    for (const auto& s : summary)
        out += std::string(to_string(s.task)) + ',' + std::string(to_string(s.model)) + ',' + format_double(s.mean) +
               ',' + format_double(s.median) + ',' + format_double(s.q1) + ',' + format_double(s.q3) + ',' +
               format_double(s.iqr) + ',' + format_double(s.min) + ',' + format_double(s.max) + ',' +
               std::to_string(s.n_cells) + '\n';
    return out;
}

std::string format_confusion_csv(Representation task, const ConfusionMatrix& m) {
    std::string out = "truth";
    for (double l : m.labels) out += ',' + label_name(task, l);
    out += '\n';
    for (std::size_t r = 0; r < m.size(); ++r) {
        out += label_name(task, m.labels[r]);
        for (std::size_t c = 0; c < m.size(); ++c) out += ',' + std::to_string(m.at(r, c));
        out += '\n';
    }
    return out;
}

namespace {

double to_double(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error(Errc::MalformedRecord, "number: " + s);
    return v;
}

}  // namespace

std::vector<EvaluationRecord> parse_records_csv(std::string_view text) {
    std::vector<EvaluationRecord> out;
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
        ++line_no;
        if (trim(line).empty() || line_no == 1) continue;
        const auto c = split(trim(line), ',');
        if (c.size() != 11) throw Error(Errc::MalformedRecord, "records line " + std::to_string(line_no),
                                        static_cast<std::int64_t>(line_no));
        EvaluationRecord r;
        auto task = parse_representation(c[0]);
        auto model = parse_model_kind(c[1]);
        if (!task || !model) throw Error(Errc::MalformedRecord, "records line " + std::to_string(line_no),
                                         static_cast<std::int64_t>(line_no));
        r.task = *task;
        r.model = *model;
        r.window = static_cast<int>(to_double(c[2]));
        r.horizon = static_cast<int>(to_double(c[3]));
        r.shift = static_cast<int>(to_double(c[4]));
        r.n_test = static_cast<std::size_t>(to_double(c[5]));
        r.accuracy = to_double(c[6]);
        r.mae = to_double(c[7]);
        r.r2 = to_double(c[8]);
        r.macro_f1 = to_double(c[9]);
        r.seed = std::stoull(c[10]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace maintcast
