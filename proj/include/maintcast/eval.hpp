#pragma once

#include "maintcast/features.hpp"
#include "maintcast/labels.hpp"
#include "maintcast/models.hpp"
#include "maintcast/targets.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace maintcast {

struct GridSpec {
    std::vector<Representation> tasks{Representation::Raw, Representation::Bucket, Representation::Slope,
                                      Representation::TrendType};
    std::vector<ModelKind> models{ModelKind::VarmaStat, ModelKind::RandomForest, ModelKind::Lstm};
    std::vector<int> windows{3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<int> horizons{1, 2, 3, 4, 5, 6};
    int shifts = 12;
    std::uint64_t seed = 42;
    double epsilon = 0.5;
    double slope_step = 1.0;

    /// Every violated range, not just the first.
    std::vector<std::string> problems() const;
};

struct GridCell {
    Representation task;
    ModelKind model;
    int window;
    int horizon;
    int shift;
};

/// All cells, including one majority-baseline cell per (task, window,
/// horizon, shift) whether or not the baseline is listed among the models.
std::vector<GridCell> enumerate_cells(const GridSpec& spec);

/// Slope and trend targets consume one block for differencing.
int first_usable_block(Representation task);
/// Block predicted in shift `shift`: the first shift leaves exactly one
/// training window (window + horizon blocks) before it.
int test_block_for(Representation task, int window, int horizon, int shift);
int required_blocks(Representation task, int window, int horizon, int shifts);

/// Passes iff every input block and every target block lies strictly before
/// `test_block`.
bool leakage_check(const SampleSet& training, int test_block);

double accuracy(std::span<const double> predicted, std::span<const double> truth);

struct ConfusionMatrix {
    std::vector<double> labels;
    std::vector<std::int64_t> counts;  // row = truth, column = prediction

    std::size_t size() const { return labels.size(); }
    std::int64_t at(std::size_t truth, std::size_t pred) const { return counts[truth * size() + pred]; }
    std::int64_t total() const;
    std::int64_t trace() const;
    std::vector<double> row_normalized() const;
    void add(const ConfusionMatrix& other);
};

/// Throws UnknownLabel when a label is outside `label_space`.
ConfusionMatrix confusion_matrix(std::span<const double> predicted, std::span<const double> truth,
                                 std::span<const double> label_space);

double mean_absolute_error(std::span<const double> predicted, std::span<const double> truth);
/// 1 - SS_res / SS_tot; a constant truth gives 1 for a perfect fit, else 0.
double r2_score(std::span<const double> predicted, std::span<const double> truth);
/// Unweighted F1 mean over labels present in either vector.
double macro_f1(std::span<const double> predicted, std::span<const double> truth);

struct TestPrediction {
    std::string repo_id;
    double raw = 0.0;
    double label = 0.0;
    double truth_value = 0.0;
    double truth_label = 0.0;
};

struct EvaluationRecord {
    Representation task = Representation::Raw;
    ModelKind model = ModelKind::Majority;
    int window = 0;
    int horizon = 0;
    int shift = 0;
    int test_block = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double accuracy = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
    double macro_f1 = 0.0;
    std::uint64_t seed = 0;
    ConfusionMatrix confusion;
    double coarsened_accuracy = 0.0;  // raw task only: accuracy after bucketing both sides
    std::vector<TestPrediction> predictions;  // filled when requested
};

/// Scores raw predictions against continuous truth values.
EvaluationRecord score_predictions(Representation task, std::span<const double> raw_predictions,
                                   std::span<const double> truth_values, double slope_step);

/// Constant prediction of the modal discretized training label.
EvaluationRecord majority_baseline_cell(Representation task, std::span<const double> training_targets,
                                        std::span<const double> test_targets, double slope_step = 1.0);

struct SkippedCell {
    Representation task;
    int window;
    int horizon;
    int shift;
    std::string reason;
};

struct GridOptions {
    unsigned jobs = 1;
    bool keep_predictions = false;
    RidgeParams ridge;
    ForestParams forest;
    LstmParams lstm;
    /// Test seam: may modify each training set before the leakage check runs.
    std::function<void(SampleSet& training, int test_block)> training_hook;
};

struct GridResult {
    std::vector<EvaluationRecord> records;  // canonical order
    std::vector<SkippedCell> skipped;
};

/// Walk-forward evaluation. For each (task, window, horizon) the test block
/// advances one block per shift; training samples are every pooled window
/// whose target precedes the test block. Majority, VarmaStat and
/// RandomForest retrain from scratch per shift; Lstm warm-starts from the
/// previous shift. Throws LeakageDetected if a training set leaks.
GridResult run_grid(const GridSpec& spec, const MonthlyTable& monthly, const GridOptions& options = {});

struct AggregateSummary {
    Representation task;
    ModelKind model;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n_cells = 0;
};

/// Linear interpolation between order statistics at position q * (n - 1).
double quantile(std::vector<double> values, double q);

std::vector<AggregateSummary> aggregate(std::span<const EvaluationRecord> records);

std::string format_records_csv(std::span<const EvaluationRecord> records);
std::string format_summary_csv(std::span<const AggregateSummary> summary);
/// Confusion counts summed over all cells of one (task, model).
std::string format_confusion_csv(Representation task, const ConfusionMatrix& m);

/// Parses records.csv back (metrics only; confusion and predictions are not stored there).
std::vector<EvaluationRecord> parse_records_csv(std::string_view text);

}  // namespace maintcast
