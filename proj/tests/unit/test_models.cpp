#include <doctest.h>

#include "maintcast/error.hpp"
#include "maintcast/forest.hpp"
#include "maintcast/labels.hpp"
#include "maintcast/lstm.hpp"
#include "maintcast/models.hpp"
#include "maintcast/rng.hpp"

#include <cmath>

using namespace maintcast;

namespace {

SampleSet random_samples(std::uint64_t seed, std::size_t n, int window, Representation task = Representation::Raw) {
    Rng rng(seed);
    SampleSet s;
    s.task = task;
    s.window = window;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(s.row_width());
        for (auto& v : row) v = rng.uniform(0.0, 10.0);
        const double last_mean = row[row.size() - kBaseFeatureCount];
        s.push_back(row, std::round(std::min(10.0, last_mean)), 1, {"r" + std::to_string(i), window - 1});
    }
    return s;
}

double r2(const std::vector<double>& y, const std::vector<double>& p) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - p[i]) * (y[i] - p[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return 1.0 - ss_res / ss_tot;
}

}  // namespace

TEST_CASE("majority_label ties go to the smallest value") {
    const std::vector<double> a{0, 0, 2};
    CHECK(majority_label(a) == 0);
    const std::vector<double> b{2, 0};
    CHECK(majority_label(b) == 0);
    const std::vector<double> c{5, 3, 5, 3, 9};
    CHECK(majority_label(c) == 3);
}

TEST_CASE("Majority model predicts its stored label") {
    SampleSet s = random_samples(1, 3, 3, Representation::Bucket);
    s.targets = {0, 0, 2};
    ModelConfig cfg;
    cfg.kind = ModelKind::Majority;
    cfg.task = Representation::Bucket;
    const auto m = train(cfg, s);
    for (double p : predict(m, random_samples(2, 7, 3, Representation::Bucket))) CHECK(p == 0);
}

TEST_CASE("VarmaStat fits exactly linear data") {
    SampleSet s = random_samples(3, 60, 3);
    for (std::size_t i = 0; i < s.size(); ++i) s.targets[i] = 2.0 * s.row(i)[2 * kBaseFeatureCount];
    ModelConfig cfg;
    cfg.kind = ModelKind::VarmaStat;
    cfg.ridge.lambda = 1e-8;
    const auto m = train(cfg, s);
    const auto p = predict(m, s);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(p[i] - s.targets[i]));
    CHECK(worst < 1e-6);
}

TEST_CASE("single unbootstrapped tree memorizes its training set") {
    Rng rng(4);
    Table x{200, 3, {}};
    std::vector<double> y;
    for (std::size_t i = 0; i < x.rows * x.cols; ++i) x.data.push_back(rng.uniform());
    for (std::size_t i = 0; i < x.rows; ++i) y.push_back(rng.uniform(-5.0, 5.0));
    ForestParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    const auto f = RandomForest::fit(x, y, p, 9);
    for (std::size_t i = 0; i < x.rows; ++i) CHECK(f.predict(x.row(i)) == y[i]);
}

TEST_CASE("forest generalizes on a smooth target") {
    Rng rng(6);
    auto make = [&](std::size_t n, Table& x, std::vector<double>& y) {
        x = {n, 2, {}};
        y.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
            x.data.push_back(a);
            x.data.push_back(b);
            y.push_back(3.0 * a + b * b);
        }
    };
    Table xtr, xte;
    std::vector<double> ytr, yte;
    make(600, xtr, ytr);
    make(200, xte, yte);
    ForestParams p;
    p.n_trees = 50;
    const auto f = RandomForest::fit(xtr, ytr, p, 1);
    std::vector<double> pred;
    for (std::size_t i = 0; i < xte.rows; ++i) pred.push_back(f.predict(xte.row(i)));
    CHECK(r2(yte, pred) >= 0.95);
}

TEST_CASE("RandomForest model is deterministic for a fixed seed") {
    const auto s = random_samples(7, 80, 4);
    ModelConfig cfg;
    cfg.kind = ModelKind::RandomForest;
    cfg.forest.n_trees = 20;
    cfg.seed = 11;
    CHECK(predict(train(cfg, s), s) == predict(train(cfg, s), s));
    cfg.seed = 12;
    const auto other = predict(train(cfg, s), s);
    cfg.seed = 11;
    CHECK(predict(train(cfg, s), s) != other);
}

TEST_CASE("serialization round-trips every model kind exactly") {
    const auto s = random_samples(9, 50, 3);
    for (auto kind : {ModelKind::Majority, ModelKind::VarmaStat, ModelKind::RandomForest, ModelKind::Lstm}) {
        ModelConfig cfg;
        cfg.kind = kind;
        cfg.seed = 3;
        cfg.forest.n_trees = 5;
        cfg.lstm.max_epochs = 3;
        cfg.lstm.hidden = 6;
        cfg.lstm.dense = 4;
        const auto m = train(cfg, s);
        const auto text = serialize_model(m);
        const auto back = deserialize_model(text);
        CHECK(back.kind() == kind);
        CHECK(predict(back, s) == predict(m, s));
        CHECK(serialize_model(back) == text);
    }
    CHECK_THROWS_AS(deserialize_model("{}"), Error);
}

TEST_CASE("Lstm output is finite on zero input and updates deterministically") {
    const auto s = random_samples(10, 60, 3);
    ModelConfig cfg;
    cfg.kind = ModelKind::Lstm;
    cfg.seed = 21;
    cfg.lstm.max_epochs = 5;
    cfg.lstm.hidden = 8;
    cfg.lstm.dense = 4;
    const auto m = train(cfg, s);

    SampleSet zeros = s;
    std::fill(zeros.inputs.begin(), zeros.inputs.end(), 0.0);
    for (double p : predict(m, zeros)) CHECK(std::isfinite(p));

    SampleSet none;
    none.window = 3;
    const auto same = incremental_update(m, none);
    CHECK(serialize_model(same) == serialize_model(m));

    const auto more = random_samples(11, 40, 3);
    const auto u1 = incremental_update(m, more);
    const auto u2 = incremental_update(m, more);
    CHECK(serialize_model(u1) == serialize_model(u2));
    CHECK(serialize_model(u1) != serialize_model(m));
}

TEST_CASE("train rejects empty sets") {
    SampleSet none;
    none.window = 3;
    ModelConfig cfg;
    cfg.kind = ModelKind::VarmaStat;
    CHECK_THROWS_AS(train(cfg, none), Error);
}

TEST_CASE("lstm gradient check") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) CHECK(lstm_gradient_check({}, seed) <= 1e-4);
    GradientCheckSpec zero;
    zero.zero_recurrent = true;
    CHECK(lstm_gradient_check(zero, 1) <= 1e-4);
}

TEST_CASE("adam moves parameters against the gradient") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd g(3);
    g << 1.0, -2.0, 0.0;
    AdamState st;
    LstmParams lp;
    adam_update(p, g, st, lp);
    CHECK(p[0] < 0.0);
    CHECK(p[1] > 0.0);
    CHECK(p[2] == 0.0);
    CHECK(st.step == 1);
}

TEST_CASE("every kind fits constant labels perfectly after discretization") {
    for (auto task : {Representation::Raw, Representation::Bucket, Representation::TrendType}) {
        auto s = random_samples(12, 40, 3, task);
        const double label = task == Representation::Raw ? 7.0 : 1.0;
        std::fill(s.targets.begin(), s.targets.end(), label);
        for (auto kind : {ModelKind::Majority, ModelKind::VarmaStat, ModelKind::RandomForest, ModelKind::Lstm}) {
            ModelConfig cfg;
            cfg.kind = kind;
            cfg.task = task;
            cfg.forest.n_trees = 10;
            cfg.lstm.max_epochs = 10;
            for (double p : predict(train(cfg, s), s)) CHECK(discretize(task, p) == label);
        }
    }
}

TEST_CASE("unrestricted forest fits a deterministic function in-sample") {
    Rng rng(13);
    Table x{300, 3, {}};
    std::vector<double> y;
    for (std::size_t i = 0; i < x.rows; ++i) {
        double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
        x.data.insert(x.data.end(), {a, b, c});
        y.push_back(std::sin(6.0 * a) + b * c);
    }
    const auto f = RandomForest::fit(x, y, ForestParams{}, 2);
    std::vector<double> p;
    for (std::size_t i = 0; i < x.rows; ++i) p.push_back(f.predict(x.row(i)));
    CHECK(r2(y, p) >= 0.95);
}
