#include "maintcast/models.hpp"

#include "maintcast/error.hpp"
#include "maintcast/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace maintcast {

using nlohmann::json;

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Majority: return "majority";
        case ModelKind::VarmaStat: return "varma";
        case ModelKind::RandomForest: return "forest";
        case ModelKind::Lstm: return "lstm";
    }
    return "majority";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    if (text == "majority") return ModelKind::Majority;
    if (text == "varma") return ModelKind::VarmaStat;
    if (text == "forest") return ModelKind::RandomForest;
    if (text == "lstm") return ModelKind::Lstm;
    return std::nullopt;
}

void ModelConfig::validate() const {
    if (!(slope_step > 0.0)) throw Error(Errc::InvalidConfig, "slope step must be positive");
    if (ridge.lambda < 0.0) throw Error(Errc::InvalidConfig, "ridge lambda must be >= 0");
    forest.validate();
    lstm.validate();
}

double majority_label(std::span<const double> labels) {
    if (labels.empty()) throw Error(Errc::EmptyTrainingSet, "majority vote over no labels");
    std::map<double, std::size_t> counts;
    for (double l : labels) ++counts[l];
    double best = counts.begin()->first;
    std::size_t best_count = 0;
    for (const auto& [label, count] : counts)
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    return best;
}

std::pair<double, double> target_clip_range(Representation task) {
    if (task == Representation::Slope) return {-10.0, 10.0};
    return {0.0, 10.0};
}

namespace {

TrainingMeta meta_of(const SampleSet& s) {
    return {s.size(), s.window, s.horizons.empty() ? 0 : s.horizons.front(), s.features, s.task};
}

void check_shape(const TrainedModel& m, const SampleSet& s) {
    if (s.window != m.meta.window || s.features != m.meta.features || s.task != m.meta.task)
        throw Error(Errc::ShapeMismatch, "samples do not match the trained model's (window, features, task)");
}

RidgeState fit_ridge(const SampleSet& samples, double lambda) {
    const Table raw = varma_table(samples);
    RidgeState st;
    st.standardizer = Standardizer::fit(raw);
    const Table x = st.standardizer.apply(raw);
    const auto n = static_cast<Eigen::Index>(x.rows), p = static_cast<Eigen::Index>(x.cols);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(x.data.data(), n, p);
    Eigen::Map<const Eigen::VectorXd> y(samples.targets.data(), n);
    st.intercept = y.mean();
    const Eigen::VectorXd yc = y.array() - st.intercept;
    Eigen::MatrixXd gram = X.transpose() * X;
    gram.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success || (lambda == 0.0 && llt.rcond() < 1e-12))
        throw Error(Errc::SingularSystem, "normal equations are not positive definite (lambda = " +
                                              std::to_string(lambda) + ")");
    const Eigen::VectorXd w = llt.solve(X.transpose() * yc);
    st.weights.assign(w.data(), w.data() + w.size());
    return st;
}

std::vector<double> lstm_inputs(const LstmState& st, const SampleSet& samples) {
    std::vector<double> x = samples.inputs;
    st.standardizer.apply_inplace(x);
    return x;
}

void train_lstm_round(LstmState& st, const ModelConfig& cfg, const SampleSet& samples) {
    const auto x = lstm_inputs(st, samples);
    const auto [lo, hi] = target_clip_range(cfg.task);
    std::vector<double> y(samples.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = (std::clamp(samples.targets[i], lo, hi) - st.target_mean) / st.target_scale;
    fit_lstm(st.network, st.adam, x, y, samples.window, cfg.lstm, derive_seed(cfg.seed, {0x5eedULL, st.rounds}));
    ++st.rounds;
}

}  // namespace

TrainedModel train(const ModelConfig& config, const SampleSet& samples) {
    config.validate();
    if (samples.empty()) throw Error(Errc::EmptyTrainingSet, "no training samples");
    if (samples.task != config.task) throw Error(Errc::KindMismatch, "sample task differs from model task");
    TrainedModel model{config, meta_of(samples), MajorityState{}};
    switch (config.kind) {
        case ModelKind::Majority: {
            std::vector<double> labels;
            labels.reserve(samples.size());
            for (double t : samples.targets) labels.push_back(discretize(config.task, t, config.slope_step));
            model.state = MajorityState{majority_label(labels)};
            break;
        }
        case ModelKind::VarmaStat:
            model.state = fit_ridge(samples, config.ridge.lambda);
            break;
        case ModelKind::RandomForest:
            model.state = ForestState{RandomForest::fit(flatten_samples(samples), samples.targets, config.forest,
                                                        derive_seed(config.seed, {0xf0ULL}))};
            break;
        case ModelKind::Lstm: {
            LstmState st;
            st.standardizer = Standardizer::fit_columns(samples.inputs, static_cast<std::size_t>(samples.features));
            const auto [lo, hi] = target_clip_range(config.task);
            std::vector<double> clipped(samples.targets);
            for (auto& t : clipped) t = std::clamp(t, lo, hi);
            const auto ys = Standardizer::fit_columns(clipped, 1);
            st.target_mean = ys.mean[0];
            st.target_scale = ys.scale[0];
            st.network = LstmNetwork(samples.features, config.lstm.hidden, config.lstm.dense);
            st.network.initialize(derive_seed(config.seed, {0x1417ULL}), config.lstm.init_scale,
                                  config.lstm.forget_bias);
            train_lstm_round(st, config, samples);
            model.state = std::move(st);
            break;
        }
    }
    return model;
}

std::vector<double> predict(const TrainedModel& model, const SampleSet& samples) {
    check_shape(model, samples);
    std::vector<double> out(samples.size());
    if (samples.empty()) return out;
    std::visit(
        [&](const auto& st) {
            using S = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<S, MajorityState>) {
                std::fill(out.begin(), out.end(), st.label);
            } else if constexpr (std::is_same_v<S, RidgeState>) {
                const Table x = st.standardizer.apply(varma_table(samples));
                for (std::size_t i = 0; i < x.rows; ++i) {
                    double v = st.intercept;
                    const auto r = x.row(i);
                    for (std::size_t j = 0; j < r.size(); ++j) v += st.weights[j] * r[j];
                    out[i] = v;
                }
            } else if constexpr (std::is_same_v<S, ForestState>) {
                for (std::size_t i = 0; i < samples.size(); ++i) out[i] = st.forest.predict(samples.row(i));
            } else {
                const auto x = lstm_inputs(st, samples);
                std::vector<std::size_t> rows(samples.size());
                for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
                const auto batch = make_batch(x, {}, samples.window, samples.features, rows);
                const Eigen::VectorXd y = st.network.predict(batch);
                for (std::size_t i = 0; i < out.size(); ++i)
                    out[i] = y[static_cast<Eigen::Index>(i)] * st.target_scale + st.target_mean;
            }
        },
        model.state);
    return out;
}

TrainedModel incremental_update(TrainedModel model, const SampleSet& samples) {
    if (model.kind() != ModelKind::Lstm) throw Error(Errc::KindMismatch, "incremental updates need an lstm model");
    if (samples.empty()) return model;
    check_shape(model, samples);
    auto& st = std::get<LstmState>(model.state);
    train_lstm_round(st, model.config, samples);
    model.meta.n_samples = samples.size();
    return model;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

constexpr int kFormatVersion = 1;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_eigen(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json standardizer_json(const Standardizer& s) { return {{"mean", s.mean}, {"scale", s.scale}}; }

Standardizer standardizer_from(const json& j) {
    return {j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
}

json config_json(const ModelConfig& c) {
    return {{"kind", to_string(c.kind)},
            {"task", to_string(c.task)},
            {"seed", c.seed},
            {"slope_step", c.slope_step},
            {"ridge", {{"lambda", c.ridge.lambda}}},
            {"forest",
             {{"n_trees", c.forest.n_trees},
              {"max_depth", c.forest.max_depth},
              {"min_samples_split", c.forest.min_samples_split},
              {"bootstrap", c.forest.bootstrap},
              {"median", c.forest.median}}},
            {"lstm",
             {{"hidden", c.lstm.hidden},
              {"dense", c.lstm.dense},
              {"dropout", c.lstm.dropout},
              {"learning_rate", c.lstm.learning_rate},
              {"beta1", c.lstm.beta1},
              {"beta2", c.lstm.beta2},
              {"adam_epsilon", c.lstm.adam_epsilon},
              {"batch_size", c.lstm.batch_size},
              {"max_epochs", c.lstm.max_epochs},
              {"patience", c.lstm.patience},
              {"validation_fraction", c.lstm.validation_fraction},
              {"init_scale", c.lstm.init_scale},
              {"forget_bias", c.lstm.forget_bias}}}};
}

ModelConfig config_from(const json& j) {
    ModelConfig c;
    auto kind = parse_model_kind(j.at("kind").get<std::string>());
    auto task = parse_representation(j.at("task").get<std::string>());
    if (!kind || !task) throw Error(Errc::MalformedRecord, "unknown model kind or task");
    c.kind = *kind;
    c.task = *task;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.slope_step = j.at("slope_step").get<double>();
    c.ridge.lambda = j.at("ridge").at("lambda").get<double>();
    const auto& f = j.at("forest");
    c.forest = {f.at("n_trees").get<int>(), f.at("max_depth").get<int>(), f.at("min_samples_split").get<int>(),
                f.at("bootstrap").get<bool>(), f.at("median").get<bool>()};
    const auto& l = j.at("lstm");
    c.lstm.hidden = l.at("hidden").get<int>();
    c.lstm.dense = l.at("dense").get<int>();
    c.lstm.dropout = l.at("dropout").get<double>();
    c.lstm.learning_rate = l.at("learning_rate").get<double>();
    c.lstm.beta1 = l.at("beta1").get<double>();
    c.lstm.beta2 = l.at("beta2").get<double>();
    c.lstm.adam_epsilon = l.at("adam_epsilon").get<double>();
    c.lstm.batch_size = l.at("batch_size").get<int>();
    c.lstm.max_epochs = l.at("max_epochs").get<int>();
    c.lstm.patience = l.at("patience").get<int>();
    c.lstm.validation_fraction = l.at("validation_fraction").get<double>();
    c.lstm.init_scale = l.at("init_scale").get<double>();
    c.lstm.forget_bias = l.at("forget_bias").get<double>();
    return c;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
    json doc;
    doc["format"] = "maintcast-model";
    doc["version"] = kFormatVersion;
    doc["config"] = config_json(model.config);
    doc["meta"] = {{"n_samples", model.meta.n_samples},
                   {"window", model.meta.window},
                   {"horizon", model.meta.horizon},
                   {"features", model.meta.features},
                   {"task", to_string(model.meta.task)}};
    std::visit(
        [&](const auto& st) {
            using S = std::decay_t<decltype(st)>;
            json s;
            if constexpr (std::is_same_v<S, MajorityState>) {
                s["label"] = st.label;
            } else if constexpr (std::is_same_v<S, RidgeState>) {
                s["standardizer"] = standardizer_json(st.standardizer);
                s["weights"] = st.weights;
                s["intercept"] = st.intercept;
            } else if constexpr (std::is_same_v<S, ForestState>) {
                json trees = json::array();
                for (const auto& t : st.forest.trees()) {
                    json nodes = json::array();
                    for (const auto& n : t.nodes()) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
                    trees.push_back(std::move(nodes));
                }
                s["median"] = st.forest.uses_median();
                s["trees"] = std::move(trees);
            } else {
                s["features"] = st.network.features();
                s["hidden"] = st.network.hidden();
                s["dense"] = st.network.dense();
                s["parameters"] = vec(st.network.parameters());
                s["adam_m"] = vec(st.adam.m);
                s["adam_v"] = vec(st.adam.v);
                s["adam_step"] = st.adam.step;
                s["standardizer"] = standardizer_json(st.standardizer);
                s["target_mean"] = st.target_mean;
                s["target_scale"] = st.target_scale;
                s["rounds"] = st.rounds;
            }
            doc["state"] = std::move(s);
        },
        model.state);
    return doc.dump() + "\n";
}

TrainedModel deserialize_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
        if (doc.at("format") != "maintcast-model") throw Error(Errc::MalformedRecord, "not a model document");
        if (doc.at("version").get<int>() != kFormatVersion)
            throw Error(Errc::MalformedRecord, "unsupported model format version");
        TrainedModel m;
        m.config = config_from(doc.at("config"));
        const auto& meta = doc.at("meta");
        m.meta.n_samples = meta.at("n_samples").get<std::size_t>();
        m.meta.window = meta.at("window").get<int>();
        m.meta.horizon = meta.at("horizon").get<int>();
        m.meta.features = meta.at("features").get<int>();
        m.meta.task = *parse_representation(meta.at("task").get<std::string>());
        const auto& s = doc.at("state");
        switch (m.config.kind) {
            case ModelKind::Majority:
                m.state = MajorityState{s.at("label").get<double>()};
                break;
            case ModelKind::VarmaStat:
                m.state = RidgeState{standardizer_from(s.at("standardizer")), s.at("weights").get<std::vector<double>>(),
                                     s.at("intercept").get<double>()};
                break;
            case ModelKind::RandomForest: {
                std::vector<RegressionTree> trees;
                for (const auto& t : s.at("trees")) {
                    std::vector<TreeNode> nodes;
                    for (const auto& n : t)
                        nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                         n.at(3).get<int>(), n.at(4).get<double>()});
                    trees.push_back(RegressionTree::from_nodes(std::move(nodes)));
                }
                m.state = ForestState{RandomForest::from_trees(std::move(trees), s.at("median").get<bool>())};
                break;
            }
            case ModelKind::Lstm: {
                LstmState st;
                st.network = LstmNetwork(s.at("features").get<int>(), s.at("hidden").get<int>(), s.at("dense").get<int>());
                st.network.parameters() = to_eigen(s.at("parameters"));
                if (static_cast<std::size_t>(st.network.parameters().size()) !=
                    LstmNetwork::parameter_count(st.network.features(), st.network.hidden(), st.network.dense()))
                    throw Error(Errc::MalformedRecord, "parameter vector has the wrong length");
                st.adam.m = to_eigen(s.at("adam_m"));
                st.adam.v = to_eigen(s.at("adam_v"));
                st.adam.step = s.at("adam_step").get<std::int64_t>();
                st.standardizer = standardizer_from(s.at("standardizer"));
                st.target_mean = s.at("target_mean").get<double>();
                st.target_scale = s.at("target_scale").get<double>();
                st.rounds = s.at("rounds").get<std::uint64_t>();
                m.state = std::move(st);
                break;
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedRecord, std::string("model document: ") + e.what());
    }
}

}  // namespace maintcast
