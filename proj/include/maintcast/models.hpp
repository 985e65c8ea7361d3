#pragma once

#include "maintcast/features.hpp"
#include "maintcast/forest.hpp"
#include "maintcast/labels.hpp"
#include "maintcast/lstm.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace maintcast {

enum class ModelKind { Majority, VarmaStat, RandomForest, Lstm };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

struct RidgeParams {
    double lambda = 1.0;
};

struct ModelConfig {
    ModelKind kind = ModelKind::Majority;
    Representation task = Representation::Raw;
    std::uint64_t seed = 0;
    double slope_step = 1.0;  // label granularity the majority model votes over
    RidgeParams ridge;
    ForestParams forest;
    LstmParams lstm;

    void validate() const;
};

struct TrainingMeta {
    std::size_t n_samples = 0;
    int window = 0;
    int horizon = 0;
    int features = kBaseFeatureCount;
    Representation task = Representation::Raw;
};

struct MajorityState {
    double label = 0.0;
};

struct RidgeState {
    Standardizer standardizer;
    std::vector<double> weights;
    double intercept = 0.0;
};

struct ForestState {
    RandomForest forest;
};

struct LstmState {
    LstmNetwork network;
    AdamState adam;
    Standardizer standardizer;  // per base feature
    double target_mean = 0.0;
    double target_scale = 1.0;
    std::uint64_t rounds = 0;  // completed training rounds; seeds the next one
};

struct TrainedModel {
    ModelConfig config;
    TrainingMeta meta;
    std::variant<MajorityState, RidgeState, ForestState, LstmState> state;

    ModelKind kind() const { return config.kind; }
};

/// Most frequent value; ties go to the smallest value.
double majority_label(std::span<const double> labels);

/// Clip range applied to recurrent-network targets before training.
std::pair<double, double> target_clip_range(Representation task);

TrainedModel train(const ModelConfig& config, const SampleSet& samples);

/// Raw model outputs: unclipped reals (the majority model returns its label).
std::vector<double> predict(const TrainedModel& model, const SampleSet& samples);

/// Continues recurrent-network training from the current weights on new
/// samples with a fresh early-stopping state. An empty set is a no-op.
TrainedModel incremental_update(TrainedModel model, const SampleSet& samples);

/// Versioned JSON document; parameters round-trip exactly.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view text);

}  // namespace maintcast
