#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace maintcast {

struct LstmParams {
    int hidden = 32;
    int dense = 16;
    double dropout = 0.2;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-7;
    int batch_size = 32;
    int max_epochs = 50;
    int patience = 5;
    double validation_fraction = 0.1;
    double init_scale = 0.08;
    double forget_bias = 1.0;

    void validate() const;
};

/// Batch of sequences: steps[t] is (features x batch), targets is (batch).
struct SequenceBatch {
    std::vector<Eigen::MatrixXd> steps;
    Eigen::VectorXd targets;

    Eigen::Index batch() const { return targets.size(); }
};

/// One recurrent layer (input/forget/cell/output gates) over the window, then
/// dropout on the last hidden state, a rectified dense layer and a linear
/// scalar head. All weights live in one flat vector:
///   W (4H x F), U (4H x H), b (4H), W1 (D x H), b1 (D), w2 (D), b2 (1)
/// with gate blocks ordered input, forget, cell, output; matrices column-major.
class LstmNetwork {
public:
    LstmNetwork() = default;
    LstmNetwork(int features, int hidden, int dense);

    static std::size_t parameter_count(int features, int hidden, int dense);

    /// Uniform(-scale, scale) weights, zero biases except the forget gate.
    void initialize(std::uint64_t seed, double scale, double forget_bias);

    int features() const { return features_; }
    int hidden() const { return hidden_; }
    int dense() const { return dense_; }
    Eigen::VectorXd& parameters() { return params_; }
    const Eigen::VectorXd& parameters() const { return params_; }

    Eigen::VectorXd predict(const SequenceBatch& batch) const;

    /// Mean squared error over the batch. With `grad` non-null the full
    /// gradient w.r.t. parameters() is written there. `dropout_mask`, when
    /// given, is (hidden x batch) and already scaled by 1 / keep.
    double loss(const SequenceBatch& batch, Eigen::VectorXd* grad, const Eigen::MatrixXd* dropout_mask = nullptr) const;

private:
    struct Views;
    Views views() const;

    int features_ = 0;
    int hidden_ = 0;
    int dense_ = 0;
    Eigen::VectorXd params_;
};

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    std::int64_t step = 0;
};

void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state, const LstmParams& p);

/// Result of one training run.
struct LstmFitReport {
    int epochs = 0;
    double best_validation_loss = 0.0;
    double final_training_loss = 0.0;
};

/// Mini-batch training with early stopping on the trailing validation_fraction
/// of the samples; the best validation weights are restored. `inputs` is
/// (n, window, features) block-major, already standardized; `targets` already
/// scaled. `seed` drives shuffling and dropout.
LstmFitReport fit_lstm(LstmNetwork& net, AdamState& adam, std::span<const double> inputs, std::span<const double> targets,
                       int window, const LstmParams& params, std::uint64_t seed);

SequenceBatch make_batch(std::span<const double> inputs, std::span<const double> targets, int window, int features,
                         std::span<const std::size_t> rows);

struct GradientCheckSpec {
    int window = 3;
    int features = 2;
    int hidden = 4;
    int dense = 3;
    int batch = 5;
    double init_scale = 0.5;
    bool zero_recurrent = false;
    double step = 1e-5;
};

/// Largest relative difference between backprop gradients and central finite
/// differences over every parameter, dropout disabled. Relative error is
/// |a - n| / max(|a|, |n|, 1e-7).
double lstm_gradient_check(const GradientCheckSpec& spec, std::uint64_t seed);

}  // namespace maintcast
