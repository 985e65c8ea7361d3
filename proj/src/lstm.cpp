#include "maintcast/lstm.hpp"

#include "maintcast/error.hpp"
#include "maintcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maintcast {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void LstmParams::validate() const {
    if (hidden < 1 || dense < 1) throw Error(Errc::InvalidConfig, "network sizes must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw Error(Errc::InvalidConfig, "dropout must be in [0,1)");
    if (!(learning_rate > 0.0)) throw Error(Errc::InvalidConfig, "learning rate must be positive");
    if (batch_size < 1 || max_epochs < 1 || patience < 1) throw Error(Errc::InvalidConfig, "batch/epochs/patience");
    if (validation_fraction < 0.0 || validation_fraction >= 1.0)
        throw Error(Errc::InvalidConfig, "validation fraction must be in [0,1)");
}

struct LstmNetwork::Views {
    Eigen::Map<const MatrixXd> W, U;
    Eigen::Map<const VectorXd> b;
    Eigen::Map<const MatrixXd> W1;
    Eigen::Map<const VectorXd> b1, w2;
    double b2;
};

LstmNetwork::LstmNetwork(int features, int hidden, int dense)
    : features_(features), hidden_(hidden), dense_(dense),
      params_(VectorXd::Zero(static_cast<Eigen::Index>(parameter_count(features, hidden, dense)))) {}

std::size_t LstmNetwork::parameter_count(int f, int h, int d) {
    const auto F = static_cast<std::size_t>(f), H = static_cast<std::size_t>(h), D = static_cast<std::size_t>(d);
    return 4 * H * F + 4 * H * H + 4 * H + D * H + D + D + 1;
}

LstmNetwork::Views LstmNetwork::views() const {
    const Eigen::Index F = features_, H = hidden_, D = dense_;
    const double* p = params_.data();
    const double* W = p;
    const double* U = W + 4 * H * F;
    const double* b = U + 4 * H * H;
    const double* W1 = b + 4 * H;
    const double* b1 = W1 + D * H;
    const double* w2 = b1 + D;
    return {Eigen::Map<const MatrixXd>(W, 4 * H, F), Eigen::Map<const MatrixXd>(U, 4 * H, H),
            Eigen::Map<const VectorXd>(b, 4 * H),    Eigen::Map<const MatrixXd>(W1, D, H),
            Eigen::Map<const VectorXd>(b1, D),       Eigen::Map<const VectorXd>(w2, D),
            w2[D]};
}

void LstmNetwork::initialize(std::uint64_t seed, double scale, double forget_bias) {
    Rng rng(seed);
    for (Eigen::Index i = 0; i < params_.size(); ++i) params_[i] = rng.uniform(-scale, scale);
    const Eigen::Index F = features_, H = hidden_, D = dense_;
    const Eigen::Index b_off = 4 * H * F + 4 * H * H;
    params_.segment(b_off, 4 * H).setZero();
    params_.segment(b_off + H, H).setConstant(forget_bias);
    const Eigen::Index b1_off = b_off + 4 * H + D * H;
    params_.segment(b1_off, D).setZero();
    params_[params_.size() - 1] = 0.0;
}

namespace {

MatrixXd sigmoid(const MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

struct StepCache {
    MatrixXd i, f, g, o, c, tanh_c, h;
};

}  // namespace

VectorXd LstmNetwork::predict(const SequenceBatch& batch) const {
    const auto v = views();
    const Eigen::Index H = hidden_, B = batch.batch();
    MatrixXd h = MatrixXd::Zero(H, B), c = MatrixXd::Zero(H, B);
    for (const auto& x : batch.steps) {
        MatrixXd z = v.W * x + v.U * h;
        z.colwise() += v.b;
        const MatrixXd i = sigmoid(z.topRows(H));
        const MatrixXd f = sigmoid(z.middleRows(H, H));
        const MatrixXd g = z.middleRows(2 * H, H).array().tanh().matrix();
        const MatrixXd o = sigmoid(z.bottomRows(H));
        c = (f.array() * c.array() + i.array() * g.array()).matrix();
        h = (o.array() * c.array().tanh()).matrix();
    }
    MatrixXd a = v.W1 * h;
    a.colwise() += v.b1;
    a = a.cwiseMax(0.0);
    VectorXd out = (v.w2.transpose() * a).transpose();
    out.array() += v.b2;
    return out;
}

double LstmNetwork::loss(const SequenceBatch& batch, VectorXd* grad, const MatrixXd* dropout_mask) const {
    const auto v = views();
    const Eigen::Index F = features_, H = hidden_, D = dense_, B = batch.batch();
    const std::size_t T = batch.steps.size();

    std::vector<StepCache> cache(T);
    MatrixXd h = MatrixXd::Zero(H, B), c = MatrixXd::Zero(H, B);
    for (std::size_t t = 0; t < T; ++t) {
        MatrixXd z = v.W * batch.steps[t] + v.U * h;
        z.colwise() += v.b;
        auto& s = cache[t];
        s.i = sigmoid(z.topRows(H));
        s.f = sigmoid(z.middleRows(H, H));
        s.g = z.middleRows(2 * H, H).array().tanh().matrix();
        s.o = sigmoid(z.bottomRows(H));
        s.c = (s.f.array() * c.array() + s.i.array() * s.g.array()).matrix();
        s.tanh_c = s.c.array().tanh().matrix();
        s.h = (s.o.array() * s.tanh_c.array()).matrix();
        h = s.h;
        c = s.c;
    }
    const MatrixXd h_drop = dropout_mask ? MatrixXd(h.cwiseProduct(*dropout_mask)) : h;
    MatrixXd pre = v.W1 * h_drop;
    pre.colwise() += v.b1;
    const MatrixXd a = pre.cwiseMax(0.0);
    VectorXd y = (v.w2.transpose() * a).transpose();
    y.array() += v.b2;
    const VectorXd err = y - batch.targets;
    const double loss = err.squaredNorm() / static_cast<double>(B);
    if (!grad) return loss;

    grad->setZero(params_.size());
    double* gp = grad->data();
    Eigen::Map<MatrixXd> gW(gp, 4 * H, F);
    Eigen::Map<MatrixXd> gU(gp + 4 * H * F, 4 * H, H);
    Eigen::Map<VectorXd> gb(gp + 4 * H * F + 4 * H * H, 4 * H);
    double* head = gp + 4 * H * F + 4 * H * H + 4 * H;
    Eigen::Map<MatrixXd> gW1(head, D, H);
    Eigen::Map<VectorXd> gb1(head + D * H, D);
    Eigen::Map<VectorXd> gw2(head + D * H + D, D);
    double& gb2 = head[D * H + 2 * D];

    const Eigen::RowVectorXd dy = (2.0 / static_cast<double>(B)) * err.transpose();
    gb2 = dy.sum();
    gw2 = a * dy.transpose();
    MatrixXd da = v.w2 * dy;                               // D x B
    da = (pre.array() > 0.0).select(da, 0.0);
    gW1 = da * h_drop.transpose();
    gb1 = da.rowwise().sum();
    MatrixXd dh = v.W1.transpose() * da;                   // H x B
    if (dropout_mask) dh = dh.cwiseProduct(*dropout_mask);
    MatrixXd dc = MatrixXd::Zero(H, B);

    MatrixXd dz(4 * H, B);
    for (std::size_t k = T; k-- > 0;) {
        const auto& s = cache[k];
        const MatrixXd c_prev = k > 0 ? cache[k - 1].c : MatrixXd::Zero(H, B);
        const MatrixXd h_prev = k > 0 ? cache[k - 1].h : MatrixXd::Zero(H, B);
        dc.array() += dh.array() * s.o.array() * (1.0 - s.tanh_c.array().square());
        dz.topRows(H) = (dc.array() * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
        dz.middleRows(H, H) = (dc.array() * c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
        dz.middleRows(2 * H, H) = (dc.array() * s.i.array() * (1.0 - s.g.array().square())).matrix();
        dz.bottomRows(H) = (dh.array() * s.tanh_c.array() * s.o.array() * (1.0 - s.o.array())).matrix();
        gW.noalias() += dz * batch.steps[k].transpose();
        gU.noalias() += dz * h_prev.transpose();
        gb += dz.rowwise().sum();
        dh = v.U.transpose() * dz;
        dc = (dc.array() * s.f.array()).matrix();
    }
    return loss;
}

void adam_update(VectorXd& params, const VectorXd& grad, AdamState& st, const LstmParams& p) {
    if (st.m.size() != params.size()) {
        st.m = VectorXd::Zero(params.size());
        st.v = VectorXd::Zero(params.size());
        st.step = 0;
    }
    ++st.step;
    st.m = p.beta1 * st.m + (1.0 - p.beta1) * grad;
    st.v = p.beta2 * st.v + (1.0 - p.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(st.step));
    const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(st.step));
    params.array() -= p.learning_rate * (st.m.array() / c1) / ((st.v.array() / c2).sqrt() + p.adam_epsilon);
}

SequenceBatch make_batch(std::span<const double> inputs, std::span<const double> targets, int window, int features,
                         std::span<const std::size_t> rows) {
    SequenceBatch b;
    const auto B = static_cast<Eigen::Index>(rows.size());
    const std::size_t width = static_cast<std::size_t>(window) * static_cast<std::size_t>(features);
    b.steps.assign(static_cast<std::size_t>(window), MatrixXd(features, B));
    b.targets.resize(B);
    for (Eigen::Index col = 0; col < B; ++col) {
        const std::size_t r = rows[static_cast<std::size_t>(col)];
        for (int t = 0; t < window; ++t)
            for (int j = 0; j < features; ++j)
                b.steps[static_cast<std::size_t>(t)](j, col) =
                    inputs[r * width + static_cast<std::size_t>(t) * static_cast<std::size_t>(features) +
                           static_cast<std::size_t>(j)];
        b.targets[col] = targets.empty() ? 0.0 : targets[r];
    }
    return b;
}

namespace {

double mean_loss(const LstmNetwork& net, std::span<const double> inputs, std::span<const double> targets, int window,
                 std::span<const std::size_t> rows) {
    if (rows.empty()) return 0.0;
    const auto batch = make_batch(inputs, targets, window, net.features(), rows);
    return net.loss(batch, nullptr);
}

void require_finite(const VectorXd& v, const char* what) {
    if (!v.allFinite()) throw Error(Errc::InvariantViolation, std::string("non-finite values in ") + what);
}

}  // namespace

LstmFitReport fit_lstm(LstmNetwork& net, AdamState& adam, std::span<const double> inputs,
                       std::span<const double> targets, int window, const LstmParams& params, std::uint64_t seed) {
    params.validate();
    const std::size_t n = targets.size();
    LstmFitReport report;
    if (n == 0) return report;

    const auto n_val = static_cast<std::size_t>(std::floor(params.validation_fraction * static_cast<double>(n)));
    const std::size_t n_train = n - n_val;
    std::vector<std::size_t> train_rows(n_train), val_rows(n_val);
    std::iota(train_rows.begin(), train_rows.end(), std::size_t{0});
    std::iota(val_rows.begin(), val_rows.end(), n_train);

    const double keep = 1.0 - params.dropout;
    VectorXd grad(net.parameters().size());
    VectorXd best = net.parameters();
    double best_val = n_val ? mean_loss(net, inputs, targets, window, val_rows) : 0.0;
    int since_best = 0;

    for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(epoch)}));
        for (std::size_t k = n_train; k > 1; --k) std::swap(train_rows[k - 1], train_rows[rng.below(k)]);
        double epoch_loss = 0.0;
        for (std::size_t from = 0; from < n_train; from += static_cast<std::size_t>(params.batch_size)) {
            const std::size_t to = std::min(n_train, from + static_cast<std::size_t>(params.batch_size));
            std::span<const std::size_t> rows(train_rows.data() + from, to - from);
            const auto batch = make_batch(inputs, targets, window, net.features(), rows);
            MatrixXd mask;
            if (params.dropout > 0.0) {
                mask.resize(net.hidden(), batch.batch());
                for (Eigen::Index c = 0; c < mask.cols(); ++c)
                    for (Eigen::Index r = 0; r < mask.rows(); ++r) mask(r, c) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
            }
            epoch_loss += net.loss(batch, &grad, params.dropout > 0.0 ? &mask : nullptr) *
                          static_cast<double>(rows.size());
            require_finite(grad, "gradient");
            adam_update(net.parameters(), grad, adam, params);
        }
        require_finite(net.parameters(), "parameters");
        report.epochs = epoch + 1;
        report.final_training_loss = epoch_loss / static_cast<double>(n_train);
        if (n_val == 0) continue;
        const double val = mean_loss(net, inputs, targets, window, val_rows);
        if (val < best_val) {
            best_val = val;
            best = net.parameters();
            since_best = 0;
        } else if (++since_best >= params.patience) {
            break;
        }
    }
    if (n_val) net.parameters() = best;
    report.best_validation_loss = best_val;
    return report;
}

double lstm_gradient_check(const GradientCheckSpec& spec, std::uint64_t seed) {
    LstmNetwork net(spec.features, spec.hidden, spec.dense);
    net.initialize(derive_seed(seed, {1}), spec.init_scale, 1.0);
    if (spec.zero_recurrent) {
        const Eigen::Index off = 4 * spec.hidden * spec.features;
        net.parameters().segment(off, 4 * spec.hidden * spec.hidden).setZero();
    }
    Rng rng(derive_seed(seed, {2}));
    const std::size_t n = static_cast<std::size_t>(spec.batch);
    std::vector<double> inputs(n * static_cast<std::size_t>(spec.window * spec.features));
    std::vector<double> targets(n);
    for (auto& x : inputs) x = rng.uniform(-2.0, 2.0);
    for (auto& y : targets) y = rng.uniform(-1.0, 1.0);
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto batch = make_batch(inputs, targets, spec.window, spec.features, rows);

    VectorXd analytic;
    net.loss(batch, &analytic);
    double worst = 0.0;
    auto& p = net.parameters();
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double saved = p[k];
        p[k] = saved + spec.step;
        const double up = net.loss(batch, nullptr);
        p[k] = saved - spec.step;
        const double down = net.loss(batch, nullptr);
        p[k] = saved;
        const double numeric = (up - down) / (2.0 * spec.step);
        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-7});
        worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
    }
    return worst;
}

}  // namespace maintcast
