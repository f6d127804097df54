#include "advsamp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "advsamp/errors.hpp"

namespace advsamp {

void LossConfig::validate() const {
    if (alpha_E < 0.0 || alpha_F < 0.0) throw Error::config_error("loss: alphas must be >= 0");
    if (alpha_E == 0.0 && alpha_F == 0.0) throw Error::config_error("loss: alpha_E and alpha_F cannot both be 0");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw Error::config_error("train: epochs must be >= 1");
    if (batch_size < 1) throw Error::config_error("train: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw Error::config_error("train: learning_rate must be > 0");
    double sum = 0.0;
    for (double r : split_ratios) {
        if (r < 0.0) throw Error::config_error("train: split ratios must be >= 0");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error::config_error("train: split ratios must sum to 1");
}

SplitAssignment split_dataset(const std::vector<LabeledSample>& data,
                              const std::array<double, 3>& ratios, Rng& rng) {
    const int n = static_cast<int>(data.size());
    if (n < 3) throw Error::input_error("split_dataset: need at least 3 samples");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Fisher-Yates with our own rng for cross-platform determinism.
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }
    const int n_train = static_cast<int>(std::floor(ratios[0] * n));
    const int n_val = static_cast<int>(std::floor(ratios[1] * n));
    SplitAssignment split;
    split.train.assign(order.begin(), order.begin() + n_train);
    split.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    split.test.assign(order.begin() + n_train + n_val, order.end());
    return split;
}

double batch_loss(const std::vector<Prediction>& predicted,
                  const std::vector<LabeledSample>& target, const LossConfig& cfg) {
    cfg.validate();
    if (predicted.size() != target.size() || predicted.empty()) {
        throw Error::input_error("batch_loss: prediction/target length mismatch or empty");
    }
    double total = 0.0;
    for (size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i].forces.size() != target[i].forces.size()) {
            throw Error::input_error("batch_loss: force dimension mismatch");
        }
        const double de = target[i].energy - predicted[i].energy;
        total += cfg.alpha_E * de * de +
                 cfg.alpha_F * (target[i].forces - predicted[i].forces).squaredNorm();
    }
    return total / static_cast<double>(predicted.size());
}

AdamState AdamState::zeros_like(const ModelParameters& p) {
    AdamState s;
    s.first_moment = ParameterGradients::zeros_like(p);
    s.second_moment = ParameterGradients::zeros_like(p);
    return s;
}

void adam_step(ModelParameters& params, AdamState& state, const ParameterGradients& grads,
               double lr, const AdamConfig& cfg) {
    if (!grads.all_finite()) {
        throw Error::training_error("adam_step: non-finite gradient at step " +
                                    std::to_string(state.step + 1));
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t l = 0; l < params.weights.size(); ++l) {
        auto& m = state.first_moment.weights[l];
        auto& v = state.second_moment.weights[l];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grads.weights[l];
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * grads.weights[l].cwiseProduct(grads.weights[l]);
        params.weights[l].array() -=
            lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.epsilon);

        auto& mb = state.first_moment.biases[l];
        auto& vb = state.second_moment.biases[l];
        mb = cfg.beta1 * mb + (1.0 - cfg.beta1) * grads.biases[l];
        vb = cfg.beta2 * vb + (1.0 - cfg.beta2) * grads.biases[l].cwiseProduct(grads.biases[l]);
        params.biases[l].array() -=
            lr * (mb.array() / bc1) / ((vb.array() / bc2).sqrt() + cfg.epsilon);
    }
}

double loss_and_param_gradient(const ModelParameters& params, const MlpArchitecture& arch,
                               const std::vector<LabeledSample>& data,
                               const std::vector<int>& indices, const LossConfig& loss,
                               ParameterGradients* grads) {
    const int B = static_cast<int>(indices.size());
    if (B == 0) throw Error::input_error("loss_and_param_gradient: empty batch");
    const int d = arch.input_dim;
    const int f = arch.feature_dim();
    const bool identity = arch.feature_map == FeatureMap::identity;

    Eigen::MatrixXd features(f, B);
    std::vector<Eigen::MatrixXd> jac;
    if (!identity) jac.resize(B);
    for (int i = 0; i < B; ++i) {
        const auto& x = data[indices[i]].configuration.coords;
        if (identity) {
            features.col(i) = x;
        } else {
            Eigen::VectorXd phi;
            compute_features_jacobian(arch.feature_map, x, &phi, &jac[i]);
            features.col(i) = phi;
        }
    }

    ForwardCache cache;
    mlp_forward(params, arch, features, &cache);

    // Feature-space gradients per sample give the predicted forces.
    Eigen::MatrixXd g_phi;
    mlp_reverse(params, cache, nullptr, Eigen::RowVectorXd::Ones(B), nullptr, nullptr, &g_phi, nullptr);

    Eigen::RowVectorXd coeff_E(B);
    Eigen::RowVectorXd coeff_Edot(B);
    Eigen::MatrixXd tangents(f, B);
    double total = 0.0;
    for (int i = 0; i < B; ++i) {
        const auto& sample = data[indices[i]];
        const double e_res = cache.energies[i] - sample.energy;  // Ehat - E
        Eigen::VectorXd f_hat;
        if (identity) {
            f_hat = -g_phi.col(i);
        } else {
            f_hat = -(jac[i].transpose() * g_phi.col(i));
        }
        const Eigen::VectorXd f_res = f_hat - sample.forces;  // Fhat - F
        total += loss.alpha_E * e_res * e_res + loss.alpha_F * f_res.squaredNorm();
        coeff_E[i] = 2.0 * loss.alpha_E * e_res / B;
        coeff_Edot[i] = -2.0 * loss.alpha_F / B;
        if (loss.alpha_F > 0.0) {
            tangents.col(i) = identity ? f_res : (jac[i] * f_res).eval();
        }
    }
    total /= B;

    if (grads) {
        if (loss.alpha_F > 0.0) {
            TangentCache tcache;
            mlp_forward_tangent(params, cache, tangents, &tcache);
            mlp_reverse(params, cache, &tcache, coeff_E, &coeff_Edot, grads, nullptr, nullptr);
        } else {
            mlp_reverse(params, cache, nullptr, coeff_E, nullptr, grads, nullptr, nullptr);
        }
        (void)d;
    }
    return total;
}

namespace {

double evaluate_split_loss(const ModelParameters& params, const MlpArchitecture& arch,
                           const std::vector<LabeledSample>& data, const std::vector<int>& indices,
                           const LossConfig& loss) {
    if (indices.empty()) return 0.0;
    return loss_and_param_gradient(params, arch, data, indices, loss, nullptr);
}

}  // namespace

ModelParameters train_member(const std::vector<LabeledSample>& data, const SplitAssignment& split,
                             const MlpArchitecture& arch, const LossConfig& loss,
                             const TrainConfig& cfg, Rng& rng, TrainRecord* record) {
    loss.validate();
    cfg.validate();
    if (split.train.empty()) throw Error::input_error("train_member: empty train partition");

    ModelParameters params = initialize_parameters(arch, rng);
    AdamState state = AdamState::zeros_like(params);
    ParameterGradients grads = ParameterGradients::zeros_like(params);

    const int n_train = static_cast<int>(split.train.size());
    std::vector<int> order = split.train;
    double lr = cfg.learning_rate;
    double best_val = std::numeric_limits<double>::infinity();
    int stagnant = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int i = n_train - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        int n_batches = 0;
        for (int start = 0; start < n_train; start += cfg.batch_size) {
            const int stop = std::min(start + cfg.batch_size, n_train);
            std::vector<int> batch(order.begin() + start, order.begin() + stop);
            grads.set_zero();
            const double value = loss_and_param_gradient(params, arch, data, batch, loss, &grads);
            if (!std::isfinite(value)) {
                throw Error::training_error("train_member: non-finite loss at epoch " +
                                            std::to_string(epoch) + ", batch " +
                                            std::to_string(n_batches));
            }
            adam_step(params, state, grads, lr, cfg.adam);
            epoch_loss += value;
            ++n_batches;
        }
        const double val = evaluate_split_loss(params, arch, data, split.validation, loss);
        if (record) {
            record->train_loss.push_back(epoch_loss / n_batches);
            record->val_loss.push_back(val);
        }
        if (cfg.plateau_scheduler && !split.validation.empty()) {
            if (val < best_val - 1e-12) {
                best_val = val;
                stagnant = 0;
            } else if (++stagnant >= cfg.plateau_patience) {
                lr *= 0.5;
                stagnant = 0;
            }
        }
    }
    return params;
}

Committee train_committee(const std::vector<LabeledSample>& data, const MlpArchitecture& arch,
                          int members, const LossConfig& loss, const TrainConfig& cfg,
                          Rng& rng, std::vector<TrainRecord>* records) {
    if (members < 2) throw Error::config_error("train_committee: need at least 2 members");

    SplitAssignment shared_split;
    Rng split_rng = rng.spawn(0x517u);
    if (!cfg.resample_splits_per_member) shared_split = split_dataset(data, cfg.split_ratios, split_rng);

    Committee c;
    c.architecture = arch;
    for (int m = 0; m < members; ++m) {
        SplitAssignment split = shared_split;
        Rng member_rng = rng.spawn(static_cast<std::uint64_t>(m) + 1);
        if (cfg.resample_splits_per_member) {
            Rng member_split_rng = split_rng.spawn(static_cast<std::uint64_t>(m) + 1);
            split = split_dataset(data, cfg.split_ratios, member_split_rng);
        }
        TrainRecord record;
        try {
            c.members.push_back(train_member(data, split, arch, loss, cfg, member_rng, &record));
        } catch (const Error& e) {
            if (e.category() != ErrorCategory::training) throw;
            // One retry with a fresh sub-seed before giving up on the run.
            Rng retry_rng = rng.spawn(0x1000 + static_cast<std::uint64_t>(m));
            record = TrainRecord{};
            c.members.push_back(train_member(data, split, arch, loss, cfg, retry_rng, &record));
        }
        if (records) records->push_back(std::move(record));
    }
    return c;
}

}  // namespace advsamp
