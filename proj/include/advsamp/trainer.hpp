#pragma once

#include <array>
#include <vector>

#include "advsamp/committee.hpp"
#include "advsamp/mlp.hpp"
#include "advsamp/potentials.hpp"
#include "advsamp/rng.hpp"

namespace advsamp {

struct LossConfig {
    double alpha_E = 1.0;
    double alpha_F = 1.0;

    void validate() const;
};

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig {
    int epochs = 600;
    int batch_size = 35;
    double learning_rate = 0.001;
    std::array<double, 3> split_ratios = {0.6, 0.2, 0.2};
    bool resample_splits_per_member = false;
    AdamConfig adam;
    bool plateau_scheduler = false;   // halve lr after `plateau_patience` stagnant epochs
    int plateau_patience = 30;

    void validate() const;
};

struct SplitAssignment {
    std::vector<int> train;
    std::vector<int> validation;
    std::vector<int> test;
};

SplitAssignment split_dataset(const std::vector<LabeledSample>& data,
                              const std::array<double, 3>& ratios, Rng& rng);

struct Prediction {
    double energy;
    Eigen::VectorXd forces;
};

double batch_loss(const std::vector<Prediction>& predicted,
                  const std::vector<LabeledSample>& target, const LossConfig& cfg);

// Adam with bias correction over parameter-shaped gradients.
struct AdamState {
    ParameterGradients first_moment;
    ParameterGradients second_moment;
    long step = 0;

    static AdamState zeros_like(const ModelParameters& p);
};

void adam_step(ModelParameters& params, AdamState& state, const ParameterGradients& grads,
               double lr, const AdamConfig& cfg);

// Loss and its exact parameter gradient over the listed samples. Force terms
// are differentiated through the model's input gradient (grad-of-grad).
double loss_and_param_gradient(const ModelParameters& params, const MlpArchitecture& arch,
                               const std::vector<LabeledSample>& data,
                               const std::vector<int>& indices, const LossConfig& loss,
                               ParameterGradients* grads);

struct TrainRecord {
    std::vector<double> train_loss;  // per epoch, mean over batches
    std::vector<double> val_loss;    // per epoch
};

ModelParameters train_member(const std::vector<LabeledSample>& data, const SplitAssignment& split,
                             const MlpArchitecture& arch, const LossConfig& loss,
                             const TrainConfig& cfg, Rng& rng, TrainRecord* record);

Committee train_committee(const std::vector<LabeledSample>& data, const MlpArchitecture& arch,
                          int members, const LossConfig& loss, const TrainConfig& cfg,
                          Rng& rng, std::vector<TrainRecord>* records);

}  // namespace advsamp
