#pragma once

#include <vector>

#include "advsamp/committee.hpp"
#include "advsamp/potentials.hpp"
#include "advsamp/rng.hpp"
#include "advsamp/trainer.hpp"

namespace advsamp {

struct ThermoContext {
    double Q = 1.0;
    double kT = 1.0;
};

enum class AttackSpace { coordinate, collective_variable };

// Maps a perturbation delta into input space. The coordinate adapter is the
// identity shift X + delta; collective-variable adapters realize delta
// through geometry (see cvgeom).
class SpaceAdapter {
public:
    virtual ~SpaceAdapter() = default;
    virtual int delta_dim(const Configuration& seed) const = 0;
    virtual Configuration map(const Configuration& seed, const Eigen::VectorXd& delta) const = 0;
    // d(coords)/d(delta), input_dim x delta_dim.
    virtual Eigen::MatrixXd jacobian(const Configuration& seed, const Eigen::VectorXd& delta) const = 0;
    virtual bool is_identity() const { return false; }
};

class CoordinateAdapter final : public SpaceAdapter {
public:
    int delta_dim(const Configuration& seed) const override { return seed.dim(); }
    Configuration map(const Configuration& seed, const Eigen::VectorXd& delta) const override;
    Eigen::MatrixXd jacobian(const Configuration& seed, const Eigen::VectorXd& delta) const override;
    bool is_identity() const override { return true; }
};

struct AttackConfig {
    int steps = 600;
    double learning_rate = 0.003;
    double delta_init_sigma = 0.01;
    VarianceSource loss_kind = VarianceSource::force_variance;
    AttackSpace space = AttackSpace::coordinate;
    int n_seeds = 20;
    bool plain_ascent = false;  // literal delta += lr * grad, for reference checks
    AdamConfig adam;

    void validate() const;
};

struct AttackResult {
    Configuration seed;
    Eigen::VectorXd final_delta;
    Configuration attacked;
    double final_loss = 0.0;
    CommitteeStats final_stats;
    double probability = 0.0;
    std::vector<double> loss_trajectory;         // length steps + 1
    std::vector<double> mean_energy_trajectory;
    std::vector<double> variance_trajectory;
    std::vector<double> probability_trajectory;
    bool zero_signal = false;
};

ThermoContext partition_function(const std::vector<LabeledSample>& data, double kT);

double boltzmann_probability(double mean_energy, const ThermoContext& ctx);

double adversarial_loss(const Committee& c, const ThermoContext& ctx,
                        const Configuration& x_delta, VarianceSource loss_kind);

Eigen::VectorXd attack_gradient(const Committee& c, const ThermoContext& ctx,
                                const Configuration& seed, const Eigen::VectorXd& delta,
                                VarianceSource loss_kind, const SpaceAdapter& adapter);

AttackResult run_attack(const Committee& c, const ThermoContext& ctx, const Configuration& seed,
                        const AttackConfig& cfg, Rng& rng, const SpaceAdapter& adapter);

// Same optimization as run_attack for many seeds at once; members evaluate
// all current candidates as one batch.
std::vector<AttackResult> run_attack_batch(const Committee& c, const ThermoContext& ctx,
                                           const std::vector<Configuration>& seeds,
                                           const AttackConfig& cfg, Rng& rng,
                                           const SpaceAdapter& adapter);

// Batched loss/gradient over columns of `coords` (input space).
struct AttackBatchEval {
    Eigen::VectorXd loss;
    Eigen::VectorXd mean_energy;
    Eigen::VectorXd variance;
    Eigen::VectorXd probability;
    Eigen::MatrixXd grad_coords;  // empty unless requested
};

AttackBatchEval adversarial_loss_batch(const Committee& c, const ThermoContext& ctx,
                                       const Eigen::MatrixXd& coords, VarianceSource loss_kind,
                                       bool want_gradient);

}  // namespace advsamp
