#include <doctest.h>

#include <cmath>

#include "advsamp/adversary.hpp"
#include "advsamp/cvgeom.hpp"
#include "advsamp/errors.hpp"
#include "advsamp/trainer.hpp"

using namespace advsamp;

namespace {

Configuration make2(double x, double y) {
    Configuration c;
    c.coords.resize(2);
    c.coords << x, y;
    return c;
}

Committee random_committee(int members, Rng& rng, int units = 8, int layers = 2,
                           int input_dim = 2) {
    Committee c;
    c.architecture.input_dim = input_dim;
    c.architecture.hidden_layers = layers;
    c.architecture.hidden_units = units;
    for (int m = 0; m < members; ++m) {
        c.members.push_back(initialize_parameters(c.architecture, rng));
    }
    return c;
}

std::vector<LabeledSample> energy_list(std::initializer_list<double> energies) {
    std::vector<LabeledSample> data;
    for (double e : energies) {
        LabeledSample s;
        s.configuration.coords = Eigen::VectorXd::Zero(2);
        s.energy = e;
        data.push_back(s);
    }
    return data;
}

}  // namespace

TEST_CASE("partition function on hand-computed energies") {
    const ThermoContext ctx = partition_function(energy_list({0.0, 5.0}), 5.0);
    CHECK(ctx.kT == 5.0);
    CHECK(ctx.Q == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));

    const ThermoContext single = partition_function(energy_list({3.0}), 2.0);
    CHECK(single.Q == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));

    const ThermoContext hot = partition_function(energy_list({1, 2, 3, 4}), 1e9);
    CHECK(hot.Q == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("partition function is order-independent to machine precision") {
    std::vector<double> energies;
    Rng rng(3);
    for (int i = 0; i < 500; ++i) energies.push_back(rng.uniform(-4.0, 4.0));
    std::vector<LabeledSample> fwd, rev;
    for (double e : energies) {
        LabeledSample s;
        s.configuration.coords = Eigen::VectorXd::Zero(2);
        s.energy = e;
        fwd.push_back(s);
    }
    rev.assign(fwd.rbegin(), fwd.rend());
    const double qf = partition_function(fwd, 5.0).Q;
    const double qr = partition_function(rev, 5.0).Q;
    CHECK(std::abs(qf - qr) / qf < 1e-15);
}

TEST_CASE("partition function rejects overflowing energies") {
    CHECK_THROWS_AS(partition_function(energy_list({-4000.0}), 5.0), Error);
}

TEST_CASE("boltzmann probability arithmetic") {
    const ThermoContext ctx = partition_function(energy_list({0.0, 5.0}), 5.0);
    CHECK(boltzmann_probability(5.0, ctx) ==
          doctest::Approx(std::exp(-1.0) / (1.0 + std::exp(-1.0))).epsilon(1e-12));

    const ThermoContext single = partition_function(energy_list({2.5}), 5.0);
    CHECK(boltzmann_probability(2.5, single) == doctest::Approx(1.0).epsilon(1e-12));

    // Raising the energy by kT * ln 2 halves the probability exactly.
    const double p1 = boltzmann_probability(1.0, ctx);
    const double p2 = boltzmann_probability(1.0 + 5.0 * std::log(2.0), ctx);
    CHECK(p2 == doctest::Approx(0.5 * p1).epsilon(1e-12));
}

TEST_CASE("adversarial loss is probability times variance") {
    Rng rng(5);
    const Committee c = random_committee(4, rng);
    const ThermoContext ctx = partition_function(energy_list({0.0, 1.0, -1.0}), 5.0);
    const Configuration x = make2(0.3, -0.4);
    const CommitteeStats s = committee_stats(c, x);
    const double p = boltzmann_probability(s.mean_energy, ctx);

    CHECK(adversarial_loss(c, ctx, x, VarianceSource::force_variance) ==
          doctest::Approx(p * s.var_forces).epsilon(1e-12));
    CHECK(adversarial_loss(c, ctx, x, VarianceSource::energy_variance) ==
          doctest::Approx(p * s.var_energy).epsilon(1e-12));
}

TEST_CASE("identical committee members give zero loss") {
    Rng rng(6);
    Committee c = random_committee(2, rng);
    c.members[1] = c.members[0];
    const ThermoContext ctx = partition_function(energy_list({0.0}), 5.0);
    CHECK(adversarial_loss(c, ctx, make2(0.2, 0.2), VarianceSource::force_variance) ==
          doctest::Approx(0.0));
}

TEST_CASE("lower mean energy wins at equal variance") {
    // Shift every member's output bias by a constant: variances unchanged,
    // mean energy drops, so the loss must strictly increase.
    Rng rng(7);
    Committee c = random_committee(3, rng);
    const ThermoContext ctx = partition_function(energy_list({0.0, 2.0}), 5.0);
    const Configuration x = make2(-0.5, 0.1);
    const double base = adversarial_loss(c, ctx, x, VarianceSource::force_variance);
    for (auto& m : c.members) m.biases.back()(0) -= 1.0;
    const double shifted = adversarial_loss(c, ctx, x, VarianceSource::force_variance);
    CHECK(shifted > base);
}

TEST_CASE("shifting all energies by a constant leaves the loss unchanged") {
    Rng rng(8);
    Committee c = random_committee(3, rng);
    auto data = energy_list({0.0, 1.5, -2.0});
    const ThermoContext ctx = partition_function(data, 5.0);
    const Configuration x = make2(0.4, 0.6);
    const double base = adversarial_loss(c, ctx, x, VarianceSource::force_variance);

    const double shift = 3.7;
    for (auto& s : data) s.energy += shift;
    const ThermoContext shifted_ctx = partition_function(data, 5.0);
    Committee shifted = c;
    for (auto& m : shifted.members) m.biases.back()(0) += shift;
    const double moved = adversarial_loss(shifted, shifted_ctx, x, VarianceSource::force_variance);
    CHECK(std::abs(moved - base) <= 1e-12 * std::max(1.0, std::abs(base)));
}

TEST_CASE("at huge kT the loss argmax is the variance argmax") {
    Rng rng(9);
    const Committee c = random_committee(4, rng);
    const ThermoContext ctx = partition_function(energy_list({0.0, 1.0}), 1e9);
    std::vector<Configuration> candidates;
    for (int i = 0; i < 25; ++i) candidates.push_back(make2(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)));
    int best_loss = 0, best_var = 0;
    double max_loss = -1.0, max_var = -1.0;
    for (int i = 0; i < 25; ++i) {
        const double l = adversarial_loss(c, ctx, candidates[i], VarianceSource::force_variance);
        const double v = committee_stats(c, candidates[i]).var_forces;
        if (l > max_loss) { max_loss = l; best_loss = i; }
        if (v > max_var) { max_var = v; best_var = i; }
    }
    CHECK(best_loss == best_var);
}

TEST_CASE("attack gradient matches finite differences in coordinate space") {
    Rng rng(10);
    const ThermoContext ctx = partition_function(energy_list({0.0, 1.0, -1.0}), 5.0);
    const CoordinateAdapter adapter;
    for (const auto kind : {VarianceSource::force_variance, VarianceSource::energy_variance}) {
        const Committee c = random_committee(4, rng, 16, 4);
        for (int trial = 0; trial < 10; ++trial) {
            const Configuration seed = make2(rng.uniform(-1, 1), rng.uniform(-1, 1));
            Eigen::VectorXd delta(2);
            delta << rng.normal(0.0, 0.05), rng.normal(0.0, 0.05);
            const Eigen::VectorXd g = attack_gradient(c, ctx, seed, delta, kind, adapter);
            const double h = 1e-4;
            for (int i = 0; i < 2; ++i) {
                Eigen::VectorXd dp = delta, dm = delta;
                dp[i] += h;
                dm[i] -= h;
                const double up = adversarial_loss(c, ctx, adapter.map(seed, dp), kind);
                const double dn = adversarial_loss(c, ctx, adapter.map(seed, dm), kind);
                const double fd = (up - dn) / (2 * h);
                CHECK(g[i] == doctest::Approx(fd).epsilon(1e-4).scale(1e-6));
            }
        }
    }
}

TEST_CASE("attack gradient matches finite differences in dihedral space") {
    Rng rng(11);
    const ChainTopology topo = make_chain_topology(6, 1.5, 1.9111355);
    const CvAdapter adapter(topo);
    Committee c;
    c.architecture.input_dim = 18;
    c.architecture.hidden_layers = 2;
    c.architecture.hidden_units = 8;
    c.architecture.feature_map = FeatureMap::pairwise_distances;
    for (int m = 0; m < 3; ++m) c.members.push_back(initialize_parameters(c.architecture, rng));
    const ThermoContext ctx = partition_function(energy_list({0.0, 1.0}), 5.0);

    const Configuration seed = make_chain_configuration(topo);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd delta(adapter.delta_dim(seed));
        for (int i = 0; i < delta.size(); ++i) delta[i] = rng.uniform(-1.0, 1.0);
        const Eigen::VectorXd g =
            attack_gradient(c, ctx, seed, delta, VarianceSource::force_variance, adapter);
        const double h = 1e-4;
        for (int i = 0; i < delta.size(); ++i) {
            Eigen::VectorXd dp = delta, dm = delta;
            dp[i] += h;
            dm[i] -= h;
            const double up =
                adversarial_loss(c, ctx, adapter.map(seed, dp), VarianceSource::force_variance);
            const double dn =
                adversarial_loss(c, ctx, adapter.map(seed, dm), VarianceSource::force_variance);
            CHECK(g[i] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-4).scale(1e-8));
        }
    }
}

TEST_CASE("identical committee attack finishes flagged zero-signal") {
    Rng rng(12);
    Committee c = random_committee(2, rng);
    c.members[1] = c.members[0];
    const ThermoContext ctx = partition_function(energy_list({0.0}), 5.0);
    AttackConfig cfg;
    cfg.steps = 5;
    cfg.delta_init_sigma = 0.0;
    const CoordinateAdapter adapter;
    const AttackResult r = run_attack(c, ctx, make2(0.1, 0.1), cfg, rng, adapter);
    CHECK(r.zero_signal);
    CHECK(r.final_delta.norm() == 0.0);
    CHECK(r.loss_trajectory.size() == 6);
}

TEST_CASE("plain-ascent mode takes a literal gradient step") {
    Rng rng(13);
    const Committee c = random_committee(3, rng);
    const ThermoContext ctx = partition_function(energy_list({0.0, 1.0}), 5.0);
    AttackConfig cfg;
    cfg.steps = 1;
    cfg.learning_rate = 0.05;
    cfg.delta_init_sigma = 0.0;
    cfg.plain_ascent = true;
    const CoordinateAdapter adapter;
    const Configuration seed = make2(-0.3, 0.2);
    const Eigen::VectorXd g = attack_gradient(c, ctx, seed, Eigen::VectorXd::Zero(2),
                                              VarianceSource::force_variance, adapter);
    const AttackResult r = run_attack(c, ctx, seed, cfg, rng, adapter);
    CHECK((r.final_delta - 0.05 * g).norm() < 1e-12);
    CHECK((r.attacked.coords - (seed.coords + r.final_delta)).norm() < 1e-12);
}

TEST_CASE("attacks are deterministic per seed and record trajectories") {
    Rng ra(14), rb(14);
    Rng init(15);
    const Committee c = random_committee(3, init);
    const ThermoContext ctx = partition_function(energy_list({0.0, -1.0}), 5.0);
    AttackConfig cfg;
    cfg.steps = 25;
    const CoordinateAdapter adapter;
    const Configuration seed = make2(-0.7, 0.0);
    const AttackResult x = run_attack(c, ctx, seed, cfg, ra, adapter);
    const AttackResult y = run_attack(c, ctx, seed, cfg, rb, adapter);
    CHECK(x.final_delta == y.final_delta);
    REQUIRE(x.loss_trajectory.size() == 26);
    CHECK(x.loss_trajectory == y.loss_trajectory);
    CHECK(x.final_loss == doctest::Approx(x.loss_trajectory.back()));
    CHECK(x.probability ==
          doctest::Approx(boltzmann_probability(x.final_stats.mean_energy, ctx)).epsilon(1e-12));
}

TEST_CASE("batched attacks agree with one-at-a-time attacks") {
    Rng init(16);
    const Committee c = random_committee(3, init);
    const ThermoContext ctx = partition_function(energy_list({0.0, -1.0}), 5.0);
    AttackConfig cfg;
    cfg.steps = 15;
    const CoordinateAdapter adapter;
    std::vector<Configuration> seeds = {make2(-0.8, 0.1), make2(-0.6, -0.2), make2(-0.7, 0.3)};

    Rng rng_batch(21);
    const auto batch = run_attack_batch(c, ctx, seeds, cfg, rng_batch, adapter);
    REQUIRE(batch.size() == 3);
    for (size_t i = 0; i < seeds.size(); ++i) {
        CHECK((batch[i].seed.coords - seeds[i].coords).norm() == 0.0);
        CHECK(std::isfinite(batch[i].final_loss));
        CHECK(batch[i].loss_trajectory.size() == 16);
        // Every attacked point evaluates consistently with the scalar API.
        CHECK(batch[i].final_loss ==
              doctest::Approx(adversarial_loss(c, ctx, batch[i].attacked,
                                               VarianceSource::force_variance))
                  .epsilon(1e-10));
    }
}

TEST_CASE("ascent improves the loss for nearly all trained-committee attacks") {
    // Train a small committee on left-basin double-well data, then verify the
    // endpoint loss beats the starting loss for at least 95% of 50 attacks.
    const PotentialSpec spec = PotentialSpec::double_well();
    Rng data_rng(31);
    const std::vector<std::pair<double, double>> bounds = {{-1.5, 1.5}, {-1.5, 1.5}};
    const auto data = sample_initial_dataset(spec, 1200, bounds, -2.0, data_rng);
    REQUIRE(data.size() >= 50);

    MlpArchitecture arch;
    arch.input_dim = 2;
    arch.hidden_layers = 2;
    arch.hidden_units = 16;
    LossConfig loss;
    loss.alpha_F = 0.0;
    TrainConfig tcfg;
    tcfg.epochs = 200;
    tcfg.batch_size = 35;
    tcfg.learning_rate = 0.003;
    Rng train_rng(32);
    const Committee c = train_committee(data, arch, 3, loss, tcfg, train_rng, nullptr);

    const ThermoContext ctx = partition_function(data, 5.0);
    AttackConfig acfg;
    acfg.steps = 100;
    const CoordinateAdapter adapter;
    Rng attack_rng(33);
    int improved = 0;
    const int n_attacks = 50;
    for (int i = 0; i < n_attacks; ++i) {
        const auto& seed = data[i].configuration;
        const AttackResult r = run_attack(c, ctx, seed, acfg, attack_rng, adapter);
        if (r.loss_trajectory.back() >= r.loss_trajectory.front()) ++improved;
    }
    CHECK(improved >= 48);  // >= 95% of 50
}
