#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "advsamp/alloop.hpp"
#include "advsamp/errors.hpp"

using namespace advsamp;

namespace {

Committee zero_committee() {
    // All weights and biases zero: predicts 0 everywhere.
    Committee c;
    c.architecture.input_dim = 2;
    c.architecture.hidden_layers = 2;
    c.architecture.hidden_units = 4;
    Rng rng(1);
    for (int m = 0; m < 2; ++m) {
        ModelParameters p = initialize_parameters(c.architecture, rng);
        for (auto& w : p.weights) w.setZero();
        for (auto& b : p.biases) b.setZero();
        c.members.push_back(p);
    }
    return c;
}

LoopConfig quick_config() {
    LoopConfig cfg;
    cfg.architecture.input_dim = 2;
    cfg.architecture.hidden_layers = 1;
    cfg.architecture.hidden_units = 8;
    cfg.members = 2;
    cfg.train.epochs = 10;
    cfg.train.batch_size = 16;
    cfg.train.learning_rate = 0.01;
    cfg.attack.steps = 10;
    cfg.attack.n_seeds = 5;
    cfg.init_candidates = 120;
    cfg.grid_resolution = 20;
    cfg.generations = 2;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("grid error of the zero predictor matches the frozen oracle value") {
    // Root-mean-square of the ground-truth energy itself over the default
    // 100x100 grid, computed once with an independent script and pinned.
    const Committee c = zero_committee();
    const double rmse = grid_rmse(c, PotentialSpec::double_well(),
                                  {{-1.5, 1.5}, {-1.5, 1.5}}, 100);
    CHECK(rmse == doctest::Approx(10.283622109729924).epsilon(1e-12));
}

TEST_CASE("grid error converges with resolution") {
    const Committee c = zero_committee();
    const PotentialSpec spec = PotentialSpec::double_well();
    const std::vector<std::pair<double, double>> bounds = {{-1.5, 1.5}, {-1.5, 1.5}};
    const double r100 = grid_rmse(c, spec, bounds, 100);
    const double r200 = grid_rmse(c, spec, bounds, 200);
    const double r400 = grid_rmse(c, spec, bounds, 400);
    // Successive refinements converge: differences shrink and stay small.
    CHECK(std::abs(r200 - r100) / r100 < 0.05);
    CHECK(std::abs(r400 - r200) < std::abs(r200 - r100));
}

TEST_CASE("grid error requires a two-dimensional potential") {
    const Committee c = zero_committee();
    const PotentialSpec chain = PotentialSpec::torsion_chain({5.0, 3.0}, {M_PI, M_PI});
    CHECK_THROWS_AS(grid_rmse(c, chain, {{-1, 1}, {-1, 1}}, 10), Error);
}

TEST_CASE("an exact committee would give zero grid error") {
    // Use the oracle itself as a sanity bound: the zero committee's error is
    // strictly positive, and shrinking the window to a near-flat region
    // shrinks the error accordingly.
    const Committee c = zero_committee();
    const PotentialSpec spec = PotentialSpec::double_well();
    const double wide = grid_rmse(c, spec, {{-1.5, 1.5}, {-1.5, 1.5}}, 50);
    const double narrow = grid_rmse(c, spec, {{-0.05, 0.05}, {-0.05, 0.05}}, 50);
    CHECK(narrow < 0.1);
    CHECK(wide > 5.0);
}

TEST_CASE("random proposals perturb distinct training points within bounds") {
    std::vector<LabeledSample> data;
    for (int i = 0; i < 30; ++i) {
        LabeledSample s;
        s.configuration.coords = Eigen::VectorXd::Constant(2, static_cast<double>(i));
        data.push_back(s);
    }
    Rng rng(3);
    const auto props = random_proposals(data, 0.25, 10, rng);
    REQUIRE(props.size() == 10);
    std::set<int> sources;
    for (const auto& p : props) {
        // Each proposal sits within sigma of exactly one integer lattice point.
        const int src = static_cast<int>(std::lround(p.coords[0]));
        sources.insert(src);
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(p.coords[i] - src) <= 0.25);
        }
    }
    CHECK(sources.size() == 10);  // distinct picks, no replacement
}

TEST_CASE("zero-sigma random proposals copy the dataset points") {
    std::vector<LabeledSample> data;
    for (int i = 0; i < 5; ++i) {
        LabeledSample s;
        s.configuration.coords = Eigen::VectorXd::Constant(2, 0.3 * i);
        data.push_back(s);
    }
    Rng rng(4);
    const auto props = random_proposals(data, 0.0, 8, rng);
    CHECK(props.size() == 5);  // capped at dataset size
    for (const auto& p : props) {
        bool found = false;
        for (const auto& s : data) {
            if ((p.coords - s.configuration.coords).norm() == 0.0) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("random proposals are deterministic per seed") {
    std::vector<LabeledSample> data;
    for (int i = 0; i < 12; ++i) {
        LabeledSample s;
        s.configuration.coords = Eigen::VectorXd::Constant(2, 0.1 * i);
        data.push_back(s);
    }
    Rng a(11), b(11);
    const auto pa = random_proposals(data, 0.5, 6, a);
    const auto pb = random_proposals(data, 0.5, 6, b);
    REQUIRE(pa.size() == pb.size());
    for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].coords == pb[i].coords);
}

TEST_CASE("a generation grows the dataset by exactly the selected count") {
    const LoopConfig cfg = quick_config();
    Rng init(cfg.seed);
    auto data = sample_initial_dataset(cfg.potential, cfg.init_candidates, cfg.bounds,
                                       cfg.energy_cutoff, init);
    const int before = static_cast<int>(data.size());
    Rng loop_rng = Rng(cfg.seed).spawn(1);
    const GenerationRecord rec =
        run_generation(cfg, data, 1, loop_rng, nullptr, GenerationArtifacts{"", false});
    CHECK(rec.generation == 1);
    CHECK(rec.n_train == before);
    CHECK(static_cast<int>(data.size()) == before + rec.n_selected);
    CHECK(rec.n_selected <= rec.n_proposed);
    CHECK(rec.n_selected <= cfg.selection.max_new);
    CHECK(rec.rmse > 0.0);
    CHECK(rec.threshold_t >= 0.0);
    if (rec.n_selected > 0) {
        CHECK(std::isfinite(rec.median_new_energy));
        CHECK(rec.new_energies.size() == static_cast<size_t>(rec.n_selected));
        CHECK_FALSE(rec.saturated);
    } else {
        CHECK(rec.saturated);
    }
}

TEST_CASE("the full loop yields one record per generation with monotone dataset growth") {
    LoopConfig cfg = quick_config();
    cfg.generations = 3;
    const auto records = run_active_learning(cfg, "", false);
    REQUIRE(records.size() == 3);
    for (size_t g = 0; g < records.size(); ++g) {
        CHECK(records[g].generation == static_cast<int>(g) + 1);
        if (g > 0) {
            CHECK(records[g].n_train ==
                  records[g - 1].n_train + records[g - 1].n_selected);
        }
        CHECK(records[g].wall_time_seconds >= 0.0);
    }
}

TEST_CASE("the random strategy also runs end to end") {
    LoopConfig cfg = quick_config();
    cfg.strategy = Strategy::random;
    cfg.random_sigma = 0.3;
    cfg.generations = 2;
    const auto records = run_active_learning(cfg, "", false);
    REQUIRE(records.size() == 2);
    CHECK(records[0].n_proposed <= cfg.attack.n_seeds);
}

TEST_CASE("identical seeds reproduce the loop exactly") {
    LoopConfig cfg = quick_config();
    cfg.generations = 2;
    const auto a = run_active_learning(cfg, "", false);
    const auto b = run_active_learning(cfg, "", false);
    REQUIRE(a.size() == b.size());
    for (size_t g = 0; g < a.size(); ++g) {
        CHECK(a[g].rmse == b[g].rmse);
        CHECK(a[g].n_selected == b[g].n_selected);
        CHECK(a[g].threshold_t == b[g].threshold_t);
        CHECK(a[g].new_energies == b[g].new_energies);
    }
}

TEST_CASE("loop config validation catches bad settings") {
    LoopConfig bad = quick_config();
    bad.generations = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    LoopConfig bad2 = quick_config();
    bad2.members = 1;
    CHECK_THROWS_AS(bad2.validate(), Error);
    LoopConfig bad3 = quick_config();
    bad3.kT = 0.0;
    CHECK_THROWS_AS(bad3.validate(), Error);
}
