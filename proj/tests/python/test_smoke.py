"""Smoke tests for the Python bindings.

These only check that the main operations are reachable from Python and agree
with a few hand-computable values; numerical depth lives in the C++ suites.
"""

import math

import numpy as np
import pytest

advsamp = pytest.importorskip("advsamp")


def test_double_well_energy_and_forces():
    spec = advsamp.PotentialSpec.double_well()
    x = advsamp.Configuration(np.array([1.0, 0.5]))
    e = advsamp.evaluate_energy(spec, x)
    assert e == pytest.approx(10 - 10 + 2 + 4 * 0.25)
    f = advsamp.evaluate_forces(spec, x)
    # F = -grad E = (-(40 x^3 - 20 x + 2), -8 y)
    assert f[0] == pytest.approx(-(40 - 20 + 2))
    assert f[1] == pytest.approx(-4.0)


def test_initial_sampling_respects_cutoff():
    spec = advsamp.PotentialSpec.double_well()
    rng = advsamp.Rng(1)
    data = advsamp.sample_initial_dataset(spec, 500, [(-1.5, 1.5), (-1.5, 1.5)], -2.0, rng)
    assert len(data) > 0
    assert all(s.energy < -2.0 for s in data)


def test_train_attack_select_pipeline():
    spec = advsamp.PotentialSpec.double_well()
    rng = advsamp.Rng(7)
    data = advsamp.sample_initial_dataset(spec, 300, [(-1.5, 1.5), (-1.5, 1.5)], -2.0, rng)

    arch = advsamp.MlpArchitecture()
    arch.input_dim = 2
    arch.hidden_layers = 1
    arch.hidden_units = 8
    loss = advsamp.LossConfig()
    tc = advsamp.TrainConfig()
    tc.epochs = 5
    tc.batch_size = 16
    committee, records = advsamp.train_committee(data, arch, 2, loss, tc, rng)
    assert committee.size() == 2
    assert len(records) == 2
    assert len(records[0].train_loss) == 5

    stats = advsamp.committee_stats(committee, data[0].configuration)
    assert math.isfinite(stats.mean_energy)
    assert stats.var_forces >= 0.0

    ctx = advsamp.partition_function(data, 5.0)
    assert ctx.Q > 0.0

    ac = advsamp.AttackConfig()
    ac.steps = 10
    results = advsamp.run_attack_batch(
        committee, ctx, [s.configuration for s in data[:4]], ac, rng
    )
    assert len(results) == 4
    assert all(len(r.loss_trajectory) == 11 for r in results)

    thr = advsamp.fit_threshold(
        committee, data, 80.0, advsamp.VarianceSource.force_variance
    )
    sel = advsamp.select_informative(
        results, committee, thr, advsamp.SelectionConfig(), rng
    )
    assert len(sel) <= 4


def test_grid_rmse_of_untrained_committee_is_positive():
    arch = advsamp.MlpArchitecture()
    arch.input_dim = 2
    arch.hidden_layers = 1
    arch.hidden_units = 4
    rng = advsamp.Rng(3)
    committee = advsamp.Committee()
    committee.architecture = arch
    committee.members = [
        advsamp.initialize_parameters(arch, rng) for _ in range(2)
    ]
    rmse = advsamp.grid_rmse(
        committee,
        advsamp.PotentialSpec.double_well(),
        [(-1.5, 1.5), (-1.5, 1.5)],
        20,
    )
    assert rmse > 0.0


def test_full_loop_and_csv_roundtrip(tmp_path):
    cfg = advsamp.parse_config("")
    cfg.architecture.hidden_layers = 1
    cfg.architecture.hidden_units = 8
    cfg.members = 2
    cfg.train.epochs = 5
    cfg.train.batch_size = 16
    cfg.attack.steps = 8
    cfg.attack.n_seeds = 4
    cfg.init_candidates = 120
    cfg.grid_resolution = 12
    cfg.generations = 2
    cfg.seed = 5
    records = advsamp.run_active_learning(cfg, "", False)
    assert [r.generation for r in records] == [1, 2]
    assert records[1].n_train == records[0].n_train + records[0].n_selected

    spec = advsamp.PotentialSpec.double_well()
    rng = advsamp.Rng(2)
    data = advsamp.sample_initial_dataset(spec, 200, [(-1.5, 1.5), (-1.5, 1.5)], -2.0, rng)
    path = str(tmp_path / "data.csv")
    advsamp.write_dataset_csv(data, path)
    back = advsamp.read_dataset_csv(path)
    assert len(back) == len(data)
    np.testing.assert_allclose(
        back[0].configuration.coords, data[0].configuration.coords
    )


def test_chain_geometry_roundtrip():
    topo = advsamp.make_chain_topology(6, 1.5, 1.9111355)
    assert topo.n_dihedrals() == 2
    chain = advsamp.make_chain_configuration(topo)
    cv = advsamp.measure_cvs(chain, topo)
    np.testing.assert_allclose(cv.angles, [math.pi, math.pi], atol=1e-9)
    rotated = advsamp.cv_backmap(chain, topo, np.array([0.5, -0.3]))
    cv2 = advsamp.measure_cvs(rotated, topo)
    diff = np.mod(cv2.angles - cv.angles + math.pi, 2 * math.pi) - math.pi
    np.testing.assert_allclose(diff, [0.5, -0.3], atol=1e-9)


def test_config_errors_surface_as_python_exceptions():
    with pytest.raises(advsamp.AdvsampError):
        advsamp.parse_config("/no/such/config.ini")
