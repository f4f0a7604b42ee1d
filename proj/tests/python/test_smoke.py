"""Smoke tests for the compiled flowopt module."""

import os

import pytest

import flowopt

DATA_DIR = os.environ.get("FLOWOPT_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))
TOPO_PATH = os.path.join(DATA_DIR, "paper_net.topo")


@pytest.fixture(scope="module")
def topo():
    return flowopt.load_topology(TOPO_PATH)


def test_topology_shape(topo):
    assert topo.link_count == 13
    assert topo.node_count == 8
    assert topo.total_capacity_kbps == pytest.approx(916.0)
    assert topo.capacities()[5] == pytest.approx(200.0)


def test_delay_and_utilization_on_a_reference_row(topo):
    flows = [11, 11, 40, 11, 11, 114, 11, 11, 11, 11, 11, 11, 11]
    assert flowopt.delay_msec(topo, flows) == pytest.approx(17.0, abs=0.1)
    assert flowopt.mean_link_utilization(topo, flows) == pytest.approx(0.2408, abs=0.0005)


def test_delay_rejects_saturated_links(topo):
    flows = [56.0] + [1.0] * 12
    with pytest.raises(ValueError):
        flowopt.delay_msec(topo, flows)


def test_analytic_optimum(topo):
    flows = flowopt.kkt_optimal_flow(topo, 275.0)
    assert sum(flows) == pytest.approx(275.0, abs=1e-6)
    assert flows[0] == pytest.approx(10.94, abs=0.01)
    assert flows[2] == pytest.approx(39.79, abs=0.01)
    assert flows[5] == pytest.approx(114.85, abs=0.01)


def test_load_schedule_matches_the_reference_ladder(topo):
    assert flowopt.load_schedule(topo, 0.30, 0.89, 10) == pytest.approx(
        [275 + 60 * k for k in range(10)]
    )
    assert flowopt.load_schedule(topo, 0.30, 0.89, 10, 30.0) == pytest.approx(
        [305 + 60 * k for k in range(10)]
    )


def test_seeded_search_is_deterministic(topo):
    objective = flowopt.SearchObjective(topo, 549.6)
    first = flowopt.run_method("pso-chi", objective, 3)
    second = flowopt.run_method("pso-chi", objective, 3)
    assert first.best_flow == second.best_flow
    assert first.generations == second.generations
    assert first.best_delay_msec == pytest.approx(32.7, abs=0.3)
    assert first.constraint_residual <= 1e-3


def test_trial_summary_csv(topo):
    objective = flowopt.SearchObjective(topo, 400.0)
    summary = flowopt.run_trials("oracle", objective, 2, 1)
    csv = summary.to_csv()
    assert csv.startswith("trial,generations,time_sec,delay_msec,residual\n")
    assert csv.rstrip("\n").splitlines()[-1].startswith("mean,")


def test_train_and_predict_roundtrip(topo, tmp_path):
    loads = [300.0, 450.0, 600.0, 750.0]
    dataset = flowopt.build_dataset(topo, loads, "oracle", 1)
    config = flowopt.TrainConfig()
    config.max_epochs = 400
    config.seed = 5
    model, history = flowopt.train_mlp(topo, dataset, config)
    assert history[-1] < history[0]

    prediction = model.forward(500.0)
    assert len(prediction) == 13
    for flow, cap in zip(prediction, topo.capacities()):
        assert 0.0 <= flow <= cap

    path = tmp_path / "predictor.mlp"
    flowopt.save_model(model, path)
    reloaded = flowopt.load_model(path)
    assert reloaded.forward(500.0) == model.forward(500.0)


def test_dataset_roundtrip(topo, tmp_path):
    dataset = flowopt.build_dataset(topo, [400.0, 500.0], "oracle", 1)
    path = tmp_path / "rows.csv"
    flowopt.write_dataset(dataset, path)
    reread = flowopt.read_dataset(path)
    assert [row.load_kbps for row in reread.rows] == [400.0, 500.0]
    assert reread.rows[0].flows_kbps == dataset.rows[0].flows_kbps


def test_parse_error_maps_to_value_error():
    with pytest.raises(ValueError):
        flowopt.parse_topology("link 1 1 1 56\n")
