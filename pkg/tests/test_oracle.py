import dataclasses

import numpy as np
import pytest

from etconsensus.errors import NumericalFailure, ValidationError
from etconsensus.experiment import load_config
from etconsensus.graph import build_graph, laplacian
from etconsensus.oracle import OracleConfig, polynomial_eigenvalues, reference_run
from etconsensus.simulator import SimConfig, run
from etconsensus.triggering import ALL_LAWS, TriggerParams

SC, DC, SB, DB = ALL_LAWS


def _pair(law):
    return dataclasses.replace(load_config("pair.cfg"), law=law)


def test_dense_step_must_be_fine():
    with pytest.raises(ValidationError):
        OracleConfig(_pair(SC), dense_dt=1e-4)


@pytest.mark.parametrize("law", ALL_LAWS)
def test_constant_state_is_trivial(law):
    g = build_graph([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    cfg = SimConfig(graph=g, x0=(1.5, 1.5, 1.5), law=law, params=TriggerParams.uniform(3), t_final=0.1)
    ref, sim = reference_run(OracleConfig(cfg)), run(cfg)
    assert ref.summary.event_counts == sim.summary.event_counts == (1, 1, 1)
    assert np.all(ref.x == 1.5) and np.all(ref.V == 0)


def test_pair_first_event_agrees():
    cfg = _pair(SC)
    ref, sim = reference_run(OracleConfig(cfg)), run(cfg)
    assert abs(ref.events[2].time - sim.events[2].time) <= 2 * 1e-6 + cfg.event_tol


@pytest.mark.parametrize("law", ALL_LAWS)
def test_pair_counts_agree_for_all_laws(law):
    cfg = _pair(law)
    assert reference_run(OracleConfig(cfg)).summary.event_counts == run(cfg).summary.event_counts


@pytest.mark.parametrize("law", [DC, SB, DB])
def test_path3_order_and_counts_agree(law):
    cfg = dataclasses.replace(load_config("path3.cfg"), law=law)
    ref, sim = reference_run(OracleConfig(cfg)), run(cfg)
    assert [e.agent for e in ref.events] == [e.agent for e in sim.events]
    assert ref.summary.event_counts == sim.summary.event_counts


def test_four_dynamic_broadcast_counts_agree(four_cfg):
    cfg = dataclasses.replace(four_cfg, law=DB, t_final=2.0)
    ref, sim = reference_run(OracleConfig(cfg)), run(cfg)
    assert ref.summary.event_counts == sim.summary.event_counts == (4, 5, 6, 6)


def test_reference_converges_to_simulator(four_cfg):
    # a late grazing crossing magnifies the first-order Euler error; refining
    # the dense step must close the gap toward the simulator's trajectory
    cfg = dataclasses.replace(four_cfg, law=DC, t_final=1.0)
    sim = run(cfg)
    errors = []
    for dense_dt in (1e-6, 1e-7):
        ref = reference_run(OracleConfig(cfg, dense_dt=dense_dt, sample_every=100_000))
        assert ref.times[-1] == pytest.approx(1.0)
        assert ref.summary.event_counts == sim.summary.event_counts
        errors.append(np.max(np.abs(ref.x[-1] - sim.x[-1])))
    assert errors[1] < errors[0] / 5
    assert errors[1] < 1e-3


def test_event_budget_overflow():
    with pytest.raises(NumericalFailure):
        reference_run(OracleConfig(_pair(SC), max_events=3))


def test_polynomial_eigenvalue_examples(four_lap):
    assert np.allclose(polynomial_eigenvalues(laplacian(build_graph([[0, 1, 0], [1, 0, 1], [0, 1, 0]]))),
                       [0, 1, 3], atol=1e-10)
    eig = polynomial_eigenvalues(four_lap)
    assert len(eig) == 4 and abs(eig[0]) < 1e-10
    assert eig.sum() == pytest.approx(np.trace(four_lap), abs=1e-9)


def test_polynomial_eigenvalues_rejects_large_or_asymmetric():
    with pytest.raises(ValidationError):
        polynomial_eigenvalues(np.eye(6))
    with pytest.raises(ValidationError):
        polynomial_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_polynomial_eigenvalues_multiplicities():
    k5 = laplacian(build_graph(np.ones((5, 5)) - np.eye(5)))
    assert np.allclose(polynomial_eigenvalues(k5), [0, 5, 5, 5, 5], atol=1e-8)
