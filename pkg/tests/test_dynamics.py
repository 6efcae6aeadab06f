import numpy as np
import pytest
from hypothesis import given, settings

from etconsensus.dynamics import (AgentState, control_input, control_inputs, local_disagreement_q,
                                  local_disagreement_qhat, local_disagreements, sum_q_equals_quadratic)
from etconsensus.graph import build_graph, laplacian
from conftest import FOUR_W, FOUR_X0
from strategies import graph_and_vector

PAIR = np.array([[1.0, -1.0], [-1.0, 1.0]])


def _q_by_hand(i, w, x):
    # term-by-term over neighbours, independent of the Laplacian
    return sum(0.5 * w[i][j] * (x[j] - x[i]) ** 2 for j in range(len(x)) if w[i][j] > 0)


def test_measurement_error_is_derived():
    s = AgentState(x=1.5, x_hat=2.0, last_trigger_time=0.0, internal=10.0)
    assert s.e == 0.5


def test_control_examples(four_lap):
    assert np.allclose(control_inputs(four_lap, np.full(4, 3.0)), 0.0)
    assert control_input(0, PAIR, [1.0, 0.0]) == -1.0
    assert control_input(1, PAIR, [1.0, 0.0]) == 1.0
    assert control_input(0, four_lap, FOUR_X0) == pytest.approx(6.19242, abs=1e-10)
    dots = [sum(-four_lap[i, j] * FOUR_X0[j] for j in range(4)) for i in range(4)]
    assert np.allclose(control_inputs(four_lap, FOUR_X0), dots, atol=1e-12)


def test_local_disagreement_examples(four_lap):
    assert local_disagreement_q(0, four_lap, np.full(4, -2.0)) == 0.0
    assert local_disagreement_q(0, four_lap, FOUR_X0) == pytest.approx(5.6391, abs=1e-4)
    assert local_disagreement_q(0, PAIR, [0.0, 2.0]) == 2.0
    assert local_disagreement_qhat(2, four_lap, FOUR_X0) == pytest.approx(_q_by_hand(2, FOUR_W, FOUR_X0), abs=1e-10)
    assert local_disagreement_qhat(2, four_lap, FOUR_X0) == pytest.approx(390.7957, abs=1e-4)
    for i in range(4):
        assert local_disagreement_qhat(i, four_lap, FOUR_X0) == local_disagreement_q(i, four_lap, FOUR_X0)


def test_vectorised_disagreements_match_scalar(four_lap, rng):
    x = rng.uniform(-10, 10, 4)
    assert np.allclose(local_disagreements(four_lap, x),
                       [local_disagreement_q(i, four_lap, x) for i in range(4)], rtol=1e-13)


def test_sum_identity_on_four_graph(four_lap, rng):
    for _ in range(1000):
        assert sum_q_equals_quadratic(four_lap, rng.uniform(-10, 10, 4))
    assert sum_q_equals_quadratic(four_lap, np.full(4, 7.0))


@settings(max_examples=200, deadline=None)
@given(graph_and_vector())
def test_sum_identity_property(wz):
    w, x = wz
    lap = laplacian(build_graph(w))
    total = sum(_q_by_hand(i, w, x) for i in range(len(x)))
    assert local_disagreements(lap, x).sum() == pytest.approx(float(x @ lap @ x), rel=1e-9, abs=1e-9)
    assert total == pytest.approx(float(x @ lap @ x), rel=1e-9, abs=1e-9)
    assert np.all(local_disagreements(lap, x) >= 0)


@settings(max_examples=100, deadline=None)
@given(graph_and_vector())
def test_controls_sum_to_zero(wz):
    w, x_hat = wz
    u = control_inputs(laplacian(build_graph(w)), x_hat)
    assert abs(u.sum()) <= 1e-9 * (1 + np.abs(u).sum())
