import numpy as np
import pytest

from hybridsn_cli.errors import ShapeError
from hybridsn_cli.training import SGD, Adam, AdamState, adam_step


def test_first_adam_step_hand_trace():
    params = {"p": np.array(0.0)}
    adam_step(params, {"p": np.array(1.0)}, AdamState(), lr=0.1)
    # m_hat = v_hat = 1 after bias correction
    assert params["p"] == pytest.approx(-0.1 / (1.0 + 1e-8), abs=1e-15)


def test_second_adam_step_hand_trace():
    params = {"p": np.array(0.0)}
    state = AdamState()
    adam_step(params, {"p": np.array(1.0)}, state, lr=0.1)
    adam_step(params, {"p": np.array(-2.0)}, state, lr=0.1)

    m = 0.9 * 0.1 + 0.1 * -2.0
    v = 0.999 * 0.001 + 0.001 * 4.0
    m_hat, v_hat = m / (1 - 0.9**2), v / (1 - 0.999**2)
    expected = -0.1 / (1.0 + 1e-8) - 0.1 * m_hat / (np.sqrt(v_hat) + 1e-8)
    assert params["p"] == pytest.approx(expected, abs=1e-12)


def test_zero_gradient_keeps_parameter():
    params = {"w": np.array([1.5, -2.0])}
    state = AdamState()
    for _ in range(50):
        adam_step(params, {"w": np.zeros(2)}, state, lr=0.1)
    np.testing.assert_array_equal(params["w"], [1.5, -2.0])


def test_independent_parameters():
    together = {"a": np.array([1.0]), "b": np.array([2.0])}
    alone = {"a": np.array([1.0])}
    adam_step(together, {"a": np.array([0.3]), "b": np.array([-7.0])}, AdamState(), lr=0.01)
    adam_step(alone, {"a": np.array([0.3])}, AdamState(), lr=0.01)
    np.testing.assert_array_equal(together["a"], alone["a"])


def test_first_step_is_odd_in_the_gradient():
    rng = np.random.default_rng(0)
    start = rng.normal(size=5)
    grad = rng.normal(size=5)
    plus, minus = {"w": start.copy()}, {"w": start.copy()}
    adam_step(plus, {"w": grad}, AdamState(), lr=0.01)
    adam_step(minus, {"w": -grad}, AdamState(), lr=0.01)
    np.testing.assert_allclose(plus["w"] - start, -(minus["w"] - start), atol=1e-15)


def test_shape_mismatch():
    with pytest.raises(ShapeError, match="w"):
        adam_step({"w": np.zeros(3)}, {"w": np.zeros(4)}, AdamState(), lr=0.1)


def test_adam_class_keeps_state():
    optimizer = Adam(lr=0.1)
    params = {"p": np.array(0.0)}
    optimizer.step(params, {"p": np.array(1.0)})
    optimizer.step(params, {"p": np.array(1.0)})
    assert optimizer.state.t == 2


def test_plain_sgd():
    params = {"w": np.array([1.0, 2.0])}
    SGD(lr=0.5).step(params, {"w": np.array([2.0, -2.0])})
    np.testing.assert_array_equal(params["w"], [0.0, 3.0])


def test_sgd_momentum():
    params = {"w": np.array(0.0)}
    optimizer = SGD(lr=0.1, momentum=0.9)
    optimizer.step(params, {"w": np.array(1.0)})
    optimizer.step(params, {"w": np.array(1.0)})
    # velocity -0.1, then 0.9 * -0.1 - 0.1
    assert params["w"] == pytest.approx(-0.1 - 0.19, abs=1e-15)
