import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraccvnn.activation import (
    CR_TOL,
    GeorgiouActivation,
    LinearActivation,
    act_complex_derivative,
    act_eval,
    act_real_jacobian,
    activation_from_json,
    activation_to_json,
    evaluate_many,
)

coord = st.floats(-20, 20, allow_nan=False)
positive = st.floats(0.1, 5.0)


def finite_difference(act, z, eps=1e-6):
    dx = (act(z + eps) - act(z - eps)) / (2 * eps)
    dy = (act(z + 1j * eps) - act(z - 1j * eps)) / (2 * eps)
    return np.array([[dx.real, dy.real], [dx.imag, dy.imag]])


def test_georgiou_values():
    g = GeorgiouActivation(1.0, 1.0)
    assert act_eval(g, 0) == 0
    assert act_eval(g, 3 + 4j) == pytest.approx((3 + 4j) / 6, abs=1e-15)
    assert act_eval(g, 1) == 0.5
    w = np.exp(0.7j)
    assert act_eval(g, w) == pytest.approx(w / 2, abs=1e-15)


def test_georgiou_jacobian_on_real_axis():
    jac = act_real_jacobian(GeorgiouActivation(1.0, 1.0), 3.0)
    assert jac.dRdx == pytest.approx(1 / 16, abs=1e-15)
    assert jac.dIdy == pytest.approx(1 / 4, abs=1e-15)
    assert jac.dRdy == 0 and jac.dIdx == 0
    np.testing.assert_allclose(
        jac.as_matrix(), finite_difference(GeorgiouActivation(1.0, 1.0), 3.0), atol=1e-8
    )


def test_georgiou_bounded():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        c1, c2 = rng.uniform(0.1, 3, 2)
        z = complex(*rng.standard_normal(2) * 10 ** rng.uniform(-3, 6))
        assert abs(act_eval(GeorgiouActivation(c1, c2), z)) < 1 / c2


@given(coord, coord, positive, positive)
def test_georgiou_jacobian_matches_finite_difference(x, y, c1, c2):
    g = GeorgiouActivation(c1, c2)
    z = complex(x, y)
    if abs(z) < 1e-3:  # |z| has a kink at the origin
        z += 0.01
    np.testing.assert_allclose(act_real_jacobian(g, z).as_matrix(), finite_difference(g, z), atol=1e-6)


@given(coord, coord, coord, coord)
def test_linear_jacobian_and_derivative(x, y, wr, wi):
    act = LinearActivation(complex(wr, wi))
    z = complex(x, y)
    np.testing.assert_allclose(act_real_jacobian(act, z).as_matrix(), [[wr, -wi], [wi, wr]])
    assert act_complex_derivative(act, z) == complex(wr, wi)


def test_georgiou_complex_derivative_only_at_origin():
    g = GeorgiouActivation(2.0, 1.0)
    assert act_complex_derivative(g, 0) == 0.5
    assert act_complex_derivative(g, 1e-3) is None
    assert act_complex_derivative(g, cmath.exp(0.3j)) is None


def test_jacobian_continuous_at_origin():
    g = GeorgiouActivation(1.5, 2.0)
    at0 = act_real_jacobian(g, 0).as_matrix()
    near = act_real_jacobian(g, 1e-12 + 1e-12j).as_matrix()
    np.testing.assert_allclose(at0, near, atol=1e-10)
    np.testing.assert_allclose(at0, np.eye(2) / 1.5)


def test_cauchy_riemann_tolerance_edge():
    class Nearly(LinearActivation):
        def real_jacobian(self, z):
            j = super().real_jacobian(z)
            return j._replace(dIdy=j.dIdy + 0.5 * CR_TOL)

    assert act_complex_derivative(Nearly(1 + 1j), 0.3) is not None


@pytest.mark.parametrize(
    "act,fragment",
    [
        (GeorgiouActivation(0.0, 1.0), "c1"),
        (GeorgiouActivation(1.0, -1.0), "c2"),
        (GeorgiouActivation(1.0, 0.0), "c2"),
        (GeorgiouActivation(float("nan"), 1.0), "c1"),
        (LinearActivation(complex("inf")), "gain"),
    ],
)
def test_violations(act, fragment):
    msgs = act.violations()
    assert msgs and fragment in msgs[0]


def test_valid_activations_have_no_violations():
    assert GeorgiouActivation(1, 1e-9).violations() == []
    assert LinearActivation(0).violations() == []


def test_evaluate_many_mixed_and_uniform():
    z = np.array([1 + 1j, -2j, 3.0])
    g = GeorgiouActivation(1.0, 1.0)
    uniform = evaluate_many([g] * 3, z)
    np.testing.assert_allclose(uniform, [g(w) for w in z])
    mixed = [g, LinearActivation(2j), GeorgiouActivation(2.0, 0.5)]
    np.testing.assert_allclose(evaluate_many(mixed, z), [a(w) for a, w in zip(mixed, z)])


@pytest.mark.parametrize("act", [GeorgiouActivation(1.5, 0.25), LinearActivation(1 - 2j)])
def test_json_round_trip(act):
    assert activation_from_json(activation_to_json(act)) == act


def test_json_nested_params_and_strictness():
    assert activation_from_json({"kind": "georgiou", "params": {"c1": 2, "c2": 3}}) == GeorgiouActivation(2, 3)
    assert activation_from_json({"kind": "linear", "gain": 2}) == LinearActivation(2 + 0j)
    with pytest.raises(ValueError, match="unknown activation fields"):
        activation_from_json({"kind": "georgiou", "c3": 1})
    with pytest.raises(ValueError, match="kind"):
        activation_from_json({"kind": "tanh"})
