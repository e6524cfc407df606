import numpy as np
import pytest

from adiasweep.hamiltonians import (
    Coupling,
    HamiltonianPath,
    ModelSpec,
    apply_endpoint_smoothing,
    build,
)
from adiasweep.schedules import Parabola


def central_deriv(path, s, h=1e-6):
    return (path.evaluate(s + h) - path.evaluate(s - h)) / (2.0 * h)


def test_two_level_k0_midpoint():
    path = build(ModelSpec("two-level", k=0.0))
    expected = np.array([[0.0, 0.25], [0.25, 1.0]])
    assert np.array_equal(path.evaluate(0.5), expected)


def test_three_level_case2_endpoint_diagonal():
    path = build(ModelSpec("three-level-case2", k=1e-3))
    assert np.array_equal(path.evaluate(0.0), np.diag([1.0, 2.0, 3.0]).astype(complex))
    assert np.array_equal(path.evaluate(1.0), np.diag([1.0, 2.0, 3.0]).astype(complex))


def test_smoothed_midpoint_coupling_is_quarter():
    path = build(ModelSpec("two-level", k=1e-3))
    h = path.evaluate(0.5)
    assert h[0, 1] == 0.25


def test_all_builtins_diagonal_at_endpoints():
    for model in ("two-level", "two-level-exp", "three-level-case1", "three-level-case2"):
        path = build(ModelSpec(model, k=1e-3))
        for s in (0.0, 1.0):
            h = path.evaluate(s)
            off = h - np.diag(np.diag(h))
            assert np.max(np.abs(off)) == 0.0


def test_two_level_k0_deriv_at_zero():
    path = build(ModelSpec("two-level", k=0.0))
    assert np.array_equal(path.evaluate_deriv(0.0), np.array([[0, 1], [1, 0]], dtype=complex))


def test_three_level_case1_deriv_matches_finite_differences():
    path = build(ModelSpec("three-level-case1", k=1e-3))
    for s in (0.25, 0.5, 1.0 - 1e-6):
        got = path.evaluate_deriv(s)
        ref = central_deriv(path, s - 2e-6 if s > 0.99 else s)
        target = path.evaluate_deriv(s - 2e-6 if s > 0.99 else s)
        assert np.max(np.abs(target - ref)) < 1e-6 * (1.0 + np.max(np.abs(target)))
        assert got.shape == (3, 3)


def test_endpoint_hamiltonian_derivs():
    k = 1e-3
    base = build(ModelSpec("two-level", k=0.0))
    assert np.array_equal(base.endpoint_deriv(0, 1), np.array([[0, 1], [1, 0]], dtype=complex))
    smoothed = build(ModelSpec("two-level", k=k))
    assert np.max(np.abs(smoothed.endpoint_deriv(0, 1))) == 0.0
    c = 2.0 * (1.0 + 2.0 * k) ** 2 / (k * (1.0 + k))
    h2 = smoothed.endpoint_deriv(0, 2)
    assert h2[0, 1] == pytest.approx(c, rel=1e-13)
    assert h2[1, 0] == h2[0, 1]
    assert h2[0, 0] == 0.0


def test_k_zero_reproduces_base_path_bitwise():
    built = build(ModelSpec("two-level", k=0.0))
    manual = HamiltonianPath(2, (0.0, 1.0), (Coupling(0, 1, 1.0, Parabola()),))
    for s in np.linspace(0.0, 1.0, 101):
        assert np.array_equal(built.evaluate(s), manual.evaluate(s))
    exp_built = build(ModelSpec("two-level-exp", k=0.0))
    for s in np.linspace(0.0, 1.0, 101):
        assert np.array_equal(exp_built.evaluate(s), manual.evaluate(s))


def test_reflection_symmetry():
    for model in ("two-level", "two-level-exp"):
        path = build(ModelSpec(model, k=1e-3))
        for s in np.linspace(0.0, 1.0, 41):
            assert np.max(np.abs(path.evaluate(s) - path.evaluate(1.0 - s))) < 1e-14


def test_hermitian_everywhere():
    for model in ("two-level", "three-level-case1", "three-level-case2"):
        path = build(ModelSpec(model, k=1e-2))
        for s in np.linspace(0.0, 1.0, 17):
            h = path.evaluate(s)
            assert np.max(np.abs(h - h.conj().T)) == 0.0


def test_smoothing_transform_identity_cases():
    path = build(ModelSpec("two-level", k=0.0))
    assert apply_endpoint_smoothing(path, 1e-2, 0) is path
    assert apply_endpoint_smoothing(path, 0.0, 3) is path


def test_smoothing_transform_small_k_limit():
    path = build(ModelSpec("two-level", k=0.0))
    for s in (0.2, 0.5, 0.8):
        base_val = path.evaluate(s)[0, 1]
        for k in (1e-3, 1e-5, 1e-7):
            val = apply_endpoint_smoothing(path, k, 1).evaluate(s)[0, 1]
            assert abs(val - base_val) < 20.0 * k
    transformed = apply_endpoint_smoothing(path, 1e-7, 1)
    assert abs(transformed.evaluate(0.5)[0, 1] - 0.25) < 1e-6


def test_smoothing_transform_endpoint_derivatives():
    k = 1e-2
    path = build(ModelSpec("two-level", k=0.0))
    transformed = apply_endpoint_smoothing(path, k, 1)
    assert np.max(np.abs(transformed.endpoint_deriv(0, 1))) == 0.0
    expected = 2.0 / (k * (1.0 + k))
    assert transformed.endpoint_deriv(0, 2)[0, 1] == pytest.approx(expected, rel=1e-12)


def test_model_spec_validation():
    with pytest.raises(ValueError, match="unknown model"):
        ModelSpec("five-level")
    with pytest.raises(ValueError, match=">= 0"):
        ModelSpec("two-level", k=-1e-3)
    with pytest.raises(ValueError, match="order"):
        ModelSpec("two-level", order=0)


def test_case_defaults():
    case1 = ModelSpec("three-level-case1", k=2e-3)
    assert case1.k_values() == (2e-3, 2e-3, 2e-3)
    assert case1.energy_values() == (1.0, 1.0, 1.0)
    case2 = ModelSpec("three-level-case2", k=2e-3)
    assert case2.k_values() == (2e-3, 0.0, 0.0)
    assert case2.energy_values() == (1.0, 0.0, 1.0)
    assert ModelSpec("three-level-case1", k=1e-3, k2=5e-4).k_values() == (1e-3, 5e-4, 1e-3)


def test_zero_amplitude_couplings_dropped():
    path = build(ModelSpec("three-level-case2", k=1e-3))
    pairs = {(c.i, c.j) for c in path.couplings}
    assert pairs == {(0, 1), (1, 2)}


def test_evolution_window():
    assert ModelSpec("two-level", k=1e-3).evolution_window() == (0.0, 1.0)
    lo, hi = ModelSpec("two-level-exp", k=1e-3).evolution_window()
    assert lo == 1e-6 and hi == 1.0 - 1e-6


def test_base_spec():
    spec = ModelSpec("two-level-exp", k=1e-2)
    base = spec.base()
    assert base.model == "two-level" and base.k == 0.0
    assert ModelSpec("three-level-case2", k=1e-3).base().model == "three-level-case2"


def test_path_validation():
    with pytest.raises(ValueError, match="out of range"):
        HamiltonianPath(2, (0.0, 1.0), (Coupling(1, 1, 1.0, Parabola()),))
    with pytest.raises(ValueError, match="diagonal"):
        HamiltonianPath(3, (0.0, 1.0), ())
