import math

import numpy as np
import pytest

from herdlab import DomainError, PursuitParams, StabilityClass, classify, eigenvalues_circular
from herdlab.equilibria import solve_circular, stable_equilibrium
from herdlab.stability import (
    analytic_jacobian_circular,
    classify_eigenvalues,
    coupled_jacobian,
    jacobian_numeric,
    printed_jacobian_circular,
)

from . import oracles


def test_closed_form_matches_oracle(circular_params):
    roots, eq1, eq2 = solve_circular(circular_params)
    lp, lm = eigenvalues_circular(circular_params, roots.r_s2)
    assert lp == pytest.approx(oracles.EIG_W1_S2, abs=1e-12)
    assert lm == pytest.approx(oracles.EIG_W1_S2.conjugate(), abs=1e-12)
    lp, lm = eigenvalues_circular(circular_params, roots.r_s1)
    assert (lp.real, lm.real) == pytest.approx(oracles.EIG_W1_S1, abs=1e-12)
    assert lp.imag == lm.imag == 0


def test_closed_form_domain(circular_params):
    with pytest.raises(DomainError):
        eigenvalues_circular(circular_params, 2.0)
    with pytest.raises(DomainError):
        eigenvalues_circular(circular_params, 0.0)


def test_numeric_jacobian_trivial_cases():
    A = np.array([[1.0, -2.0, 0.5], [0.0, 3.0, 1.0], [4.0, 0.0, -1.0]])
    assert np.abs(jacobian_numeric(lambda x: A @ x, np.array([0.3, -1.0, 2.0])) - A).max() < 1e-8
    assert jacobian_numeric(lambda x: x ** 2, 3.0)[0, 0] == pytest.approx(6.0, abs=1e-9)


def _sorted(eigs):
    return sorted(eigs, key=lambda z: (round(z.real, 6), z.imag))


def test_numeric_matches_closed_form(circular_params):
    _, eq1, eq2 = solve_circular(circular_params)
    for eq in (eq1, eq2):
        closed = _sorted(eigenvalues_circular(circular_params, eq.r_star))
        numeric = _sorted(np.linalg.eigvals(coupled_jacobian(circular_params, eq)))
        assert np.abs(np.array(closed) - np.array(numeric)).max() < 1e-5


def test_printed_jacobian_discrepancy(circular_params):
    """Only the lower-left entry of the closed-form Jacobian disagrees."""
    _, _, eq2 = solve_circular(circular_params)
    numeric = coupled_jacobian(circular_params, eq2)
    exact = analytic_jacobian_circular(circular_params, eq2)
    printed = printed_jacobian_circular(circular_params, eq2)
    assert np.abs(numeric - exact).max() < 1e-6
    diff = np.abs(printed - numeric) > 1e-6
    assert diff.tolist() == [[False, False], [True, False]]
    assert np.trace(printed) == pytest.approx(np.trace(numeric), abs=1e-8)


def test_verdicts(circular_params, spiral_params):
    _, eq1, eq2 = solve_circular(circular_params)
    assert classify(circular_params, eq2).cls is StabilityClass.ASYMPTOTICALLY_STABLE
    assert classify(circular_params, eq1).cls is StabilityClass.SADDLE
    eq = stable_equilibrium(spiral_params)
    for n in (1, 2, 3):
        v = classify(spiral_params, eq, n)
        assert v.cls is StabilityClass.ASYMPTOTICALLY_STABLE
        assert len(v.eigenvalues) == 2 * n
        assert all(z.real < 0 for z in v.eigenvalues)


def test_block_structure(spiral_params):
    eq = stable_equilibrium(spiral_params)
    J1 = coupled_jacobian(spiral_params, eq, 1)
    J3 = coupled_jacobian(spiral_params, eq, 3)
    assert np.array_equal(J3[:2, :2], J1)
    assert np.all(J3[:2, 2:] == 0)
    assert np.all(J3[2:4, 4:6] == 0) and np.all(J3[4:6, 2:4] == 0)


def test_classify_eigenvalues_classes():
    assert classify_eigenvalues([-1, -2]).cls is StabilityClass.ASYMPTOTICALLY_STABLE
    assert classify_eigenvalues([1, -2]).cls is StabilityClass.SADDLE
    assert classify_eigenvalues([1 + 1j, 1 - 1j]).cls is StabilityClass.UNSTABLE
    assert classify_eigenvalues([1e-10j, -1e-10j]).cls is StabilityClass.MARGINAL
    assert classify_eigenvalues([-1, 0.0]).cls is StabilityClass.MARGINAL


def test_large_omega_real_part(circular_params):
    p = circular_params.replace(omega=50.0)
    r = solve_circular(p)[0].r_s2
    lp, lm = eigenvalues_circular(p, r)
    assert lp.imag != 0
    assert lp.real == pytest.approx(-1.0 / (2 * (4 - r * r) ** 1.5))


def test_rate_scales_with_inverse_cube_radius():
    """At fixed k/(omega R^3), shrinking R scales |Re lambda| by R^-3 (within 5%)."""
    ratio = 0.125
    rates = []
    for R in (2.0, 1.0):
        p = PursuitParams.circular(k=1.0, R=R, omega=1.0 / (ratio * R ** 3))
        r = solve_circular(p)[0].r_s2
        rates.append(abs(eigenvalues_circular(p, r)[0].real))
    assert rates[1] / rates[0] == pytest.approx(8.0, rel=0.05)
