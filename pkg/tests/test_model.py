import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gkdvbh import control
from gkdvbh.control import ControlLaw
from gkdvbh.errors import ConfigError, ConstraintError, DimensionError
from gkdvbh.model import (
    ModelParams,
    convective_flux,
    cutoff_flux,
    monotonicity_gap,
    monotonicity_shift,
    reaction,
    reaction_derivative,
    rhs,
    rhs_jacobian,
    weak_pairing,
)
from gkdvbh.spectral import build_grid, integrate

GRID = build_grid(33)
P1 = ModelParams()
P2 = dataclasses.replace(P1, delta=2)


def test_default_parameters():
    p = ModelParams()
    assert (p.nu, p.mu, p.alpha, p.beta, p.gamma, p.delta, p.eta) == (1, 0.1, 1, 1, 0.5, 1, 1)


@pytest.mark.parametrize("change", [
    {"nu": 0}, {"nu": -1}, {"mu": 0}, {"gamma": 1.0}, {"gamma": -0.1}, {"delta": 0},
    {"delta": 1.5}, {"eta": 0}, {"beta": float("nan")},
])
def test_invalid_parameters_rejected(change):
    with pytest.raises(ConfigError):
        ModelParams(**change)


def test_reaction_values():
    assert reaction(0.5, P2) == pytest.approx(-0.09375, abs=1e-15)
    for u in (0.0, 1.0, 0.5):
        # zeros at 0, 1 and gamma for delta = 1
        assert reaction(u, P1) == pytest.approx(0.0, abs=1e-15)


def test_reaction_derivative_matches_finite_difference():
    u = np.linspace(-1.2, 1.2, 13)
    h = 1e-6
    for p in (P1, P2, dataclasses.replace(P1, delta=3)):
        fd = (reaction(u + h, p) - reaction(u - h, p)) / (2 * h)
        np.testing.assert_allclose(reaction_derivative(u, p), fd, atol=1e-8)


def test_convective_flux_and_cutoff():
    assert convective_flux(2.0, P1) == 2.0
    v = np.array([0.0, 0.5, -0.8])
    np.testing.assert_array_equal(cutoff_flux(v, P1), convective_flux(v, P1))
    big = np.array([0.0, 2.0, -1.0])
    # scaled by (rho/2)^2
    np.testing.assert_allclose(cutoff_flux(big, P1), convective_flux(big, P1) / 4)


def test_rhs_of_sine_against_analytic_derivatives():
    x = GRID.nodes
    u = np.sin(np.pi * x)
    mid = np.argmin(np.abs(x - 0.5))
    assert x[mid] == pytest.approx(0.5, abs=1e-15)
    assert rhs(u, GRID, P1)[mid] == pytest.approx(-np.pi**2, abs=1e-8)
    exact = (-P1.nu * np.pi**2 * u + P1.mu * np.pi**3 * np.cos(np.pi * x)
             - P1.alpha * u * np.pi * np.cos(np.pi * x) + reaction(u, P1))
    np.testing.assert_allclose(rhs(u, GRID, P1), exact, atol=1e-6)


@pytest.mark.parametrize("p", [P1, P2, dataclasses.replace(P1, delta=3)])
def test_jacobian_matches_finite_differences(p):
    rng = np.random.default_rng(3)
    u = 0.5 * np.sin(np.pi * GRID.nodes) + 0.1 * rng.standard_normal(33)
    J = rhs_jacobian(u, GRID, p)
    h = 1e-7
    fd = np.empty_like(J)
    for j in range(33):
        e = np.zeros(33)
        e[j] = h
        fd[:, j] = (rhs(u + e, GRID, p) - rhs(u - e, GRID, p)) / (2 * h)
    assert np.max(np.abs(J - fd)) < 1e-5 * np.max(np.abs(J))


def test_rhs_rejects_wrong_length():
    with pytest.raises(DimensionError):
        rhs(np.zeros(10), GRID, P1)


def _sample(seed, law=ControlLaw.FLUX_D1, p=P1, curvature=True):
    return control.admissible_sample(np.random.default_rng(seed), GRID, p, law, curvature=curvature)


@pytest.mark.parametrize("law, p", [(ControlLaw.FLUX_D1, P1), (ControlLaw.FLUX_D2, P2), (ControlLaw.SIMPLE, P1)])
def test_weak_pairing_equals_strong_form(law, p):
    # for smooth v in the ball satisfying every boundary condition the pairing is -(rhs(v), w)
    for seed in range(5):
        v = _sample(seed, law, p)
        w = _sample(100 + seed, law, p)
        assert weak_pairing(v, w, GRID, p, law) == pytest.approx(-integrate(rhs(v, GRID, p) * w, GRID), abs=1e-8)


def test_weak_pairing_rejects_functions_outside_the_space():
    v = _sample(1)
    w = _sample(2)
    bad = v.copy()
    bad[0] = 1e-3
    with pytest.raises(ConstraintError) as info:
        weak_pairing(bad, w, GRID, P1, ControlLaw.FLUX_D1)
    assert info.value.row == 0
    with pytest.raises(ConstraintError) as info:
        weak_pairing(np.sin(np.pi * GRID.nodes), w, GRID, P1, ControlLaw.FLUX_D1)
    assert info.value.row == 1
    w_bad = w + 0.1
    with pytest.raises(ConstraintError):
        weak_pairing(v, w_bad, GRID, P1, ControlLaw.FLUX_D1)


def test_monotonicity_shift_values():
    # 2^7 + 2 * 1.5^2 * 4
    assert monotonicity_shift(P1) == 146.0
    assert monotonicity_shift(P2) == pytest.approx(2**11 + 8 * 2.25 * 9)


def test_monotonicity_gap_requires_large_enough_shift():
    v, w = _sample(1, curvature=False), _sample(2, curvature=False)
    with pytest.raises(ValueError):
        monotonicity_gap(v, w, 100.0, GRID, P1, ControlLaw.FLUX_D1)
    assert monotonicity_gap(v, w, 146.0, GRID, P1, ControlLaw.FLUX_D1) >= -1e-6


def test_monotonicity_gap_of_identical_functions_is_zero():
    v = _sample(4, curvature=False)
    assert monotonicity_gap(v, v, 146.0, GRID, P1, ControlLaw.FLUX_D1) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_coercivity_margin_nonnegative(seed):
    v = _sample(seed, curvature=False)
    zeta = P1.nu - P1.beta * (1 - P1.gamma) ** 2 / 4
    assert weak_pairing(v, v, GRID, P1, ControlLaw.FLUX_D1) - zeta * integrate(v * v, GRID) >= -1e-6
