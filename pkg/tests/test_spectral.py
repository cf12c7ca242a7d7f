import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gkdvbh.errors import ConfigError, DimensionError
from gkdvbh.spectral import (
    build_grid,
    cheb_diff_matrix,
    cheb_points,
    integrate,
    kte_map,
    spectral_convergence_report,
)


def test_cheb_points_are_cosines():
    x = cheb_points(4)
    np.testing.assert_allclose(x, np.cos(np.pi * np.arange(5) / 4), atol=1e-15)


def test_cheb_matrix_differentiates_polynomials_exactly():
    N = 12
    x = cheb_points(N)
    D = cheb_diff_matrix(N)
    for k in range(N + 1):
        expected = k * x ** (k - 1) if k else np.zeros_like(x)
        np.testing.assert_allclose(D @ x**k, expected, atol=1e-10 * max(1, k * k))


def test_kte_map_fixes_endpoints_and_is_monotone():
    xi = np.linspace(-1, 1, 101)
    g, dg = kte_map(xi, 0.5)
    assert g[0] == pytest.approx(-1) and g[-1] == pytest.approx(1)
    assert np.all(np.diff(g) > 0) and np.all(dg > 0)


def test_grid_nodes_sorted_with_exact_endpoints():
    grid = build_grid(33)
    assert grid.nodes[0] == 0.0 and grid.nodes[-1] == 1.0
    assert np.all(np.diff(grid.nodes) > 0)


def test_differentiation_rows_sum_to_zero():
    grid = build_grid(33)
    for d in (grid.d1, grid.d2, grid.d3):
        assert np.max(np.abs(d.sum(axis=1))) < 1e-12 * np.max(np.abs(d))


def test_d1_exp_accuracy_at_32_points():
    grid = build_grid(32)
    err = np.max(np.abs(grid.d1 @ np.exp(grid.nodes) - np.exp(grid.nodes)))
    assert err < 1e-9


def test_higher_derivatives_of_sine():
    grid = build_grid(33)
    x = grid.nodes
    u = np.sin(np.pi * x)
    np.testing.assert_allclose(grid.d2 @ u, -np.pi**2 * u, atol=1e-8)
    np.testing.assert_allclose(grid.d3 @ u, -np.pi**3 * np.cos(np.pi * x), atol=1e-6)


def test_quadrature_integrates_monomials_to_degree_n_minus_1():
    grid = build_grid(33)
    for k in range(33):
        assert abs(grid.weights @ grid.nodes**k - 1 / (k + 1)) < 1e-12


@pytest.mark.parametrize("n", [33, 48, 64])
def test_quadrature_exact_to_degree_2n_minus_3_on_fine_grids(n):
    # not Gauss exact, but the mapped rule reaches 2n-3 to 1e-12 on these grids
    grid = build_grid(n)
    for k in range(n, 2 * n - 2):
        assert abs(grid.weights @ grid.nodes**k - 1 / (k + 1)) < 1e-12


def test_weights_positive_and_sum_to_one():
    grid = build_grid(25)
    assert np.all(grid.weights > 0)
    assert grid.weights.sum() == pytest.approx(1.0, abs=1e-14)


def test_integrate_sine_squared():
    grid = build_grid(33)
    assert integrate(np.sin(np.pi * grid.nodes) ** 2, grid) == pytest.approx(0.5, abs=1e-13)


def test_grid_arrays_are_read_only():
    grid = build_grid(16)
    with pytest.raises(ValueError):
        grid.d1[0, 0] = 1.0


@pytest.mark.parametrize("n", [0, 7, 8.5, True])
def test_too_few_or_non_integer_points_rejected(n):
    with pytest.raises(ConfigError):
        build_grid(n)


@pytest.mark.parametrize("a", [0.0, -0.1, 1.0, 1.5])
def test_bad_map_parameter_rejected(a):
    with pytest.raises(ConfigError):
        build_grid(16, a)


def test_integrate_checks_length():
    grid = build_grid(16)
    with pytest.raises(DimensionError):
        integrate(np.ones(15), grid)


def test_convergence_report_decreases_then_plateaus():
    report = spectral_convergence_report("exp", [8, 16, 32])
    errs = [e for _, e in report]
    assert errs[0] > errs[1] and errs[2] < 1e-9


def test_convergence_report_low_degree_targets():
    assert all(e < 1e-12 for _, e in spectral_convergence_report("constant", [8, 16]))
    # the mapped interpolant is not a polynomial in x, so a cubic is only resolved spectrally
    (_, coarse), (_, fine) = spectral_convergence_report("cubic", [8, 16])
    assert coarse < 1e-6 and fine < 1e-12


def test_convergence_report_rejects_bad_input():
    with pytest.raises(ValueError):
        spectral_convergence_report("tan", [8])
    with pytest.raises(ValueError):
        spectral_convergence_report("exp", [16, 8])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=8))
def test_d1_exact_on_random_low_degree_polynomials(coeffs):
    grid = build_grid(20)
    p = np.polynomial.Polynomial(coeffs)
    np.testing.assert_allclose(grid.d1 @ p(grid.nodes), p.deriv()(grid.nodes), atol=1e-9)


@pytest.mark.parametrize("n", [16, 33, 64])
def test_d1_reproduces_monomial_derivatives(n):
    grid = build_grid(n)
    x = grid.nodes
    for k in range(1, n):
        exact = k * x ** (k - 1)
        assert np.max(np.abs(grid.d1 @ x**k - exact)) <= 1e-8 * max(1.0, np.max(np.abs(exact)))


def test_d1_of_square_at_16_points():
    grid = build_grid(16)
    assert np.max(np.abs(grid.d1 @ grid.nodes**2 - 2 * grid.nodes)) < 1e-10


def test_third_derivative_composes():
    grid = build_grid(64)
    assert np.max(np.abs(grid.d3 - grid.d1 @ grid.d2)) < 1e-6


def test_integrate_cube_and_zero():
    grid = build_grid(33)
    assert integrate(grid.nodes**3, grid) == pytest.approx(0.25, abs=1e-12)
    assert integrate(np.zeros(33), grid) == 0.0
