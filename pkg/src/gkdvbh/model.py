"""
Generalized KdV-Burgers-Huxley right-hand side and its weak-form functionals.

    u_t = nu u_xx - mu u_xxx - alpha u^delta u_x + beta u (1 - u^delta)(u^delta - gamma)

The weak pairing, cutoff flux and monotonicity gap exist for the discrete
property tests; time integration always uses the uncut convective flux.
"""

from dataclasses import dataclass

import numpy as np

from . import control
from .errors import ConfigError, ConstraintError
from .spectral import integrate


@dataclass(frozen=True)
class ModelParams:
    nu: float = 1.0
    mu: float = 0.1
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.5
    delta: int = 1
    eta: float = 1.0
    rho_cut: float = 1.0

    def __post_init__(self):
        for name in ("nu", "mu", "alpha", "beta", "eta", "rho_cut"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
        if not (0.0 < self.gamma < 1.0):
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma!r}")
        if isinstance(self.delta, bool) or int(self.delta) != self.delta or self.delta < 1:
            raise ConfigError(f"delta must be an integer >= 1, got {self.delta!r}")
        object.__setattr__(self, "delta", int(self.delta))


@dataclass(frozen=True)
class State:
    values: np.ndarray
    time: float = 0.0


def convective_flux(v, params):
    """f(v) = v^(delta+1) / (delta+1)."""
    d = params.delta
    return np.asarray(v, dtype=float) ** (d + 1) / (d + 1)


def cutoff_scale(values, params):
    """Factor (rho/||v||_inf)^(delta+1) applied by the cutoff, or 1 inside the ball."""
    peak = np.max(np.abs(values)) if np.size(values) else 0.0
    if peak <= params.rho_cut:
        return 1.0
    return (params.rho_cut / peak) ** (params.delta + 1)


def cutoff_flux(values, params):
    """Convective flux truncated to amplitude rho, using the nodal max-norm."""
    values = np.asarray(values, dtype=float)
    return cutoff_scale(values, params) * convective_flux(values, params)


def reaction(values, params):
    u = np.asarray(values, dtype=float)
    ud = u**params.delta
    return params.beta * u * (1.0 - ud) * (ud - params.gamma)


def reaction_derivative(values, params):
    u = np.asarray(values, dtype=float)
    d, g = params.delta, params.gamma
    ud = u**d
    dud = d * u ** (d - 1)
    return params.beta * ((1 - ud) * (ud - g) - u * dud * (ud - g) + u * (1 - ud) * dud)


def _values(state, grid):
    return grid.check(getattr(state, "values", state))


def rhs(state, grid, params):
    """Collocated right-hand side at every node (boundary rows included)."""
    u = _values(state, grid)
    ux = grid.d1 @ u
    return (
        params.nu * (grid.d2 @ u)
        - params.mu * (grid.d3 @ u)
        - params.alpha * u**params.delta * ux
        + reaction(u, params)
    )


def rhs_jacobian(state, grid, params):
    """Dense Jacobian of :func:`rhs` with respect to the nodal values."""
    u = _values(state, grid)
    d = params.delta
    ux = grid.d1 @ u
    J = params.nu * grid.d2 - params.mu * grid.d3
    J = J - params.alpha * (u**d)[:, None] * grid.d1
    diag = -params.alpha * d * u ** (d - 1) * ux + reaction_derivative(u, params)
    J[np.diag_indices_from(J)] += diag
    return J


def _check_weak_space(v, w, grid, params, law, tol=1e-8):
    res = control.boundary_residual(v, grid, params, law)
    if abs(res[0]) > tol:
        raise ConstraintError(f"first argument violates u(0) = 0 (residual {res[0]:.3e})", row=0)
    if abs(res[1]) > tol:
        raise ConstraintError(
            f"first argument violates u_x(1) = -g1(u(1)) (residual {res[1]:.3e})", row=1
        )
    if abs(w[0]) > tol:
        raise ConstraintError(f"test function violates w(0) = 0 (value {w[0]:.3e})", row=0)


def weak_pairing(v, w, grid, params, law, check=True):
    """Integrated-by-parts pairing <A_rho(v), w> with cutoff convection.

    ``v`` must satisfy u(0) = 0 and u_x(1) = -g1(u(1)); ``w`` must vanish at 0.
    """
    v = grid.check(v, "v")
    w = grid.check(w, "w")
    if check:
        _check_weak_space(v, w, grid, params, law)
    nu, mu, alpha = params.nu, params.mu, params.alpha
    k = v[-1]
    vx, vxx = grid.d1 @ v, grid.d2 @ v
    wx = grid.d1 @ w
    f_cut = cutoff_flux(v, params)
    return float(
        nu * integrate(vx * wx, grid)
        + nu * control.g1(k, params, law) * w[-1]
        - mu * integrate(vxx * wx, grid)
        + mu * control.g2(k, params, law) * w[-1]
        + alpha * (f_cut[-1] * w[-1] - integrate(f_cut * wx, grid))
        - integrate(reaction(v, params) * w, grid)
    )


def monotonicity_shift(params):
    """Smallest shift omega making A_rho + omega*I monotone.

    Uses L_rho = 2^(4 delta + 3) rho^(2 delta), the largest of the convective
    Lipschitz constants arising in the case analysis.
    """
    d = params.delta
    lip = 2.0 ** (4 * d + 3) * params.rho_cut ** (2 * d)
    return params.alpha * lip / params.nu + 2.0 ** (2 * d - 1) * params.beta * (1 + params.gamma) ** 2 * (d + 1) ** 2


def monotonicity_gap(v, w, omega, grid, params, law):
    """<A(v) - A(w), v - w> + omega ||v-w||^2 - max(nu/2, beta*gamma) ||v-w||_H1^2.

    Nonnegative for admissible pairs whenever omega >= monotonicity_shift(params).
    """
    if omega < monotonicity_shift(params):
        raise ValueError(f"omega={omega} is below the monotonicity shift {monotonicity_shift(params)}")
    v = grid.check(v, "v")
    w = grid.check(w, "w")
    diff = v - w
    # both arguments must lie in the weak space; the difference vanishes at 0
    pair = weak_pairing(v, diff, grid, params, law) - weak_pairing(w, diff, grid, params, law)
    l2sq = integrate(diff**2, grid)
    semi = integrate((grid.d1 @ diff) ** 2, grid)
    return float(pair + omega * l2sq - max(params.nu / 2, params.beta * params.gamma) * (l2sq + semi))
