"""
Backward Euler with Newton iterations and boundary rows replaced by the
feedback law.

For a step from u to u+ the nonlinear system is

    interior j:   u+_j - u_j - dt * rhs(u+)_j = 0
    row 0:        u+(0) = 0
    row n-2:      (d1 u+)(1) + g1(u+(1)) = 0
    row n-1:      (d2 u+)(1) - g2(u+(1)) = 0
"""

import math
from dataclasses import dataclass

import numpy as np

from . import control
from .errors import ConfigError, DivergenceError, GKdVBHError, SingularJacobianError
from .model import State, rhs, rhs_jacobian


@dataclass(frozen=True)
class SolverSettings:
    dt: float = 1e-3
    t_end: float = 5.0
    newton_tol: float = 1e-10
    newton_max_iter: int = 25
    sample_every: int = 1

    def __post_init__(self):
        for name in ("dt", "t_end", "newton_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
        if self.t_end <= self.dt:
            raise ConfigError(f"t_end ({self.t_end}) must exceed dt ({self.dt})")
        for name in ("newton_max_iter", "sample_every"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")

    @property
    def n_steps(self):
        # guard against 5/1e-3 = 4999.999...
        return int(math.ceil(self.t_end / self.dt - 1e-9))


def _residual(u_new, u_old, grid, params, law, dt):
    G = u_new - u_old - dt * rhs(u_new, grid, params)
    G[0] = u_new[0]
    k = u_new[-1]
    G[-2] = grid.d1[-1] @ u_new + control.g1(k, params, law)
    G[-1] = grid.d2[-1] @ u_new - control.g2(k, params, law)
    return G


def _jacobian(u_new, grid, params, law, dt):
    n = grid.n_points
    J = np.eye(n) - dt * rhs_jacobian(u_new, grid, params)
    J[0] = 0.0
    J[0, 0] = 1.0
    k = u_new[-1]
    J[-2] = grid.d1[-1]
    J[-2, -1] += control.dg1(k, params, law)
    J[-1] = grid.d2[-1]
    J[-1, -1] -= control.dg2(k, params, law)
    return J


def newton_solve(u_old, grid, params, law, settings):
    """Solve one backward Euler step; returns (u_new, iterations).

    At least one Newton correction is always taken, so tiny states still
    evolve even when the stale residual is already below ``newton_tol``.
    """
    u = u_old.copy()
    res_norm = float("inf")
    for it in range(1, settings.newton_max_iter + 1):
        G = _residual(u, u_old, grid, params, law, settings.dt)
        J = _jacobian(u, grid, params, law, settings.dt)
        try:
            du = np.linalg.solve(J, -G)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(f"Newton matrix is singular: {exc}") from exc
        if not np.all(np.isfinite(du)):
            raise SingularJacobianError("Newton update is not finite")
        u = u + du
        res_norm = float(np.max(np.abs(_residual(u, u_old, grid, params, law, settings.dt))))
        if not math.isfinite(res_norm):
            break
        if res_norm < settings.newton_tol:
            return u, it
    raise DivergenceError(
        f"Newton did not converge in {settings.newton_max_iter} iterations "
        f"(residual {res_norm:.3e})",
        residual=res_norm,
    )


def step(state, grid, params, law, settings):
    """Advance ``state`` by one backward Euler step of size ``settings.dt``."""
    control.check_compatible(law, params.delta)
    u_old = grid.check(state.values)
    u_new, _ = newton_solve(u_old, grid, params, law, settings)
    return State(u_new, state.time + settings.dt)


def project_initial(u0, grid, law=None, params=None):
    """Sample ``u0`` (callable or nodal array) and pin the value at x = 0.

    Derivative conditions at x = 1 are left alone; the first implicit step
    enforces them.
    """
    if callable(u0):
        values = np.array(u0(np.asarray(grid.nodes)), dtype=float)
        if values.ndim == 0:
            values = np.full(grid.n_points, float(values))
    else:
        values = np.array(u0, dtype=float)
    values = grid.check(values, "u0")
    values[0] = 0.0
    return State(values, 0.0)


class SimulationError(GKdVBHError, RuntimeError):
    """A step failed; carries the failing time and the partial record."""

    def __init__(self, cause, time, record):
        self.cause = cause
        self.time = time
        self.record = record
        super().__init__(f"t={time:.6g}: {cause}")


def simulate(config):
    """Integrate the configured problem and return a RunRecord.

    The record holds the projected initial state and every
    ``sample_every``-th step; the final step is always recorded.
    """
    from .analysis import RecordBuilder

    params, law, settings = config.params, config.law, config.solver
    control.check_compatible(law, params.delta)
    grid = config.grid()
    state = project_initial(config.initial_condition(), grid, law, params)
    builder = RecordBuilder(grid, params, law, config.echo())
    builder.add(state, 0)

    n_steps = settings.n_steps
    u = state.values
    for i in range(1, n_steps + 1):
        t = i * settings.dt
        try:
            u, iters = newton_solve(u, grid, params, law, settings)
        except (DivergenceError, SingularJacobianError) as exc:
            if isinstance(exc, DivergenceError):
                exc.time = t
            raise SimulationError(exc, t, builder.build(failed_at=t)) from exc
        builder.track(State(u, t))
        if i % settings.sample_every == 0 or i == n_steps:
            builder.add(State(u, t), iters)
    return builder.build()
