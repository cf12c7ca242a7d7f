"""
Mapped Chebyshev collocation on [0, 1].

Chebyshev-Gauss-Lobatto points are pushed through the Kosloff-Tal-Ezer
arcsine map, then affinely onto [0, 1]. Differentiation matrices come from
the standard Chebyshev matrix plus the chain rule; quadrature weights are
Clenshaw-Curtis weights on the reference points scaled by the Jacobian of
the composed map.

Nodes are stored in ascending order, so row 0 is x = 0 and row -1 is x = 1.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

MIN_POINTS = 8
DEFAULT_POINTS = 33
DEFAULT_KTE_ALPHA = 0.1


def cheb_points(N):
    """Chebyshev-Gauss-Lobatto points cos(j*pi/N), j = 0..N (descending)."""
    return np.cos(np.pi * np.arange(N + 1) / N)


def cheb_diff_matrix(N):
    """First-order Chebyshev differentiation matrix on [-1, 1].

    Off-diagonal entries use the closed form (c_i/c_j)(-1)^(i+j)/(x_i - x_j);
    the diagonal is the negative row sum, which keeps D @ 1 = 0 to rounding.
    """
    x = cheb_points(N)
    c = np.ones(N + 1)
    c[0] = c[N] = 2.0
    c *= (-1.0) ** np.arange(N + 1)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return D


def clenshaw_curtis_weights(N):
    """Clenshaw-Curtis weights for the points returned by :func:`cheb_points`."""
    theta = np.pi * np.arange(N + 1) / N
    w = np.zeros(N + 1)
    inner = theta[1:-1]
    v = np.ones(N - 1)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N**2 - 1)
        for k in range(1, N // 2):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
        v -= np.cos(N * inner) / (N**2 - 1)
    else:
        w[0] = w[N] = 1.0 / N**2
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / N
    return w


def kte_map(xi, kte_alpha):
    """Arcsine map of [-1, 1] onto itself and its derivative.

    kte_alpha -> 0 recovers the Chebyshev points, kte_alpha = 1 gives
    equispaced points.
    """
    s = np.arcsin(kte_alpha)
    g = np.arcsin(kte_alpha * xi) / s
    dg = kte_alpha / (np.sqrt(1.0 - (kte_alpha * xi) ** 2) * s)
    return g, dg


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Grid:
    """Collocation grid on [0, 1]; immutable, safe to share between runs."""

    n_points: int
    nodes: np.ndarray
    weights: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    kte_alpha: float

    def check(self, values, name="values"):
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_points,):
            raise DimensionError(
                f"{name} has shape {values.shape}, grid expects ({self.n_points},)"
            )
        return values


def build_grid(n_points=DEFAULT_POINTS, kte_alpha=DEFAULT_KTE_ALPHA):
    """Build the mapped Chebyshev grid with ``n_points`` nodes.

    Parameters
    ----------
    n_points : int
        Number of nodes (polynomial degree + 1). At least 8 so that three
        boundary rows can be replaced and interior rows remain.
    kte_alpha : float
        Map parameter in (0, 1]. Values near 1 approach an equispaced grid
        and lose spectral accuracy quickly; the default keeps the
        differentiation matrices accurate to ~1e-12 for n_points <= 64.
    """
    if isinstance(n_points, bool) or int(n_points) != n_points:
        raise ConfigError(f"n_points must be an integer, got {n_points!r}")
    n_points = int(n_points)
    if n_points < MIN_POINTS:
        raise ConfigError(f"n_points must be >= {MIN_POINTS}, got {n_points}")
    if not (0.0 < kte_alpha <= 1.0):
        raise ConfigError(f"kte_alpha must lie in (0, 1], got {kte_alpha}")

    N = n_points - 1
    xi = cheb_points(N)
    D = cheb_diff_matrix(N)
    w_ref = clenshaw_curtis_weights(N)

    if kte_alpha == 1.0:
        # arcsin(xi)/arcsin(1) has an infinite derivative at the endpoints
        raise ConfigError("kte_alpha = 1 gives a singular map Jacobian at the endpoints")
    g, dg = kte_map(xi, kte_alpha)

    x = 0.5 * (g + 1.0)
    dxdxi = 0.5 * dg
    d1 = D / dxdxi[:, None]
    w = w_ref * dxdxi

    order = np.argsort(x)
    x = x[order]
    d1 = d1[np.ix_(order, order)]
    w = w[order]
    x[0], x[-1] = 0.0, 1.0

    d2 = d1 @ d1
    d3 = d1 @ d2
    return Grid(
        n_points=n_points,
        nodes=_frozen(x),
        weights=_frozen(w),
        d1=_frozen(d1),
        d2=_frozen(d2),
        d3=_frozen(d3),
        kte_alpha=float(kte_alpha),
    )


def integrate(values, grid):
    """Quadrature approximation of the integral over [0, 1] of nodal ``values``."""
    values = grid.check(values)
    return float(grid.weights @ values)


_TARGETS = {
    "exp": (np.exp, np.exp),
    "sin_pi": (lambda x: np.sin(np.pi * x), lambda x: np.pi * np.cos(np.pi * x)),
    "constant": (lambda x: np.full_like(x, 3.0), np.zeros_like),
    "cubic": (lambda x: x**3 - 2 * x, lambda x: 3 * x**2 - 2),
}


def spectral_convergence_report(target, n_list, kte_alpha=DEFAULT_KTE_ALPHA):
    """Max-norm error of ``d1 @ f(nodes)`` against f' for each grid size.

    ``target`` is one of ``exp``, ``sin_pi``, ``constant``, ``cubic``.
    Returns a list of ``(n_points, max_error)`` pairs.
    """
    try:
        f, df = _TARGETS[target]
    except KeyError:
        raise ValueError(f"unknown target {target!r}; choose from {sorted(_TARGETS)}") from None
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    report = []
    for n in n_list:
        grid = build_grid(n, kte_alpha)
        err = np.max(np.abs(grid.d1 @ f(grid.nodes) - df(grid.nodes)))
        report.append((n, float(err)))
    return report
