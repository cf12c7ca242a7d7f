"""
Boundary feedback laws at x = 1.

Every law keeps u(0) = 0 and prescribes

    u_x(1)  = -g1(u(1)),
    u_xx(1) =  g2(u(1)).

FLUX_D1 / FLUX_D2 are the nonlinear flux feedbacks for exponents 1 and 2,
CURVATURE fixes u_x(1) = 0 and feeds back through u_xx(1) only, SIMPLE is
u_x(1) = -u(1), u_xx(1) = u(1) for any exponent, and OPEN sets both gains
to zero.
"""

import enum

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigError


class ControlLaw(enum.Enum):
    FLUX_D1 = "flux_d1"
    FLUX_D2 = "flux_d2"
    CURVATURE = "curvature"
    SIMPLE = "simple"
    OPEN = "open"

    @classmethod
    def parse(cls, text):
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ConfigError(f"unknown control law {text!r} (expected one of: {names})") from None


FLUX_LAWS = (ControlLaw.FLUX_D1, ControlLaw.FLUX_D2)

_ALLOWED_DELTA = {
    ControlLaw.FLUX_D1: {1},
    ControlLaw.FLUX_D2: {2},
    ControlLaw.CURVATURE: {1, 2},
}


def check_compatible(law, delta):
    """Raise ConfigError unless ``law`` is defined for nonlinearity power ``delta``."""
    allowed = _ALLOWED_DELTA.get(law)
    if allowed is not None and delta not in allowed:
        raise ConfigError(
            f"control law {law.value!r} requires delta in {sorted(allowed)}, got delta={delta} "
            "(flux_d1: delta=1; flux_d2: delta=2; curvature: delta in {1, 2}; "
            "simple/open: any delta >= 1)"
        )


def _gain(k, params, law):
    """Common factor h(k) of the flux laws and its derivative h'(k)."""
    d, eta, alpha = params.delta, params.eta, params.alpha
    if law is ControlLaw.FLUX_D1 or (law is ControlLaw.CURVATURE and d == 1):
        c = alpha**2 / (eta * (d + 2) ** 2)
        return eta + c * k ** (2 * d), 2 * d * c * k ** (2 * d - 1)
    # FLUX_D2
    c = alpha / (d + 2)
    return eta + c * k**d, d * c * k ** (d - 1)


def g1(k, params, law):
    """Feedback applied to u_x(1)."""
    check_compatible(law, params.delta)
    if law in FLUX_LAWS:
        h, _ = _gain(k, params, law)
        return h * k / params.nu
    if law is ControlLaw.SIMPLE:
        return 1.0 * k
    return 0.0 * k


def g2(k, params, law):
    """Feedback applied to u_xx(1)."""
    check_compatible(law, params.delta)
    if law in FLUX_LAWS:
        h, _ = _gain(k, params, law)
        return params.delta / params.nu**2 * h**2 * k
    if law is ControlLaw.CURVATURE:
        if params.delta == 1:
            h, _ = _gain(k, params, law)
            return h * k / params.mu
        return params.eta / params.mu * k
    if law is ControlLaw.SIMPLE:
        return 1.0 * k
    return 0.0 * k


def dg1(k, params, law):
    """Derivative of :func:`g1` with respect to the boundary value."""
    check_compatible(law, params.delta)
    if law in FLUX_LAWS:
        h, dh = _gain(k, params, law)
        return (h + dh * k) / params.nu
    if law is ControlLaw.SIMPLE:
        return 1.0
    return 0.0


def dg2(k, params, law):
    """Derivative of :func:`g2` with respect to the boundary value."""
    check_compatible(law, params.delta)
    if law in FLUX_LAWS:
        h, dh = _gain(k, params, law)
        return params.delta / params.nu**2 * (h**2 + 2 * h * dh * k)
    if law is ControlLaw.CURVATURE:
        if params.delta == 1:
            h, dh = _gain(k, params, law)
            return (h + dh * k) / params.mu
        return params.eta / params.mu
    if law is ControlLaw.SIMPLE:
        return 1.0
    return 0.0


def boundary_residual(state, grid, params, law):
    """Residuals [u(0), u_x(1) + g1(u(1)), u_xx(1) - g2(u(1))] of a state.

    ``state`` may be a :class:`~gkdvbh.model.State` or a plain nodal array.
    """
    u = grid.check(getattr(state, "values", state))
    k = u[-1]
    return np.array([
        u[0],
        grid.d1[-1] @ u + g1(k, params, law),
        grid.d2[-1] @ u - g2(k, params, law),
    ])


def monotone_increase_check(law, params, k_samples):
    """True iff g1 and g2 are nondecreasing along the sorted samples."""
    k = np.asarray(k_samples, dtype=float)
    if np.any(np.diff(k) < 0):
        raise ValueError("k_samples must be sorted ascending")
    a = np.array([g1(s, params, law) for s in k])
    b = np.array([g2(s, params, law) for s in k])
    return bool(np.all(np.diff(a) >= 0) and np.all(np.diff(b) >= 0))


_PHI1 = Polynomial([0.0, -1.0, 1.0])       # x(x-1): phi(0)=phi(1)=0, phi'(1)=1, phi''=2
_PHI2 = Polynomial([0.0, 1.0, -2.0, 1.0])  # x(x-1)^2: phi'(1)=0, phi''(1)=2


def admissible_polynomial(coeffs, params, law, curvature=True):
    """Correct a polynomial through the origin so it satisfies the boundary law.

    ``coeffs`` are the coefficients of x, x^2, ... of a random polynomial p
    with p(0) = 0. Because both correction terms vanish at x = 0 and x = 1,
    u(1) = p(1) is known in advance and the two derivative conditions become
    a triangular linear system. With ``curvature=False`` only the u_x(1)
    condition is imposed (the weak-form space).
    """
    p = Polynomial(np.concatenate([[0.0], np.asarray(coeffs, dtype=float)]))
    k = p(1.0)
    c1 = -g1(k, params, law) - p.deriv(1)(1.0)
    u = p + c1 * _PHI1
    if curvature:
        c2 = (g2(k, params, law) - u.deriv(2)(1.0)) / 2.0
        u = u + c2 * _PHI2
    return u


def admissible_sample(rng, grid, params, law, bound=1.0, max_degree=8, curvature=True):
    """Random nodal function satisfying the law's boundary conditions exactly.

    The random part is a polynomial of degree <= ``max_degree`` through the
    origin; it is rescaled until the corrected function has max-norm
    <= ``bound``. Returns nodal values.
    """
    degree = int(rng.integers(1, max_degree + 1))
    coeffs = rng.standard_normal(degree)
    target = bound * rng.uniform(0.05, 1.0)
    poly = Polynomial(np.concatenate([[0.0], coeffs]))
    peak = np.max(np.abs(poly(grid.nodes)))
    if peak > 0:
        coeffs = coeffs * (target / peak)
    for _ in range(60):
        u = admissible_polynomial(coeffs, params, law, curvature)(grid.nodes)
        if np.max(np.abs(u)) <= bound:
            return u
        coeffs = coeffs * 0.5
    raise RuntimeError("could not generate an admissible sample within the bound")
