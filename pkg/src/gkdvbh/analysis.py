"""
Norms, decay-rate fits, guaranteed decay envelopes and the inequality oracles.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import control
from .control import ControlLaw
from .errors import HypothesisNotMet, InsufficientDataError
from .model import ModelParams, monotonicity_gap, monotonicity_shift, weak_pairing
from .spectral import build_grid, integrate

ENVELOPE_SLACK = 1.05


def l2_norm(state, grid):
    u = grid.check(getattr(state, "values", state))
    return math.sqrt(integrate(u * u, grid))


def h1_seminorm(state, grid):
    u = grid.check(getattr(state, "values", state))
    ux = grid.d1 @ u
    return math.sqrt(integrate(ux * ux, grid))


def max_norm(state):
    u = np.asarray(getattr(state, "values", state), dtype=float)
    return float(np.max(np.abs(u))) if u.size else 0.0


@dataclass
class RunRecord:
    times: np.ndarray
    l2: np.ndarray
    h1_semi: np.ndarray
    linf: np.ndarray
    u_at_1: np.ndarray
    bc_residuals: np.ndarray
    newton_iters: np.ndarray
    config_echo: dict = field(default_factory=dict)
    law: ControlLaw = ControlLaw.OPEN
    # diagnostics over every accepted step, not only the samples
    max_step_bc_residual: float = 0.0
    l2_increases: int = 0
    failed_at: float = None

    def __len__(self):
        return len(self.times)

    @property
    def psi(self):
        """||u_x||^2 + u(1)^2 at each sample."""
        return self.h1_semi**2 + self.u_at_1**2

    def truncated(self, floor=0.0):
        """Copy keeping only the leading samples with l2 > floor."""
        keep = np.argmax(self.l2 <= floor) if np.any(self.l2 <= floor) else len(self)
        sl = slice(0, keep)
        return RunRecord(
            self.times[sl], self.l2[sl], self.h1_semi[sl], self.linf[sl], self.u_at_1[sl],
            self.bc_residuals[sl], self.newton_iters[sl], self.config_echo, self.law,
            self.max_step_bc_residual, self.l2_increases, self.failed_at,
        )


class RecordBuilder:
    """Accumulates samples during a simulation."""

    def __init__(self, grid, params, law, config_echo=None):
        self.grid, self.params, self.law = grid, params, law
        self.config_echo = dict(config_echo or {})
        self.rows = []
        self.max_bc = 0.0
        self.l2_increases = 0
        self._last_l2 = None

    def track(self, state):
        res = control.boundary_residual(state, self.grid, self.params, self.law)
        self.max_bc = max(self.max_bc, float(np.max(np.abs(res))))
        l2 = l2_norm(state, self.grid)
        if self._last_l2 is not None and l2 > self._last_l2:
            self.l2_increases += 1
        self._last_l2 = l2

    def add(self, state, newton_iters):
        g = self.grid
        u = state.values
        if not self.rows:
            self._last_l2 = l2_norm(state, g)
        self.rows.append((
            state.time, l2_norm(state, g), h1_seminorm(state, g), max_norm(state), u[-1],
            *control.boundary_residual(state, g, self.params, self.law), newton_iters,
        ))

    def build(self, failed_at=None):
        a = np.array(self.rows, dtype=float).reshape(-1, 9)
        return RunRecord(
            times=a[:, 0], l2=a[:, 1], h1_semi=a[:, 2], linf=a[:, 3], u_at_1=a[:, 4],
            bc_residuals=a[:, 5:8], newton_iters=a[:, 8].astype(int),
            config_echo=self.config_echo, law=self.law,
            max_step_bc_residual=self.max_bc, l2_increases=self.l2_increases,
            failed_at=failed_at,
        )


# --- guaranteed rates ------------------------------------------------------

def flux_law_l2_rate(params):
    """L2 decay rate nu - beta (1-gamma)^2 / 4 of the flux feedback laws.

    Returns ``(rate, applies)``; the guarantee needs a positive rate.
    """
    rate = params.nu - params.beta * (1 - params.gamma) ** 2 / 4
    return rate, rate > 0


def _convective_bound(params):
    d = params.delta
    return params.alpha**2 / (2 * params.beta * (d + 2) ** (2 * (d + 1) / (d + 2)))


def simple_law_threshold(params):
    """Dissipation threshold for the simple law; returns ``(nu > M, M)``."""
    d, b, g = params.delta, params.beta, params.gamma
    m = max(params.alpha**2 / (2 * b * (2 * d + 1)), b * (1 + g**2) / 2 + _convective_bound(params))
    return params.nu > m, m


def simple_law_rate(params, theta):
    """Rate nu - a^2/(2 theta b (d+2)^(2(d+1)/(d+2))) - b(1+g^2)/(2 theta)."""
    if not (0.0 < theta < 1.0):
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    return params.nu - _convective_bound(params) / theta - params.beta * (1 + params.gamma**2) / (2 * theta)


def simple_law_theta_floor(params):
    """Smallest theta with a positive simple-law rate (valid thetas are above it).

    The rate increases with theta, so there is no interior maximiser; the
    useful information is where the admissible interval starts. Returns
    None when no theta in (0, 1) works.
    """
    need = _convective_bound(params) + params.beta * (1 + params.gamma**2) / 2
    floor = need / params.nu
    return floor if floor < 1.0 else None


# --- fits and envelopes ----------------------------------------------------

def fit_decay_rate(record, window=None):
    """Least-squares slope of ln(l2) against t over ``window``.

    Default window is [0.2 T, 0.9 T]. Returns ``(slope, r_squared)``.
    """
    t = np.asarray(record.times)
    if window is None:
        T = t[-1]
        window = (0.2 * T, 0.9 * T)
    t0, t1 = window
    mask = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
    if mask.sum() < 5:
        raise InsufficientDataError(f"only {int(mask.sum())} samples in window {window}; need 5")
    y = np.asarray(record.l2)[mask]
    if np.any(y <= 0):
        raise InsufficientDataError("l2 is not positive on the window; truncate the record first")
    x = t[mask]
    logy = np.log(y)
    slope, intercept = np.polyfit(x, logy, 1)
    resid = logy - (slope * x + intercept)
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(r2)


def envelope_check_l2(record, rate, slack=0.05):
    """True iff l2(t) <= l2(0) exp(-rate t) (1 + slack) at every sample."""
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    bound = record.l2[0] * np.exp(-rate * record.times) * (1 + slack)
    return bool(np.all(record.l2 <= bound))


def _simple_law_setup(record, params, theta):
    if record.law is not ControlLaw.SIMPLE:
        raise HypothesisNotMet(f"envelope applies to the simple law only, record uses {record.law.value!r}")
    ok, m = simple_law_threshold(params)
    if not ok:
        raise HypothesisNotMet(f"nu={params.nu} does not exceed the simple-law threshold {m:.6g}")
    rate = simple_law_rate(params, theta)
    if rate <= 0:
        raise HypothesisNotMet(
            f"theta={theta} gives a non-positive rate {rate:.6g}; "
            f"choose theta > {simple_law_theta_floor(params):.6g}"
        )
    return rate


def h1_envelope(record, params, theta):
    """Upper bound on ||u_x||^2 + u(1)^2 at the record's sample times."""
    rate = _simple_law_setup(record, params, theta)
    c = (rate + 2 * (params.mu + 1)) / rate + params.beta * (1 + params.gamma) ** 2 / (
        2 * theta * (1 - theta) * params.nu
    )
    amplitude = record.psi[0] + c * record.l2[0] ** 2
    return amplitude * np.exp(-rate * record.times / 2)


def envelope_check_h1(record, params, theta=0.5, slack=ENVELOPE_SLACK):
    return bool(np.all(record.psi <= slack * h1_envelope(record, params, theta)))


def envelope_check_pointwise(record, params, theta=0.5, slack=ENVELOPE_SLACK):
    return bool(np.all(record.linf <= slack * 4 * h1_envelope(record, params, theta)))


# --- randomized oracle suites ----------------------------------------------

@dataclass
class CheckResult:
    name: str
    trials: int = 0
    failures: list = field(default_factory=list)
    worst_margin: float = math.inf

    def record(self, trial, margin, tol):
        self.trials += 1
        self.worst_margin = min(self.worst_margin, margin)
        if margin < -tol:
            self.failures.append((trial, margin))

    @property
    def passed(self):
        return self.trials > 0 and not self.failures


@dataclass
class OracleReport:
    checks: dict

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    @property
    def failures(self):
        return [(name, f) for name, c in self.checks.items() for f in c.failures]

    def lines(self):
        for c in self.checks.values():
            status = "PASS" if c.passed else "FAIL"
            yield f"{status}  {c.name:<28} trials={c.trials:<5d} failures={len(c.failures):<3d} worst_margin={c.worst_margin:+.3e}"


def _random_polynomial_values(rng, grid, max_degree=10):
    degree = int(rng.integers(1, max_degree + 1))
    coeffs = np.concatenate([[0.0], rng.standard_normal(degree)])
    w = np.polynomial.polynomial.polyval(grid.nodes, coeffs)
    peak = np.max(np.abs(w))
    return w / peak if peak > 0 else w


def _rng(seed, index):
    return np.random.default_rng([seed, index])


def inequality_oracles(seed=42, trials=100, n_points=33, kte_alpha=None, params=None):
    """Randomized discrete checks of the functional inequalities.

    Covers Poincare, Agmon, the L^(2(delta+1)) Agmon variant for delta in
    {1, 2, 3}, nonnegativity of ((u-v)_xxx, u-v) and the boundary identity
    (u_xxx, u) = (delta - 1/2) g1(u(1))^2 + u_x(0)^2 / 2 under the flux laws.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    grid = build_grid(n_points) if kte_alpha is None else build_grid(n_points, kte_alpha)
    base = params or ModelParams()
    names = ["poincare", "agmon"] + [f"agmon_l{2 * (d + 1)}_delta{d}" for d in (1, 2, 3)]
    names += ["dispersion_monotone_flux_d1", "dispersion_monotone_flux_d2",
              "boundary_identity_flux_d1", "boundary_identity_flux_d2"]
    checks = {n: CheckResult(n) for n in names}
    ineq_tol, ident_tol = 1e-8, 1e-6

    for i in range(trials):
        rng = _rng(seed, i)
        w = _random_polynomial_values(rng, grid)
        wx = grid.d1 @ w
        l2 = math.sqrt(integrate(w * w, grid))
        semi = math.sqrt(integrate(wx * wx, grid))
        peak = float(np.max(np.abs(w)))
        checks["poincare"].record(i, semi**2 - l2**2, ineq_tol)
        checks["agmon"].record(i, math.sqrt(2 * l2 * semi) - peak, ineq_tol)
        for d in (1, 2, 3):
            p = 2 * (d + 1)
            lp = integrate(w**p, grid) ** (1 / p)
            bound = (d + 2) ** (1 / (d + 2)) * lp ** ((d + 1) / (d + 2)) * semi ** (1 / (d + 2))
            checks[f"agmon_l{p}_delta{d}"].record(i, bound - peak, ineq_tol)

        for law, d in ((ControlLaw.FLUX_D1, 1), (ControlLaw.FLUX_D2, 2)):
            prm = _with(base, delta=d)
            u = control.admissible_sample(rng, grid, prm, law)
            v = control.admissible_sample(rng, grid, prm, law)
            diff = u - v
            disp = integrate((grid.d3 @ diff) * diff, grid)
            checks[f"dispersion_monotone_{law.value}"].record(i, disp, ident_tol)
            lhs = integrate((grid.d3 @ u) * u, grid)
            rhs = (d - 0.5) * control.g1(u[-1], prm, law) ** 2 + 0.5 * (grid.d1[0] @ u) ** 2
            checks[f"boundary_identity_{law.value}"].record(i, -abs(lhs - rhs), ident_tol)
    return OracleReport(checks)


def _with(params, **changes):
    values = {k: getattr(params, k) for k in ModelParams.__dataclass_fields__}
    values.update(changes)
    return ModelParams(**values)


def functional_suite(seed=7, trials=200, n_points=33, kte_alpha=None, params=None, deltas=(1, 2)):
    """Coercivity and shifted-monotonicity margins for admissible functions.

    For each delta in ``deltas`` the matching flux law is used, functions are
    drawn with max-norm <= rho, and the shift is the smallest admissible one.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    grid = build_grid(n_points) if kte_alpha is None else build_grid(n_points, kte_alpha)
    base = params or ModelParams()
    laws = {1: ControlLaw.FLUX_D1, 2: ControlLaw.FLUX_D2}
    checks = {}
    tol = 1e-6
    for d in deltas:
        prm = _with(base, delta=d)
        law = laws[d]
        rate, _ = flux_law_l2_rate(prm)
        omega = monotonicity_shift(prm)
        coer = checks.setdefault(f"coercivity_{law.value}", CheckResult(f"coercivity_{law.value}"))
        mono = checks.setdefault(f"monotonicity_{law.value}", CheckResult(f"monotonicity_{law.value}"))
        for i in range(trials):
            rng = _rng(seed + 1000 * d, i)
            v = control.admissible_sample(rng, grid, prm, law, bound=prm.rho_cut, curvature=False)
            w = control.admissible_sample(rng, grid, prm, law, bound=prm.rho_cut, curvature=False)
            margin = weak_pairing(v, v, grid, prm, law) - rate * integrate(v * v, grid)
            coer.record(i, margin, tol)
            mono.record(i, monotonicity_gap(v, w, omega, grid, prm, law), tol)
    return OracleReport(checks)
