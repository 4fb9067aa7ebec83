"""Numerical verifiers for identities, characterizations and bounds on
past entropy and past varentropy.

Every ``check_*`` function returns a report instead of raising when a
claimed identity fails: a falsified claim is data, not an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import simpson

from . import measures as ms
from .distributions import (
    Distribution,
    InactivityTime,
    LinearTransform,
    MonotonicTransform,
    PRHRFamily,
)
from .exceptions import ConvergenceError, DomainError
from .quadrature import cumulative_integrate, differentiate, integrate

__all__ = [
    "CheckReport",
    "BoundReport",
    "OmegaFunction",
    "check_entropy_derivative",
    "check_varentropy_derivative",
    "check_constant_varentropy",
    "entropy_hazard_sum",
    "check_constant_sum_form",
    "check_generalized_hazard_equivalence",
    "check_linear_transform",
    "check_monotonic_transform",
    "check_reversed_hazard_relations",
    "check_prhr_dual_route",
    "omega_function",
    "check_lower_bound",
    "is_log_concave",
    "check_upper_bound_logconcave",
    "default_t_grid",
    "monotonic_transform_rhs",
]

CLOSED_TOL = 1e-7
NUMERIC_TOL = 1e-5


@dataclass(frozen=True)
class CheckReport:
    name: str
    applicable: bool
    passed: bool
    max_residual: float
    t_grid: tuple = ()
    residuals: tuple = ()
    detail: str = ""

    @property
    def ok(self) -> bool:
        """True unless the check applied and failed."""
        return self.passed or not self.applicable


@dataclass(frozen=True)
class BoundReport:
    """Pointwise comparison of two sides of an inequality.

    ``orientation`` is ``"ge"`` for ``lhs >= rhs`` and ``"le"`` for
    ``lhs <= rhs``; ``margin`` is positive when the bound holds strictly.
    """

    name: str
    t_grid: tuple
    lhs: tuple
    rhs: tuple
    satisfied: tuple
    margin: tuple
    orientation: str = "ge"
    tolerance: float = 1e-6
    applicable: bool = True
    detail: str = ""

    @classmethod
    def build(cls, name, t_grid, lhs, rhs, orientation="ge", tolerance=1e-6, detail=""):
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        margin = lhs - rhs if orientation == "ge" else rhs - lhs
        return cls(
            name=name,
            t_grid=tuple(map(float, t_grid)),
            lhs=tuple(map(float, lhs)),
            rhs=tuple(map(float, rhs)),
            satisfied=tuple(bool(m >= -tolerance) for m in margin),
            margin=tuple(map(float, margin)),
            orientation=orientation,
            tolerance=tolerance,
            detail=detail,
        )

    @classmethod
    def not_applicable(cls, name, t_grid, detail):
        return cls(name, tuple(map(float, t_grid)), (), (), (), (), applicable=False, detail=detail)

    @property
    def passed(self) -> bool:
        return self.applicable and all(self.satisfied)

    @property
    def ok(self) -> bool:
        return self.passed or not self.applicable

    @property
    def max_residual(self) -> float:
        """Largest violation of the bound (0 when it holds everywhere)."""
        if not self.margin:
            return 0.0
        return max(0.0, -min(self.margin))


def _report(name, t_grid, residuals, tol, detail=""):
    residuals = np.abs(np.asarray(residuals, dtype=float))
    worst = float(residuals.max()) if residuals.size else 0.0
    return CheckReport(name, True, bool(worst <= tol), worst,
                       tuple(map(float, t_grid)), tuple(map(float, residuals)), detail)


def _tol_for(*values):
    return CLOSED_TOL if all(v.method == ms.CLOSED_FORM for v in values) else NUMERIC_TOL


# --------------------------------------------------------------------------
# derivative identities


FD_STEP = 1e-3


def _fd_step(dist, t, step):
    """Step hint for the derivative checks.

    ``None`` picks ``FD_STEP``, shrunk so the stencil stays within a
    hundredth of the distance from ``t`` to the support boundary; curvature
    of the past measures scales with that distance.
    """
    if step is not None:
        return step
    lo, hi = dist.support
    room = min(t - lo, hi - t)
    return min(FD_STEP, room / (100.0 * max(1.0, abs(t))))


def check_entropy_derivative(dist, t, step=None, *, method="auto", cfg=None) -> float:
    """|finite difference of the past entropy - q (1 - H - log q)| at ``t``."""
    fd = differentiate(lambda s: ms.past_entropy(dist, s, method=method, cfg=cfg).value,
                       t, _fd_step(dist, t, step), tuple(dist.support))
    return abs(fd - ms.past_entropy_derivative(dist, t, method=method, cfg=cfg))


def check_varentropy_derivative(dist, t, step=None, *, method="auto", cfg=None) -> float:
    """|finite difference of the past varentropy - -q (V - (H + log q)^2)| at ``t``."""
    fd = differentiate(lambda s: ms.past_varentropy(dist, s, method=method, cfg=cfg).value,
                       t, _fd_step(dist, t, step), tuple(dist.support))
    return abs(fd - ms.past_varentropy_derivative(dist, t, method=method, cfg=cfg))


# --------------------------------------------------------------------------
# characterizations


def entropy_hazard_sum(dist, t_grid, cfg=None):
    """Past entropy plus log reversed hazard, ``H(t) + log q(t)``, on the grid.

    Constant in ``t`` exactly for the laws covered by the two checks below.
    """
    return np.array([
        ms.past_entropy(dist, t, cfg=cfg).value + math.log(ms.reversed_hazard(dist, t))
        for t in t_grid
    ])


def check_constant_varentropy(dist, t_grid, *, spread_tol=1e-6, tol=NUMERIC_TOL,
                              cfg=None) -> CheckReport:
    """If the past varentropy equals a constant ``v`` on the grid, then
    ``|H + log q| = sqrt(v)`` at every grid point."""
    v = np.array([ms.past_varentropy(dist, t, cfg=cfg).value for t in t_grid])
    if np.ptp(v) > spread_tol:
        return CheckReport("constant-varentropy", False, False, 0.0, tuple(t_grid),
                           detail=f"past varentropy varies by {np.ptp(v):.3g}")
    v0 = max(float(v.mean()), 0.0)
    resid = np.abs(entropy_hazard_sum(dist, t_grid, cfg)) - math.sqrt(v0)
    return _report("constant-varentropy", t_grid, resid, tol, detail=f"v={v0:.12g}")


def check_constant_sum_form(dist, c=None, t_grid=(), *, sum_tol=1e-6, tol=NUMERIC_TOL,
                            cfg=None) -> CheckReport:
    """If ``H + log q = c`` on the grid then
    ``V(t) = c^2 + (V(X) - c^2) / F(t)``.

    With ``c=None`` the constant is estimated as the grid mean of
    ``H + log q`` and then held fixed.
    """
    terms = entropy_hazard_sum(dist, t_grid, cfg)
    if c is None:
        c = float(terms.mean())
    dev = float(np.max(np.abs(terms - c)))
    if dev > sum_tol:
        return CheckReport("constant-sum-form", False, False, 0.0, tuple(t_grid),
                           detail=f"H + log q deviates from c={c:.6g} by {dev:.3g}")
    v_total = ms.varentropy(dist, cfg=cfg).value
    resid = [
        ms.past_varentropy(dist, t, cfg=cfg).value
        - (c * c + (v_total - c * c) / float(dist.cdf(t)))
        for t in t_grid
    ]
    return _report("constant-sum-form", t_grid, resid, tol, detail=f"c={c:.12g}")


def check_generalized_hazard_equivalence(dist, c, t_grid, *, const_tol=1e-6, tol=1e-6,
                                         cfg=None) -> CheckReport:
    """``f / F**c`` is constant (and equal to ``exp(c - H(X))``) exactly when
    ``H + log q = c`` on the grid.

    The check passes when the two conditions hold or fail together, and,
    when they hold, the constant matches ``exp(c - H(X))``.
    """
    q = np.asarray(ms.generalized_reversed_hazard(dist, np.asarray(t_grid, float), 1.0 - c))
    spread = float(np.ptp(q))
    constant = spread <= const_tol * max(1.0, float(np.abs(q).mean()))
    sum_dev = float(np.max(np.abs(entropy_hazard_sum(dist, t_grid, cfg) - c)))
    sum_constant = sum_dev <= const_tol
    detail = f"f/F^c spread={spread:.3g}, sum deviation={sum_dev:.3g}"
    if constant and sum_constant:
        target = math.exp(c - ms.entropy(dist, cfg=cfg).value)
        resid = q - target
        rep = _report("generalized-hazard-equivalence", t_grid, resid, tol,
                      detail=f"{detail}, exp(c-H)={target:.12g}")
        return rep
    passed = constant == sum_constant
    return CheckReport("generalized-hazard-equivalence", True, passed, 0.0 if passed else 1.0,
                       tuple(map(float, t_grid)), detail=detail)


# --------------------------------------------------------------------------
# transforms


def check_linear_transform(dist, a, b, t_grid, *, cfg=None) -> CheckReport:
    """For ``Y = aX + b``: ``V_Y(t) = V_X((t-b)/a)`` and
    ``H_Y(t) = H_X((t-b)/a) + log a``; ``t_grid`` is on the ``Y`` scale."""
    y = LinearTransform(dist, float(a), float(b))
    # the transformed law has no closed form, so both sides use quadrature
    kw = {"method": ms.QUADRATURE, "cfg": cfg}
    resid, tols = [], []
    for t in t_grid:
        s = (t - b) / a
        vy = ms.past_varentropy(y, t, **kw)
        vx = ms.past_varentropy(dist, s, **kw)
        hy = ms.past_entropy(y, t, **kw)
        hx = ms.past_entropy(dist, s, **kw)
        resid.append(max(abs(vy.value - vx.value), abs(hy.value - hx.value - math.log(a))))
        tols.append(_tol_for(vy, vx, hy, hx))
    return _report("linear-transform", t_grid, resid, max(tols),
                   detail=f"a={a:g}, b={b:g}")


def _conditional_log_terms(dist, lo, hi, mass, phi_prime, sign, cfg):
    """E[B], E[B^2] and E[A B] under the density f/mass on (lo, hi), with
    A = log(f/mass) and B = log(sign * phi_prime)."""

    def integrand(power_a, power_b):
        def g(x):
            f = np.asarray(dist.pdf(x), dtype=float)
            pos = f > 0
            safe = np.where(pos, f, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                bb = np.log(sign * np.asarray(phi_prime(x), dtype=float))
            term = (safe / mass) * np.log(safe / mass) ** power_a * bb ** power_b
            return np.where(pos, term, 0.0)
        return g

    out = []
    for pa, pb in ((0, 1), (0, 2), (1, 1)):
        res = integrate(integrand(pa, pb), lo, hi, cfg)
        if not res.converged:
            raise ConvergenceError("conditional expectation did not converge")
        out.append(res.value)
    return tuple(out)


def monotonic_transform_rhs(y: MonotonicTransform, t, *, cfg=None):
    """Past entropy and varentropy of ``Y = phi(X)`` at ``t`` rebuilt from
    measures of ``X``.

    Increasing ``phi``, with ``s = phi^{-1}(t)`` and ``B = log phi'(X)``:
    ``H_Y = H_X(s) + E[B | X < s]`` and
    ``V_Y = V_X(s) - 2 E[log(f/F(s)) B | X < s] + Var[B | X < s]
    - 2 H_X(s) E[B | X < s]``.
    Decreasing ``phi`` uses the residual lifetime ``X | X > s``,
    ``F̄(s)`` and ``B = log(-phi'(X))`` instead.
    """
    x = y.base
    s = float(y.phi_inverse(np.float64(t)))
    lo, hi = x.support
    if y.increasing:
        mass = float(x.cdf(s))
        h_x = ms.past_entropy(x, s, cfg=cfg).value
        v_x = ms.past_varentropy(x, s, cfg=cfg).value
        e_b, e_bb, e_ab = _conditional_log_terms(x, lo, s, mass, y.phi_prime, 1.0, cfg)
    else:
        mass = float(x.sf(s))
        h_x = ms.residual_entropy(x, s, cfg=cfg).value
        v_x = ms.residual_varentropy(x, s, cfg=cfg).value
        e_b, e_bb, e_ab = _conditional_log_terms(x, s, hi, mass, y.phi_prime, -1.0, cfg)
    h_y = h_x + e_b
    v_y = v_x - 2.0 * e_ab + (e_bb - e_b * e_b) - 2.0 * h_x * e_b
    return h_y, v_y


def check_monotonic_transform(y: MonotonicTransform, t_grid, *, tol=NUMERIC_TOL,
                              cfg=None) -> CheckReport:
    """Past entropy and varentropy of ``Y = phi(X)`` computed directly on
    the transformed law against :func:`monotonic_transform_rhs`."""
    resid = []
    for t in t_grid:
        h_direct = ms.past_entropy(y, t, method="quadrature", cfg=cfg).value
        v_direct = ms.past_varentropy(y, t, method="quadrature", cfg=cfg).value
        h_rhs, v_rhs = monotonic_transform_rhs(y, t, cfg=cfg)
        resid.append(max(abs(h_direct - h_rhs), abs(v_direct - v_rhs)))
    return _report("monotonic-transform", t_grid, resid, tol,
                   detail=f"{y.label}, {y.direction}")


# --------------------------------------------------------------------------
# consistency relations and PRHR


def check_reversed_hazard_relations(dist, t_grid, *, step=1e-4, cfg=None) -> CheckReport:
    """``exp(-int_t^sup q) = F(t)`` (tolerance 1e-7) and
    ``q = (1 - m')/m`` with ``m`` the mean inactivity time (tolerance 1e-5)."""
    hi = dist.support.upper
    resid = []
    for t in t_grid:
        tail = integrate(lambda x: ms.reversed_hazard(dist, x), t, hi, cfg)
        r1 = abs(math.exp(-tail.value) - float(dist.cdf(t)))
        m = ms.mean_inactivity_time(dist, t, cfg=cfg).value
        dm = differentiate(lambda s: ms.mean_inactivity_time(dist, s, cfg=cfg).value,
                           t, step, dist.support)
        r2 = abs((1.0 - dm) / m - ms.reversed_hazard(dist, t))
        # scale the first residual so a single 1e-5 threshold covers both
        resid.append(max(r1 * (NUMERIC_TOL / 1e-7), r2))
    return _report("reversed-hazard-relations", t_grid, resid, NUMERIC_TOL)


def check_prhr_dual_route(dist, a, t_grid, *, tol=1e-6, cfg=None) -> CheckReport:
    """Substitution route vs direct quadrature on ``F**a`` for past H and V."""
    fam = PRHRFamily(dist, float(a))
    resid = []
    for t in t_grid:
        dh = ms.prhr_past_entropy(fam, t, cfg=cfg).value - ms.past_entropy(fam, t, cfg=cfg).value
        dv = ms.prhr_past_varentropy(fam, t, cfg=cfg).value - ms.past_varentropy(fam, t, cfg=cfg).value
        resid.append(max(abs(dh), abs(dv)))
    return _report("prhr-dual-route", t_grid, resid, tol, detail=f"a={a:g}")


# --------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class OmegaFunction:
    """Weight function of the inactivity time on a grid over ``(0, t - lower)``.

    Defined by ``sigma2 * omega(x) * g(x) = int_0^x (mean - z) g(z) dz`` where
    ``g`` is the inactivity-time density and ``mean``/``sigma2`` its moments.
    """

    dist: Distribution
    t: float
    grid: np.ndarray = field(repr=False)
    omega_values: np.ndarray = field(repr=False)
    omega_prime_values: np.ndarray = field(repr=False)
    mean: float = 0.0
    sigma2: float = 0.0
    relation_residual: float = 0.0

    def expected_derivative(self) -> float:
        """``E[omega'(t - X) | X <= t]`` by Simpson's rule on the grid."""
        dens = np.asarray(InactivityTime(self.dist, self.t).pdf(self.grid), dtype=float)
        return float(simpson(self.omega_prime_values * dens, x=self.grid))


def _fill_ends(x, w, ok):
    """Fill omega where the density vanishes: interpolate inside, extrapolate
    quadratically at the ends."""
    if ok.all():
        return w
    w = w.copy()
    idx = np.flatnonzero(ok)
    inner = ~ok & (np.arange(len(x)) > idx[0]) & (np.arange(len(x)) < idx[-1])
    w[inner] = np.interp(x[inner], x[ok], w[ok])
    for i in range(idx[0] - 1, -1, -1):
        w[i] = 3 * w[i + 1] - 3 * w[i + 2] + w[i + 3]
    for i in range(idx[-1] + 1, len(x)):
        w[i] = 3 * w[i - 1] - 3 * w[i - 2] + w[i - 3]
    return w


def omega_function(dist, t, grid_size=1024, *, cfg=None) -> OmegaFunction:
    """Tabulate ``omega`` and ``omega'`` for the inactivity time at ``t``.

    The running integral uses a 10-point Gauss rule per grid cell; ``omega'``
    comes from second-order finite differences on the grid. The defining
    relation is re-checked at 8 grid points against adaptive quadrature and
    the worst discrepancy stored as ``relation_residual``.
    """
    ctx = ms.PastContext(dist, t)
    inact = InactivityTime(dist, ctx.t)
    mean = ms.mean_inactivity_time(dist, t, cfg=cfg).value
    sigma2 = ms.variance_inactivity_time(dist, t, cfg=cfg).value
    if sigma2 <= 1e-14:
        raise DomainError(f"variance inactivity time {sigma2:.3g} is degenerate")
    x = np.linspace(0.0, inact.support.upper, int(grid_size))
    dens = np.asarray(inact.pdf(x), dtype=float)

    def weighted(z):
        return (mean - z) * np.asarray(inact.pdf(z), dtype=float)

    running = cumulative_integrate(weighted, x)
    ok = dens > 1e-12 * dens.max()
    with np.errstate(divide="ignore", invalid="ignore"):
        omega = np.where(ok, running / (sigma2 * np.where(ok, dens, 1.0)), 0.0)
    omega = _fill_ends(x, omega, ok)
    omega_prime = np.gradient(omega, x, edge_order=2)

    probes = np.unique(np.linspace(1, len(x) - 2, 8).astype(int))
    worst = 0.0
    for i in probes:
        ref = integrate(weighted, 0.0, float(x[i]), cfg).value
        worst = max(worst, abs(sigma2 * omega[i] * dens[i] - ref))
    return OmegaFunction(dist, float(t), x, omega, omega_prime, mean, sigma2, worst)


def check_lower_bound(dist, t_grid, *, grid_size=1024, tol=1e-6, cfg=None) -> BoundReport:
    """``V(t) >= sigma2(t) * E[omega'(t - X) | X <= t]^2`` at each grid point."""
    lhs, rhs = [], []
    for t in t_grid:
        om = omega_function(dist, t, grid_size, cfg=cfg)
        lhs.append(ms.past_varentropy(dist, t, cfg=cfg).value)
        rhs.append(om.sigma2 * om.expected_derivative() ** 2)
    return BoundReport.build("omega-lower-bound", t_grid, lhs, rhs, "ge", tol)


def is_log_concave(dist, n_points=256, threshold=1e-8) -> bool:
    """Heuristic: second differences of ``log f`` on a grid between the
    0.001 and 0.999 quantiles never exceed ``threshold``."""
    lo, hi = dist.quantile(np.array([1e-3, 1.0 - 1e-3]))
    x = np.linspace(float(lo), float(hi), n_points)
    f = np.asarray(dist.pdf(x), dtype=float)
    if np.any(f <= 0):
        return False
    second = np.diff(np.log(f), 2)
    return bool(np.all(second <= threshold))


def check_upper_bound_logconcave(dist, t_grid, *, tol=1e-6, cfg=None) -> BoundReport:
    """``V(t) <= 1`` for log-concave densities; not applicable otherwise."""
    if not is_log_concave(dist):
        return BoundReport.not_applicable("logconcave-upper-bound", t_grid,
                                          "log-concavity failed")
    v = [ms.past_varentropy(dist, t, cfg=cfg).value for t in t_grid]
    return BoundReport.build("logconcave-upper-bound", t_grid, v, np.ones(len(v)), "le", tol)


def default_t_grid(dist: Distribution, n=10, lo_p=0.1, hi_p=0.9) -> Sequence[float]:
    """Grid of ``n`` times at evenly spaced probabilities of ``dist``."""
    return [float(v) for v in dist.quantile(np.linspace(lo_p, hi_p, n))]
