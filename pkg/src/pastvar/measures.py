"""Information and reliability measures of lifetimes and past lifetimes.

Conventions: ``f``/``F`` are the density and cdf of ``X``; the past
lifetime at ``t`` is ``X | X <= t`` and the inactivity time is
``t - X | X <= t``; the residual lifetime is ``X - t | X > t``.

Most functions take ``method``:

``"auto"``
    closed form for built-in families when one is known, else quadrature.
``"closed_form"``
    closed form or :class:`DomainError`.
``"quadrature"``
    always integrate numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from .distributions import (
    Distribution,
    Exponential,
    PRHRFamily,
    Power,
    Uniform,
    Weibull,
)
from .exceptions import ConvergenceError, DomainError
from .quadrature import QuadratureConfig, integrate

__all__ = [
    "F_MIN",
    "MeasureValue",
    "PastContext",
    "entropy",
    "varentropy",
    "past_entropy",
    "past_varentropy",
    "residual_entropy",
    "residual_varentropy",
    "reversed_hazard",
    "cumulative_reversed_hazard",
    "generalized_reversed_hazard",
    "mean_inactivity_time",
    "variance_inactivity_time",
    "past_entropy_derivative",
    "past_varentropy_derivative",
    "prhr_past_entropy",
    "prhr_past_varentropy",
    "discrete_entropy",
    "discrete_varentropy",
]

# Conditioning on events with smaller probability is refused.
F_MIN = 1e-10

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
GAMMA_SUBSTITUTION = "gamma_substitution"
_METHODS = ("auto", CLOSED_FORM, QUADRATURE)
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class MeasureValue:
    value: float
    numerical_error: float
    method: str

    def __post_init__(self):
        if self.method not in (CLOSED_FORM, QUADRATURE, GAMMA_SUBSTITUTION):
            raise ValueError(f"unknown method tag {self.method!r}")
        if not self.numerical_error >= 0:
            raise ValueError("numerical_error must be >= 0")
        if (self.numerical_error == 0) != (self.method == CLOSED_FORM):
            raise ValueError("numerical_error must be 0 exactly for closed forms")

    def __float__(self):
        return float(self.value)


def _closed(value) -> MeasureValue:
    return MeasureValue(float(value), 0.0, CLOSED_FORM)


def _numeric(value, err, method=QUADRATURE) -> MeasureValue:
    return MeasureValue(float(value), max(float(err), _TINY), method)


@dataclass(frozen=True)
class PastContext:
    """A distribution conditioned on failure by time ``t``."""

    dist: Distribution
    t: float

    def __post_init__(self):
        t = float(self.t)
        if not self.dist.support.interior(t):
            lo, hi = self.dist.support
            raise DomainError(f"t={t} is not interior to the support ({lo}, {hi})")
        if not float(self.dist.cdf(t)) >= F_MIN:
            raise DomainError(f"F({t}) < {F_MIN:g}; past lifetime is ill-conditioned")

    @property
    def mass(self) -> float:
        return float(self.dist.cdf(self.t))

    @property
    def lower(self) -> float:
        return self.dist.support.lower


def _residual_context(dist, t):
    t = float(t)
    lo, hi = dist.support
    if not lo <= t < hi:
        raise DomainError(f"t={t} outside [{lo}, {hi}) for a residual lifetime")
    tail = float(dist.sf(t))
    if not tail >= F_MIN:
        raise DomainError(f"survival {tail:g} at t={t} is below {F_MIN:g}")
    return tail


def _xlogk(f, k):
    f = np.asarray(f, dtype=float)
    pos = f > 0
    logf = np.log(np.where(pos, f, 1.0))
    return np.where(pos, f * logf ** k, 0.0)


def _integral(g, lo, hi, cfg):
    res = integrate(g, lo, hi, cfg)
    if not res.converged:
        raise ConvergenceError(
            f"quadrature on ({lo}, {hi}) did not converge: "
            f"error {res.error_estimate:.3g} after {res.subdivisions_used} panels")
    return res.value, res.error_estimate


def _moment_integral(dist, lo, hi, k, cfg):
    """Integral of f * (log f)**k over (lo, hi)."""
    return _integral(lambda x: _xlogk(dist.pdf(x), k), lo, hi, cfg)


def _past_integral(dist, t, h, cfg):
    """Integral of ``h(f(x))`` over ``(lower, t)``, taken in the offset from ``lower``."""
    lo = dist.support.lower
    return _integral(lambda s: h(np.asarray(dist.pdf_from_lower(s), dtype=float)),
                     0.0, t - lo, cfg)


def _check_method(method):
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")


# --------------------------------------------------------------------------
# closed forms for the built-in families


def _exp_tail_ratio(u):
    """exp(-u) / (1 - exp(-u)), stable for small u."""
    return 1.0 / math.expm1(u)


def _cf_entropy(d):
    if isinstance(d, Uniform):
        return math.log(d.b)
    if isinstance(d, Exponential):
        return 1.0 - math.log(d.rate)
    if isinstance(d, Power):
        return (d.k - 1.0) / d.k - math.log(d.k)
    if isinstance(d, Weibull):
        return np.euler_gamma * (1.0 - 1.0 / d.shape) + math.log(d.scale / d.shape) + 1.0
    return None


def _cf_varentropy(d):
    if isinstance(d, Uniform):
        return 0.0
    if isinstance(d, Exponential):
        return 1.0
    if isinstance(d, Power):
        return ((d.k - 1.0) / d.k) ** 2
    if isinstance(d, Weibull):
        # -log f = const - r log W + W with W ~ Exp(1), r = (k-1)/k;
        # Var(log W) = pi^2/6, Cov(log W, W) = digamma(2) - digamma(1) = 1.
        r = (d.shape - 1.0) / d.shape
        cov = digamma(2.0) - digamma(1.0)
        return r * r * math.pi ** 2 / 6.0 + 1.0 - 2.0 * r * cov
    return None


def _cf_past_entropy(d, t):
    if isinstance(d, Uniform):
        return math.log(t)
    if isinstance(d, Exponential):
        u = d.rate * t
        return 1.0 + math.log(-math.expm1(-u) / d.rate) - u * _exp_tail_ratio(u)
    if isinstance(d, Power):
        return math.log(t) + (d.k - 1.0) / d.k - math.log(d.k)
    return None


def _cf_past_varentropy(d, t):
    if isinstance(d, Uniform):
        return 0.0
    if isinstance(d, Exponential):
        # rate^2 * Var(X | X <= t) for the truncated exponential
        u = d.rate * t
        return 1.0 - u * u * math.exp(-u) / math.expm1(-u) ** 2
    if isinstance(d, Power):
        return ((d.k - 1.0) / d.k) ** 2
    return None


def _cf_residual_entropy(d, t):
    if isinstance(d, Uniform):
        return math.log(d.b - t)
    if isinstance(d, Exponential):
        return 1.0 - math.log(d.rate)
    return None


def _cf_residual_varentropy(d, t):
    if isinstance(d, Uniform):
        return 0.0
    if isinstance(d, Exponential):
        return 1.0
    return None


def _cf_mean_inactivity(d, t):
    if isinstance(d, Uniform):
        return 0.5 * t
    if isinstance(d, Exponential):
        u = d.rate * t
        return t - 1.0 / d.rate + t * _exp_tail_ratio(u)
    if isinstance(d, Power):
        return t / (d.k + 1.0)
    return None


def _cf_variance_inactivity(d, t):
    if isinstance(d, Uniform):
        return t * t / 12.0
    if isinstance(d, Exponential):
        u = d.rate * t
        return (1.0 - u * u * math.exp(-u) / math.expm1(-u) ** 2) / d.rate ** 2
    if isinstance(d, Power):
        k = d.k
        return t * t * k / ((k + 1.0) ** 2 * (k + 2.0))
    return None


def _dispatch(method, closed_fn, *args):
    """Return a closed-form MeasureValue, or None when quadrature should run."""
    _check_method(method)
    if method == QUADRATURE:
        return None
    value = closed_fn(*args)
    if value is None:
        if method == CLOSED_FORM:
            raise DomainError(f"no closed form for {args[0].name}")
        return None
    return _closed(value)


# --------------------------------------------------------------------------
# whole-lifetime measures


def entropy(dist: Distribution, *, method="auto", cfg: QuadratureConfig | None = None) -> MeasureValue:
    """Differential entropy ``-int f log f`` over the support."""
    cf = _dispatch(method, _cf_entropy, dist)
    if cf is not None:
        return cf
    lo, hi = dist.support
    i1, e1 = _moment_integral(dist, lo, hi, 1, cfg)
    return _numeric(-i1, e1)


def varentropy(dist: Distribution, *, method="auto", cfg: QuadratureConfig | None = None) -> MeasureValue:
    """Variance of the information content ``-log f(X)``."""
    cf = _dispatch(method, _cf_varentropy, dist)
    if cf is not None:
        return cf
    lo, hi = dist.support
    i1, e1 = _moment_integral(dist, lo, hi, 1, cfg)
    i2, e2 = _moment_integral(dist, lo, hi, 2, cfg)
    return _numeric(i2 - i1 * i1, e2 + 2 * abs(i1) * e1)


# --------------------------------------------------------------------------
# past lifetime


def past_entropy(dist: Distribution, t: float, *, method="auto", route="log_split",
                 cfg: QuadratureConfig | None = None) -> MeasureValue:
    """Entropy of the past lifetime ``X | X <= t``.

    Quadrature routes: ``"log_split"`` evaluates
    ``log F(t) - (1/F(t)) int f log f`` (a single integral of the
    unconditioned density); ``"conditional"`` integrates the conditional
    density ``f/F(t)`` directly.
    """
    ctx = PastContext(dist, t)
    cf = _dispatch(method, _cf_past_entropy, dist, ctx.t)
    if cf is not None:
        return cf
    F = ctx.mass
    if route == "log_split":
        i1, e1 = _past_integral(dist, ctx.t, lambda f: _xlogk(f, 1), cfg)
        return _numeric(math.log(F) - i1 / F, e1 / F)
    if route == "conditional":
        i1, e1 = _past_integral(dist, ctx.t, lambda f: _xlogk(f / F, 1), cfg)
        return _numeric(-i1, e1)
    raise ValueError(f"unknown route {route!r}")


def past_varentropy(dist: Distribution, t: float, *, method="auto", route="log_split",
                    cfg: QuadratureConfig | None = None) -> MeasureValue:
    """Varentropy of the past lifetime ``X | X <= t``.

    Quadrature routes: ``"log_split"`` is
    ``(1/F) int f (log f)^2 - ((1/F) int f log f)^2``;
    ``"conditional"`` takes the same two moments of ``log(f/F)``;
    ``"centered"`` integrates ``(f/F)(log(f/F) + H)^2`` after computing the
    past entropy ``H``, which avoids cancellation when the variance is small
    relative to the squared mean.
    """
    ctx = PastContext(dist, t)
    cf = _dispatch(method, _cf_past_varentropy, dist, ctx.t)
    if cf is not None:
        return cf
    F, lo, t = ctx.mass, ctx.lower, ctx.t
    if route == "log_split":
        i1, e1 = _past_integral(dist, t, lambda f: _xlogk(f, 1), cfg)
        i2, e2 = _past_integral(dist, t, lambda f: _xlogk(f, 2), cfg)
        m1 = i1 / F
        return _numeric(i2 / F - m1 * m1, (e2 + 2 * abs(m1) * e1) / F)
    if route == "conditional":
        i1, e1 = _past_integral(dist, t, lambda f: _xlogk(f / F, 1), cfg)
        i2, e2 = _past_integral(dist, t, lambda f: _xlogk(f / F, 2), cfg)
        return _numeric(i2 - i1 * i1, e2 + 2 * abs(i1) * e1)
    if route == "centered":
        h = past_entropy(dist, t, method=QUADRATURE, cfg=cfg)

        def g(f):
            f = f / F
            pos = f > 0
            dev = np.log(np.where(pos, f, 1.0)) + h.value
            return np.where(pos, f * dev * dev, 0.0)

        v, ev = _past_integral(dist, t, g, cfg)
        return _numeric(v, ev)
    raise ValueError(f"unknown route {route!r}")


# --------------------------------------------------------------------------
# residual lifetime


def residual_entropy(dist: Distribution, t: float, *, method="auto",
                     cfg: QuadratureConfig | None = None) -> MeasureValue:
    """Entropy of the residual lifetime ``X - t | X > t``."""
    tail = _residual_context(dist, t)
    if float(t) == dist.support.lower:
        return entropy(dist, method=method, cfg=cfg)
    cf = _dispatch(method, _cf_residual_entropy, dist, float(t))
    if cf is not None:
        return cf
    i1, e1 = _moment_integral(dist, float(t), dist.support.upper, 1, cfg)
    return _numeric(math.log(tail) - i1 / tail, e1 / tail)


def residual_varentropy(dist: Distribution, t: float, *, method="auto",
                        cfg: QuadratureConfig | None = None) -> MeasureValue:
    """Varentropy of the residual lifetime ``X - t | X > t``."""
    tail = _residual_context(dist, t)
    if float(t) == dist.support.lower:
        return varentropy(dist, method=method, cfg=cfg)
    cf = _dispatch(method, _cf_residual_varentropy, dist, float(t))
    if cf is not None:
        return cf
    hi = dist.support.upper
    i1, e1 = _moment_integral(dist, float(t), hi, 1, cfg)
    i2, e2 = _moment_integral(dist, float(t), hi, 2, cfg)
    m1 = i1 / tail
    return _numeric(i2 / tail - m1 * m1, (e2 + 2 * abs(m1) * e1) / tail)


# --------------------------------------------------------------------------
# reversed hazards


def _positive_cdf(dist, t):
    F = np.asarray(dist.cdf(t), dtype=float)
    if np.any(F <= 0):
        raise DomainError("F(t) = 0: reversed hazard undefined")
    return F


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def reversed_hazard(dist: Distribution, t):
    """``f(t) / F(t)``; vectorised over ``t``."""
    F = _positive_cdf(dist, t)
    return _out(np.asarray(dist.pdf(t), dtype=float) / F, t)


def cumulative_reversed_hazard(dist: Distribution, t):
    """``-log F(t)``; vectorised over ``t``."""
    return _out(-np.log(_positive_cdf(dist, t)), t)


def generalized_reversed_hazard(dist: Distribution, t, alpha: float):
    """``f(t) / F(t)**(1 - alpha)``; ``alpha = 0`` gives the reversed hazard."""
    F = _positive_cdf(dist, t)
    return _out(np.asarray(dist.pdf(t), dtype=float) / F ** (1.0 - alpha), t)


# --------------------------------------------------------------------------
# inactivity time


def mean_inactivity_time(dist: Distribution, t: float, *, method="auto",
                         cfg: QuadratureConfig | None = None) -> MeasureValue:
    """``E[t - X | X <= t] = (1/F(t)) int_0^t F(x) dx``."""
    ctx = PastContext(dist, t)
    cf = _dispatch(method, _cf_mean_inactivity, dist, ctx.t)
    if cf is not None:
        return cf
    i, e = _integral(dist.cdf, ctx.lower, ctx.t, cfg)
    return _numeric(i / ctx.mass, e / ctx.mass)


def variance_inactivity_time(dist: Distribution, t: float, *, method="auto",
                             cfg: QuadratureConfig | None = None) -> MeasureValue:
    """``Var(t - X | X <= t)``.

    The nested integral ``int_0^t dy int_0^y F(x) dx`` is evaluated as the
    single integral ``int_0^t (t - x) F(x) dx`` (order of integration
    swapped), giving ``(2/F(t)) * that - m(t)^2``.
    """
    ctx = PastContext(dist, t)
    cf = _dispatch(method, _cf_variance_inactivity, dist, ctx.t)
    if cf is not None:
        return cf
    F, t = ctx.mass, ctx.t
    m = mean_inactivity_time(dist, t, method=QUADRATURE, cfg=cfg)
    i, e = _integral(lambda x: (t - x) * np.asarray(dist.cdf(x), dtype=float), ctx.lower, t, cfg)
    var = 2.0 * i / F - m.value ** 2
    err = 2.0 * e / F + 2.0 * abs(m.value) * m.numerical_error
    if var < -10 * err - 1e-14:
        raise ConvergenceError(f"variance inactivity time came out negative ({var:.3g})")
    return _numeric(max(var, 0.0), err)


# --------------------------------------------------------------------------
# derivatives


def past_entropy_derivative(dist: Distribution, t: float, *, method="auto",
                            cfg: QuadratureConfig | None = None) -> float:
    """``q(t) * (1 - H(t) - log q(t))``, where H(t) is the past entropy."""
    h = past_entropy(dist, t, method=method, cfg=cfg).value
    q = reversed_hazard(dist, t)
    return q * (1.0 - h - math.log(q))


def past_varentropy_derivative(dist: Distribution, t: float, *, method="auto",
                               cfg: QuadratureConfig | None = None) -> float:
    """``-q(t) * (V(t) - (H(t) + log q(t))**2)`` for past entropy H and varentropy V."""
    h = past_entropy(dist, t, method=method, cfg=cfg).value
    v = past_varentropy(dist, t, method=method, cfg=cfg).value
    q = reversed_hazard(dist, t)
    return -q * (v - (h + math.log(q)) ** 2)


# --------------------------------------------------------------------------
# PRHR family through the substitution y = F(x)**a


def _log_density_at_level(fam: PRHRFamily):
    """``y -> log(a * y**(1-1/a) * f(Q(y**(1/a))))``: log density of the
    member at the point where its cdf equals ``y``."""
    a = fam.a
    base = fam.base

    def log_density(y):
        y = np.asarray(y, dtype=float)
        f = np.asarray(base.pdf(base.quantile(y ** (1.0 / a))), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return math.log(a) + (1.0 - 1.0 / a) * np.log(y) + np.log(f)

    return log_density


def _substitution_setup(fam, t):
    if not isinstance(fam, PRHRFamily):
        raise TypeError("expected a PRHRFamily")
    return PastContext(fam, t).mass, _log_density_at_level(fam)


def prhr_past_entropy(fam: PRHRFamily, t: float, *, cfg: QuadratureConfig | None = None) -> MeasureValue:
    """Past entropy of a PRHR member, integrating over the level ``y = F(x)**a``
    from 0 to ``F(t)**a`` instead of over ``x``. Requires the base quantile.
    """
    y_max, log_density = _substitution_setup(fam, t)
    i1, e1 = _integral(log_density, 0.0, y_max, cfg)
    return _numeric(math.log(y_max) - i1 / y_max, e1 / y_max, GAMMA_SUBSTITUTION)


def prhr_past_varentropy(fam: PRHRFamily, t: float, *, cfg: QuadratureConfig | None = None) -> MeasureValue:
    """Past varentropy of a PRHR member via the same substitution."""
    y_max, log_density = _substitution_setup(fam, t)
    i1, e1 = _integral(log_density, 0.0, y_max, cfg)
    i2, e2 = _integral(lambda y: log_density(y) ** 2, 0.0, y_max, cfg)
    m1 = i1 / y_max
    return _numeric(i2 / y_max - m1 * m1, (e2 + 2 * abs(m1) * e1) / y_max, GAMMA_SUBSTITUTION)


# --------------------------------------------------------------------------
# discrete case


def _probabilities(p):
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise DomainError("empty probability vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise DomainError("probabilities must be finite and non-negative")
    if abs(math.fsum(p) - 1.0) > 1e-12:
        raise DomainError(f"probabilities sum to {math.fsum(p)!r}, not 1")
    return p[p > 0]


def discrete_entropy(p) -> float:
    """``-sum p log p``; zero entries contribute nothing."""
    p = _probabilities(p)
    return float(-math.fsum(p * np.log(p)))


def discrete_varentropy(p) -> float:
    """``sum p (log p)^2 - H^2``, accumulated as ``sum p (log p + H)^2``."""
    p = _probabilities(p)
    h = -math.fsum(p * np.log(p))
    dev = np.log(p) + h
    return float(math.fsum(p * dev * dev))
