"""Lifetime distributions and the wrappers built on top of them.

Every distribution lives on a support ``(lower, upper)`` with
``0 <= lower < upper <= inf`` and exposes vectorised ``pdf``, ``cdf``,
``sf`` and ``quantile``. All objects are immutable.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import DomainError

__all__ = [
    "Support",
    "Distribution",
    "Uniform",
    "Exponential",
    "Power",
    "Weibull",
    "LinearTransform",
    "MonotonicTransform",
    "PRHRFamily",
    "InactivityTime",
    "BUILTIN_PARAMS",
    "make_builtin",
    "linear_transform",
    "monotonic_transform",
    "prhr",
]

_BISECTION_TOL = 1e-12
_PROBE_POINTS = 32


@dataclass(frozen=True)
class Support:
    lower: float = 0.0
    upper: float = math.inf

    def __post_init__(self):
        if not self.lower >= 0:
            raise DomainError(f"support lower bound must be >= 0, got {self.lower}")
        if not self.lower < self.upper:
            raise DomainError(
                f"support needs lower < upper, got ({self.lower}, {self.upper})")

    @property
    def bounded(self) -> bool:
        return not math.isinf(self.upper)

    def interior(self, x) -> bool:
        return self.lower < x < self.upper

    def __iter__(self):
        yield self.lower
        yield self.upper


def _arr(x):
    return np.asarray(x, dtype=float)


def _scalar_or_array(out, x):
    if np.ndim(x) == 0:
        return float(out)
    return out


class Distribution(ABC):
    """Absolutely continuous lifetime law.

    Subclasses provide ``pdf``, ``cdf`` and ``support``; ``sf`` and
    ``quantile`` have generic fallbacks (complement and bisection on the
    cdf), which subclasses override when a closed form exists.
    """

    name: str = "distribution"
    support: Support

    @abstractmethod
    def pdf(self, x): ...

    @abstractmethod
    def cdf(self, x): ...

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def pdf_from_lower(self, s):
        """Density at ``lower + s``.

        Quadrature over ``(lower, t)`` runs in the offset ``s`` so that a
        density spike at a shifted lower endpoint stays resolvable; wrappers
        that can evaluate the offset without rounding override this.
        """
        return self.pdf(self.support.lower + _arr(s))

    def quantile(self, p):
        p_arr = _arr(p)
        if np.any((p_arr < 0) | (p_arr > 1)):
            raise DomainError("probabilities must lie in [0, 1]")
        lo_val, hi_val = self.support
        lo = np.full(p_arr.shape, lo_val)
        if math.isinf(hi_val):
            hi = np.full(p_arr.shape, lo_val + 1.0)
            for _ in range(2000):
                short = self.cdf(hi) < p_arr
                if not np.any(short):
                    break
                hi = np.where(short, lo_val + 2.0 * (hi - lo_val), hi)
        else:
            hi = np.full(p_arr.shape, hi_val)
        for _ in range(400):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < p_arr
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= _BISECTION_TOL * (1.0 + np.abs(mid))):
                break
        return _scalar_or_array(0.5 * (lo + hi), p)

    def __str__(self):
        return self.name


# --------------------------------------------------------------------------
# built-in families


@dataclass(frozen=True, eq=True)
class Uniform(Distribution):
    b: float = 1.0

    def __post_init__(self):
        if not self.b > 0:
            raise DomainError(f"uniform upper bound must be > 0, got {self.b}")

    @property
    def support(self):
        return Support(0.0, self.b)

    @property
    def name(self):
        return f"uniform(b={self.b:g})"

    def pdf(self, x):
        x_ = _arr(x)
        out = np.where((x_ >= 0) & (x_ <= self.b), 1.0 / self.b, 0.0)
        return _scalar_or_array(out, x)

    def cdf(self, x):
        return _scalar_or_array(np.clip(_arr(x) / self.b, 0.0, 1.0), x)

    def quantile(self, p):
        return _scalar_or_array(_arr(p) * self.b, p)


@dataclass(frozen=True, eq=True)
class Exponential(Distribution):
    rate: float = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError(f"exponential rate must be > 0, got {self.rate}")

    @property
    def support(self):
        return Support(0.0, math.inf)

    @property
    def name(self):
        return f"exponential(lambda={self.rate:g})"

    def pdf(self, x):
        x_ = _arr(x)
        with np.errstate(over="ignore"):
            out = np.where(x_ >= 0, self.rate * np.exp(-self.rate * np.maximum(x_, 0)), 0.0)
        return _scalar_or_array(out, x)

    def cdf(self, x):
        x_ = np.maximum(_arr(x), 0.0)
        return _scalar_or_array(-np.expm1(-self.rate * x_), x)

    def sf(self, x):
        x_ = np.maximum(_arr(x), 0.0)
        return _scalar_or_array(np.exp(-self.rate * x_), x)

    def quantile(self, p):
        with np.errstate(divide="ignore"):
            return _scalar_or_array(-np.log1p(-_arr(p)) / self.rate, p)


@dataclass(frozen=True, eq=True)
class Power(Distribution):
    """F(x) = x**k on (0, 1)."""

    k: float = 2.0

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"power exponent must be > 0, got {self.k}")

    @property
    def support(self):
        return Support(0.0, 1.0)

    @property
    def name(self):
        return f"power(k={self.k:g})"

    def pdf(self, x):
        x_ = _arr(x)
        inside = (x_ > 0) & (x_ <= 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(inside, self.k * np.where(inside, x_, 1.0) ** (self.k - 1), 0.0)
        return _scalar_or_array(out, x)

    def cdf(self, x):
        return _scalar_or_array(np.clip(_arr(x), 0.0, 1.0) ** self.k, x)

    def quantile(self, p):
        return _scalar_or_array(_arr(p) ** (1.0 / self.k), p)


@dataclass(frozen=True, eq=True)
class Weibull(Distribution):
    shape: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise DomainError("weibull shape and scale must be > 0")

    @property
    def support(self):
        return Support(0.0, math.inf)

    @property
    def name(self):
        return f"weibull(shape={self.shape:g}, scale={self.scale:g})"

    def pdf(self, x):
        x_ = _arr(x)
        inside = x_ > 0
        z = np.where(inside, x_, 1.0) / self.scale
        with np.errstate(over="ignore", under="ignore"):
            dens = (self.shape / self.scale) * z ** (self.shape - 1) * np.exp(-z ** self.shape)
        return _scalar_or_array(np.where(inside, dens, 0.0), x)

    def cdf(self, x):
        z = np.maximum(_arr(x), 0.0) / self.scale
        return _scalar_or_array(-np.expm1(-z ** self.shape), x)

    def sf(self, x):
        z = np.maximum(_arr(x), 0.0) / self.scale
        return _scalar_or_array(np.exp(-z ** self.shape), x)

    def quantile(self, p):
        with np.errstate(divide="ignore"):
            out = self.scale * (-np.log1p(-_arr(p))) ** (1.0 / self.shape)
        return _scalar_or_array(out, p)


BUILTIN_PARAMS = {
    "uniform": ("b",),
    "exponential": ("lambda",),
    "power": ("k",),
    "weibull": ("shape", "scale"),
}
_BUILTIN_CLASSES = {
    "uniform": Uniform,
    "exponential": Exponential,
    "power": Power,
    "weibull": Weibull,
}


def make_builtin(name: str, params) -> Distribution:
    """Build one of the closed-form families by name.

    ``params`` is a sequence in the family's positional order
    (uniform: b; exponential: lambda; power: k; weibull: shape, scale=1)
    or a mapping keyed by those names.
    """
    key = name.strip().lower()
    if key not in _BUILTIN_CLASSES:
        raise DomainError(
            f"unknown family {name!r}; expected one of {sorted(_BUILTIN_CLASSES)}")
    cls, names = _BUILTIN_CLASSES[key], BUILTIN_PARAMS[key]
    if isinstance(params, dict):
        unknown = set(params) - set(names)
        if unknown:
            raise DomainError(f"unknown parameters for {key}: {sorted(unknown)}")
        if names[0] not in params:
            raise DomainError(f"{key} requires parameter {names[0]!r}")
        values = [params[n] for n in names if n in params]
    else:
        values = list(params)
    if not 1 <= len(values) <= len(names):
        raise DomainError(f"{key} takes between 1 and {len(names)} parameters")
    return cls(*(float(v) for v in values))


# --------------------------------------------------------------------------
# wrappers


@dataclass(frozen=True, eq=True)
class LinearTransform(Distribution):
    """Law of ``a * X + b``."""

    base: Distribution
    a: float
    b: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"scale a must be > 0, got {self.a}")
        if not self.b >= 0:
            raise DomainError(f"shift b must be >= 0, got {self.b}")

    @property
    def support(self):
        lo, hi = self.base.support
        return Support(self.a * lo + self.b, self.a * hi + self.b)

    @property
    def name(self):
        return f"{self.base.name} | linear(a={self.a:g}, b={self.b:g})"

    def _back(self, x):
        return (_arr(x) - self.b) / self.a

    def pdf(self, x):
        return _scalar_or_array(_arr(self.base.pdf(self._back(x))) / self.a, x)

    def pdf_from_lower(self, s):
        return _arr(self.base.pdf_from_lower(_arr(s) / self.a)) / self.a

    def cdf(self, x):
        return _scalar_or_array(self.base.cdf(self._back(x)), x)

    def sf(self, x):
        return _scalar_or_array(self.base.sf(self._back(x)), x)

    def quantile(self, p):
        return _scalar_or_array(self.a * _arr(self.base.quantile(p)) + self.b, p)


@dataclass(frozen=True, eq=False)
class MonotonicTransform(Distribution):
    """Law of ``phi(X)`` for a strictly monotonic, differentiable ``phi``.

    The caller supplies ``phi`` together with its inverse and derivative,
    all vectorised over numpy arrays. Use :func:`monotonic_transform` to
    build one with the direction inferred and the triple checked.
    """

    base: Distribution
    phi: Callable
    phi_inverse: Callable
    phi_prime: Callable
    direction: str = "increasing"
    label: str = "phi"
    _support: Support = field(init=False, repr=False)

    def __post_init__(self):
        if self.direction not in ("increasing", "decreasing"):
            raise DomainError(f"direction must be increasing or decreasing, got {self.direction!r}")
        lo, hi = self.base.support
        with np.errstate(all="ignore"):
            ends = np.asarray(self.phi(np.array([lo, hi], dtype=float)), dtype=float)
        if np.any(np.isnan(ends)):
            raise DomainError("phi is undefined at an endpoint of the base support")
        if self.increasing:
            new_lo, new_hi = ends
        else:
            new_hi, new_lo = ends
        object.__setattr__(self, "_support", Support(float(new_lo), float(new_hi)))

    @property
    def increasing(self) -> bool:
        return self.direction == "increasing"

    @property
    def support(self):
        return self._support

    @property
    def name(self):
        return f"{self.base.name} | monotonic({self.label})"

    def _inverse(self, y):
        y_ = _arr(y)
        lo, hi = self._support
        inside = (y_ > lo) & (y_ < hi)
        safe = np.where(inside, y_, 0.5 * (lo + hi) if math.isfinite(hi) else lo + 1.0)
        with np.errstate(all="ignore"):
            return inside, _arr(self.phi_inverse(safe))

    def pdf(self, y):
        inside, x = self._inverse(y)
        with np.errstate(all="ignore"):
            dens = _arr(self.base.pdf(x)) / np.abs(_arr(self.phi_prime(x)))
        return _scalar_or_array(np.where(inside, dens, 0.0), y)

    def cdf(self, y):
        y_ = _arr(y)
        inside, x = self._inverse(y_)
        inner = self.base.cdf(x) if self.increasing else self.base.sf(x)
        out = np.where(inside, inner, np.where(y_ <= self._support.lower, 0.0, 1.0))
        return _scalar_or_array(out, y)

    def sf(self, y):
        y_ = _arr(y)
        inside, x = self._inverse(y_)
        inner = self.base.sf(x) if self.increasing else self.base.cdf(x)
        out = np.where(inside, inner, np.where(y_ <= self._support.lower, 1.0, 0.0))
        return _scalar_or_array(out, y)

    def quantile(self, p):
        p_ = _arr(p)
        q = self.base.quantile(p_ if self.increasing else 1.0 - p_)
        with np.errstate(all="ignore"):
            return _scalar_or_array(_arr(self.phi(_arr(q))), p)


@dataclass(frozen=True, eq=True)
class PRHRFamily(Distribution):
    """Proportional reversed hazards member: cdf ``F(t)**a``.

    For integer ``a = n`` this is the lifetime of a parallel system of ``n``
    iid units with lifetime cdf ``F``.
    """

    base: Distribution
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"PRHR parameter a must be > 0, got {self.a}")

    @property
    def support(self):
        return self.base.support

    @property
    def name(self):
        return f"{self.base.name} | prhr(a={self.a:g})"

    def pdf(self, x):
        F = _arr(self.base.cdf(x))
        f = _arr(self.base.pdf(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where((F > 0) & (f > 0), self.a * F ** (self.a - 1.0) * f, 0.0)
        return _scalar_or_array(out, x)

    def cdf(self, x):
        return _scalar_or_array(_arr(self.base.cdf(x)) ** self.a, x)

    def sf(self, x):
        F = _arr(self.base.cdf(x))
        with np.errstate(divide="ignore"):
            out = np.where(F > 0, -np.expm1(self.a * np.log(np.where(F > 0, F, 1.0))), 1.0)
        return _scalar_or_array(out, x)

    def quantile(self, p):
        return _scalar_or_array(self.base.quantile(_arr(p) ** (1.0 / self.a)), p)


@dataclass(frozen=True, eq=True)
class InactivityTime(Distribution):
    """Law of ``t - X`` given ``X <= t``."""

    base: Distribution
    t: float

    def __post_init__(self):
        if not self.base.support.lower < self.t:
            raise DomainError(f"t={self.t} must exceed the base support lower bound")
        if not self.base.cdf(self.t) > 0:
            raise DomainError(f"F({self.t}) = 0; inactivity time undefined")

    @property
    def _mass(self):
        return float(self.base.cdf(self.t))

    @property
    def support(self):
        return Support(0.0, self.t - self.base.support.lower)

    @property
    def name(self):
        return f"inactivity({self.base.name}, t={self.t:g})"

    def pdf(self, x):
        x_ = _arr(x)
        inside = (x_ >= 0) & (x_ <= self.support.upper)
        out = np.where(inside, _arr(self.base.pdf(self.t - x_)) / self._mass, 0.0)
        return _scalar_or_array(out, x)

    def cdf(self, x):
        x_ = np.clip(_arr(x), 0.0, self.support.upper)
        return _scalar_or_array(1.0 - _arr(self.base.cdf(self.t - x_)) / self._mass, x)

    def sf(self, x):
        x_ = np.clip(_arr(x), 0.0, self.support.upper)
        return _scalar_or_array(_arr(self.base.cdf(self.t - x_)) / self._mass, x)

    def quantile(self, p):
        inner = _arr(self.base.quantile((1.0 - _arr(p)) * self._mass))
        return _scalar_or_array(self.t - inner, p)


# --------------------------------------------------------------------------
# constructors


def linear_transform(base: Distribution, a: float, b: float = 0.0) -> LinearTransform:
    return LinearTransform(base, float(a), float(b))


def prhr(base: Distribution, a: float) -> PRHRFamily:
    return PRHRFamily(base, float(a))


def _probe_grid(base: Distribution) -> np.ndarray:
    return np.asarray(base.quantile(np.linspace(0.02, 0.98, _PROBE_POINTS)), dtype=float)


def monotonic_transform(base, phi, phi_inverse, phi_prime, label="phi") -> MonotonicTransform:
    """Wrap ``base`` as the law of ``phi(X)``.

    The direction is read off the sign of ``phi_prime`` on a 32-point probe
    grid of base quantiles; the same grid checks that ``phi_inverse`` undoes
    ``phi`` and that ``phi`` itself moves in that direction.

    Raises
    ------
    DomainError
        If the triple is inconsistent on the probe grid or the image of the
        support is not a subset of ``[0, inf]``.
    """
    x = _probe_grid(base)
    with np.errstate(all="ignore"):
        y = _arr(phi(x))
        back = _arr(phi_inverse(y))
        slope = _arr(phi_prime(x))
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(slope))):
        raise DomainError("phi or phi_prime is not finite on the probe grid")
    if np.all(slope > 0):
        direction = "increasing"
    elif np.all(slope < 0):
        direction = "decreasing"
    else:
        raise DomainError("phi_prime changes sign or vanishes on the probe grid")
    steps = np.diff(y)
    if direction == "increasing" and not np.all(steps > 0):
        raise DomainError("phi_prime > 0 but phi is not increasing on the probe grid")
    if direction == "decreasing" and not np.all(steps < 0):
        raise DomainError("phi_prime < 0 but phi is not decreasing on the probe grid")
    if not np.all(np.abs(back - x) <= 1e-8 * (1.0 + np.abs(x))):
        raise DomainError("phi_inverse does not invert phi on the probe grid")
    return MonotonicTransform(base, phi, phi_inverse, phi_prime, direction, label)
