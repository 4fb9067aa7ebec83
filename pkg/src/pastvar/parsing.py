"""Text specs for distributions.

Grammar: stages separated by ``|``, applied left to right; each stage is a
list of whitespace-separated ``key=value`` tokens, optionally led by a bare
stage keyword::

    family=uniform b=1 | prhr a=3 | linear a=2 b=0
    family=exponential lambda=1.0 | transform=monotonic phi=square

Stage forms:

``family=<name> <params>``
    uniform (b), exponential (lambda), power (k), weibull (shape, scale).
``linear a=<a> b=<b>`` or ``transform=linear ...``
    ``a X + b``; ``b`` defaults to 0.
``prhr a=<a>`` or ``transform=prhr ...``
    cdf ``F**a``.
``monotonic phi=<name>`` or ``transform=monotonic ...``
    one of the named maps in :data:`PHI_CATALOG`.
"""

from __future__ import annotations

import numpy as np

from .distributions import (
    BUILTIN_PARAMS,
    Distribution,
    linear_transform,
    make_builtin,
    monotonic_transform,
    prhr,
)
from .exceptions import SpecParseError

__all__ = ["PHI_CATALOG", "parse_spec"]

PHI_CATALOG = {
    "square": (lambda x: x * x, np.sqrt, lambda x: 2.0 * x),
    "sqrt": (np.sqrt, lambda y: y * y, lambda x: 0.5 / np.sqrt(x)),
    "cube": (lambda x: x ** 3, np.cbrt, lambda x: 3.0 * x * x),
    "reciprocal": (lambda x: 1.0 / x, lambda y: 1.0 / y, lambda x: -1.0 / (x * x)),
    "exp": (np.exp, np.log, np.exp),
}


def _tokens(stage: str) -> tuple[str | None, dict[str, str]]:
    keyword = None
    params: dict[str, str] = {}
    for i, tok in enumerate(stage.split()):
        if "=" not in tok:
            if i == 0:
                keyword = tok.lower()
                continue
            raise SpecParseError(f"expected key=value, got {tok!r}")
        key, _, value = tok.partition("=")
        if not key or not value:
            raise SpecParseError(f"malformed token {tok!r}")
        key = key.lower()
        if key in params:
            raise SpecParseError(f"duplicate key {key!r}")
        params[key] = value
    return keyword, params


def _number(params, key, default=None) -> float:
    if key not in params:
        if default is None:
            raise SpecParseError(f"missing parameter {key!r}")
        return default
    raw = params.pop(key)
    try:
        return float(raw)
    except ValueError:
        raise SpecParseError(f"parameter {key}={raw!r} is not a number") from None


def _no_leftovers(params, stage):
    if params:
        raise SpecParseError(f"unknown parameters {sorted(params)} in stage {stage!r}")


def parse_spec(text: str) -> Distribution:
    """Build a :class:`Distribution` from a spec string.

    Raises
    ------
    SpecParseError
        On malformed syntax, unknown stage keywords or bad parameter names.
    DomainError
        When the values parse but are out of range (e.g. ``b=-1``).
    """
    stages = [s.strip() for s in text.split("|")]
    if not stages or not stages[0]:
        raise SpecParseError("empty distribution spec")
    dist = None
    for stage in stages:
        if not stage:
            raise SpecParseError("empty stage in spec")
        keyword, params = _tokens(stage)
        if "family" in params:
            if keyword is not None or dist is not None:
                raise SpecParseError("family= must start the first stage")
            family = params.pop("family").lower()
            if family not in BUILTIN_PARAMS:
                raise SpecParseError(
                    f"unknown family {family!r}; expected one of {sorted(BUILTIN_PARAMS)}")
            names = BUILTIN_PARAMS[family]
            values = {n: _number(params, n) for n in names if n in params}
            _no_leftovers(params, stage)
            if names[0] not in values:
                raise SpecParseError(f"{family} requires parameter {names[0]!r}")
            dist = make_builtin(family, values)
            continue
        if "transform" in params:
            if keyword is not None:
                raise SpecParseError(f"stage {stage!r} names its transform twice")
            keyword = params.pop("transform").lower()
        if dist is None:
            raise SpecParseError("spec must start with family=<name>")
        if keyword == "linear":
            a, b = _number(params, "a"), _number(params, "b", 0.0)
            _no_leftovers(params, stage)
            dist = linear_transform(dist, a, b)
        elif keyword == "prhr":
            a = _number(params, "a")
            _no_leftovers(params, stage)
            dist = prhr(dist, a)
        elif keyword == "monotonic":
            name = params.pop("phi", None)
            _no_leftovers(params, stage)
            if name not in PHI_CATALOG:
                raise SpecParseError(f"phi must be one of {sorted(PHI_CATALOG)}, got {name!r}")
            dist = monotonic_transform(dist, *PHI_CATALOG[name], label=name)
        else:
            raise SpecParseError(f"unknown stage {keyword!r}")
    return dist
