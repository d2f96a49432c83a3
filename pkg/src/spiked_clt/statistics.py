"""Linear spectral statistics ``sum_k f(x_k)``: the function ``f`` and what it needs from the support."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

from .errors import DomainError

KINDS = ("linear", "polynomial", "lrt", "capacity", "log1p", "chebyshev")


@dataclass(frozen=True)
class LinearStatistic:
    """A real statistic ``f`` with optional derivative.

    ``domain_lower`` is the greatest lower bound of the real domain of ``f``
    (``-inf`` when unrestricted); ``f`` is defined strictly above it.
    """

    name: str
    params: tuple
    evaluate: Callable = field(repr=False, compare=False)
    derivative: Callable | None = field(default=None, repr=False, compare=False)
    domain_lower: float = -math.inf
    requires_positive_support: bool = False

    def __call__(self, x):
        return self.evaluate(x)

    @property
    def unrestricted(self):
        return self.domain_lower == -math.inf


@dataclass(frozen=True)
class DomainViolation:
    statistic: str
    bound: float
    support_lower: float

    def __str__(self):
        return (f"statistic {self.statistic!r} is only defined above {self.bound:g}, "
                f"but the support starts at {self.support_lower:g}")


def make_statistic(kind: str, params=(), interval=None) -> LinearStatistic:
    """Build a catalogued statistic.

    ``polynomial`` takes coefficients in increasing degree, ``lrt`` takes ``c``,
    ``capacity`` takes ``T``. ``chebyshev`` takes Chebyshev coefficients interpreted on
    ``interval`` (a ``(lo, hi)`` pair or anything with ``a``/``b`` attributes).
    """
    params = tuple(float(p) for p in params)
    if kind == "linear":
        _arity(kind, params, 0)
        return LinearStatistic("linear", (), lambda x: np.asarray(x, dtype=float) * 1.0,
                               lambda x: np.ones_like(np.asarray(x, dtype=float)))
    if kind == "polynomial":
        if not params:
            raise DomainError("polynomial needs at least one coefficient")
        p = Polynomial(params)
        dp = p.deriv()
        return LinearStatistic("polynomial", params, p, dp)
    if kind == "lrt":
        _arity(kind, params, 1)
        (c,) = params
        if not c > 1:
            raise DomainError(f"lrt needs c > 1 so that the support stays away from 0, got c={c}", c)
        return LinearStatistic(
            "lrt", params,
            lambda x: np.asarray(x) / c - np.log(np.asarray(x) / c) - 1,
            lambda x: 1 / c - 1 / np.asarray(x),
            domain_lower=0.0, requires_positive_support=True)
    if kind == "capacity":
        _arity(kind, params, 1)
        (T,) = params
        if not T > 0:
            raise DomainError(f"capacity needs T > 0, got T={T}", T)
        return LinearStatistic(
            "capacity", params,
            lambda x: np.log1p(np.asarray(x) / T),
            lambda x: 1 / (T + np.asarray(x)),
            domain_lower=-T)
    if kind == "log1p":
        _arity(kind, params, 0)
        return LinearStatistic("log1p", (), np.log1p, lambda x: 1 / (1 + np.asarray(x)),
                               domain_lower=-1.0)
    if kind == "chebyshev":
        if not params:
            raise DomainError("chebyshev needs at least one coefficient")
        if interval is None:
            raise DomainError("chebyshev coefficients need an interval")
        lo, hi = (interval.a, interval.b) if hasattr(interval, "a") else interval
        if not hi > lo:
            raise DomainError(f"chebyshev interval must satisfy lo < hi, got ({lo}, {hi})")
        series = Chebyshev(params, domain=[lo, hi])
        return LinearStatistic("chebyshev", params + (lo, hi), series, series.deriv())
    raise DomainError(f"unknown statistic kind {kind!r}; expected one of {', '.join(KINDS)}")


def _arity(kind, params, n):
    if len(params) != n:
        raise DomainError(f"{kind} takes {n} parameter(s), got {len(params)}")


def check_domain(stat: LinearStatistic, interval) -> DomainViolation | None:
    """Return ``None`` when ``stat`` is defined on the whole support, else the violation."""
    if stat.unrestricted or stat.domain_lower < interval.a:
        return None
    return DomainViolation(stat.name, stat.domain_lower, interval.a)


def evaluate_statistic(stat: LinearStatistic, x):
    arr = np.asarray(x, dtype=float)
    if not stat.unrestricted:
        bad = arr <= stat.domain_lower
        if np.any(bad):
            value = float(arr[bad].flat[0]) if arr.ndim else float(arr)
            raise DomainError(f"{stat.name} is undefined at x={value!r} (needs x > {stat.domain_lower:g})",
                              value)
    out = stat.evaluate(arr)
    return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)


def parse_statistic(text: str, c: float | None = None, T: float | None = None, interval=None):
    """Parse the CLI syntax ``linear|lrt|capacity:T=<v>|log1p|poly:c0,c1,...|cheb[@lo,hi]:a0,a1,...``.

    ``lrt`` without an explicit ``c`` takes the model's ``c``; ``capacity`` without ``T=``
    falls back to ``T`` (e.g. derived from SNR flags).  ``cheb`` without ``@lo,hi`` uses ``interval``.
    """
    head, _, body = text.strip().partition(":")
    head = head.strip().lower()
    if head == "linear" and not body:
        return make_statistic("linear")
    if head == "log1p" and not body:
        return make_statistic("log1p")
    if head == "lrt":
        if body:
            key, _, val = body.partition("=")
            c = float(val if val else key)
        if c is None:
            raise DomainError("lrt needs c (pass lrt:c=<v> or a model with --c)")
        return make_statistic("lrt", [c])
    if head == "capacity":
        if body:
            key, _, val = body.partition("=")
            if key.strip().upper() != "T" or not val:
                raise DomainError(f"capacity expects 'capacity:T=<v>', got {text!r}")
            T = float(val)
        if T is None:
            raise DomainError("capacity needs T (capacity:T=<v> or the SNR flags)")
        return make_statistic("capacity", [T])
    if head in ("poly", "polynomial"):
        return make_statistic("polynomial", _floats(body, text))
    if head.startswith("cheb"):
        _, at, bounds = head.partition("@")
        if at:
            lo, hi = _floats(bounds, text)
            interval = (lo, hi)
        return make_statistic("chebyshev", _floats(body, text), interval=interval)
    raise DomainError(f"cannot parse statistic {text!r}")


def _floats(body, text):
    try:
        vals = [float(v) for v in body.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"non-numeric coefficient in {text!r}") from None
    if not vals:
        raise DomainError(f"no coefficients in {text!r}")
    return vals
