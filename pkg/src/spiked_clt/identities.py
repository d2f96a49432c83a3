"""Executable formula sheet: closed-form integrals against the support's arcsine and semicircle weights.

Each entry pairs a closed form (``lhs``) with an adaptive quadrature of the defining
integral (``rhs``).  Quadrature runs in the angle variable ``x = center + h cos(theta)``,
where ``dx / sqrt((b-x)(x-a)) = dtheta`` and ``sqrt((b-x)(x-a)) dx = h^2 sin^2(theta) dtheta``.
Principal values use QUADPACK's Cauchy weight after writing
``1/(cos(phi) - cos(theta)) = g(theta) / (theta - phi)`` with ``g`` smooth.

Keys follow the catalogue labels used throughout the project (``C248`` ... ``CG``).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DomainError

PI = math.pi
_QUAD = dict(epsabs=1e-15, epsrel=1e-13, limit=400)


def _geometry(a, b):
    return 0.5 * (a + b), 0.5 * (b - a)


def _arcsine(g, a, b):
    """``int_a^b g(x) / sqrt((b-x)(x-a)) dx``; complex-valued ``g`` allowed."""
    c0, h = _geometry(a, b)
    re = quad(lambda t: complex(g(c0 + h * math.cos(t))).real, 0, PI, **_QUAD)[0]
    im = quad(lambda t: complex(g(c0 + h * math.cos(t))).imag, 0, PI, **_QUAD)[0]
    return re if im == 0 else complex(re, im)


def _pv(g, a, b, y, semicircle):
    """``PV int_a^b g(x) w(x) / (y - x) dx`` with ``w`` = 1/sqrt(...) or sqrt(...)."""
    c0, h = _geometry(a, b)
    phi = math.acos(max(-1.0, min(1.0, (y - c0) / h)))

    def smooth(t):
        # (cos(phi) - cos(t)) = (t - phi) * sin((t+phi)/2) * sinc((t-phi)/(2 pi))
        val = g(c0 + h * math.cos(t)) / (h * math.sin(0.5 * (t + phi)) * np.sinc((t - phi) / (2 * PI)))
        return val * (h * math.sin(t)) ** 2 if semicircle else val

    return quad(smooth, 0, PI, weight="cauchy", wvar=phi, **_QUAD)[0]


def _branch_root(z, a, b):
    """``sqrt((z-a)(z-b))`` on the branch that behaves like ``z - center`` at infinity."""
    A = np.sqrt(complex((z - a) * (z - b)))
    if (A / (z - 0.5 * (a + b))).real < 0:
        A = -A
    return A if isinstance(z, complex) else A.real


@dataclass(frozen=True)
class Identity:
    key: str
    needs: tuple
    closed_form: Callable
    integral: Callable
    unit_interval: bool = False
    description: str = ""


def _c250_lhs(a, b, t):
    r = math.sqrt(a * b)
    return PI / r * math.log(((r + math.sqrt((t + a) * (t + b))) ** 2 - t * t) / (math.sqrt(a) + math.sqrt(b)) ** 2)


def _c251_lhs(a, b, t):
    s = math.sqrt((a + t) * (b + t))
    return (PI * (math.sqrt(a + t) - math.sqrt(b + t)) ** 2 / 2
            + PI * (a + b) / 2 * math.log((2 * (t + s) + a + b) / 4))


def _c254_lhs(a, b):
    r = math.sqrt(a * b)
    return PI / r * math.log((1 - (r - math.sqrt((1 - a) * (1 - b))) ** 2) / (math.sqrt(a) + math.sqrt(b)) ** 2)


def _c255_lhs(a, b):
    return (2 * PI / math.sqrt((1 - a) * (1 - b))
            * math.log(1 / (2 * math.sqrt(1 - a)) + 1 / (2 * math.sqrt(1 - b))))


def _ch_lhs(a, b, z):
    A = _branch_root(z, a, b)
    num = 2 * A + 2 * z - a - b
    den = 2 * A * math.sqrt((1 - a) * (1 - b)) + z * (2 - a - b) - a - b + 2 * a * b
    return _log_ratio(A, num, den)


def _cg_lhs(a, b, t, z):
    A = _branch_root(z, a, b)
    B = a + b - 2 * z
    u = t + z
    num = 2 * A * A + B * u + 2 * A * math.sqrt((t + a) * (t + b))
    den = u * u * (B + 2 * A)
    return _log_ratio(A, num, den)


def _log_ratio(A, num, den):
    if isinstance(A, complex):
        return PI / A * np.log(complex(num) / complex(den))
    return PI / A * math.log(num / den)


CATALOG = {
    "C248": Identity(
        "C248", ("a", "b", "t"),
        lambda a, b, t: 2 * PI * math.log((math.sqrt(t + a) + math.sqrt(t + b)) / 2),
        lambda a, b, t: _arcsine(lambda x: math.log(x + t), a, b),
        description="log(x+t) against the arcsine weight"),
    "C263": Identity(
        "C263", ("a", "b", "t"),
        lambda a, b, t: PI / math.sqrt((t + a) * (t + b)),
        lambda a, b, t: _arcsine(lambda x: 1 / (x + t), a, b),
        description="1/(x+t) against the arcsine weight"),
    "C264": Identity(
        "C264", ("a", "b"),
        lambda a, b: PI,
        lambda a, b: _arcsine(lambda x: 1.0, a, b),
        description="arcsine weight mass"),
    "C265": Identity(
        "C265", ("a", "b"),
        lambda a, b: PI * (a + b) / 2,
        lambda a, b: _arcsine(lambda x: x, a, b),
        description="first moment of the arcsine weight"),
    "C250": Identity(
        "C250", ("a", "b", "t"), _c250_lhs,
        lambda a, b, t: _arcsine(lambda x: math.log(x + t) / x, a, b),
        description="log(x+t)/x against the arcsine weight"),
    "C251": Identity(
        "C251", ("a", "b", "t"), _c251_lhs,
        lambda a, b, t: _arcsine(lambda x: x * math.log(x + t), a, b),
        description="x log(x+t) against the arcsine weight"),
    "C253": Identity(
        "C253", ("a", "b"),
        lambda a, b: 2 * PI * math.log((math.sqrt(1 - a) + math.sqrt(1 - b)) / 2),
        lambda a, b: _arcsine(lambda x: math.log1p(-x), a, b),
        unit_interval=True, description="log(1-x) against the arcsine weight"),
    "C254": Identity(
        "C254", ("a", "b"), _c254_lhs,
        lambda a, b: _arcsine(lambda x: math.log1p(-x) / x, a, b),
        unit_interval=True, description="log(1-x)/x against the arcsine weight"),
    "C255": Identity(
        "C255", ("a", "b"), _c255_lhs,
        lambda a, b: _arcsine(lambda x: math.log1p(-x) / (x - 1), a, b),
        unit_interval=True, description="log(1-x)/(x-1) against the arcsine weight"),
    "C266": Identity(
        "C266", ("a", "b", "y"),
        lambda a, b, y: 0.0,
        lambda a, b, y: _pv(lambda x: 1.0, a, b, y, semicircle=False),
        description="PV Hilbert transform of the arcsine weight"),
    "C267": Identity(
        "C267", ("a", "b", "y"),
        lambda a, b, y: PI * (1 - math.sqrt(a * b) / y),
        lambda a, b, y: _pv(lambda x: 1 / x, a, b, y, semicircle=True),
        description="PV transform of sqrt((b-x)(x-a))/x"),
    "C269": Identity(
        "C269", ("a", "b", "y"),
        lambda a, b, y: PI * (math.sqrt((1 - a) * (1 - b)) / (1 - y) - 1),
        lambda a, b, y: _pv(lambda s: 1 / (1 - s), a, b, y, semicircle=True),
        unit_interval=True, description="PV transform of sqrt((b-s)(s-a))/(1-s)"),
    "C263neg": Identity(
        "C263neg", ("a", "b", "t"),
        lambda a, b, t: -PI / math.sqrt((t - a) * (t - b)),
        lambda a, b, t: _arcsine(lambda x: 1 / (x - t), a, b),
        description="1/(x-t) against the arcsine weight, t right of the support"),
    "Cpvnull": Identity(
        "Cpvnull", ("a", "b", "t"),
        lambda a, b, t: 0.0,
        lambda a, b, t: _arcsine(lambda x: math.sqrt((t - a) * (t - b)) / (t - x) - 1, a, b),
        description="the spike kernel integrates to zero"),
    "C268": Identity(
        "C268", ("a", "b", "y"),
        lambda a, b, y: PI * (y - (a + b) / 2),
        lambda a, b, y: _pv(lambda x: 1.0, a, b, y, semicircle=True),
        description="PV Hilbert transform of the semicircle weight"),
    "CH": Identity(
        "CH", ("a", "b", "z"), _ch_lhs,
        lambda a, b, z: _arcsine(lambda x: math.log1p(-x) / (x - z), a, b),
        unit_interval=True, description="log(1-x)/(x-z), z off the support, possibly complex"),
    "CG": Identity(
        "CG", ("a", "b", "t", "z"), _cg_lhs,
        lambda a, b, t, z: _arcsine(lambda x: math.log(x + t) / (x - z), a, b),
        description="log(x+t)/(x-z), z off the support, possibly complex"),
}

IDENTITY_KEYS = tuple(CATALOG)


def _validate(ident, params):
    missing = [k for k in ident.needs if k not in params]
    if missing:
        raise DomainError(f"{ident.key} needs parameters {', '.join(missing)}")
    extra = sorted(set(params) - set(ident.needs))
    if extra:
        raise DomainError(f"{ident.key} does not take {', '.join(extra)}")
    a, b = float(params["a"]), float(params["b"])
    if not 0 < a < b:
        raise DomainError(f"{ident.key}: need 0 < a < b, got a={a}, b={b}")
    if ident.unit_interval and not b < 1:
        raise DomainError(f"{ident.key} involves log(1-x); need b < 1, got b={b}", b)
    if "t" in params and not float(params["t"]) > b:
        raise DomainError(f"{ident.key}: need t > b, got t={params['t']}", params["t"])
    if "y" in params and not a < float(params["y"]) < b:
        raise DomainError(f"{ident.key}: need a < y < b, got y={params['y']}", params["y"])
    if "z" in params:
        z = complex(params["z"])
        if z.imag == 0 and a - 1e-12 <= z.real <= b + 1e-12:
            raise DomainError(f"{ident.key}: z must avoid the support [a, b], got z={params['z']}", z.real)
        if ident.key == "CG" and z.imag == 0 and z.real + float(params["t"]) <= 0:
            raise DomainError("CG: need t + z > 0 for real z", z.real)


def verify_identity(key: str, **params):
    """Return ``(lhs, rhs, residual)`` with ``residual = |lhs - rhs| / (1 + |lhs|)``."""
    if key not in CATALOG:
        raise DomainError(f"unknown identity {key!r}; known: {', '.join(IDENTITY_KEYS)}")
    ident = CATALOG[key]
    _validate(ident, params)
    args = []
    for name in ident.needs:
        v = params[name]
        if name == "z" and isinstance(v, complex) and v.imag != 0:
            args.append(complex(v))
        else:
            args.append(float(v.real if isinstance(v, complex) else v))
    lhs = ident.closed_form(*args)
    with warnings.catch_warnings():
        # QUADPACK flags roundoff once it is at machine precision; the residual is the real check
        warnings.simplefilter("ignore", IntegrationWarning)
        rhs = ident.integral(*args)
    lhs = complex(lhs) if isinstance(lhs, complex) else float(lhs)
    residual = abs(lhs - rhs) / (1 + abs(lhs))
    return lhs, rhs, float(residual)


def random_parameters(key: str, rng: np.random.Generator) -> dict:
    """A random admissible parameter set for ``key``."""
    ident = CATALOG[key]
    if ident.unit_interval:
        a = rng.uniform(0.02, 0.6)
        b = rng.uniform(a + 0.05, 0.95)
    else:
        a = rng.uniform(0.05, 2.0)
        b = a + rng.uniform(0.1, 4.0)
    out = {"a": a, "b": b}
    if "t" in ident.needs:
        out["t"] = b + rng.uniform(0.1, 5.0)
    if "y" in ident.needs:
        out["y"] = a + (b - a) * rng.uniform(0.05, 0.95)
    if "z" in ident.needs:
        c0, h = _geometry(a, b)
        kind = rng.integers(3)
        if kind == 0:
            out["z"] = complex(c0 + h * rng.uniform(-3, 3), rng.choice([-1, 1]) * h * rng.uniform(0.1, 2))
        elif kind == 1:
            out["z"] = b + rng.uniform(0.05, 3.0)
        else:
            out["z"] = a - rng.uniform(0.05, 0.9) * a
    return out


def identity_suite(draws: int = 100, seed: int = 0):
    """Max residual per identity over ``draws`` random parameter sets."""
    rng = np.random.default_rng(seed)
    rows = []
    for key in IDENTITY_KEYS:
        worst = 0.0
        for _ in range(draws):
            worst = max(worst, verify_identity(key, **random_parameters(key, rng))[2])
        rows.append((key, draws, worst))
    return rows
