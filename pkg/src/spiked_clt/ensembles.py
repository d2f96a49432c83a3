"""Spiked ensembles and their large-dimension geometry.

Three single-spike Hermitian models are covered:

* ``A``: central Wishart ``CW_n(m, Sigma)`` with one population eigenvalue ``1 + delta``.
* ``B``: non-central Wishart ``CW_n(m, I, Theta)`` with rank-one ``Theta`` of eigenvalue ``n * nu``.
* ``C``: ``W1 W2^{-1}`` with ``W1`` non-central (rank-one, eigenvalue ``n * nu``) and ``W2`` central.

For Models A and B the geometry refers to the eigenvalues of ``W / n``; for Model C
it refers to ``x / (1 + x)`` with ``x`` an eigenvalue of the F matrix, which lives in (0, 1).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

CRITICAL_BAND = 1e-9


class Model(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"


class Regime(str, enum.Enum):
    ZERO_SPIKE = "zero_spike"
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class EnsembleSpec:
    """Model variant, limiting aspect ratio(s) and spike strength.

    ``c`` is used by Models A/B (``m / n``), ``c1``/``c2`` by Model C (``m1 / n``, ``m2 / n``).
    ``spike`` is ``delta`` for Model A and ``nu`` for Models B and C.
    """

    variant: Model
    c: float | None = None
    c1: float | None = None
    c2: float | None = None
    spike: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Model(self.variant))
        if not math.isfinite(self.spike) or self.spike < 0:
            raise DomainError(f"spike must be a finite non-negative number, got {self.spike}", self.spike)
        if self.variant is Model.C:
            if self.c1 is None or self.c2 is None:
                raise DomainError("Model C needs both c1 and c2")
            if not (self.c1 > 1 and self.c2 > 1) or not math.isfinite(self.c1 + self.c2):
                raise DomainError(f"Model C needs c1 > 1 and c2 > 1, got c1={self.c1}, c2={self.c2}")
        else:
            if self.c is None:
                raise DomainError(f"Model {self.variant.value} needs c")
            if not (self.c >= 1) or not math.isfinite(self.c):
                raise DomainError(f"Model {self.variant.value} needs c >= 1, got c={self.c}", self.c)

    @classmethod
    def model_a(cls, c, delta=0.0):
        return cls(Model.A, c=float(c), spike=float(delta))

    @classmethod
    def model_b(cls, c, nu=0.0):
        return cls(Model.B, c=float(c), spike=float(nu))

    @classmethod
    def model_c(cls, c1, c2, nu=0.0):
        return cls(Model.C, c1=float(c1), c2=float(c2), spike=float(nu))

    def with_spike(self, spike):
        return EnsembleSpec(self.variant, c=self.c, c1=self.c1, c2=self.c2, spike=float(spike))

    def ratios(self):
        if self.variant is Model.C:
            return {"c1": self.c1, "c2": self.c2}
        return {"c": self.c}


@dataclass(frozen=True)
class SupportInterval:
    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a < self.b):
            raise DomainError(f"support needs 0 <= a < b, got [{self.a}, {self.b}]")

    @property
    def center(self):
        return 0.5 * (self.a + self.b)

    @property
    def half_width(self):
        return 0.5 * (self.b - self.a)

    def nodes(self, theta):
        """Map angles to ``center + half_width * cos(theta)`` without cancellation at the ends."""
        theta = np.asarray(theta, dtype=float)
        h2 = 2 * self.half_width
        return np.where(theta <= 0.5 * math.pi,
                        self.b - h2 * np.sin(0.5 * theta) ** 2,
                        self.a + h2 * np.cos(0.5 * theta) ** 2)

    def matches(self, other, rtol=1e-12):
        return (math.isclose(self.a, other.a, rel_tol=rtol, abs_tol=rtol)
                and math.isclose(self.b, other.b, rel_tol=rtol, abs_tol=rtol))


@dataclass(frozen=True)
class SpikeGeometry:
    """Saddlepoint data of the spike.

    ``S`` is the branch-resolved value of ``sqrt((z0 - a)(z0 - b))``: positive below the
    detachment threshold, negative above it.  ``w`` is the Joukowski coordinate of ``z0``,
    ``z0 = center + half_width * (w + 1/w) / 2``, with ``|w| > 1`` iff the spike is subcritical.
    ``z0``, ``S`` and ``w`` are ``None`` at zero spike.
    """

    interval: SupportInterval
    regime: Regime
    threshold: float
    z0: float | None = None
    S: float | None = None
    w: float | None = None


def support_interval(spec: EnsembleSpec) -> SupportInterval:
    if spec.variant is Model.C:
        c1, c2 = spec.c1, spec.c2
        s = c1 + c2
        root = math.sqrt(c1 * c2 * (s - 1))
        base = c1 * (s - 1) + c2
        return SupportInterval((base - 2 * root) / s**2, (base + 2 * root) / s**2)
    rc = math.sqrt(spec.c)
    return SupportInterval((1 - rc) ** 2, (1 + rc) ** 2)


def criticality_threshold(spec: EnsembleSpec) -> float:
    """Spike value at which an outlier eigenvalue detaches from the bulk."""
    if spec.variant is Model.A:
        return 1 / math.sqrt(spec.c)
    if spec.variant is Model.B:
        return math.sqrt(spec.c)
    c1, c2 = spec.c1, spec.c2
    return (c1 + math.sqrt(c1 * c2 * (c1 + c2 - 1))) / (c2 - 1)


def _saddlepoint(spec):
    s = spec.spike
    if spec.variant is Model.A:
        c = spec.c
        return (1 + c * s) * (1 + s) / s, (1 - c * s * s) / s
    if spec.variant is Model.B:
        c = spec.c
        return (1 + s) * (c + s) / s, c / s - s
    c1, c2 = spec.c1, spec.c2
    tot = c1 + c2
    z0 = (1 + s) * (c1 + s) / (s * (tot + s))
    S = (c1 * tot + 2 * c1 * s - (c2 - 1) * s * s) / (s * (tot + s) * tot)
    return z0, S


def spike_geometry(spec: EnsembleSpec, eps: float = CRITICAL_BAND) -> SpikeGeometry:
    interval = support_interval(spec)
    threshold = criticality_threshold(spec)
    if spec.spike == 0:
        return SpikeGeometry(interval, Regime.ZERO_SPIKE, threshold)
    if abs(spec.spike - threshold) < eps * threshold:
        return SpikeGeometry(interval, Regime.CRITICAL, threshold, z0=interval.b, S=0.0, w=1.0)
    z0, S = _saddlepoint(spec)
    regime = Regime.SUBCRITICAL if spec.spike < threshold else Regime.SUPERCRITICAL
    w = (z0 - interval.center + S) / interval.half_width
    return SpikeGeometry(interval, regime, threshold, z0=z0, S=S, w=w)
