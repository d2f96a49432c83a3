"""Chebyshev machinery behind the mean, variance and spike-correction integrals.

Every integral over the support ``[a, b]`` is taken in the angle variable
``x = center + half_width * cos(theta)``; the weights ``1/sqrt((b-x)(x-a))`` and
``sqrt((b-x)(x-a))`` then become ``dtheta`` and ``half_width**2 * sin(theta)**2 * dtheta``,
and all integrands are smooth, even and 2*pi-periodic, so midpoint sums converge geometrically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

from .ensembles import EnsembleSpec, Model, Regime, SpikeGeometry, SupportInterval, support_interval
from .errors import AnalyticityError, CriticalRegimeError, DomainError, NumericalError, UnsupportedStatisticError
from .statistics import LinearStatistic, check_domain

START_ORDER = 32
TAIL_TOL = 1e-12
MAX_NODES = 2**22


@dataclass(frozen=True)
class QuadratureConfig:
    max_order: int = 2048
    rel_tol: float = 1e-10
    pv_grid: int = 4001

    def __post_init__(self):
        if self.max_order < 16:
            raise DomainError(f"max_order must be >= 16, got {self.max_order}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.pv_grid < 16:
            raise DomainError(f"pv_grid must be >= 16, got {self.pv_grid}")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class ChebyshevSeries:
    """``f(center + half_width*cos(theta)) = a0/2 + sum_k a_k cos(k theta)``."""

    interval: SupportInterval
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def order(self):
        return len(self.coeffs) - 1

    def at_angles(self, theta):
        c = self.coeffs.copy()
        c[0] *= 0.5
        return np.polynomial.chebyshev.chebval(np.cos(theta), c)

    def __call__(self, x):
        u = (np.asarray(x, dtype=float) - self.interval.center) / self.interval.half_width
        c = self.coeffs.copy()
        c[0] *= 0.5
        return np.polynomial.chebyshev.chebval(u, c)

    def at_midpoints(self, M):
        """Values at ``theta_j = pi (j + 1/2) / M`` via a type-III DCT (``M`` >= number of coefficients)."""
        if M < len(self.coeffs):
            return self.at_angles(_midpoints(M))
        buf = np.zeros(M)
        buf[: len(self.coeffs)] = 0.5 * self.coeffs
        buf[0] = 0.5 * self.coeffs[0]
        return dct(buf, type=3)


def _midpoints(M):
    return math.pi * (np.arange(M) + 0.5) / M


def _adaptive_midpoint(integrand, start, tol, what):
    """Double the midpoint count until two successive sums agree; ``integrand(theta)`` is vectorised."""
    M = int(start)
    prev = math.pi / M * math.fsum(integrand(_midpoints(M), M))
    while M < MAX_NODES:
        M *= 2
        cur = math.pi / M * math.fsum(integrand(_midpoints(M), M))
        if abs(cur - prev) <= tol * (1 + abs(cur)):
            return cur
        prev = cur
    raise NumericalError(f"{what} did not converge with {M} nodes")


def _sample(func, interval, N):
    theta = _midpoints(N)
    with np.errstate(all="ignore"):
        vals = np.asarray(func(interval.nodes(theta)), dtype=float)
    if vals.shape != theta.shape:
        vals = np.broadcast_to(vals, theta.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        bad = interval.nodes(theta)[~np.isfinite(vals)][0]
        raise DomainError(f"statistic is not finite at x={bad!r} inside the support", float(bad))
    return vals


def chebyshev_coefficients(stat, interval: SupportInterval, cfg: QuadratureConfig = DEFAULT_CONFIG) -> ChebyshevSeries:
    """Expand ``stat`` on ``interval``, doubling the order from 32 until the tail has decayed."""
    if isinstance(stat, LinearStatistic):
        violation = check_domain(stat, interval)
        if violation is not None:
            raise DomainError(str(violation), violation.bound)
    N = START_ORDER
    while True:
        coeffs = dct(_sample(stat, interval, N), type=2) / N
        peak = np.max(np.abs(coeffs))
        tail = np.max(np.abs(coeffs[(3 * N) // 4:]))
        if tail <= TAIL_TOL * peak or peak == 0:
            break
        if 2 * N > cfg.max_order:
            raise AnalyticityError(
                f"Chebyshev tail still at {tail / peak:.1e} of the peak at order {N}; "
                "the statistic is too rough or singular near the support")
        N *= 2
    # drop coefficients that sit at the rounding floor
    significant = np.nonzero(np.abs(coeffs) > 4e-16 * peak)[0]
    keep = significant[-1] + 1 if len(significant) else 1
    return ChebyshevSeries(interval, coeffs[:keep])


def _equilibrium_weight(spec, interval):
    h2 = interval.half_width**2
    if spec.variant is Model.C:
        scale = (spec.c1 + spec.c2) / (2 * math.pi)

        def weight(theta):
            x = interval.nodes(theta)
            return scale * h2 * np.sin(theta) ** 2 / (x * (1 - x))
    else:
        def weight(theta):
            x = interval.nodes(theta)
            # sin^2 / x stays finite at a = 0: sin^2 = (1 - cos)(1 + cos) and x = 2h cos^2(theta/2)
            return h2 * np.sin(theta) ** 2 / (2 * math.pi * x)
    return weight


def mean_integral(series: ChebyshevSeries, spec: EnsembleSpec, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Integral of ``f`` against the model's equilibrium (Marchenko-Pastur type) density."""
    interval = support_interval(spec)
    if not series.interval.matches(interval):
        raise DomainError("series was expanded on a different support than the ensemble's")
    weight = _equilibrium_weight(spec, interval)
    return _adaptive_midpoint(lambda th, M: series.at_midpoints(M) * weight(th),
                              max(64, 2 * len(series.coeffs)), min(1e-3 * cfg.rel_tol, 1e-13), "mean integral")


def variance_from_series(series: ChebyshevSeries) -> float:
    """Double principal-value variance integral, reduced to ``sum_k k a_k^2 / 4``."""
    k = np.arange(len(series.coeffs))
    return 0.25 * math.fsum(k * series.coeffs**2)


def _pv_inner(fprime, interval, theta, K):
    """``PV int_a^b f'(y) sqrt((b-y)(y-a)) / (x - y) dy`` at ``x = x(theta)``.

    Trapezoid rule on ``phi_j = pi j / K``; callers pass outer angles at half-integer
    multiples of ``pi/K`` so the grids never meet. The singular part is removed by
    subtracting ``f'(x)``, whose PV integral is ``pi (x - center)``.
    """
    phi = math.pi * np.arange(K + 1) / K
    wts = np.full(K + 1, math.pi / K)
    wts[0] = wts[-1] = 0.5 * math.pi / K
    y = interval.nodes(phi)
    fpy = np.asarray(fprime(y), dtype=float)
    s2 = interval.half_width**2 * np.sin(phi) ** 2 * wts
    x_all = interval.nodes(theta)
    fpx_all = np.asarray(fprime(x_all), dtype=float) * np.ones_like(x_all)
    fpy = fpy * np.ones_like(y)
    out = np.empty_like(x_all)
    chunk = max(1, 2_000_000 // (K + 1))
    for lo in range(0, len(x_all), chunk):
        x = x_all[lo: lo + chunk, None]
        fpx = fpx_all[lo: lo + chunk, None]
        out[lo: lo + chunk] = ((fpy[None, :] - fpx) / (x - y[None, :])) @ s2
    return out + fpx_all * math.pi * (x_all - interval.center)


def _oracle_grid(cfg):
    K = cfg.pv_grid - 1
    return K, math.pi * (np.arange(K) + 0.5) / K


def variance_pv_oracle(stat, interval: SupportInterval, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Direct evaluation of the double integral

    ``1/(2 pi^2) int f(x)/sqrt((b-x)(x-a)) [PV int f'(y) sqrt((b-y)(y-a)) / (x-y) dy] dx``.

    Shares no code with :func:`variance_from_series`.
    """
    if getattr(stat, "derivative", None) is None:
        raise UnsupportedStatisticError(f"{getattr(stat, 'name', stat)!r} has no derivative; the PV oracle needs f'")
    K, theta = _oracle_grid(cfg)
    inner = _pv_inner(stat.derivative, interval, theta, K)
    fx = np.asarray(stat.evaluate(interval.nodes(theta)), dtype=float) * np.ones_like(theta)
    return (math.pi / K) * math.fsum(fx * inner) / (2 * math.pi**2)


def _distance_to(z0, interval, theta):
    """``z0 - x(theta)`` for real ``z0 >= b``, accurate when ``z0`` is close to ``b``."""
    h2 = 2 * interval.half_width
    return np.where(theta <= 0.5 * math.pi,
                    (z0 - interval.b) + h2 * np.sin(0.5 * theta) ** 2,
                    (z0 - interval.a) - h2 * np.cos(0.5 * theta) ** 2)


def series_spike_correction(series: ChebyshevSeries, w: float) -> float:
    """Closed series for the spike correction in the Joukowski coordinate ``w``.

    ``|w| > 1``: ``sum_k a_k w^-k / 2``.  ``|w| < 1`` (negative root): ``-a0/2 - sum_k a_k w^k / 2``.
    """
    a = series.coeffs
    k = np.arange(1, len(a))
    if abs(w) > 1:
        return 0.5 * math.fsum(a[1:] * w ** (-k.astype(float)))
    return -0.5 * a[0] - 0.5 * math.fsum(a[1:] * w ** k.astype(float))


def spike_correction(series: ChebyshevSeries, geom: SpikeGeometry, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """O(1) spike term ``1/(2 pi) int f(x)/sqrt((b-x)(x-a)) (S/(z0 - x) - 1) dx`` with the branch-resolved ``S``."""
    if not series.interval.matches(geom.interval):
        raise DomainError("series and spike geometry refer to different supports")
    if geom.regime is Regime.ZERO_SPIKE:
        return 0.0
    if geom.regime is Regime.CRITICAL:
        raise CriticalRegimeError(
            "spike is within the critical band of the threshold "
            f"{geom.threshold:.12g}; the mean correction is singular there")
    z0, S, interval = geom.z0, geom.S, geom.interval

    def integrand(theta, M):
        return series.at_midpoints(M) * (S / _distance_to(z0, interval, theta) - 1) / (2 * math.pi)

    value = _adaptive_midpoint(integrand, max(64, 2 * len(series.coeffs)),
                               min(1e-3 * cfg.rel_tol, 1e-13), "spike correction")
    check = series_spike_correction(series, geom.w)
    if abs(value - check) > cfg.rel_tol * (1 + abs(value)):
        raise NumericalError(f"spike correction quadrature {value!r} disagrees with its series form {check!r}")
    return value


def log_kernel_equivalence(stat, interval: SupportInterval, z: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Both sides of ``int f(x) rho2(x, z) dx = int ln(z - x) rho1(x) dx`` for real ``z > b``.

    ``rho2`` is the spike kernel with the positive root; ``rho1`` is the PV-transform density of ``f'``.
    Neither side touches the Chebyshev expansion.
    """
    if not z > interval.b:
        raise DomainError(f"z must lie to the right of the support (z > {interval.b}), got {z}", z)
    if getattr(stat, "derivative", None) is None:
        raise UnsupportedStatisticError("the ln-kernel side needs f'")
    K, theta = _oracle_grid(cfg)
    dist = _distance_to(z, interval, theta)
    A = math.sqrt((z - interval.a) * (z - interval.b))
    fx = np.asarray(stat.evaluate(interval.nodes(theta)), dtype=float) * np.ones_like(theta)
    # A/(z-x) - 1 = (A - z + x)/(z - x); the numerator cancels badly for large z
    kernel = (A - dist) / dist
    side1 = (math.pi / K) * math.fsum(fx * kernel) / (2 * math.pi)
    inner = _pv_inner(stat.derivative, interval, theta, K)
    side2 = -(math.pi / K) * math.fsum(np.log(dist) * inner) / (2 * math.pi**2)
    return side1, side2
