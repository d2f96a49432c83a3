"""Asymptotic Gaussian law of ``sum_k f(x_k)`` for the three spiked ensembles."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleSpec, Model, Regime, SpikeGeometry, SupportInterval, spike_geometry, support_interval
from .errors import DomainError
from .quadrature import (DEFAULT_CONFIG, QuadratureConfig, chebyshev_coefficients, mean_integral,
                         spike_correction, variance_from_series)
from .statistics import LinearStatistic, check_domain


@dataclass(frozen=True)
class CltParams:
    """Predicted ``N(n mu + mu_bar, sigma2)`` plus the supercritical outlier bookkeeping.

    ``mu_bar`` is the spike term evaluated literally on the branch-resolved root.  Above the
    detachment threshold the outlier eigenvalue near ``z0`` is not part of that term, so
    ``outlier_adjusted_mean`` adds ``f(z0)`` back; below it the two means coincide.
    """

    n: int
    mu: float
    sigma2: float
    mu_bar: float
    predicted_mean: float
    outlier_adjusted_mean: float
    regime: Regime
    geometry: SpikeGeometry

    @property
    def adjusted_mu_bar(self):
        """O(1) mean correction including the outlier: ``outlier_adjusted_mean - n mu``."""
        return self.mu_bar + self.outlier_term

    @property
    def outlier_term(self):
        return self.outlier_adjusted_mean - self.predicted_mean

    @property
    def std(self):
        return math.sqrt(self.sigma2)

    def comparison_mean(self):
        """The mean a finite-n simulation of the full statistic should match, and its label."""
        if self.regime is Regime.SUPERCRITICAL:
            return self.outlier_adjusted_mean, "outlier_adjusted"
        return self.predicted_mean, "predicted"


def composed_statistic(stat: LinearStatistic, spec: EnsembleSpec) -> LinearStatistic:
    """The function actually expanded on the model's support.

    Models A/B use ``f`` itself.  Model C lives on ``y = x / (1 + x)`` in ``(0, 1)``, so the
    engine expands ``g(y) = f(y / (1 - y))`` with ``g'(y) = f'(y / (1 - y)) / (1 - y)^2``.
    """
    if spec.variant is not Model.C:
        return stat
    f, df = stat.evaluate, stat.derivative

    def g(y):
        y = np.asarray(y, dtype=float)
        return f(y / (1 - y))

    dg = None
    if df is not None:
        def dg(y):
            y = np.asarray(y, dtype=float)
            return df(y / (1 - y)) / (1 - y) ** 2

    return LinearStatistic(f"{stat.name}(y/(1-y))", stat.params, g, dg)


def statistic_support(spec: EnsembleSpec) -> SupportInterval:
    """Where ``f`` itself is evaluated: the bulk support, mapped back by ``y/(1-y)`` for Model C."""
    interval = support_interval(spec)
    if spec.variant is Model.C:
        return SupportInterval(interval.a / (1 - interval.a), interval.b / (1 - interval.b))
    return interval


def clt_params(spec: EnsembleSpec, stat: LinearStatistic, n: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> CltParams:
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}", n)
    n = int(n)
    violation = check_domain(stat, statistic_support(spec))
    if violation is not None:
        raise DomainError(str(violation), violation.bound)
    geom = spike_geometry(spec)
    target = composed_statistic(stat, spec)
    series = chebyshev_coefficients(target, geom.interval, cfg)
    mu = mean_integral(series, spec, cfg)
    sigma2 = variance_from_series(series)
    mu_bar = spike_correction(series, geom, cfg)
    predicted = n * mu + mu_bar
    adjusted = predicted
    if geom.regime is Regime.SUPERCRITICAL:
        adjusted = predicted + float(target.evaluate(np.float64(geom.z0)))
    return CltParams(n, mu, sigma2, mu_bar, predicted, adjusted, geom.regime, geom)


def predicted_distribution(params: CltParams):
    return params.predicted_mean, math.sqrt(params.sigma2)
