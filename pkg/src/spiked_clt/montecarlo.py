"""Finite-n sampling of the spiked ensembles and comparison with the predicted Gaussian law."""
from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import ndtr

from .clt import CltParams, clt_params
from .ensembles import EnsembleSpec, Model
from .errors import DomainError, NumericalError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .statistics import LinearStatistic, evaluate_statistic

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
MAX_DISCARD_FRACTION = 1e-3
CHUNK = 64


@dataclass(frozen=True)
class SampleConfig:
    """Finite dimensions of one Monte Carlo run.

    Models A/B use ``m``; Model C uses ``m1`` (numerator, non-central) and ``m2``.
    ``spike`` defaults to the spike of the ensemble being sampled.
    """

    n: int
    m: int | None = None
    m1: int | None = None
    m2: int | None = None
    trials: int = 1000
    seed: int = 0
    spike: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}", self.n)
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}", self.trials)
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}", self.seed)
        if self.spike is not None and not self.spike >= 0:
            raise DomainError(f"spike must be >= 0, got {self.spike}", self.spike)

    def check(self, spec: EnsembleSpec):
        if spec.variant is Model.C:
            if self.m1 is None or self.m2 is None:
                raise DomainError("Model C sampling needs m1 and m2")
            if not (self.m1 > self.n and self.m2 > self.n):
                raise DomainError(f"Model C needs m1 > n and m2 > n, got n={self.n}, m1={self.m1}, m2={self.m2}")
        else:
            if self.m is None:
                raise DomainError(f"Model {spec.variant.value} sampling needs m")
            if not self.m >= self.n:
                raise DomainError(f"need m >= n, got n={self.n}, m={self.m}")

    def finite_spec(self, spec: EnsembleSpec) -> EnsembleSpec:
        """The ensemble with ratios taken at these finite dimensions."""
        self.check(spec)
        spike = spec.spike if self.spike is None else self.spike
        if spec.variant is Model.C:
            return EnsembleSpec.model_c(self.m1 / self.n, self.m2 / self.n, spike)
        return EnsembleSpec(spec.variant, c=self.m / self.n, spike=spike)


@dataclass(frozen=True)
class EmpiricalReport:
    trials: int
    discarded: int
    sample_mean: float
    sample_var: float
    predicted_mean: float
    predicted_std: float
    ks_distance: float
    mean_zscore: float
    comparison_mean_used: str
    regime: str
    histogram_edges: tuple = field(repr=False)
    histogram_counts: tuple = field(repr=False)

    def to_dict(self):
        out = asdict(self)
        out["histogram"] = {"edges": list(out.pop("histogram_edges")),
                            "counts": list(out.pop("histogram_counts"))}
        return out

    def histogram_rows(self):
        edges, counts = self.histogram_edges, self.histogram_counts
        total = sum(counts)
        for lo, hi, cnt in zip(edges[:-1], edges[1:], counts):
            yield lo, hi, cnt, cnt / (total * (hi - lo)) if total else 0.0

    def write_histogram_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["bin_left", "bin_right", "count", "density"])
            for lo, hi, cnt, dens in self.histogram_rows():
                w.writerow([repr(float(lo)), repr(float(hi)), int(cnt), repr(float(dens))])


def trial_rng(seed, trial_index):
    """Counter-based stream: a pure function of ``(seed, trial_index)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial_index,))))


def _complex_gaussian(rng, rows, cols):
    # real and imaginary parts each N(0, 1/2) so that E|g|^2 = 1
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) * math.sqrt(0.5)


def _checked_eigh(W, B=None):
    lam, vec = scipy.linalg.eigh(W, B)
    if B is None:
        resid = np.linalg.norm(W @ vec - vec * lam, axis=0)
        scale = np.linalg.norm(W, 2)
    else:
        resid = np.linalg.norm(W @ vec - (B @ vec) * lam, axis=0)
        scale = np.linalg.norm(W, 2) + np.abs(lam) * np.linalg.norm(B, 2)
    worst = np.max(resid / (RESIDUAL_TOL * scale))
    if not np.all(np.isfinite(lam)) or worst > 1:
        raise NumericalError(f"eigensolver residual {worst * RESIDUAL_TOL:.2e} exceeds {RESIDUAL_TOL:g} relative")
    return lam


def sample_ensemble(spec: EnsembleSpec, cfg: SampleConfig, trial_index: int) -> np.ndarray:
    """Ascending eigenvalues of one draw: ``W`` for Models A/B, the pencil ``(W1, W2)`` for Model C."""
    cfg.check(spec)
    if not 0 <= trial_index < cfg.trials:
        raise DomainError(f"trial_index must lie in [0, {cfg.trials}), got {trial_index}", trial_index)
    rng = trial_rng(cfg.seed, trial_index)
    n = cfg.n
    spike = spec.spike if cfg.spike is None else cfg.spike
    if spec.variant is Model.A:
        G = _complex_gaussian(rng, n, cfg.m)
        G[0] *= math.sqrt(1 + spike)
        return _checked_eigh(G @ G.conj().T)
    if spec.variant is Model.B:
        G = _complex_gaussian(rng, n, cfg.m)
        G[0, 0] += math.sqrt(n * spike)
        return _checked_eigh(G @ G.conj().T)
    G1 = _complex_gaussian(rng, n, cfg.m1)
    G1[0, 0] += math.sqrt(n * spike)
    G2 = _complex_gaussian(rng, n, cfg.m2)
    return _checked_eigh(G1 @ G1.conj().T, G2 @ G2.conj().T)


def empirical_statistic(eigs, stat: LinearStatistic, spec: EnsembleSpec, n: int) -> float:
    """``sum f(x_k / n)`` for Models A/B, ``sum f(x_k)`` for Model C."""
    x = np.asarray(eigs, dtype=float)
    if spec.variant is not Model.C:
        x = x / n
    return math.fsum(evaluate_statistic(stat, x))


def resolve_threads(threads=None):
    if threads is None:
        env = os.environ.get("SPIKED_CLT_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise DomainError(f"SPIKED_CLT_THREADS must be an integer, got {env!r}") from None
        else:
            threads = min(8, os.cpu_count() or 1)
    if threads < 1:
        raise DomainError(f"thread count must be >= 1, got {threads}", threads)
    return threads


def _run_chunk(spec, stat, cfg, indices):
    out = []
    for i in indices:
        try:
            out.append((i, empirical_statistic(sample_ensemble(spec, cfg, i), stat, spec, cfg.n)))
        except NumericalError as exc:
            log.warning("trial %d discarded: %s", i, exc)
            out.append((i, None))
    return out


def simulate_statistics(spec: EnsembleSpec, stat: LinearStatistic, cfg: SampleConfig, threads=None):
    """Statistic values in trial order, with discarded trials dropped; returns ``(values, discarded)``."""
    cfg.check(spec)
    threads = resolve_threads(threads)
    chunks = [range(lo, min(lo + CHUNK, cfg.trials)) for lo in range(0, cfg.trials, CHUNK)]
    if threads == 1:
        results = [_run_chunk(spec, stat, cfg, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _run_chunk(spec, stat, cfg, c), chunks))
    values = [v for chunk in results for _, v in chunk]
    discarded = sum(v is None for v in values)
    if discarded > MAX_DISCARD_FRACTION * cfg.trials:
        raise NumericalError(f"{discarded} of {cfg.trials} trials failed the eigensolver check")
    return np.array([v for v in values if v is not None]), discarded


def ks_distance(samples, mean, std) -> float:
    """Kolmogorov-Smirnov distance between the samples and ``N(mean, std^2)``."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise DomainError("ks_distance needs at least one sample")
    if not std > 0:
        raise DomainError(f"ks_distance needs std > 0, got {std}", std)
    N = x.size
    cdf = ndtr((x - mean) / std)
    i = np.arange(1, N + 1)
    return float(max(np.max(i / N - cdf), np.max(cdf - (i - 1) / N)))


def summarize(values, discarded, params: CltParams, bins=50) -> EmpiricalReport:
    values = np.asarray(values, dtype=float)
    mean_used, label = params.comparison_mean()
    std = params.std
    N = values.size
    sample_mean = math.fsum(values) / N
    sample_var = math.fsum((values - sample_mean) ** 2) / (N - 1) if N > 1 else 0.0
    counts, edges = np.histogram(values, bins=bins)
    if std > 0:
        ks = ks_distance(values, mean_used, std)
        z = (sample_mean - mean_used) / (std / math.sqrt(N))
    else:
        ks, z = math.nan, math.nan
    return EmpiricalReport(
        trials=N, discarded=discarded, sample_mean=sample_mean, sample_var=sample_var,
        predicted_mean=mean_used, predicted_std=std, ks_distance=ks, mean_zscore=z,
        comparison_mean_used=label, regime=params.regime.value,
        histogram_edges=tuple(float(e) for e in edges), histogram_counts=tuple(int(c) for c in counts))


def run_experiment(spec: EnsembleSpec, stat: LinearStatistic, cfg: SampleConfig, threads=None,
                   qcfg: QuadratureConfig = DEFAULT_CONFIG, bins=50):
    """Simulate and compare with the CLT prediction at the finite ratios ``m/n``.

    Returns ``(report, params, values)``.  Supercritical runs are compared with the
    outlier-adjusted mean, since the simulated statistic includes the outlier eigenvalue.
    """
    finite = cfg.finite_spec(spec)
    params = clt_params(finite, stat, max(cfg.n, 2), qcfg)
    values, discarded = simulate_statistics(finite, stat, cfg, threads)
    return summarize(values, discarded, params, bins), params, values
