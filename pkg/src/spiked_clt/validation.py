"""Oracle-equivalence self test: every production path checked against an independent route."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clt import clt_params, composed_statistic
from .closed_forms import capacity_params, lrt_params, multisample_params
from .ensembles import EnsembleSpec, support_interval
from .quadrature import (DEFAULT_CONFIG, chebyshev_coefficients, log_kernel_equivalence, variance_from_series,
                         variance_pv_oracle)
from .statistics import make_statistic


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tol: float

    @property
    def ok(self):
        return bool(self.error <= self.tol)


def variance_checks(cfg=DEFAULT_CONFIG):
    specs = [EnsembleSpec.model_a(c) for c in (1.5, 2.0, 5.0)] + [EnsembleSpec.model_c(2, 2)]
    for spec in specs:
        c = spec.c if spec.c is not None else 2.0
        stats = [make_statistic("linear"), make_statistic("polynomial", [0, 0, 1]),
                 make_statistic("lrt", [c]), make_statistic("capacity", [1.0]), make_statistic("log1p")]
        iv = support_interval(spec)
        for stat in stats:
            g = composed_statistic(stat, spec)
            s2 = variance_from_series(chebyshev_coefficients(g, iv, cfg))
            oracle = variance_pv_oracle(g, iv, cfg)
            label = f"variance {stat.name} model {spec.variant.value} {spec.ratios()}"
            yield Check(label, abs(s2 - oracle), 1e-6 * (1 + s2))


def log_kernel_checks(cfg=DEFAULT_CONFIG):
    rng = np.random.default_rng(7)
    for deg in range(1, 7):
        coeffs = rng.uniform(-1, 1, deg + 1)
        stat = make_statistic("polynomial", coeffs)
        iv = support_interval(EnsembleSpec.model_a(2.0))
        for z in (iv.b + 0.5, 2 * iv.b, 10 * iv.b):
            s1, s2 = log_kernel_equivalence(stat, iv, z, cfg)
            yield Check(f"log-kernel degree {deg} z={z:.4g}", abs(s1 - s2), 1e-8 * (1 + abs(s1)))


def closed_form_checks(cfg=DEFAULT_CONFIG):
    for c, d in ((2.0, 0.3), (2.0, 1.0), (3.0, 2.0)):
        p = clt_params(EnsembleSpec.model_a(c, d), make_statistic("lrt", [c]), 100, cfg)
        ref = lrt_params(c, d)
        yield Check(f"lrt closed form c={c} delta={d}",
                    max(abs(p.mu - ref[0]), abs(p.sigma2 - ref[1]), abs(p.adjusted_mu_bar - ref[2])), 1e-8)
    for c, nu, T in ((2.0, 1.0, 1.0), (2.0, 5.0, 0.4), (1.5, 0.5, 2.0)):
        p = clt_params(EnsembleSpec.model_b(c, nu), make_statistic("capacity", [T]), 100, cfg)
        ref = capacity_params(c, nu, T)
        yield Check(f"capacity closed form c={c} nu={nu} T={T}",
                    max(abs(p.mu - ref[0]), abs(p.sigma2 - ref[1]), abs(p.adjusted_mu_bar - ref[2])), 1e-8)
    for c1, c2, nu in ((2.0, 2.0, 1.0), (2.0, 2.0, 4.0), (3.0, 1.5, 20.0)):
        p = clt_params(EnsembleSpec.model_c(c1, c2, nu), make_statistic("log1p"), 100, cfg)
        ref = multisample_params(c1, c2, nu)
        yield Check(f"multisample closed form c1={c1} c2={c2} nu={nu}",
                    max(abs(p.mu - ref[0]), abs(p.sigma2 - ref[1]), abs(p.adjusted_mu_bar - ref[2])), 1e-8)


def zero_spike_checks(cfg=DEFAULT_CONFIG):
    specs = [EnsembleSpec.model_a(c) for c in (1.2, 2.0, 5.0)] + [EnsembleSpec.model_b(2.0),
                                                                   EnsembleSpec.model_c(2, 3)]
    for spec in specs:
        for stat in (make_statistic("linear"), make_statistic("log1p"), make_statistic("polynomial", [0, 0, 1])):
            yield Check(f"zero spike {stat.name} model {spec.variant.value} {spec.ratios()}",
                        abs(clt_params(spec, stat, 10, cfg).mu_bar), 1e-12)


def run_selftest(cfg=DEFAULT_CONFIG):
    checks = []
    for group in (variance_checks, log_kernel_checks, closed_form_checks, zero_spike_checks):
        checks.extend(group(cfg))
    return checks
