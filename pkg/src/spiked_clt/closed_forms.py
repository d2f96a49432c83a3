"""Closed-form Gaussian parameters for the likelihood-ratio, capacity and multi-sample statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

from .ensembles import EnsembleSpec, support_interval
from .errors import DomainError
from .hypergeometric import hyp2f2_series

_STD = NormalDist()


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2))


def normal_sf(x):
    return 0.5 * math.erfc(x / math.sqrt(2))


def normal_ppf(p):
    if not 0 < p < 1:
        raise DomainError(f"quantile level must lie in (0, 1), got {p}", p)
    return _STD.inv_cdf(p)


def _xlogx_ratio(c):
    """``(c - 1) ln((c - 1)/c)``, continuous at ``c = 1``."""
    return 0.0 if c == 1 else (c - 1) * math.log((c - 1) / c)


def lrt_params(c, delta):
    """``(mu_L, sigma2_L, mu_bar_L)`` for ``f(x) = x/c - ln(x/c) - 1`` on Model A."""
    if not c > 1:
        raise DomainError(f"need c > 1, got {c}", c)
    if not delta >= 0:
        raise DomainError(f"need delta >= 0, got {delta}", delta)
    tail = math.log1p(-1 / c)
    return 1 + (c - 1) * tail, -1 / c - tail, delta - math.log1p(delta)


def capacity_params(c, nu, T):
    """``(mu_C, sigma2_C, mu_bar_C)`` for ``f(x) = ln(1 + x/T)`` on Model B."""
    if not T > 0:
        raise DomainError(f"need T > 0, got {T}", T)
    if not nu >= 0:
        raise DomainError(f"need nu >= 0, got {nu}", nu)
    iv = support_interval(EnsembleSpec.model_b(c))
    a, b = iv.a, iv.b
    sa, sb = math.sqrt(T + a), math.sqrt(T + b)
    A = sa * sb
    rab = math.sqrt(a * b)
    mu = 0.5 * ((a + b) * math.log((sa + sb) / 2)
                - (sa - sb) ** 2 / 2
                - rab * math.log(((rab + A) ** 2 - T * T) / (math.sqrt(a) + math.sqrt(b)) ** 2)
                - 2 * math.log(T))
    q = ((T + a) / (T + b)) ** 0.25
    sigma2 = 2 * math.log(0.5 * q + 0.5 / q)
    num = 2 * (T * nu + (1 + nu) * (c + nu)) ** 2
    den = (nu * nu * (1 + c + T) * A + 2 * c * nu * (1 + c + T + A)
           + nu * nu * (T * T + 2 * T * (1 + c) + 1 + c * c) + 2 * c * c)
    return mu, sigma2, 0.5 * math.log(num / den)


def multisample_params(c1, c2, nu):
    """``(mu_R, sigma2_R, mu_bar_R)`` for ``f(x) = ln(1 + x)`` on Model C."""
    if not nu >= 0:
        raise DomainError(f"need nu >= 0, got {nu}", nu)
    iv = support_interval(EnsembleSpec.model_c(c1, c2))
    a, b = iv.a, iv.b
    ra, rb = math.sqrt(1 - a), math.sqrt(1 - b)
    rab = math.sqrt(a * b)
    mu = -(c1 + c2) * (math.log((ra + rb) / 2)
                       - rab / 2 * math.log((1 - (rab - ra * rb) ** 2) / (math.sqrt(a) + math.sqrt(b)) ** 2)
                       + ra * rb * math.log(1 / (2 * ra) + 1 / (2 * rb)))
    sigma2 = math.log((ra + rb) ** 2 / (4 * ra * rb))
    return mu, sigma2, math.log1p(nu / (c1 + c2))


@dataclass(frozen=True)
class TestPowerInput:
    __test__ = False  # not a pytest class

    alpha: float
    nu: float
    c1: float
    c2: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}", self.alpha)
        if not self.nu >= 0:
            raise DomainError(f"nu must be >= 0, got {self.nu}", self.nu)
        if not (self.c1 > 1 and self.c2 > 1):
            raise DomainError(f"need c1 > 1 and c2 > 1, got {self.c1}, {self.c2}")


def test_power(inp: TestPowerInput) -> float:
    """Asymptotic power of the one-sided Gaussian test on ``-ln(Lambda)`` at level ``alpha``."""
    _, sigma2, mu_bar = multisample_params(inp.c1, inp.c2, inp.nu)
    # 1 - Phi(Phi^-1(1 - alpha) - shift), with Phi^-1(1 - alpha) = -Phi^-1(alpha) to avoid 1 - alpha rounding
    return normal_sf(-normal_ppf(inp.alpha) - mu_bar / math.sqrt(sigma2))


test_power.__test__ = False


def db_to_linear(db):
    return 10 ** (db / 10)


def capacity_T(P_db, K0, n_t, n_r):
    """``T = n_t (K0/m + 1) / (n P)`` with ``n = min(n_t, n_r)``, ``m = max(n_t, n_r)``."""
    if min(n_t, n_r) < 1:
        raise DomainError("antenna counts must be >= 1")
    if not K0 >= 0:
        raise DomainError(f"need K0 >= 0, got {K0}", K0)
    n, m = min(n_t, n_r), max(n_t, n_r)
    return n_t * (K0 / m + 1) / (n * db_to_linear(P_db))


def high_snr_power_offset(c, K0, n, m, variant="log", base2=False):
    """High-SNR offset ``L`` in ``n mu_C ~ n (ln P - L)``.

    ``variant="log"`` is the logarithmic finite-n correction; ``variant="2f2"`` replaces it with
    the ``(K0/m) 2F2(1,1;2,m+1;-n K0)`` reference term, summed directly.  The reference term is
    in nats unless ``base2`` is set, which divides it by ``ln 2``.
    """
    if not (m >= n >= 1):
        raise DomainError(f"need m >= n >= 1, got n={n}, m={m}")
    if not K0 >= 0:
        raise DomainError(f"need K0 >= 0, got {K0}", K0)
    if not c >= 1:
        raise DomainError(f"need c >= 1, got {c}", c)
    base = 1 + _xlogx_ratio(c) + math.log1p(K0 / m)
    if variant == "log":
        return base - math.log1p(K0 / c) / n
    if variant == "2f2":
        if K0 == 0:
            return base
        ref = K0 / m * hyp2f2_series(1, 1, 2, m + 1, -n * K0)
        return base - (ref / math.log(2) if base2 else ref)
    raise DomainError(f"variant must be 'log' or '2f2', got {variant!r}")
