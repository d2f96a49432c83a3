"""Confluent hypergeometric series and the large-n saddlepoint approximation of 1F1."""
from __future__ import annotations

import math

import mpmath

from .errors import DomainError, NumericalError

MAX_TERMS = 100_000


def hyp1f1_series(a, b, x, rel_tol=1e-14, max_terms=MAX_TERMS):
    """Sum ``sum_k (a)_k / (b)_k x^k / k!`` until a term drops below ``rel_tol`` of the running sum."""
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"1F1 is undefined for b a non-positive integer, got b={b}", b)
    total, term = 1.0, 1.0
    for k in range(max_terms):
        term *= (a + k) / (b + k) * x / (k + 1)
        total += term
        # terms of a convergent 1F1 series only shrink monotonically once k > |x|
        if k > abs(x) and abs(term) <= rel_tol * abs(total):
            return total
        if not math.isfinite(total):
            raise NumericalError(f"1F1({a}, {b}, {x}) overflowed; use log_hyp1f1_series")
    raise NumericalError(f"1F1({a}, {b}, {x}) series did not converge in {max_terms} terms")


def log_hyp1f1_series(a, b, x, rel_tol=1e-14, max_terms=MAX_TERMS):
    """``ln 1F1(a, b, x)`` for ``a, b, x > 0``, summed in the log domain so large arguments do not overflow."""
    if not (a > 0 and b > 0 and x >= 0):
        raise DomainError("log-domain summation needs a > 0, b > 0, x >= 0")
    if x == 0:
        return 0.0
    log_term = 0.0
    peak = 0.0
    acc = 1.0  # sum of exp(log_term - peak)
    for k in range(max_terms):
        log_term += math.log((a + k) / (b + k) * x / (k + 1))
        if log_term > peak:
            acc = acc * math.exp(peak - log_term) + 1.0
            peak = log_term
        else:
            acc += math.exp(log_term - peak)
        if k > x and log_term - peak < math.log(rel_tol) + math.log(acc):
            return peak + math.log(acc)
    raise NumericalError(f"1F1({a}, {b}, {x}) series did not converge in {max_terms} terms")


def saddlepoint(u, v, gamma, z):
    """Root of ``gamma z t^2 + (v - gamma z) t - u = 0`` lying outside the contour around 1."""
    gz = gamma * z
    return (gz - v + math.sqrt((v - gz) ** 2 + 4 * gz * u)) / (2 * gz)


def log_hyp1f1_asymptotic(u, v, gamma, z, n):
    """Logarithm of the Laplace approximation to ``1F1(nu + 1, nv + 1, n gamma z)``."""
    if not u > v > 0:
        raise DomainError(f"need u > v > 0, got u={u}, v={v}")
    if not gamma > 0:
        raise DomainError(f"need gamma > 0, got {gamma}", gamma)
    if isinstance(z, complex) or not z > 1:
        raise DomainError(f"need real z > 1, got {z}", z)
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}", n)
    t = saddlepoint(u, v, gamma, z)
    d = n * (u - v)
    curvature = -v * (t - 1) ** 2 + (u - v) * (2 * t - 1)
    return (-0.5 * math.log(2 * math.pi * n)
            + math.lgamma(d + 1) + math.lgamma(n * v + 1) - math.lgamma(n * u + 1)
            + n * gamma * z * t + (n * u + 1) * math.log(t) - d * math.log(t - 1)
            - 0.5 * math.log(curvature))


def hyp1f1_asymptotic(u, v, gamma, z, n):
    return math.exp(log_hyp1f1_asymptotic(u, v, gamma, z, n))


def asymptotic_relative_error(u, v, gamma, z, n):
    """``approx / exact - 1`` with the exact value from the log-domain series."""
    exact = log_hyp1f1_series(n * u + 1, n * v + 1, n * gamma * z)
    return math.expm1(log_hyp1f1_asymptotic(u, v, gamma, z, n) - exact)


def hyp2f2_series(a1, a2, b1, b2, x, rel_tol=1e-16, max_terms=MAX_TERMS):
    """``2F2(a1, a2; b1, b2; x)`` by direct summation at raised precision.

    For large negative ``x`` the alternating terms peak near ``e^|x|`` before cancelling,
    so the working precision grows with ``|x|``.
    """
    digits = 30 + int(abs(x) / math.log(10)) + 1
    with mpmath.workprec(int(digits * 3.33) + 16):
        X = mpmath.mpf(x)
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        for k in range(max_terms):
            term *= (a1 + k) * (a2 + k) / mpmath.mpf((b1 + k) * (b2 + k)) * X / (k + 1)
            total += term
            if k > abs(x) and abs(term) <= rel_tol * abs(total):
                return float(total)
    raise NumericalError(f"2F2 series did not converge in {max_terms} terms")
