import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiked_clt.closed_forms import capacity_params, lrt_params, multisample_params
from spiked_clt.clt import CltParams, clt_params, composed_statistic, predicted_distribution, statistic_support
from spiked_clt.ensembles import EnsembleSpec, Regime, spike_geometry, support_interval
from spiked_clt.errors import CriticalRegimeError, DomainError
from spiked_clt.statistics import make_statistic

LIN = make_statistic("linear")


def test_lrt_null_prediction():
    p = clt_params(EnsembleSpec.model_a(2), make_statistic("lrt", [2]), 100)
    assert p.mu_bar == 0
    assert p.predicted_mean == pytest.approx(100 * (1 + math.log(0.5)), rel=1e-12)
    mean, std = predicted_distribution(p)
    assert std == pytest.approx(math.sqrt(-0.5 - math.log(0.5)), rel=1e-12)


def test_model_b_linear():
    p = clt_params(EnsembleSpec.model_b(2, 1), LIN, 50)
    assert (p.mu, p.sigma2, p.mu_bar) == pytest.approx((2, 2, 1), abs=1e-10)
    assert p.predicted_mean == pytest.approx(101, abs=1e-9)


def test_model_c_zero_spike():
    p = clt_params(EnsembleSpec.model_c(2, 2), make_statistic("log1p"), 40)
    assert p.mu_bar == 0
    assert p.predicted_mean == pytest.approx(40 * multisample_params(2, 2, 0)[0], rel=1e-12)


def test_predicted_distribution_accessor():
    geom = spike_geometry(EnsembleSpec.model_b(2, 1))
    p = CltParams(50, 2.0, 2.0, 1.0, 101.0, 101.0, Regime.SUBCRITICAL, geom)
    assert predicted_distribution(p) == pytest.approx((101, math.sqrt(2)))
    p0 = CltParams(50, 1.0, 0.0, 0.0, 50.0, 50.0, Regime.ZERO_SPIKE, geom)
    assert predicted_distribution(p0)[1] == 0


def test_supercritical_bookkeeping():
    p = clt_params(EnsembleSpec.model_a(2, 1), LIN, 64)
    assert p.mu_bar == pytest.approx(-4, abs=1e-10)
    assert p.outlier_adjusted_mean - 64 * p.mu == pytest.approx(2, abs=1e-9)
    assert p.comparison_mean()[1] == "outlier_adjusted"


def test_means_coincide_unless_supercritical():
    for s in (0.0, 0.3, 0.6):
        p = clt_params(EnsembleSpec.model_a(2, s), LIN, 10)
        assert p.predicted_mean == p.outlier_adjusted_mean


def test_errors():
    with pytest.raises(CriticalRegimeError):
        clt_params(EnsembleSpec.model_b(4, 2), LIN, 10)
    with pytest.raises(DomainError):
        clt_params(EnsembleSpec.model_a(1), make_statistic("lrt", [2]), 10)
    with pytest.raises(DomainError):
        clt_params(EnsembleSpec.model_a(2), LIN, 1)


def test_model_c_composition():
    spec = EnsembleSpec.model_c(2, 3)
    g = composed_statistic(make_statistic("log1p"), spec)
    y = np.array([0.2, 0.5])
    assert np.allclose(g(y), -np.log1p(-y))
    assert np.allclose(g.derivative(y), 1 / (1 - y))
    iv, fiv = support_interval(spec), statistic_support(spec)
    assert fiv.a == pytest.approx(iv.a / (1 - iv.a)) and fiv.b == pytest.approx(iv.b / (1 - iv.b))


@pytest.mark.parametrize("c", [1.2, 2.0, 5.0])
@pytest.mark.parametrize("stat", [LIN, make_statistic("log1p"), make_statistic("polynomial", [0, 0, 1])])
def test_zero_spike_reduction(c, stat):
    for spec in (EnsembleSpec.model_a(c), EnsembleSpec.model_b(c), EnsembleSpec.model_c(c, c + 0.5)):
        assert abs(clt_params(spec, stat, 10).mu_bar) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.sampled_from("ABC"), st.floats(1.1, 6), st.floats(0.01, 30), st.floats(0.01, 30))
def test_spike_only_moves_the_mean(variant, c, s1, s2):
    base = {"A": EnsembleSpec.model_a(c), "B": EnsembleSpec.model_b(c), "C": EnsembleSpec.model_c(c, c + 1)}[variant]
    stat = make_statistic("capacity", [0.5])
    try:
        p1 = clt_params(base.with_spike(s1), stat, 10)
        p2 = clt_params(base.with_spike(s2), stat, 10)
    except CriticalRegimeError:
        return
    assert p1.mu == p2.mu and p1.sigma2 == p2.sigma2


@settings(max_examples=40, deadline=None)
@given(st.floats(1.05, 8), st.floats(0.01, 6))
def test_lrt_closed_form_agreement(c, delta):
    try:
        p = clt_params(EnsembleSpec.model_a(c, delta), make_statistic("lrt", [c]), 10)
    except CriticalRegimeError:
        return
    mu, s2, mb = lrt_params(c, delta)
    assert abs(p.mu - mu) < 1e-8 and abs(p.sigma2 - s2) < 1e-8 and abs(p.adjusted_mu_bar - mb) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 8), st.floats(0.01, 10), st.floats(0.05, 10))
def test_capacity_closed_form_agreement(c, nu, T):
    try:
        p = clt_params(EnsembleSpec.model_b(c, nu), make_statistic("capacity", [T]), 10)
    except CriticalRegimeError:
        return
    mu, s2, mb = capacity_params(c, nu, T)
    assert abs(p.mu - mu) < 1e-8 and abs(p.sigma2 - s2) < 1e-8 and abs(p.adjusted_mu_bar - mb) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.floats(1.1, 8), st.floats(1.1, 8), st.floats(0.01, 60))
def test_multisample_closed_form_agreement(c1, c2, nu):
    try:
        p = clt_params(EnsembleSpec.model_c(c1, c2, nu), make_statistic("log1p"), 10)
    except CriticalRegimeError:
        return
    mu, s2, mb = multisample_params(c1, c2, nu)
    assert abs(p.mu - mu) < 1e-8 and abs(p.sigma2 - s2) < 1e-8 and abs(p.adjusted_mu_bar - mb) < 1e-8


@settings(max_examples=60, deadline=None)
@given(st.sampled_from("AB"), st.floats(1.0, 10), st.floats(0.01, 10))
def test_exact_linear_oracle(variant, c, spike):
    # E[tr W]/n = m + (m/n) delta (A) or m + nu (B); Var(tr W / n) = m / n
    spec = EnsembleSpec.model_a(c, spike) if variant == "A" else EnsembleSpec.model_b(c, spike)
    try:
        p = clt_params(spec, LIN, 10)
    except CriticalRegimeError:
        return
    shift = c * spike if variant == "A" else spike
    assert p.mu == pytest.approx(c, rel=1e-12) and p.sigma2 == pytest.approx(c, rel=1e-12)
    assert p.adjusted_mu_bar == pytest.approx(shift, rel=1e-9, abs=1e-9)
