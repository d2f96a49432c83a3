import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiked_clt.ensembles import EnsembleSpec, Regime, SupportInterval, spike_geometry, support_interval
from spiked_clt.errors import AnalyticityError, CriticalRegimeError, DomainError, UnsupportedStatisticError
from spiked_clt.quadrature import (QuadratureConfig, chebyshev_coefficients, log_kernel_equivalence, mean_integral,
                                   series_spike_correction, spike_correction, variance_from_series,
                                   variance_pv_oracle)
from spiked_clt.statistics import LinearStatistic, make_statistic

LIN = make_statistic("linear")
SQ = make_statistic("polynomial", [0, 0, 1])
ONE = make_statistic("polynomial", [1.0])
FOUR = SupportInterval(0.0, 4.0)


def test_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(max_order=8)
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=0)


def test_linear_coefficients():
    iv = support_interval(EnsembleSpec.model_a(3))
    a = chebyshev_coefficients(LIN, iv).coeffs
    assert a[0] / 2 == pytest.approx(iv.center, rel=1e-14)
    assert a[1] == pytest.approx(iv.half_width, rel=1e-14)
    assert np.all(np.abs(a[2:]) < 1e-14)


def test_square_coefficients():
    a = chebyshev_coefficients(SQ, FOUR).coeffs
    assert a[0] / 2 == pytest.approx(6, rel=1e-14)
    assert a[1] == pytest.approx(8, rel=1e-14)
    assert a[2] == pytest.approx(2, rel=1e-14)
    assert np.all(np.abs(a[3:]) < 1e-13)


def test_constant_coefficients():
    a = chebyshev_coefficients(make_statistic("polynomial", [2.5]), FOUR).coeffs
    assert a[0] == pytest.approx(5.0, rel=1e-15)
    assert np.all(a[1:] == 0) or np.all(np.abs(a[1:]) < 1e-15)


@pytest.mark.parametrize("stat,iv", [(make_statistic("lrt", [1.5]), support_interval(EnsembleSpec.model_a(1.5))),
                                     (make_statistic("capacity", [0.05]), support_interval(EnsembleSpec.model_b(1))),
                                     (make_statistic("log1p"), support_interval(EnsembleSpec.model_a(7)))])
def test_reconstruction_and_tail(stat, iv):
    series = chebyshev_coefficients(stat, iv)
    theta = np.linspace(0, math.pi, 64)
    err = np.max(np.abs(series.at_angles(theta) - stat(iv.nodes(theta))))
    assert err <= 1e-9 * (1 + np.max(np.abs(stat(iv.nodes(theta)))))
    a = np.abs(series.coeffs)
    assert a[-1] <= 1e-12 * a.max() * 1e3  # the kept tail sits well below the acceptance threshold
    # midpoint values from the type-III transform agree with direct evaluation
    M = 4 * len(a)
    th = math.pi * (np.arange(M) + 0.5) / M
    assert np.max(np.abs(series.at_midpoints(M) - series.at_angles(th))) < 1e-12 * (1 + a.max())


def test_rough_statistic_is_rejected():
    iv = SupportInterval(1.0, 3.0)
    with pytest.raises(AnalyticityError):
        chebyshev_coefficients(lambda x: np.abs(x - 2.0), iv)


def test_domain_violation_is_rejected():
    with pytest.raises(DomainError):
        chebyshev_coefficients(make_statistic("lrt", [2]), FOUR)


@pytest.mark.parametrize("spec", [EnsembleSpec.model_a(1), EnsembleSpec.model_a(2), EnsembleSpec.model_b(7.5),
                                  EnsembleSpec.model_c(2, 2), EnsembleSpec.model_c(5, 1.5)])
def test_equilibrium_density_normalised(spec):
    series = chebyshev_coefficients(ONE, support_interval(spec))
    assert mean_integral(series, spec) == pytest.approx(1.0, abs=1e-10)


def test_linear_mean_model_a():
    spec = EnsembleSpec.model_a(2)
    assert mean_integral(chebyshev_coefficients(LIN, support_interval(spec)), spec) == pytest.approx(2, abs=1e-10)


def test_mean_rejects_wrong_support():
    with pytest.raises(DomainError):
        mean_integral(chebyshev_coefficients(LIN, FOUR), EnsembleSpec.model_a(2))


def test_series_variance_examples():
    spec = EnsembleSpec.model_a(2)
    iv = support_interval(spec)
    assert variance_from_series(chebyshev_coefficients(LIN, iv)) == pytest.approx(2, rel=1e-13)
    assert variance_from_series(chebyshev_coefficients(ONE, iv)) == 0
    lrt = variance_from_series(chebyshev_coefficients(make_statistic("lrt", [2]), iv))
    assert lrt == pytest.approx(-0.5 - math.log(0.5), rel=1e-12)


def test_pv_oracle_examples():
    iv = support_interval(EnsembleSpec.model_a(2))
    assert variance_pv_oracle(LIN, iv) == pytest.approx(2, abs=1e-6)
    assert variance_pv_oracle(SQ, FOUR) == pytest.approx(18, abs=1e-6)
    assert abs(variance_pv_oracle(ONE, iv)) < 1e-12


def test_pv_oracle_needs_derivative():
    stat = LinearStatistic("bare", (), np.exp)
    with pytest.raises(UnsupportedStatisticError):
        variance_pv_oracle(stat, FOUR)


def test_spike_correction_examples():
    spec = EnsembleSpec.model_a(2, 0.5)
    g = spike_geometry(spec)
    series = chebyshev_coefficients(LIN, g.interval)
    assert spike_correction(series, g) == pytest.approx(1.0, abs=1e-12)
    assert spike_correction(series, spike_geometry(spec.with_spike(0))) == 0.0
    g1 = spike_geometry(spec.with_spike(1.0))
    literal = spike_correction(series, g1)
    assert literal == pytest.approx(-4.0, abs=1e-12)
    assert literal + g1.z0 == pytest.approx(2.0, abs=1e-12)


def test_spike_correction_refuses_critical():
    spec = EnsembleSpec.model_a(2, 1 / math.sqrt(2))
    g = spike_geometry(spec)
    assert g.regime is Regime.CRITICAL
    with pytest.raises(CriticalRegimeError):
        spike_correction(chebyshev_coefficients(LIN, g.interval), g)


def test_spike_correction_support_mismatch():
    g = spike_geometry(EnsembleSpec.model_a(2, 0.5))
    with pytest.raises(DomainError):
        spike_correction(chebyshev_coefficients(LIN, FOUR), g)


STATS = [make_statistic("linear"), make_statistic("log1p"), make_statistic("capacity", [0.8]),
         make_statistic("polynomial", [0.3, -1, 0.2, 0.05])]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from("ABC"), st.floats(1.1, 10), st.floats(1.1, 10), st.floats(0.01, 60), st.integers(0, 3))
def test_subcritical_series_agreement(variant, r1, r2, spike, k):
    spec = {"A": EnsembleSpec.model_a(r1, spike), "B": EnsembleSpec.model_b(r1, spike),
            "C": EnsembleSpec.model_c(r1, r2, spike)}[variant]
    g = spike_geometry(spec)
    if g.regime is Regime.CRITICAL or abs(g.w) < 1.05:
        return
    stat = STATS[k]
    if variant == "C":
        from spiked_clt.clt import composed_statistic
        stat = composed_statistic(stat, spec)
    series = chebyshev_coefficients(stat, g.interval)
    value = spike_correction(series, g)
    assert abs(value - series_spike_correction(series, g.w)) <= 1e-8 * (1 + abs(value))


@pytest.mark.parametrize("spec", [EnsembleSpec.model_a(1.5), EnsembleSpec.model_a(2), EnsembleSpec.model_a(5)])
@pytest.mark.parametrize("stat", [make_statistic("linear"), make_statistic("polynomial", [0, 0, 1]),
                                  make_statistic("capacity", [1.0]), make_statistic("log1p")])
def test_series_matches_pv_oracle(spec, stat):
    iv = support_interval(spec)
    s2 = variance_from_series(chebyshev_coefficients(stat, iv))
    assert abs(s2 - variance_pv_oracle(stat, iv)) <= 1e-6 * (1 + s2)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=7), st.floats(0.01, 3), st.floats(0.1, 4))
def test_polynomial_variance_oracle_property(coeffs, a, width):
    stat = make_statistic("polynomial", coeffs)
    iv = SupportInterval(a, a + width)
    s2 = variance_from_series(chebyshev_coefficients(stat, iv))
    assert abs(s2 - variance_pv_oracle(stat, iv, QuadratureConfig(pv_grid=1001))) <= 1e-6 * (1 + s2)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 3), st.floats(0.1, 5), st.floats(0.2, 4), st.floats(-3, 3))
def test_affine_covariance_of_variance(a, width, scale, shift):
    base = SupportInterval(a, a + width)
    f = make_statistic("capacity", [0.3])
    # g(y) = f((y - shift)/scale) on the mapped interval has the same Chebyshev coefficients
    g = LinearStatistic("mapped", (), lambda y: f((np.asarray(y) - shift) / scale))
    if scale * base.a + shift < 0:
        return
    mapped = SupportInterval(scale * base.a + shift, scale * base.b + shift)
    s_f = variance_from_series(chebyshev_coefficients(f, base))
    s_g = variance_from_series(chebyshev_coefficients(g, mapped))
    assert s_g == pytest.approx(s_f, rel=1e-10, abs=1e-14)


def test_log_kernel_square_example():
    s1, s2 = log_kernel_equivalence(SQ, SupportInterval(1.0, 2.0), 10.0)
    assert abs(s1 - s2) <= 1e-8 * (1 + abs(s1))


def test_log_kernel_linear_closed_form():
    iv = SupportInterval(1.0, 2.0)
    z = 5.0
    expected = (z - iv.center - math.sqrt((z - iv.a) * (z - iv.b))) / 2
    s1, s2 = log_kernel_equivalence(LIN, iv, z)
    assert s1 == pytest.approx(expected, abs=1e-12)
    assert s2 == pytest.approx(expected, abs=1e-10)


def test_log_kernel_constant_and_far_field():
    iv = SupportInterval(1.0, 2.0)
    s1, s2 = log_kernel_equivalence(ONE, iv, 10.0)
    assert abs(s1) < 1e-12 and s2 == 0
    s1, s2 = log_kernel_equivalence(LIN, iv, 1e6)
    assert abs(s1) < 1e-5 and abs(s2) < 1e-5


def test_log_kernel_rejects_z_inside():
    with pytest.raises(DomainError):
        log_kernel_equivalence(LIN, SupportInterval(1.0, 2.0), 2.0)


@pytest.mark.parametrize("deg", range(1, 7))
def test_log_kernel_polynomials(deg):
    rng = np.random.default_rng(deg)
    stat = make_statistic("polynomial", rng.uniform(-1, 1, deg + 1))
    iv = support_interval(EnsembleSpec.model_a(3))
    for z in (iv.b + 0.5, 2 * iv.b, 10 * iv.b):
        s1, s2 = log_kernel_equivalence(stat, iv, z)
        assert abs(s1 - s2) <= 1e-8 * (1 + abs(s1))
