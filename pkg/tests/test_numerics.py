import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from casimir import numerics
from casimir.exceptions import DomainError, NonFiniteIntegrandError
from casimir.numerics import (Estimate, QuadratureConfig, ThermalState, integrate_interval,
                              integrate_semi_infinite, integrate_strip, matsubara_sum,
                              zero_temperature_integral)


@pytest.mark.parametrize("k", range(24))
def test_single_panel_exact_for_polynomials(k):
    # the 15-point Kronrod rule integrates degree <= 22 (23 by symmetry) exactly
    value, _ = numerics._kronrod_panels(lambda x: x ** k, np.array([0.0]), np.array([1.0]))
    assert value[0] == pytest.approx(1.0 / (k + 1), rel=1e-14)


def test_embedded_gauss_weights_integrate_degree_13():
    nodes = numerics._NODES
    assert np.dot(numerics._GAUSS, nodes ** 12) == pytest.approx(2.0 / 13, rel=1e-14)
    assert np.count_nonzero(numerics._GAUSS) == 7


@pytest.mark.parametrize("f, lower", [
    (lambda x: np.exp(-x), 0.0),
    (lambda x: x * x * np.exp(-2 * x), 0.0),
    (lambda x: 1.0 / (1.0 + x * x), 0.0),
    (lambda x: np.exp(-x) * np.cos(3 * x), 0.0),
    (lambda x: x ** 3 * np.exp(-x) / -np.expm1(-x), 0.0),
    (lambda x: np.exp(-x * x), 1.5),
    (lambda x: 1.0 / (x * x), 2.0),
])
def test_semi_infinite_matches_scipy(f, lower):
    est = integrate_semi_infinite(f, lower, vectorized=True)
    ref, _ = integrate.quad(f, lower, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    assert est.converged
    assert est.value == pytest.approx(ref, rel=1e-9, abs=1e-13)


def test_bose_integral_against_zeta():
    est = integrate_semi_infinite(lambda x: x ** 3 * np.exp(-x) / -np.expm1(-x), 0.0,
                                  vectorized=True)
    assert est.value == pytest.approx(math.pi ** 4 / 15, rel=1e-12)


def test_scalar_and_vectorized_agree():
    f = lambda x: x * math.exp(-x) if np.isscalar(x) else x * np.exp(-x)
    a = integrate_semi_infinite(f, 0.3)
    b = integrate_semi_infinite(f, 0.3, vectorized=True)
    assert a.value == pytest.approx(b.value, rel=1e-15)


def test_error_estimate_is_honest():
    est = integrate_semi_infinite(lambda x: np.exp(-x) * np.sin(x) ** 2, 0.0, vectorized=True)
    assert abs(est.value - 0.4) <= max(est.abs_error, 1e-15)


def test_non_integrable_tail_reports_failure():
    cfg = QuadratureConfig(max_subdivisions=50)
    est = integrate_semi_infinite(lambda x: 1.0, 0.0, cfg)
    assert not est.converged


def test_nan_names_the_abscissa():
    with pytest.raises(NonFiniteIntegrandError) as info:
        integrate_semi_infinite(lambda x: np.where(x > 1.0, np.nan, 1.0), 0.0, vectorized=True)
    assert info.value.abscissa > 1.0


def test_integrate_interval():
    est = integrate_interval(np.sin, 0.0, math.pi, vectorized=True)
    assert est.value == pytest.approx(2.0, rel=1e-13)
    assert integrate_interval(np.sin, 1.0, 1.0).value == 0.0


def test_zero_temperature_integral_is_integral_from_zero():
    f = lambda z: np.exp(-2 * z) * (1 + z)
    assert zero_temperature_integral(f, vectorized=True).value == pytest.approx(0.75, rel=1e-13)


@pytest.mark.parametrize("f, ref", [
    (lambda x, y: np.exp(-x) * np.cos(3 * y), math.sin(3) / 3),
    (lambda x, y: x * x * np.exp(-x * (1 + y)), 0.75),
    (lambda x, y: x ** 3 * np.exp(-x * (1 + y * y)) / -np.expm1(-x * (1 + y * y)), None),
])
def test_strip_against_scipy(f, ref):
    est = integrate_strip(f)
    if ref is None:
        ref, _ = integrate.dblquad(lambda x, y: f(x, y), 0, 1, 0, np.inf,
                                   epsabs=1e-14, epsrel=1e-12)
    assert est.converged
    assert est.value == pytest.approx(ref, rel=1e-9)


def test_strip_rejects_nonfinite():
    with pytest.raises(NonFiniteIntegrandError):
        with np.errstate(invalid="ignore"):
            integrate_strip(lambda x, y: np.log(y - 0.5))


@given(st.floats(0.05, 20.0))
def test_matsubara_geometric_series(spacing):
    th = ThermalState.finite(2 * math.pi / spacing)
    est = matsubara_sum(lambda n, z: math.exp(-z), th)
    exact = 0.5 + math.exp(-spacing) / -math.expm1(-spacing)
    assert th.spacing == pytest.approx(spacing, rel=1e-14)
    assert est.converged
    # dropping terms below 1e-12 of the sum leaves a geometric tail
    assert est.value == pytest.approx(exact, rel=3e-12 / -math.expm1(-spacing))


def test_matsubara_accumulates_estimates():
    th = ThermalState.finite(1.0)
    est = matsubara_sum(lambda n, z: Estimate(math.exp(-z), 1e-15, 15, n != 3), th)
    assert not est.converged
    assert est.info["failed_terms"] == [3]


def test_matsubara_term_budget():
    cfg = QuadratureConfig(max_matsubara_terms=10)
    est = matsubara_sum(lambda n, z: 1.0, ThermalState.finite(1.0), cfg)
    assert not est.converged and est.info["reason"]


def test_matsubara_rejects_zero_temperature():
    with pytest.raises(DomainError):
        matsubara_sum(lambda n, z: 1.0, ThermalState.zero())


@given(st.floats(0.5, 5.0))
def test_riemann_limit(decay):
    # Euler-Maclaurin: h sum' f(nh) = int f - (h^2/12) f'(0) + O(h^4)
    f = lambda z: math.exp(-decay * z) / (1 + z)
    th = ThermalState.finite(2 * math.pi / 0.01)
    h = th.spacing
    s = h * matsubara_sum(lambda n, z: f(z), th).value
    ref = zero_temperature_integral(f).value
    # next term: h^4 f'''(0) / 720, with |f'''(0)| < (decay + 2)^3; the sum is
    # cut once terms fall below 1e-12 of it, leaving a tail ~ 1/(decay h) terms long
    tol = h ** 4 * (decay + 2) ** 3 / 720 + 2e-12 * s / (decay * h)
    assert s == pytest.approx(ref + h * h / 12 * (decay + 1), abs=tol)


def test_thermal_state_wavenumbers():
    th = ThermalState.finite(2.0, hbar_c=0.5)
    assert th.zeta(3) == pytest.approx(2 * math.pi * 3 / (2.0 * 0.5))
    assert ThermalState.zero().spacing == 0.0
    with pytest.raises(DomainError):
        ThermalState.zero().zeta(1)


def test_from_kelvin():
    th = ThermalState.from_kelvin(300.0)
    from casimir.units import HBAR_C, K_B
    assert th.zeta(1) == pytest.approx(2 * math.pi * K_B * 300.0 / HBAR_C, rel=1e-14)
    assert ThermalState.from_kelvin(0.0).is_zero
    with pytest.raises(DomainError):
        ThermalState.from_kelvin(-1.0)


@pytest.mark.parametrize("kwargs", [
    {"rel_tol": 0.0}, {"abs_tol": -1.0}, {"max_subdivisions": 0},
    {"sum_truncation_rel": 0.0}, {"max_matsubara_terms": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        QuadratureConfig(**kwargs)


def test_tightened():
    cfg = QuadratureConfig().tightened(100.0)
    assert cfg.rel_tol == pytest.approx(1e-12)
    assert cfg.max_subdivisions == QuadratureConfig().max_subdivisions


def test_deterministic():
    f = lambda x: np.exp(-x) / (1 + x ** 2)
    a = integrate_semi_infinite(f, 0.0, vectorized=True)
    b = integrate_semi_infinite(f, 0.0, vectorized=True)
    assert a.value == b.value and a.abs_error == b.abs_error
