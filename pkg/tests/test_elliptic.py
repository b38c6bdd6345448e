"""Theta function, kernel series and Eisenstein data."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecl.elliptic import (
    EllipticError,
    SingularityError,
    ThetaEngine,
    XSeries,
    a_coeffs,
    bernoulli,
    eisenstein,
    heat_equation_residual,
    k_series,
    k_value,
    phi_series,
    theta,
    theta_logderiv,
    theta_property_residuals,
    trig_k_series,
)

TAUS = [0.3 + 1.1j, -0.4 + 0.9j]
unit = st.floats(-0.5, 0.5, allow_nan=False)


def point(engine: ThetaEngine, a: float, b: float) -> complex:
    return complex(a) + complex(b) * engine.tau


@pytest.mark.parametrize("tau", TAUS)
@settings(max_examples=25, deadline=None)
@given(a=unit, b=unit)
def test_theta_properties(tau, a, b):
    eng = ThetaEngine(tau, 40)
    z = point(eng, a, b)
    if abs(z) < 0.05:
        return
    res = theta_property_residuals(eng, z)
    assert max(res.values()) < 1e-10, res


def test_theta_normalization_and_zero():
    eng = ThetaEngine(0.3 + 1.1j)
    assert theta(eng, 0) == 0
    h = 1e-6
    assert abs((theta(eng, h) - theta(eng, -h)) / (2 * h) - 1) < 1e-9


@pytest.mark.parametrize("tau", TAUS)
def test_heat_equation(tau):
    eng = ThetaEngine(tau)
    for z in (0.1 + 0.2j, 0.37 - 0.1j, -0.21 + 0.33j):
        assert heat_equation_residual(eng, z, 1e-4) < 1e-6


def test_invalid_tau():
    with pytest.raises(EllipticError):
        ThetaEngine(0.3 - 1.0j)
    with pytest.raises(EllipticError):
        ThetaEngine(0.5)


def test_singular_point_raises():
    eng = ThetaEngine(0.3 + 1.1j)
    with pytest.raises(SingularityError):
        k_series(eng, 1 + eng.tau + 1e-9)


@pytest.mark.parametrize("tau", TAUS)
@settings(max_examples=20, deadline=None)
@given(a=unit, b=unit)
def test_k_constant_term_and_odd_symmetry(tau, a, b):
    eng = ThetaEngine(tau)
    z = point(eng, a, b)
    if abs(z) < 0.05:
        return
    ks, km = k_series(eng, z, 8), k_series(eng, -z, 8)
    assert abs(ks[0] - theta_logderiv(eng, z)) < 1e-10 * max(1, abs(ks[0]))
    for j in range(9):
        assert abs(ks[j] + (-1) ** j * km[j]) < 1e-10 * max(1, abs(ks[j]))


def test_k_series_matches_closed_form():
    eng = ThetaEngine(0.3 + 1.1j)
    z = 0.21 + 0.17j
    ks = k_series(eng, z, 30)
    for x in (0.01, 0.02 - 0.01j, 0.05j):
        closed = theta(eng, z + x) / (theta(eng, z) * theta(eng, x)) - 1 / x
        assert abs(ks.evaluate(x) - closed) < 1e-10
        assert abs(k_value(eng, z, x) - closed) < 1e-10
    assert abs(k_value(eng, z, 1e-5) - ks.evaluate(1e-5)) < 1e-12


def test_trigonometric_degeneration():
    eng = ThetaEngine(20j)
    for z in (0.2 + 0.3j, -0.37 + 0.05j):
        ks, tk = k_series(eng, z, 8), trig_k_series(z, 8)
        assert ks.max_abs_diff(tk) < 1e-7


def test_bernoulli_numbers():
    assert bernoulli(6) == [Fraction(1), Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30), 0, Fraction(1, 42)]


def test_a_coefficients():
    # phi(x) = sum a_{2n} E_{2n+2} x^{2n}, a_{2n} = (2n+1) |B_{2n+2}| (2 pi)^{2n+2} / (2n+2)!
    for n, a in enumerate(a_coeffs(4), start=1):
        b = abs(bernoulli(2 * n + 2)[-1])
        expected = Fraction(2 * n + 1) * b * 2 ** (2 * n + 2) / math.factorial(2 * n + 2)
        assert a.rational == expected
        assert a.power == 2 * n + 2


def test_eisenstein_e4_e6_from_q_expansion():
    eng = ThetaEngine(0.3 + 1.1j)
    q = eng.q

    def sigma(k, n):
        return sum(d**k for d in range(1, n + 1) if n % d == 0)

    e4 = 1 + 240 * sum(sigma(3, n) * q**n for n in range(1, 40))
    e6 = 1 - 504 * sum(sigma(5, n) * q**n for n in range(1, 40))
    assert abs(eisenstein(eng, 1) - e4) < 1e-10
    assert abs(eisenstein(eng, 2) - e6) < 1e-10


def test_eisenstein_period_one():
    a, b = ThetaEngine(0.3 + 1.1j), ThetaEngine(1.3 + 1.1j)
    for m in (1, 2, 3):
        assert abs(eisenstein(a, m) - eisenstein(b, m)) < 1e-10


def test_phi_series_is_even():
    phi = phi_series(ThetaEngine(0.1 + 1.3j), 8)
    assert all(abs(phi[j]) < 1e-12 for j in (0, 1, 3, 5, 7))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=1, max_size=8))
def test_xseries_exp_log_roundtrip(cs):
    s = XSeries(np.array([0j] + cs))
    back = s.exp().log()
    assert back.max_abs_diff(s) < 1e-9 * max(1, max(abs(c) for c in cs)) ** len(cs)


def test_xseries_reciprocal():
    s = XSeries(np.array([2, 1, -1, 0.5j]))
    prod = s * s.reciprocal()
    assert prod.max_abs_diff(XSeries.constant(1, 3)) < 1e-14


def test_theta_quasi_periodicity_at_large_z():
    eng = ThetaEngine(-0.4 + 0.9j)
    z = 0.13 + 0.07j
    w = z + 2 + eng.tau
    f = cmath.exp(-1j * math.pi * eng.tau) * cmath.exp(-2j * math.pi * (z + 2))
    assert abs(theta(eng, w) + f * theta(eng, z + 2)) < 1e-10 * abs(theta(eng, w))
