"""Finite representations, flatness relations and assembled one-forms."""

from __future__ import annotations

import numpy as np
import pytest

from ecl.connection import (
    CapabilityError,
    ConnRep,
    abelian_form_closedness,
    assemble_casimir_form,
    assemble_cherednik_form,
    assemble_kzb_form,
    build_orbit_rep_cherednik,
    build_small_rep_cherednik,
    delta_series_coefficients,
    duality_residual,
    flatness_relations_check,
    kernel_apply,
    modular_delta_series,
    root_value,
)
from ecl.elliptic import SingularityError, ThetaEngine, k_series, trig_k_series
from ecl.rootsys import build_root_system

TAU = 0.3 + 1.1j


@pytest.fixture(scope="module")
def a2():
    return build_root_system("A", 2)


@pytest.fixture(scope="module")
def a3():
    return build_root_system("A", 3)


def test_small_rep_casimir_squares(a3):
    rep = build_small_rep_cherednik(a3, 0, 1)
    for alpha in a3.positive_roots:
        kap = rep.kappa_map[alpha]
        assert np.allclose(kap @ kap, 2 * float(a3.norm2(alpha)) * kap)
        assert np.allclose(rep.s(alpha) @ rep.s(alpha), np.eye(rep.dim))


def test_small_rep_relations_and_capabilities(a3):
    rep = build_small_rep_cherednik(a3, 0, 1)
    report = flatness_relations_check(rep, a3)
    assert report.passed
    assert report.skipped == ["2", "3", "4"]
    with pytest.raises(CapabilityError):
        flatness_relations_check(rep, a3, relations=["3"])


@pytest.mark.parametrize("n", [3, 4])
def test_orbit_rep_is_flat(n):
    rs = build_root_system("A", n - 1)
    rep = build_orbit_rep_cherednik(rs, 0.4)
    assert rep.dim == {3: 6, 4: 24}[n]
    report = flatness_relations_check(rep, rs)
    assert report.passed and not report.skipped


def test_orbit_rep_t_matches_casimir(a2):
    rep = build_orbit_rep_cherednik(a2, 0.4)
    hv = 3
    for alpha in a2.positive_roots:
        expected = 0.4 / 2 * rep.kappa_map[alpha] + rep.Z_scalar / hv * np.eye(rep.dim)
        assert np.allclose(rep.t(alpha), expected)


def test_control_model_fails_relation_3(a2):
    small = build_small_rep_cherednik(a2, 0, 1)
    zero = np.zeros((small.dim, small.dim))
    rep = ConnRep(small.dim, dict(small.kappa_map), x_map=lambda u: zero, y_map=lambda u: zero)
    report = flatness_relations_check(rep, a2)
    assert report.result("3").status == "fail"
    assert report.result("1").status == "pass"


def test_orbit_point_validation(a2):
    with pytest.raises(ValueError):
        build_orbit_rep_cherednik(a2, point=[0.1, 0.1, -0.2])
    with pytest.raises(ValueError):
        build_orbit_rep_cherednik(a2, point=[0.1, 0.2, 0.3])


def test_kernel_apply_nilpotent_is_exact():
    eng = ThetaEngine(TAU)
    ks = k_series(eng, 0.2 + 0.3j, 8)
    X = np.array([[0, 1], [0, 0]], dtype=complex)
    T = np.array([[1, 0], [0, 2]], dtype=complex)
    val, tail = kernel_apply(ks, X, T)
    adX = X @ T - T @ X
    assert np.allclose(val, ks[0] * T + ks[1] * adX)
    assert tail == 0


def test_kzb_form_closed_kernel_matches_series(a2):
    eng = ThetaEngine(TAU)
    rep = build_orbit_rep_cherednik(a2, 0.4)
    z = [0.23 + 0.31j, 0.17 + 0.12j]
    closed = assemble_kzb_form(rep, a2, z, eng, ad_order=None).merged()
    series = assemble_kzb_form(rep, a2, z, eng, ad_order=24).merged()
    assert np.max(np.abs(closed - series)) < 1e-8


def test_form_refuses_divisor(a2):
    eng = ThetaEngine(TAU)
    rep = build_orbit_rep_cherednik(a2, 0.4)
    with pytest.raises(SingularityError):
        assemble_kzb_form(rep, a2, [0.15, 0.3], eng)  # alpha_1(z) = 0


def test_casimir_form_trigonometric_degeneration(a3):
    rep = build_small_rep_cherednik(a3, 0, 1)
    z = [0.21 + 0.1j, 0.13 - 0.05j, 0.3 + 0.02j]
    ell = assemble_casimir_form(rep, a3, z, ThetaEngine(20j)).merged()
    trig = assemble_casimir_form(
        rep, a3, z, ThetaEngine(20j), kernel=lambda e, w, o: trig_k_series(w, o)
    ).merged()
    assert np.max(np.abs(ell - trig)) < 1e-7


def test_cherednik_form_matches_kzb_for_orbit_rep(a2):
    """With t = -c s_alpha and hbar = 0 the Cherednik form is the KZB form."""
    eng = ThetaEngine(TAU)
    rep = build_orbit_rep_cherednik(a2, 0.4)
    z = [0.23 + 0.31j, 0.17 + 0.12j]
    kzb = assemble_kzb_form(rep, a2, z, eng, ad_order=None).merged()
    ch = assemble_cherednik_form(rep, a2, z, eng, hbar=0, c=0.4, ad_order=24).merged()
    assert np.max(np.abs(kzb - ch)) < 1e-8


def test_root_value_uses_coroot_coordinates(a2):
    alpha1, alpha2 = a2.simple_roots
    z = [0.3, 0.1]
    assert root_value(a2, alpha1, z) == pytest.approx(2 * 0.3 - 0.1)
    assert root_value(a2, alpha2, z) == pytest.approx(-0.3 + 2 * 0.1)


@pytest.fixture(scope="module")
def duality_minus():
    eng = ThetaEngine(TAU)
    return duality_residual([0.11 + 0.05j, 0.23 + 0.1j, -0.07 + 0.2j], 4, 2, eng, 2, 3, t_sign=-1)


def test_duality_higher_powers_with_sign_minus(duality_minus):
    assert duality_minus["residual_empty"]
    assert duality_minus["du_passed"]
    assert duality_minus["p0_degree_corrected_passed"]


def test_duality_literal_constant_fails_on_constants(duality_minus):
    bad = [e for e in duality_minus["entries"] if e["p"] == 0 and e["variant"] == "literal"]
    assert bad and not any(e["passed"] for e in bad)
    assert bad[0]["residual"] == "[(1/16)]*1"


def test_abelian_form_closed():
    eng = ThetaEngine(TAU)
    assert abelian_form_closedness(eng, 4, [0.11 + 0.05j, 0.23 + 0.1j, -0.07 + 0.2j, 0.02 + 0.31j]) < 1e-6


def test_delta_series_coefficients_match_phi():
    for coeff, phi in delta_series_coefficients(ThetaEngine(TAU), 4):
        assert abs(coeff - phi) < 1e-9 * max(1, abs(phi))


def test_delta_periodic_in_tau(a3):
    rep = build_small_rep_cherednik(a3, 0, 1)
    z = [0.21 + 0.1j, 0.13 - 0.05j, 0.3 + 0.02j]
    d0, notes = modular_delta_series(ThetaEngine(TAU), a3, rep, z)
    d1, _ = modular_delta_series(ThetaEngine(TAU + 1), a3, rep, z)
    assert np.max(np.abs(d0 - d1)) < 1e-9
    assert notes == ["IH summand omitted", "IE summands omitted"]
