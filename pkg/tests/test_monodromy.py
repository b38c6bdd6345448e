"""Parallel transport: oracles, path algebra and error handling."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecl.connection import build_orbit_rep_cherednik
from ecl.elliptic import ThetaEngine, theta
from ecl.monodromy import (
    ArcSegment,
    FormEvaluator,
    LineSegment,
    Path,
    SingularityApproachError,
    curvature_residual,
    kzb_evaluator,
    loop_monodromy,
    parallel_transport,
    parallelogram_clear,
    parse_complex,
    path_from_json,
    rectangle_paths,
    scalar_theta_evaluator,
)
from ecl.rootsys import build_root_system

TAU = 0.3 + 1.1j
ENG = ThetaEngine(TAU)


def line(a, b) -> Path:
    return Path((LineSegment([a], [b]),), TAU)


@settings(max_examples=8, deadline=None)
@given(
    st.complex_numbers(max_magnitude=0.45, allow_nan=False, allow_infinity=False).filter(lambda z: abs(z) > 0.1),
    st.complex_numbers(max_magnitude=0.3, allow_nan=False, allow_infinity=False),
)
def test_scalar_transport_is_theta_ratio(z0, dz):
    z1 = z0 + dz
    if min(abs(z0 + t * dz) for t in np.linspace(0, 1, 50)) < 0.05:
        return
    res = parallel_transport(scalar_theta_evaluator(ENG), line(z0, z1), 1e-11)
    assert abs(res.matrix[0, 0] - theta(ENG, z1) / theta(ENG, z0)) < 1e-8 * abs(theta(ENG, z1) / theta(ENG, z0))


def test_period_multipliers():
    ev = scalar_theta_evaluator(ENG)
    z0 = 0.2 + 0.3j
    one = parallel_transport(ev, line(z0, z0 + 1), 1e-10).matrix[0, 0]
    tau = parallel_transport(ev, line(z0, z0 + TAU), 1e-10).matrix[0, 0]
    assert abs(one + 1) < 1e-8
    expected = -cmath.exp(-1j * math.pi * TAU) * cmath.exp(-2j * math.pi * z0)
    assert abs(tau - expected) < 1e-8 * abs(expected)


def test_divisor_loop():
    res = loop_monodromy(scalar_theta_evaluator(ENG, 1 / 3), [0], 0.3, TAU, 1e-10)
    assert abs(res.matrix[0, 0] - cmath.exp(2j * math.pi / 3)) < 1e-8


def test_reverse_inverts_and_concatenation_multiplies():
    rs = build_root_system("A", 2)
    ev = kzb_evaluator(build_orbit_rep_cherednik(rs, 0.4), rs, ENG)
    p = Path((LineSegment([0.23 + 0.31j, 0.17 + 0.12j], [0.3 + 0.33j, 0.2 + 0.1j]),), TAU)
    q = Path((LineSegment([0.3 + 0.33j, 0.2 + 0.1j], [0.28 + 0.4j, 0.25 + 0.15j]),), TAU)
    Fp = parallel_transport(ev, p, 1e-11).matrix
    Fr = parallel_transport(ev, p.reversed(), 1e-11).matrix
    assert np.max(np.abs(Fr @ Fp - np.eye(ev.dim))) < 1e-8
    Fq = parallel_transport(ev, q, 1e-11).matrix
    Fpq = parallel_transport(ev, p + q, 1e-11).matrix
    assert np.max(np.abs(Fpq - Fq @ Fp)) < 1e-8


def test_zero_form_gives_identity():
    ev = FormEvaluator(3, 2, lambda z: np.zeros((2, 3, 3), dtype=complex), lambda z: 1.0)
    p = Path((LineSegment([0, 0], [1, 1j]), ArcSegment([0.5, 1j], 0.5)), TAU)  # arc starts at center + radius
    res = parallel_transport(ev, p)
    assert np.allclose(res.matrix, np.eye(3))
    assert res.rejected == 0


def test_constant_form_is_exponential():
    A = np.array([[0, 1], [-1, 0]], dtype=complex)
    ev = FormEvaluator(2, 1, lambda z: A[None], lambda z: 1.0)
    res = parallel_transport(ev, Path((LineSegment([0], [0.7]),), TAU), 1e-12)
    c, s = math.cos(0.7), math.sin(0.7)
    assert np.allclose(res.matrix, [[c, s], [-s, c]], atol=1e-10)


def test_singularity_is_refused():
    with pytest.raises(SingularityApproachError):
        parallel_transport(scalar_theta_evaluator(ENG), line(-0.3 + 0j, 0.3 + 0j))


def test_discontinuous_path_rejected():
    with pytest.raises(ValueError):
        Path((LineSegment([0], [1]), LineSegment([2], [3])), TAU)
    with pytest.raises(ValueError):
        Path((), TAU)


def test_homotopy_invariance_sl3():
    rs = build_root_system("A", 2)
    ev = kzb_evaluator(build_orbit_rep_cherednik(rs, 0.4), rs, ENG)
    P = [0.23 + 0.31j, 0.17 + 0.12j]
    a, b = rectangle_paths(P, [0.2 + 0.05j, 0], [0.03 + 0.15j, 0.1 + 0.1j], TAU)
    Fa = parallel_transport(ev, a, 1e-10).matrix
    Fb = parallel_transport(ev, b, 1e-10).matrix
    assert np.max(np.abs(Fa - Fb)) < 1e-6


def test_curvature_converges_quadratically():
    rs = build_root_system("A", 2)
    ev = kzb_evaluator(build_orbit_rep_cherednik(rs, 0.4), rs, ENG)
    P = [0.23 + 0.31j, 0.17 + 0.12j]
    r1, r2 = curvature_residual(ev, P, 2e-3), curvature_residual(ev, P, 1e-3)
    assert 3.0 < r1 / r2 < 5.0


def test_path_hash_is_stable():
    a, b = line(0.1, 0.2), line(0.1, 0.2)
    assert a.hash == b.hash
    assert a.hash != line(0.1, 0.3).hash


def test_path_from_json():
    data = {
        "tau": "0.3+1.1i",
        "segments": [
            {"kind": "line", "start": ["0.2+0.3i"], "end": ["1.2+0.3i"]},
            {"kind": "arc", "center": ["1.2+0.3i"], "radius": 0.1, "theta0": math.pi, "theta1": 3 * math.pi},
        ],
    }
    with pytest.raises(ValueError):
        path_from_json(data)  # arc starts at center - radius, not at the line's end
    data["segments"][1]["center"] = ["1.3+0.3i"]
    p = path_from_json(data)
    assert p.tau == TAU and len(p.segments) == 2
    bare = [{"kind": "line", "start": ["0.2+0.3i"], "end": ["0.4+0.3i"], "tau": "0.3+1.1i"}]
    assert path_from_json(bare).tau == TAU
    with pytest.raises(ValueError):
        path_from_json([{"kind": "line", "start": ["0"], "end": ["1"]}])


def test_parse_complex_forms():
    assert parse_complex("0.3+1.1i") == 0.3 + 1.1j
    assert parse_complex([0.5, -2]) == 0.5 - 2j
    assert parse_complex(3) == 3


def test_parallelogram_clear():
    assert parallelogram_clear(ENG, [(0.2 + 0.1j, 0.3, 0.2j)])
    assert not parallelogram_clear(ENG, [(-0.1 - 0.1j, 0.3, 0.3j)])
