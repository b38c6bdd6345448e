"""Acceptance criteria 1 to 11, each at its stated tolerance and time budget."""

from __future__ import annotations

import cmath
import json
import math
import time
from pathlib import Path

import numpy as np
from click.testing import CliRunner

from ecl import cli
from ecl.connection import build_orbit_rep_cherednik, duality_residual
from ecl.constants import constant_report
from ecl.elliptic import (
    ThetaEngine,
    heat_equation_residual,
    k_series,
    theta_logderiv,
    theta_property_residuals,
    trig_k_series,
)
from ecl.glpoly import (
    suite_aell,
    suite_dualpair,
    suite_lemma_qv,
    suite_main_relation,
    suite_xyt,
    suite_zn,
)
from ecl.monodromy import (
    LineSegment,
    Path as TransportPath,
    kzb_evaluator,
    loop_monodromy,
    parallel_transport,
    rectangle_paths,
    scalar_theta_evaluator,
)
from ecl.rootsys import build_root_system

TAUS = (0.3 + 1.1j, -0.4 + 0.9j)
PATHS = Path(__file__).resolve().parent.parent / "paths"


def sample(engine: ThetaEngine, rng: np.random.Generator, count: int) -> list[complex]:
    out = []
    while len(out) < count:
        a, b = rng.uniform(-0.5, 0.5, 2)
        z = complex(a) + complex(b) * engine.tau
        if abs(z) > 0.05:
            out.append(z)
    return out


def by_name(reports) -> dict[str, bool]:
    return {r.name: r.passed for r in reports}


def test_criterion_01_theta_identities(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(20261019)
    prop, heat = 0.0, 0.0
    for tau in TAUS:
        eng = ThetaEngine(tau, 40)
        for z in sample(eng, rng, 50):
            prop = max(prop, *theta_property_residuals(eng, z).values())
            heat = max(heat, heat_equation_residual(eng, z, 1e-4))
    elapsed = time.perf_counter() - start
    checks = {"properties": prop < 1e-10, "heat": heat < 1e-6, "runtime": elapsed < 5}
    assert verdict(1, checks, f"max_rel={prop:.2e} heat={heat:.2e} t={elapsed:.1f}s")


def test_criterion_02_kernel(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    const = odd = 0.0
    for tau in TAUS:
        eng = ThetaEngine(tau, 40)
        for z in sample(eng, rng, 20):
            ks, km = k_series(eng, z, 8), k_series(eng, -z, 8)
            const = max(const, abs(ks[0] - theta_logderiv(eng, z)) / max(1, abs(ks[0])))
            odd = max(odd, max(abs(ks[j] + (-1) ** j * km[j]) / max(1, abs(ks[j])) for j in range(9)))
    eng = ThetaEngine(20j, 40)
    trig = max(
        k_series(eng, z, 8).max_abs_diff(trig_k_series(z, 8))
        for z in (0.2 + 0.3j, -0.37 + 0.05j, 0.41 - 0.2j)
    )
    elapsed = time.perf_counter() - start
    checks = {
        "constant_term": const < 1e-10,
        "odd_symmetry": odd < 1e-10,
        "trig_degeneration": trig < 1e-7,
        "runtime": elapsed < 5,
    }
    assert verdict(2, checks, f"const={const:.1e} odd={odd:.1e} trig={trig:.1e}")


def test_criterion_03_appendix_constant(verdict):
    start = time.perf_counter()
    checks = {}
    for n in range(4, 8):
        checks[f"A{n - 1}=6n"] = constant_report(build_root_system("A", n - 1)).tildeC == 6 * n
    values = []
    for label in ("B3", "B4", "C3", "C4", "D4", "D5", "F4", "G2", "E6"):
        rep = constant_report(build_root_system(label))
        checks[label] = rep.agree
        values.append(f"{label}={'|'.join(str(v) for v in rep.methods.values())}")
    checks["runtime"] = time.perf_counter() - start < 30
    assert verdict(3, checks, " ".join(values))


def test_criterion_04_dual_pair(verdict):
    start = time.perf_counter()
    checks = {}
    for k, n in ((2, 4), (3, 4)):
        for name, ok in by_name(suite_dualpair(k, n, 4)).items():
            checks[f"{name}@({k},{n})"] = ok
    checks["runtime"] = time.perf_counter() - start < 60
    assert verdict(4, checks)


def test_criterion_05_xyt_relations(verdict):
    start = time.perf_counter()
    checks = by_name(suite_xyt(2, 4, 3))
    checks["runtime"] = time.perf_counter() - start < 120
    assert verdict(5, checks)


def test_criterion_06_main_relation_and_zn(verdict):
    start = time.perf_counter()
    checks, notes = {}, []
    for k, n in ((2, 4), (2, 5)):
        (rep,) = suite_main_relation(k, n, 3)
        checks[f"main_relation@({k},{n})"] = rep.passed
        notes += [f"({k},{n}):{x}" for x in rep.notes if x.startswith("failed_instances")]
    checks.update(by_name(suite_zn(2, 4, 3)))
    checks["runtime"] = time.perf_counter() - start < 600
    assert verdict(6, checks, " ".join(notes))


def test_criterion_07_aell(verdict):
    start = time.perf_counter()
    reports = suite_aell(2, 4, 3, weight="sln_zero")
    checks = by_name(reports)
    checks["runtime"] = time.perf_counter() - start < 600
    assert verdict(7, checks, f"states={reports[0].states}")


def test_criterion_08_duality(verdict):
    start = time.perf_counter()
    z = [complex(0.13 * i + 0.05 * i * i, 0.09 * i - 0.02 * i * i) for i in range(4)]
    res = duality_residual(z, 4, 2, ThetaEngine(0.3 + 1.1j, 40), ad_order=2, degree_bound=3)
    checks = {
        "p0_literal": res["p0_literal_passed"],
        "du_identical": res["du_passed"],
        "residual_empty": res["residual_empty"],
        "runtime": time.perf_counter() - start < 600,
    }
    assert verdict(8, checks, f"p0_degree_corrected={res['p0_degree_corrected_passed']}")


def test_criterion_09_lemma_qv(verdict):
    start = time.perf_counter()
    checks = by_name(suite_lemma_qv(2, 4, 3))
    checks["runtime"] = time.perf_counter() - start < 300
    assert verdict(9, checks)


def test_criterion_10_monodromy(verdict):
    start = time.perf_counter()
    tau = 0.3 + 1.1j
    eng = ThetaEngine(tau, 40)
    ev = scalar_theta_evaluator(eng)
    z0 = 0.2 + 0.3j

    def line(a, b):
        return TransportPath((LineSegment([a], [b]),), tau)

    one = parallel_transport(ev, line(z0, z0 + 1), 1e-10).matrix[0, 0]
    per = parallel_transport(ev, line(z0, z0 + tau), 1e-10).matrix[0, 0]
    per_expected = -cmath.exp(-1j * math.pi * tau) * cmath.exp(-2j * math.pi * z0)
    loop = loop_monodromy(scalar_theta_evaluator(eng, 1 / 3), [0], 0.3, tau, 1e-10).matrix[0, 0]
    rs = build_root_system("A", 2)
    kzb = kzb_evaluator(build_orbit_rep_cherednik(rs, 0.4), rs, eng)
    a, b = rectangle_paths([0.23 + 0.31j, 0.17 + 0.12j], [0.2 + 0.05j, 0], [0.03 + 0.15j, 0.1 + 0.1j], tau)
    homotopy = np.max(np.abs(parallel_transport(kzb, a, 1e-10).matrix - parallel_transport(kzb, b, 1e-10).matrix))
    elapsed = time.perf_counter() - start
    checks = {
        "period_1": abs(one + 1) < 1e-8,
        "period_tau": abs(per - per_expected) < 1e-8 * abs(per_expected),
        "divisor_loop": abs(loop - cmath.exp(2j * math.pi / 3)) < 1e-8,
        "homotopy_sl3": homotopy < 1e-6,
        "runtime": elapsed < 30,
    }
    assert verdict(10, checks, f"homotopy={homotopy:.1e} t={elapsed:.1f}s")


def test_criterion_11_determinism(verdict):
    runs = [
        ["theta-check", "--tau", "0.3+1.1i"],
        ["k-coeffs", "--z", "0.2+0.3i", "--tau", "20i"],
        ["constant-c", "--type", "G2"],
        ["flatness", "--model", "cherednik-sl3"],
        ["verify-ddca", "--k", "3", "--n", "4", "--suite", "dualpair"],
        ["monodromy", "--model", "cherednik-sl3", "--path", str(PATHS / "cherednik_sl3_square.json"), "--tol", "1e-6"],
    ]
    checks = {}
    for args in runs:
        first, second = (CliRunner().invoke(cli.main, args, env={}) for _ in range(2))
        same = first.exit_code == second.exit_code and first.output == second.output
        json.loads(first.output)
        checks[args[0]] = same
    assert verdict(11, checks)
