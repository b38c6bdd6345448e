"""Command line front end.

Every subcommand prints one report.  Reports are deterministic: keys are
sorted, floats are plain reprs and nothing depends on wall-clock time.
Each report lists its checks with ``"status": "asserted"`` or ``"probe"``;
only asserted checks decide the exit code.

Exit codes: 0 all asserted checks passed, 1 an asserted check failed,
2 usage error, 3 internal inconsistency.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

import click
import numpy as np

from . import __version__
from .connection import (
    build_orbit_rep_cherednik,
    build_small_rep_cherednik,
    duality_residual,
    flatness_relations_check,
    ConnRep,
)
from .constants import ConstantError, constant_report
from .elliptic import (
    EllipticError,
    ThetaEngine,
    heat_equation_residual,
    k_series,
    theta_logderiv,
    theta_property_residuals,
    trig_k_series,
)
from .glpoly import SUITES, run_suite, sl2_probe
from .monodromy import (
    SingularityApproachError,
    TransportError,
    curvature_residual,
    kzb_evaluator,
    parallel_transport,
    parse_complex,
    path_from_json,
    scalar_theta_evaluator,
)
from .rootsys import RootSystemError, build_root_system, dual_coxeter, reflection

SCHEMA_VERSION = "1.0"

ANCHORS = {
    "roots": "generated by reflections $\\{s_{\\alpha}",
    "theta-check": "uniquely characterize the theta function",
    "k-coeffs": "holomorphic in $x$ in the neighborhood",
    "constant-c": "= 6n",
    "flatness": "flat if and only if the following relations",
    "verify-ddca": "There is an action of the deformed",
    "verify-duality": "coincides with the sum of",
    "monodromy": "is flat and W-equivariant",
}

SUITE_ANCHORS = {
    "main-relation": "is equivalent to",
    "prop41": "There is an algebra homomorphism",
    "dualpair": "The following identities hold on",
    "zn": "The element $Z_n$ is central",
    "lemmaQv": "ad(Q(α∨/2))^{2n+1}(κ_α)",
    "aell": "flat if and only if the following relations",
    "sl2probe": "form an sl2-triple",
}

ROOT_COUNTS = {
    "A": lambda r: r * (r + 1),
    "B": lambda r: 2 * r * r,
    "C": lambda r: 2 * r * r,
    "D": lambda r: 2 * r * (r - 1),
    "E": lambda r: {6: 72, 7: 126, 8: 240}[r],
    "F": lambda r: 48,
    "G": lambda r: 12,
}


class InvariantError(RuntimeError):
    """An internal invariant failed; the message names it."""

    def __init__(self, invariant: str, detail: str = ""):
        super().__init__(f"invariant violated: {invariant}" + (f" ({detail})" if detail else ""))
        self.invariant = invariant


# ---------------------------------------------------------------------------
# report plumbing


def threads() -> int:
    """Worker cap from ECL_THREADS (default 1)."""
    raw = os.environ.get("ECL_THREADS", "1")
    try:
        val = int(raw)
    except ValueError:
        raise click.UsageError(f"ECL_THREADS must be an integer, got {raw!r}")
    if val < 1:
        raise click.UsageError("ECL_THREADS must be >= 1")
    return val


def pmap(fn: Callable, items: Sequence) -> list:
    """Map preserving input order, using at most ECL_THREADS workers."""
    n = min(threads(), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def check(name: str, passed: bool, status: str = "asserted", **detail) -> dict:
    if status not in ("asserted", "probe"):
        raise InvariantError("check status is asserted or probe", status)
    out = {"name": name, "passed": bool(passed), "status": status}
    out.update(detail)
    return out


def cnum(z: complex, digits: int = 15) -> list[float]:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvariantError("numeric results are finite", repr(z))
    return [float(f"{z.real:.{digits}e}"), float(f"{z.imag:.{digits}e}")]


def envelope(command: str, config: dict, checks: list[dict], *, truncation: dict, anchor: str | None = None, **body) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "anchor": anchor or ANCHORS[command],
        "config": dict(config, threads=threads()),
        "truncation": truncation,
        "checks": checks,
        "passed": all(c["passed"] for c in checks if c["status"] == "asserted"),
    }
    report.update(body)
    return report


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flatten(prefix: str, obj: Any, rows: list) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, "" if obj is None else obj))


def to_csv(report: dict) -> str:
    rows: list = []
    _flatten("", report, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerows(rows)
    return buf.getvalue()


def to_text(report: dict) -> str:
    lines = [f"{report['command']}  [{report['anchor']}]"]
    for c in report["checks"]:
        mark = "SKIP" if c.get("skipped") else ("PASS" if c["passed"] else "FAIL")
        lines.append(f"  {mark}  {c['name']}  ({c['status']})")
    lines.append("overall: " + ("PASS" if report["passed"] else "FAIL"))
    return "\n".join(lines) + "\n"


EMITTERS = {"json": to_json, "csv": to_csv, "text": to_text}


def finish(report: dict, emit: str, out: str | None) -> None:
    text = EMITTERS[emit](report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    sys.exit(0 if report["passed"] else 1)


def emit_options(choices: Sequence[str] = ("json", "csv", "text")):
    def deco(f):
        f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report here instead of stdout.")(f)
        f = click.option("--emit", type=click.Choice(list(choices)), default="json", show_default=True)(f)
        return f

    return deco


class ComplexParam(click.ParamType):
    name = "complex"

    def convert(self, value, param, ctx):
        if isinstance(value, complex):
            return value
        try:
            return parse_complex(value)
        except (TypeError, ValueError):
            self.fail(f"{value!r} is not a complex number (use forms like 0.3+1.1i)", param, ctx)


COMPLEX = ComplexParam()


def engine_for(tau: complex, trunc: int) -> ThetaEngine:
    try:
        return ThetaEngine(tau, trunc)
    except EllipticError as exc:
        raise click.BadParameter(str(exc), param_hint="--tau")


def parse_vector(text: str | None, default: Sequence[complex]) -> list[complex]:
    if text is None:
        return list(default)
    try:
        return [parse_complex(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise click.BadParameter(f"cannot parse {text!r} as comma-separated complex numbers")


# ---------------------------------------------------------------------------
# commands


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
def main() -> None:
    """Finite checks of the elliptic Casimir connection and its algebraic identities."""


@main.command()
@click.option("--type", "label", required=True, help="Cartan type letter, or a name such as F4.")
@click.option("--rank", type=int, default=None)
@emit_options()
def roots(label: str, rank: int | None, emit: str, out: str | None) -> None:
    """Enumerate a root system."""
    try:
        rs = build_root_system(label, rank)
    except RootSystemError as exc:
        raise click.UsageError(str(exc))
    roots_ = sorted(rs.roots)
    pos = sorted(rs.positive_roots)
    closed = all(rs.is_root(reflection(rs, a, b)) for a in pos for b in roots_)
    expected = ROOT_COUNTS[rs.label](rs.rank)
    checks = [
        check("closed_under_reflections", closed),
        check("root_count", len(roots_) == expected, expected=expected, found=len(roots_)),
        check("positive_half", 2 * len(pos) == len(roots_)),
    ]
    report = envelope(
        "roots",
        {"type": rs.label, "rank": rs.rank},
        checks,
        truncation={"none": True},
        name=rs.name,
        dual_coxeter=str(dual_coxeter(rs)),
        simple_roots=[list(a) for a in rs.simple_roots],
        positive_roots=[list(a) for a in pos],
        lengths={str(list(a)): str(rs.norm2(a)) for a in pos},
    )
    finish(report, emit, out)


def sample_points(engine: ThetaEngine, count: int, seed: int) -> list[complex]:
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        a, b = rng.uniform(-0.5, 0.5, size=2)
        z = complex(a) + complex(b) * engine.tau
        if abs(z) > 0.05:
            pts.append(z)
    return pts


@main.command("theta-check")
@click.option("--tau", type=COMPLEX, required=True)
@click.option("--trunc", type=click.IntRange(1), default=40, show_default=True)
@click.option("--samples", type=click.IntRange(1), default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--rel-tol", type=float, default=1e-10, show_default=True)
@click.option("--heat-h", type=float, default=1e-4, show_default=True)
@click.option("--heat-tol", type=float, default=1e-6, show_default=True)
@emit_options()
def theta_check(tau, trunc, samples, seed, rel_tol, heat_h, heat_tol, emit, out) -> None:
    """Characterizing properties of theta at random points."""
    eng = engine_for(tau, trunc)
    pts = sample_points(eng, samples, seed)
    rows = pmap(lambda z: theta_property_residuals(eng, z), pts)
    worst = {key: max(r[key] for r in rows) for key in sorted(rows[0])}
    heat = max(pmap(lambda z: heat_equation_residual(eng, z, heat_h), pts[: min(10, len(pts))]))
    checks = [check(f"property_{k}", v < rel_tol, max_rel_error=float(f"{v:.3e}")) for k, v in worst.items()]
    checks.append(check("heat_equation", heat < heat_tol, max_abs_error=float(f"{heat:.3e}")))
    report = envelope(
        "theta-check",
        {"tau": cnum(tau), "samples": samples, "seed": seed, "rel_tol": rel_tol, "heat_h": heat_h, "heat_tol": heat_tol},
        checks,
        truncation={"q_terms": trunc},
    )
    finish(report, emit, out)


@main.command("k-coeffs")
@click.option("--z", "z", type=COMPLEX, required=True)
@click.option("--tau", type=COMPLEX, default="0.3+1.1i", show_default=True)
@click.option("--order", type=click.IntRange(0), default=8, show_default=True)
@click.option("--trunc", type=click.IntRange(1), default=40, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--trig-tol", type=float, default=1e-7, show_default=True)
@emit_options()
def k_coeffs(z, tau, order, trunc, tol, trig_tol, emit, out) -> None:
    """Taylor coefficients in x of k(z, x|tau).

    The comparison with the trigonometric kernel is asserted only when
    Im(tau) >= 20, where q is below 1e-50; otherwise it is a probe.
    """
    eng = engine_for(tau, trunc)
    try:
        ks = k_series(eng, z, order)
        km = k_series(eng, -z, order)
        trig = trig_k_series(z, order)
    except EllipticError as exc:
        raise click.BadParameter(str(exc), param_hint="--z")
    const = abs(ks[0] - theta_logderiv(eng, z))
    odd = max(abs(ks[j] + (-1) ** j * km[j]) for j in range(order + 1))
    scale = max(1.0, max(abs(c) for c in ks))
    trig_err = ks.max_abs_diff(trig) / scale
    checks = [
        check("constant_term_is_theta_logderiv", const < tol, abs_error=float(f"{const:.3e}")),
        check("odd_symmetry", odd < tol, abs_error=float(f"{odd:.3e}")),
        check(
            "trigonometric_degeneration",
            trig_err < trig_tol,
            "asserted" if tau.imag >= 20 else "probe",
            rel_error=float(f"{trig_err:.3e}"),
        ),
    ]
    report = envelope(
        "k-coeffs",
        {"z": cnum(z), "tau": cnum(tau), "tol": tol, "trig_tol": trig_tol},
        checks,
        truncation={"q_terms": trunc, "x_order": order},
        coefficients=[cnum(c) for c in ks],
    )
    finish(report, emit, out)


@main.command("constant-c")
@click.option("--type", "label", required=True)
@click.option("--rank", type=int, default=None)
@emit_options()
def constant_c(label, rank, emit, out) -> None:
    """The sl2-triple constant C~ by three independent routes."""
    try:
        rs = build_root_system(label, rank)
        rep = constant_report(rs)
    except (RootSystemError, ConstantError) as exc:
        raise click.UsageError(str(exc))
    checks = [check("three_way_agreement", rep.agree, values={k: str(v) for k, v in rep.methods.items()})]
    if rs.label == "A":
        n = rs.rank + 1
        checks.append(check("type_A_equals_6n", rep.tildeC == 6 * n, expected=str(6 * n)))
    report = envelope(
        "constant-c",
        {"type": rs.label, "rank": rs.rank},
        checks,
        truncation={"exact": True},
        tildeC=str(rep.tildeC),
        result=rep.to_dict(),
    )
    finish(report, emit, out)


def _model_rep(model: str):
    try:
        family, rest = model.split("-", 1)
        if not rest.startswith("sl"):
            raise ValueError
        n = int(rest[2:])
    except ValueError:
        raise click.BadParameter(f"model must look like cherednik-sl3, small-sl4 or control-sl3, got {model!r}")
    if n < 2:
        raise click.BadParameter("sl_n needs n >= 2")
    rs = build_root_system("A", n - 1)
    if family == "cherednik":
        return rs, build_orbit_rep_cherednik(rs, 0.4)
    if family == "small":
        return rs, build_small_rep_cherednik(rs, 0, 1)
    if family == "control":
        small = build_small_rep_cherednik(rs, 0, 1)
        zero = np.zeros((small.dim, small.dim))
        rep = ConnRep(
            small.dim,
            {a: small.kappa_map[a] for a in rs.positive_roots},
            x_map=lambda u: zero,
            y_map=lambda u: zero,
            label="control (x = y = 0, t = kappa)",
        )
        return rs, rep
    raise click.BadParameter(f"unknown model family {family!r}")


def default_point(rank: int) -> list[complex]:
    return [complex(0.23 - 0.06 * i, 0.31 - 0.19 * i + 0.02 * i * i) for i in range(rank)]


@main.command()
@click.option("--model", required=True, help="cherednik-slN (orbit rep), small-slN or control-slN.")
@click.option("--tau", type=COMPLEX, default="0.3+1.1i", show_default=True)
@click.option("--trunc", type=click.IntRange(1), default=40, show_default=True)
@click.option("--point", default=None, help="Comma-separated coordinates in the simple-coroot basis.")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--fd-step", type=float, default=1e-3, show_default=True)
@emit_options()
def flatness(model, tau, trunc, point, tol, fd_step, emit, out) -> None:
    """Algebraic flatness relations of a finite representation, plus a numerical curvature probe."""
    eng = engine_for(tau, trunc)
    rs, rep = _model_rep(model)
    rel = flatness_relations_check(rep, rs, tol)
    checks = [
        check(f"relation_{r.relation}", r.status != "fail", **({"skipped": True} if r.status == "skipped" else {}))
        for r in rel.results
    ]
    z = parse_vector(point, default_point(rs.rank))
    if len(z) != rs.rank:
        raise click.BadParameter(f"point needs {rs.rank} coordinates", param_hint="--point")
    curv = {}
    if rep.x_map is not None and rep.y_map is not None and rep.dim <= 24:
        ev = kzb_evaluator(rep, rs, eng)
        try:
            coarse = curvature_residual(ev, z, fd_step)
            fine = curvature_residual(ev, z, fd_step / 2)
        except EllipticError as exc:
            raise click.BadParameter(str(exc), param_hint="--point")
        curv = {"h": fd_step, "residual_h": float(f"{coarse:.3e}"), "residual_h_over_2": float(f"{fine:.3e}")}
        checks.append(check("curvature_decreases_with_step", fine < coarse or fine < 1e-9, "probe", **curv))
    report = envelope(
        "flatness",
        {"model": model, "tau": cnum(tau), "point": [cnum(c) for c in z], "tol": tol},
        checks,
        truncation={"q_terms": trunc, "kernel": "closed form"},
        rep=rep.label,
        dim=rep.dim,
        relations=rel.to_dict(),
    )
    finish(report, emit, out)


SUITE_CHOICES = sorted(SUITES) + ["sl2probe"]


def _run_named_suite(name: str, k: int, n: int, degree: int | None, corrected: bool) -> list[dict]:
    if name == "sl2probe":
        probe = sl2_probe(
            tuple([1, -1] + [0] * (n - 2)),
            tuple([1, 1] + [-1, -1] + [0] * (n - 4)) if n >= 4 else tuple([1, 1, -2]),
            n=n,
            k=k,
        )
        return [
            check(c["name"], c["passed"], "probe", states=c["states"], counterexample=c["counterexample"], residual=c["residual"])
            for c in probe["checks"]
        ]
    kw = {"corrected": True} if corrected and name == "main-relation" else {}
    reports = run_suite(name, k, n, degree, **kw)
    return [
        check(
            f"{name}:{r.name}",
            r.passed,
            states=r.states,
            counterexample=r.counterexample,
            residual=r.residual,
            notes=list(r.notes),
        )
        for r in reports
    ]


@main.command("verify-ddca")
@click.option("--k", "k", type=click.IntRange(2), default=2, show_default=True)
@click.option("--n", "n", type=click.IntRange(3), default=4, show_default=True)
@click.option("--degree", type=click.IntRange(0), default=None, help="m-degree bound (default 4 for dualpair, 3 otherwise).")
@click.option("--suite", "suites", type=click.Choice(SUITE_CHOICES), multiple=True, required=True)
@click.option("--corrected", is_flag=True, help="Add the row-degree correction to the main relation.")
@emit_options()
def verify_ddca(k, n, degree, suites, corrected, emit, out) -> None:
    """Exact operator identities of the DDCA action on polynomial states."""
    names = sorted(set(suites))
    results = pmap(lambda s: _run_named_suite(s, k, n, degree, corrected), names)
    checks = [c for chunk in results for c in chunk]
    report = envelope(
        "verify-ddca",
        {"k": k, "n": n, "degree": degree, "suites": names, "corrected": corrected, "lambda": "-1", "beta": f"{n}/4"},
        checks,
        truncation={"m_degree": degree, "x_degree": 2, "inverse_factors": 1},
        anchor="; ".join(SUITE_ANCHORS[s] for s in names),
    )
    finish(report, emit, out)


@main.command("verify-duality")
@click.option("--k", "k", type=click.IntRange(2), default=2, show_default=True)
@click.option("--n", "n", type=click.IntRange(3), default=4, show_default=True)
@click.option("--ad-order", type=click.IntRange(0), default=2, show_default=True)
@click.option("--degree", type=click.IntRange(0), default=3, show_default=True)
@click.option("--tau", type=COMPLEX, default="0.3+1.1i", show_default=True)
@click.option("--trunc", type=click.IntRange(1), default=40, show_default=True)
@click.option("--point", default=None, help="n complex coordinates z_1..z_n, or n-1 in the simple-coroot basis.")
@click.option("--t-sign", type=click.Choice(["1", "-1"]), default="-1", show_default=True)
@click.option("--weight", type=click.Choice(["slk_zero", "sln_zero", "none"]), default="slk_zero", show_default=True)
@emit_options()
def verify_duality(k, n, ad_order, degree, tau, trunc, point, t_sign, weight, emit, out) -> None:
    """Coefficient-wise comparison of the gl_k and gl_n KZB forms."""
    eng = engine_for(tau, trunc)
    z = parse_vector(point, [complex(0.13 * i + 0.05 * i * i, 0.09 * i - 0.02 * i * i) for i in range(n)])
    try:
        res = duality_residual(z, n, k, eng, ad_order, degree, t_sign=int(t_sign), weight=weight)
    except EllipticError as exc:
        raise click.BadParameter(str(exc), param_hint="--point")
    checks = [
        check("ad_power_0_literal", res["p0_literal_passed"]),
        check("du_components_identical", res["du_passed"]),
        check("residual_empty_higher_ad_powers", res["residual_empty"]),
        check("ad_power_0_degree_corrected", res["p0_degree_corrected_passed"], "probe"),
    ]
    body = {key: v for key, v in res.items() if key in ("entries", "du", "states")}
    report = envelope(
        "verify-duality",
        {"k": k, "n": n, "tau": cnum(tau), "point": [cnum(c) for c in z], "t_sign": int(t_sign), "weight": weight},
        checks,
        truncation={"ad_order": ad_order, "m_degree": degree, "q_terms": trunc},
        **body,
    )
    finish(report, emit, out)


def _load_path_file(path: str) -> list[dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(str(exc), param_hint="--path")
    if isinstance(data, dict) and "paths" in data:
        entries = []
        for i, p in enumerate(data["paths"]):
            p = dict(p)
            p.setdefault("tau", data.get("tau"))
            p.setdefault("name", f"path{i}")
            entries.append(p)
        return entries, [tuple(pair) for pair in data.get("homotopic", [])]
    return [{"name": "path0", **(data if isinstance(data, dict) else {"segments": data})}], []


def _evaluator(model: str, eng: ThetaEngine, c: float):
    if model == "scalar-theta":
        return scalar_theta_evaluator(eng, c)
    rs, rep = _model_rep(model)
    if rep.x_map is None:
        raise click.BadParameter("transport needs a model with x and y maps", param_hint="--model")
    return kzb_evaluator(rep, rs, eng)


@main.command()
@click.option("--model", required=True, help="scalar-theta or cherednik-slN.")
@click.option("--path", "path_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", type=float, default=1e-8, show_default=True, help="Comparison tolerance; the integrator runs at tol/100.")
@click.option("--c", "c", type=float, default=1.0, show_default=True, help="Coupling of the scalar model.")
@click.option("--trunc", type=click.IntRange(1), default=40, show_default=True)
@emit_options()
def monodromy(model, path_file, tol, c, trunc, emit, out) -> None:
    """Parallel transport along the paths in a JSON file."""
    entries, pairs = _load_path_file(path_file)
    results, checks = {}, []
    for entry in entries:
        name = entry["name"]
        try:
            path = path_from_json({"segments": entry["segments"], "tau": _entry_tau(entry)})
        except (ValueError, KeyError, TypeError) as exc:
            raise click.BadParameter(f"{name}: {exc}", param_hint="--path")
        eng = engine_for(path.tau, trunc)
        ev = _evaluator(model, eng, c)
        try:
            res = parallel_transport(ev, path, tol / 100)
        except SingularityApproachError as exc:
            raise click.BadParameter(f"{name}: {exc}", param_hint="--path")
        except TransportError as exc:
            raise InvariantError("transport converges within the step budget", str(exc))
        if not np.all(np.isfinite(res.matrix)):
            raise InvariantError("transport matrix is finite", name)
        results[name] = res
        checks.append(check(f"{name}:transport_completed", True, steps=res.step_count))
        if "expected" in entry:
            exp = np.atleast_2d(np.array(_complex_tree(entry["expected"]), dtype=complex))
            if exp.shape != res.matrix.shape:
                raise click.BadParameter(f"{name}: expected has shape {exp.shape}, monodromy is {res.matrix.shape}")
            err = float(np.max(np.abs(exp - res.matrix)))
            checks.append(check(f"{name}:matches_expected", err < tol, abs_error=float(f"{err:.3e}")))
    for a, b in pairs:
        if a not in results or b not in results:
            raise click.BadParameter(f"homotopic pair names unknown path: {a}, {b}", param_hint="--path")
        err = float(np.max(np.abs(results[a].matrix - results[b].matrix)))
        checks.append(check(f"homotopy:{a}={b}", err < tol, abs_error=float(f"{err:.3e}")))
    report = envelope(
        "monodromy",
        {"model": model, "c": c, "tol": tol, "integrator_tol": tol / 100},
        checks,
        truncation={"q_terms": trunc, "integrator": "Dormand-Prince 5(4)"},
        transports={
            name: {
                "path_hash": r.path_hash,
                "steps": r.step_count,
                "rejected": r.rejected,
                "max_local_error": float(f"{r.max_local_error:.3e}"),
                "min_clearance": float(f"{r.min_clearance:.6e}"),
                "matrix": [[cnum(x, 12) for x in row] for row in r.matrix],
            }
            for name, r in sorted(results.items())
        },
    )
    finish(report, emit, out)


def _entry_tau(entry: dict):
    if entry.get("tau") is not None:
        return entry["tau"]
    segs = entry.get("segments") or []
    if segs and isinstance(segs[0], dict) and "tau" in segs[0]:
        return segs[0]["tau"]
    raise ValueError("no tau given")


def _complex_tree(obj):
    if isinstance(obj, list) and not (len(obj) == 2 and all(isinstance(v, (int, float)) for v in obj)):
        return [_complex_tree(v) for v in obj]
    return parse_complex(obj)


def run() -> None:
    """Entry point with internal-inconsistency handling."""
    try:
        main(standalone_mode=True)
    except InvariantError as exc:
        click.echo(str(exc), err=True)
        sys.exit(3)


if __name__ == "__main__":  # pragma: no cover
    run()
