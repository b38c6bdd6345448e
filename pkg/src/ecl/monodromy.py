"""Parallel transport of matrix connections along piecewise smooth paths.

A connection nabla = d - A with A = sum_i A_i(z) dz_i is transported by
solving dF/dt = A(gamma(t)) gamma'(t) F, F(0) = I, with an embedded
Dormand-Prince 5(4) pair.  For nabla = d - (theta'/theta)(z) dz the flat
section is theta itself, so transports reproduce the quasi-periodicity
multipliers of theta exactly.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .elliptic import ThetaEngine, theta_logderiv

__all__ = [
    "TransportError",
    "SingularityApproachError",
    "LineSegment",
    "ArcSegment",
    "Path",
    "FormEvaluator",
    "TransportResult",
    "parallel_transport",
    "loop_monodromy",
    "scalar_theta_evaluator",
    "kzb_evaluator",
    "curvature_residual",
    "rectangle_paths",
    "parallelogram_clear",
    "path_from_json",
]


class TransportError(RuntimeError):
    """The integrator could not make progress."""


class SingularityApproachError(TransportError):
    def __init__(self, t: float, clearance: float, segment: int):
        super().__init__(
            f"path comes within {clearance:.2e} of a divisor at t={t:.6f} on segment {segment}"
        )
        self.t = t
        self.clearance = clearance
        self.segment = segment


def _vec(v) -> np.ndarray:
    return np.atleast_1d(np.asarray(v, dtype=complex))


@dataclass(frozen=True)
class LineSegment:
    start: tuple
    end: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(complex(c) for c in _vec(self.start)))
        object.__setattr__(self, "end", tuple(complex(c) for c in _vec(self.end)))
        if len(self.start) != len(self.end):
            raise ValueError("segment endpoints have different dimensions")

    def point(self, t: float) -> np.ndarray:
        a, b = np.array(self.start), np.array(self.end)
        return a + t * (b - a)

    def velocity(self, t: float) -> np.ndarray:
        return np.array(self.end) - np.array(self.start)

    def describe(self) -> dict:
        return {"kind": "line", "start": _enc(self.start), "end": _enc(self.end)}


@dataclass(frozen=True)
class ArcSegment:
    """center + radius e^{i theta} direction, theta from theta0 to theta1."""

    center: tuple
    radius: float
    theta0: float = 0.0
    theta1: float = 2 * math.pi
    direction: tuple | None = None

    def __post_init__(self):
        c = tuple(complex(x) for x in _vec(self.center))
        object.__setattr__(self, "center", c)
        d = self.direction
        d = tuple(1.0 if i == 0 else 0.0 for i in range(len(c))) if d is None else d
        object.__setattr__(self, "direction", tuple(complex(x) for x in _vec(d)))
        if not self.radius > 0:
            raise ValueError("arc radius must be positive")

    def _angle(self, t: float) -> float:
        return self.theta0 + t * (self.theta1 - self.theta0)

    def point(self, t: float) -> np.ndarray:
        return np.array(self.center) + self.radius * cmath.exp(1j * self._angle(t)) * np.array(
            self.direction
        )

    def velocity(self, t: float) -> np.ndarray:
        w = 1j * (self.theta1 - self.theta0) * self.radius * cmath.exp(1j * self._angle(t))
        return w * np.array(self.direction)

    @property
    def start(self) -> tuple:
        return tuple(self.point(0.0))

    @property
    def end(self) -> tuple:
        return tuple(self.point(1.0))

    def describe(self) -> dict:
        return {
            "kind": "arc",
            "center": _enc(self.center),
            "radius": self.radius,
            "theta0": self.theta0,
            "theta1": self.theta1,
            "direction": _enc(self.direction),
        }


def _enc(v: Sequence[complex]) -> list:
    return [[float(c.real), float(c.imag)] for c in v]


@dataclass(frozen=True)
class Path:
    segments: tuple
    tau: complex

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("a path needs at least one segment")
        for a, b in zip(segs, segs[1:]):
            if np.max(np.abs(np.array(a.end) - np.array(b.start))) > 1e-12:
                raise ValueError("consecutive segments do not meet")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "tau", complex(self.tau))

    @property
    def dim(self) -> int:
        return len(self.segments[0].start)

    def reversed(self) -> "Path":
        return Path(tuple(_reverse(s) for s in reversed(self.segments)), self.tau)

    def __add__(self, other: "Path") -> "Path":
        if other.tau != self.tau:
            raise ValueError("cannot concatenate paths with different tau")
        return Path(self.segments + other.segments, self.tau)

    def describe(self) -> dict:
        return {
            "tau": [self.tau.real, self.tau.imag],
            "segments": [s.describe() for s in self.segments],
        }

    @property
    def hash(self) -> str:
        text = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def clearances(self, clearance: Callable[[np.ndarray], float], samples: int = 129) -> list[float]:
        return [
            min(clearance(s.point(t)) for t in np.linspace(0.0, 1.0, samples))
            for s in self.segments
        ]


def _reverse(seg):
    if isinstance(seg, LineSegment):
        return LineSegment(seg.end, seg.start)
    return ArcSegment(seg.center, seg.radius, seg.theta1, seg.theta0, seg.direction)


# ---------------------------------------------------------------------------
# evaluators


@dataclass
class FormEvaluator:
    """A(z) as an array of shape (rank, dim, dim), plus divisor clearance."""

    dim: int
    rank: int
    matrices: Callable[[np.ndarray], np.ndarray]
    clearance: Callable[[np.ndarray], float]
    label: str = "form"

    def along(self, z: np.ndarray, v: np.ndarray) -> np.ndarray:
        A = self.matrices(z)
        return np.tensordot(v, A, axes=(0, 0))


def _lattice_distance(engine: ThetaEngine, w: complex) -> float:
    return abs(w - engine.nearest_lattice_point(w))


def scalar_theta_evaluator(engine: ThetaEngine, c: complex = 1.0) -> FormEvaluator:
    """nabla = d - c (theta'/theta)(z) dz on the trivial line bundle."""

    def mats(z):
        return np.array([[[c * theta_logderiv(engine, complex(z[0]))]]], dtype=complex)

    return FormEvaluator(
        1, 1, mats, lambda z: _lattice_distance(engine, complex(z[0])), f"scalar c={c}"
    )


def kzb_evaluator(rep, rs, engine: ThetaEngine, ad_order: int | None = None) -> FormEvaluator:
    """Transport matrix A = -omega for the KZB form omega of ``rep``."""
    from .connection import assemble_kzb_form, root_value

    def mats(z):
        return -assemble_kzb_form(rep, rs, z, engine, ad_order).merged()

    def clear(z):
        return min(
            _lattice_distance(engine, root_value(rs, a, z)) for a in rs.positive_roots
        )

    return FormEvaluator(rep.dim, rs.rank, mats, clear, f"kzb {rep.label}")


def curvature_residual(ev: FormEvaluator, z: Sequence[complex], h: float = 1e-5) -> float:
    """max |d_i A_j - d_j A_i + [A_j, A_i]| by central differences."""
    z = _vec(z)
    A = ev.matrices(z)
    worst = 0.0
    for i in range(ev.rank):
        for j in range(i + 1, ev.rank):
            ei = np.zeros(ev.rank, dtype=complex)
            ej = np.zeros(ev.rank, dtype=complex)
            ei[i], ej[j] = h, h
            di_Aj = (ev.matrices(z + ei)[j] - ev.matrices(z - ei)[j]) / (2 * h)
            dj_Ai = (ev.matrices(z + ej)[i] - ev.matrices(z - ej)[i]) / (2 * h)
            F = di_Aj - dj_Ai + A[j] @ A[i] - A[i] @ A[j]
            worst = max(worst, float(np.max(np.abs(F))))
    return worst


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array(
    [5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4


@dataclass
class TransportResult:
    matrix: np.ndarray
    step_count: int
    max_local_error: float
    path_hash: str
    rejected: int = 0
    min_clearance: float = math.inf
    segment_matrices: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "matrix": [[[round(float(x.real), 12), round(float(x.imag), 12)] for x in row] for row in self.matrix],
            "step_count": self.step_count,
            "rejected": self.rejected,
            "max_local_error": float(f"{self.max_local_error:.3e}"),
            "min_clearance": float(f"{self.min_clearance:.6e}"),
            "path_hash": self.path_hash,
        }


def _transport_segment(ev, seg, index, F0, tol, min_clearance, h_min, max_steps):
    def rhs(t, F):
        z = seg.point(t)
        cl = ev.clearance(z)
        if cl < min_clearance:
            raise SingularityApproachError(t, cl, index)
        return ev.along(z, seg.velocity(t)) @ F, cl

    t, F = 0.0, F0
    h = 0.05
    steps = rejected = 0
    worst_err, worst_clear = 0.0, math.inf
    k1, cl = rhs(t, F)
    worst_clear = cl
    while t < 1.0:
        if steps + rejected > max_steps:
            raise TransportError(f"step budget exhausted on segment {index}")
        h = min(h, 1.0 - t)
        ks = [k1]
        for s in range(1, 7):
            Y = F + h * sum(a * k for a, k in zip(_A[s], ks))
            k, cl = rhs(t + _C[s] * h, Y)
            worst_clear = min(worst_clear, cl)
            ks.append(k)
        F5 = F + h * sum(b * k for b, k in zip(_B5, ks) if b)
        err = float(np.max(np.abs(h * sum(e * k for e, k in zip(_E, ks) if e))))
        scale = tol * h * (1.0 + float(np.max(np.abs(F5))))
        if err <= scale or h <= h_min:
            if err > scale:
                raise TransportError(f"step size fell below {h_min:g} at t={t:.6f} on segment {index}")
            t += h
            F = F5
            k1 = ks[6]
            steps += 1
            worst_err = max(worst_err, err)
        else:
            rejected += 1
        ratio = scale / err if err > 0 else 1e5
        h = max(h_min, h * min(5.0, max(0.2, 0.9 * ratio**0.2)))
    return F, steps, rejected, worst_err, worst_clear


def parallel_transport(
    ev: FormEvaluator,
    path: Path,
    tol: float = 1e-10,
    *,
    min_clearance: float = 1e-6,
    h_min: float = 1e-12,
    max_steps: int = 200000,
) -> TransportResult:
    """Solve dF = A F along ``path`` from F = I; segments are composed in order."""
    if path.dim != ev.rank:
        raise ValueError(f"path lives in C^{path.dim} but the form has rank {ev.rank}")
    for i, c in enumerate(path.clearances(ev.clearance)):
        if not c > min_clearance:
            raise SingularityApproachError(float("nan"), c, i)
    F = np.eye(ev.dim, dtype=complex)
    total = rejected = 0
    worst_err, worst_clear = 0.0, math.inf
    segs = []
    for i, seg in enumerate(path.segments):
        G, s, r, e, c = _transport_segment(
            ev, seg, i, np.eye(ev.dim, dtype=complex), tol, min_clearance, h_min, max_steps
        )
        segs.append(G)
        F = G @ F
        total += s
        rejected += r
        worst_err = max(worst_err, e)
        worst_clear = min(worst_clear, c)
    return TransportResult(F, total, worst_err, path.hash, rejected, worst_clear, segs)


def loop_monodromy(
    ev: FormEvaluator,
    center_divisor: Sequence[complex],
    radius: float,
    tau: complex,
    tol: float = 1e-10,
    direction: Sequence[complex] | None = None,
) -> TransportResult:
    """Transport once around the positively oriented circle about ``center_divisor``."""
    seg = ArcSegment(tuple(_vec(center_divisor)), radius, 0.0, 2 * math.pi, direction)
    return parallel_transport(ev, Path((seg,), tau), tol)


# ---------------------------------------------------------------------------
# homotopy helpers


def rectangle_paths(P: Sequence[complex], d1: Sequence[complex], d2: Sequence[complex], tau) -> tuple[Path, Path]:
    """P -> P+d1 -> P+d1+d2 and P -> P+d2 -> P+d1+d2."""
    P, d1, d2 = _vec(P), _vec(d1), _vec(d2)
    a = Path((LineSegment(P, P + d1), LineSegment(P + d1, P + d1 + d2)), tau)
    b = Path((LineSegment(P, P + d2), LineSegment(P + d2, P + d1 + d2)), tau)
    return a, b


def parallelogram_clear(
    engine: ThetaEngine, values: Sequence[tuple[complex, complex, complex]], margin: float = 1e-3
) -> bool:
    """True if no lattice point lies within ``margin`` of any parallelogram w0 + s a + t b, s, t in [0, 1]."""
    for w0, a, b in values:
        corners = [w0, w0 + a, w0 + b, w0 + a + b]
        lo_r = min(c.real for c in corners) - 1
        hi_r = max(c.real for c in corners) + 1
        lo_b = min(engine.lattice_coords(c)[1] for c in corners) - 1
        hi_b = max(engine.lattice_coords(c)[1] for c in corners) + 1
        M = np.array([[a.real, b.real], [a.imag, b.imag]])
        det = np.linalg.det(M)
        for nb in range(math.floor(lo_b), math.ceil(hi_b) + 1):
            for na in range(math.floor(lo_r - abs(engine.tau.real) * abs(nb)) - 1, math.ceil(hi_r + abs(engine.tau.real) * abs(nb)) + 2):
                L = na + nb * engine.tau
                if abs(det) < 1e-14:
                    d = min(abs(L - c) for c in corners)
                    if d < margin:
                        return False
                    continue
                s, t = np.linalg.solve(M, [(L - w0).real, (L - w0).imag])
                ss, tt = min(max(s, 0), 1), min(max(t, 0), 1)
                if abs(w0 + ss * a + tt * b - L) < margin:
                    return False
    return True


def path_from_json(data) -> Path:
    """Build a path from ``{"tau": ..., "segments": [...]}`` or a bare segment list.

    Complex numbers may be strings ("0.3+1.1i"), [re, im] pairs or reals.
    A bare list takes tau from its first segment.
    """
    if isinstance(data, list):
        segs = data
        tau = segs[0].get("tau") if segs else None
    else:
        segs = data.get("segments", [])
        tau = data.get("tau")
    if tau is None:
        raise ValueError("path file must give tau")
    out = []
    for s in segs:
        kind = s.get("kind", "line")
        if kind == "line":
            out.append(LineSegment(_cvec(s["start"]), _cvec(s["end"])))
        elif kind == "arc":
            out.append(
                ArcSegment(
                    _cvec(s["center"]),
                    float(s["radius"]),
                    float(s.get("theta0", 0.0)),
                    float(s.get("theta1", 2 * math.pi)),
                    _cvec(s["direction"]) if "direction" in s else None,
                )
            )
        else:
            raise ValueError(f"unknown segment kind {kind!r}")
    return Path(tuple(out), parse_complex(tau))


def parse_complex(x) -> complex:
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    return complex(x)


def _cvec(v) -> tuple:
    if isinstance(v, (str, int, float, complex)):
        return (parse_complex(v),)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        # a single [re, im] pair is ambiguous with a 2-vector of reals; treat
        # lists of lists/strings as vectors and a flat numeric pair as a vector too
        return tuple(complex(x) for x in v)
    return tuple(parse_complex(x) for x in v)
