"""Theta function, KZB kernels as power series in x, and Bernoulli data.

The theta function is normalized to have simple zeros on the lattice
Z + Z tau and derivative 1 at the origin.  It is evaluated only through its
product formula

    theta(z|tau) = e^{pi i z} prod_{s>=1}(1 - q^s u) prod_{s>=0}(1 - q^s/u)
                   / (2 pi i prod_{s>=1}(1 - q^s)^2),   u = e^{2 pi i z}.

Kernels such as k(z, x) = theta(z+x)/(theta(z) theta(x)) - 1/x are expanded
in x by exact series manipulation of the individual product factors, so the
pole at x = 0 cancels symbolically and never numerically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "EllipticError",
    "SingularityError",
    "XSeries",
    "PiMultiple",
    "ThetaEngine",
    "theta",
    "theta_logderiv",
    "theta_taylor",
    "eta",
    "k_series",
    "k_value",
    "theta_property_residuals",
    "k_q_correction",
    "g_series",
    "phi_series",
    "eisenstein",
    "bernoulli",
    "a_coeffs",
    "trig_c_coeffs",
    "trig_k_series",
    "heat_equation_residual",
]

TWO_PI_I = 2j * math.pi


class EllipticError(ValueError):
    """Invalid modular parameter or out-of-range request."""


class SingularityError(EllipticError):
    """Evaluation point too close to the lattice Z + Z tau."""

    def __init__(self, z: complex, nearest: complex, distance: float):
        super().__init__(
            f"z={z} lies within {distance:.3g} of the lattice point {nearest}"
        )
        self.z = z
        self.nearest = nearest
        self.distance = distance


# --------------------------------------------------------------------------
# truncated power series
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class XSeries:
    """Power series in x truncated at degree ``order`` (complex coefficients)."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_list(cls, values: Sequence, order: int | None = None) -> "XSeries":
        arr = np.zeros((len(values) if order is None else order + 1), dtype=complex)
        m = min(len(arr), len(values))
        arr[:m] = values[:m]
        return cls(arr)

    @classmethod
    def constant(cls, c: complex, order: int) -> "XSeries":
        return cls.from_list([c], order)

    @classmethod
    def exp_linear(cls, c: complex, order: int) -> "XSeries":
        """Series of e^{c x}."""
        return cls(np.array([c**j / math.factorial(j) for j in range(order + 1)]))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, j: int) -> complex:
        return complex(self.coeffs[j])

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(complex(c) for c in self.coeffs)

    def _pair(self, other: "XSeries") -> int:
        return min(self.order, other.order)

    def truncate(self, order: int) -> "XSeries":
        return XSeries.from_list(list(self.coeffs[: order + 1]), order)

    def __add__(self, other):
        if not isinstance(other, XSeries):
            out = self.coeffs.copy()
            out[0] += other
            return XSeries(out)
        m = self._pair(other)
        return XSeries(self.coeffs[: m + 1] + other.coeffs[: m + 1])

    __radd__ = __add__

    def __neg__(self):
        return XSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, XSeries):
            return XSeries(self.coeffs * other)
        m = self._pair(other)
        return XSeries(np.convolve(self.coeffs[: m + 1], other.coeffs[: m + 1])[: m + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, XSeries):
            return XSeries(self.coeffs / other)
        return self * other.reciprocal()

    def reciprocal(self) -> "XSeries":
        a = self.coeffs
        if a[0] == 0:
            raise EllipticError("series with zero constant term is not invertible")
        b = np.zeros_like(a)
        b[0] = 1 / a[0]
        for n in range(1, len(a)):
            b[n] = -np.dot(a[1 : n + 1], b[n - 1 :: -1][:n]) / a[0]
        return XSeries(b)

    def derivative(self) -> "XSeries":
        """Term-wise derivative; the result has order one less."""
        j = np.arange(1, len(self.coeffs))
        return XSeries(self.coeffs[1:] * j)

    def shift_down(self, k: int = 1) -> "XSeries":
        """Divide by x^k; the first k coefficients are dropped."""
        return XSeries(self.coeffs[k:])

    def exp(self) -> "XSeries":
        return XSeries(_exp_rows(self.coeffs[None, :])[0])

    def expm1(self) -> "XSeries":
        """exp(f) - 1 for f with zero constant term, without cancellation."""
        if self.coeffs[0] != 0:
            raise EllipticError("expm1 expects a series with zero constant term")
        out = _exp_rows(self.coeffs[None, :])[0].copy()
        out[0] = 0
        return XSeries(out)

    def log(self) -> "XSeries":
        a0 = self.coeffs[0]
        if a0 == 0:
            raise EllipticError("log of a series with zero constant term")
        out = _log_rows((self.coeffs / a0)[None, :])[0].copy()
        out[0] = cmath.log(a0)
        return XSeries(out)

    def evaluate(self, x: complex) -> complex:
        return complex(np.polyval(self.coeffs[::-1], x))

    def even_part(self) -> "XSeries":
        out = self.coeffs.copy()
        out[1::2] = 0
        return XSeries(out)

    def odd_part(self) -> "XSeries":
        out = self.coeffs.copy()
        out[0::2] = 0
        return XSeries(out)

    def reflect(self) -> "XSeries":
        """f(-x)."""
        return XSeries(self.coeffs * (-1.0) ** np.arange(len(self.coeffs)))

    def max_abs_diff(self, other: "XSeries") -> float:
        m = self._pair(other)
        return float(np.max(np.abs(self.coeffs[: m + 1] - other.coeffs[: m + 1])))

    def tolist(self) -> list[complex]:
        return [complex(c) for c in self.coeffs]


def _exp_rows(a: np.ndarray) -> np.ndarray:
    """Row-wise exp of series (n b_n = sum_k k a_k b_{n-k})."""
    rows, m = a.shape
    b = np.zeros_like(a, dtype=complex)
    b[:, 0] = np.exp(a[:, 0])
    k = np.arange(1, m)
    for n in range(1, m):
        b[:, n] = np.sum(k[:n] * a[:, 1 : n + 1] * b[:, n - 1 :: -1][:, :n], axis=1) / n
    return b


def _log_rows(f: np.ndarray) -> np.ndarray:
    """Row-wise log of series with constant term 1."""
    rows, m = f.shape
    g = np.zeros_like(f, dtype=complex)
    for n in range(1, m):
        acc = n * f[:, n]
        if n > 1:
            k = np.arange(1, n)
            acc = acc - np.sum(k * g[:, 1:n] * f[:, n - 1 : 0 : -1], axis=1)
        g[:, n] = acc / n
    return g


def _factor_log_sum(cs: np.ndarray, sign: int, order: int) -> XSeries:
    """sum_s log((1 - c_s e^{sign 2 pi i x}) / (1 - c_s)) as a series in x."""
    if len(cs) == 0:
        return XSeries.constant(0, order)
    e = np.array([(sign * TWO_PI_I) ** j / math.factorial(j) for j in range(order + 1)])
    denom = 1 - cs
    rows = (-cs / denom)[:, None] * e[None, :]
    rows[:, 0] = 1
    return XSeries(_log_rows(rows).sum(axis=0))


# --------------------------------------------------------------------------
# exact constants
# --------------------------------------------------------------------------


class PiMultiple(NamedTuple):
    """Exact number rational * pi**power."""

    rational: Fraction
    power: int

    def value(self) -> float:
        return float(self.rational) * math.pi**self.power

    def __str__(self) -> str:
        return f"{self.rational}*pi^{self.power}"


@lru_cache(maxsize=None)
def _bernoulli_tuple(m: int) -> tuple[Fraction, ...]:
    b = [Fraction(1)]
    for r in range(1, m + 1):
        b.append(-sum(math.comb(r + 1, j) * b[j] for j in range(r)) / (r + 1))
    return tuple(b)


def bernoulli(m: int) -> list[Fraction]:
    """B_0..B_m for the generating function x/(e^x - 1), so B_1 = -1/2."""
    if m < 0:
        raise EllipticError("bernoulli needs m >= 0")
    return list(_bernoulli_tuple(m))


def a_coeffs(nmax: int) -> list[PiMultiple]:
    """a_{2n} = -(2n+1) B_{2n+2} (2 pi i)^{2n+2} / (2n+2)! for n = 1..nmax.

    Index 0 of the result is a_2.  Since (2 pi i)^{2n+2} = (-1)^{n+1}(2 pi)^{2n+2}
    every a_{2n} is a rational multiple of pi^{2n+2}.
    """
    b = bernoulli(2 * nmax + 2)
    out = []
    for n in range(1, nmax + 1):
        r = -(2 * n + 1) * b[2 * n + 2] * (-1) ** (n + 1) * 2 ** (2 * n + 2)
        out.append(PiMultiple(Fraction(r, math.factorial(2 * n + 2)), 2 * n + 2))
    return out


def trig_c_coeffs(m: int) -> list[PiMultiple]:
    """c_1, c_3, ..., c_{2m+1} with pi cot(pi x) - 1/x = sum c_{2n+1} x^{2n+1}."""
    b = bernoulli(2 * m + 2)
    out = []
    for k in range(1, m + 2):
        r = (-1) ** k * 2 ** (2 * k) * b[2 * k] / math.factorial(2 * k)
        out.append(PiMultiple(Fraction(r), 2 * k))
    return out


# --------------------------------------------------------------------------
# theta engine
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaEngine:
    """Modular parameter tau with q-truncation N and a lattice guard eps."""

    tau: complex
    N: int = 40
    eps: float = 1e-6
    _qs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise EllipticError(f"Im(tau) must be positive, got tau={tau}")
        if int(self.N) < 1:
            raise EllipticError(f"q-truncation must be >= 1, got {self.N}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "N", int(self.N))
        q = cmath.exp(TWO_PI_I * tau)
        object.__setattr__(self, "_qs", q ** np.arange(1, self.N + 1))

    @property
    def q(self) -> complex:
        return complex(self._qs[0])

    def with_tau(self, tau: complex) -> "ThetaEngine":
        return ThetaEngine(tau, self.N, self.eps)

    def lattice_coords(self, z: complex) -> tuple[float, float]:
        """Real (a, b) with z = a + b tau."""
        b = z.imag / self.tau.imag
        return z.real - b * self.tau.real, b

    def nearest_lattice_point(self, z: complex) -> complex:
        a, b = self.lattice_coords(complex(z))
        best = None
        for m in (math.floor(a), math.ceil(a)):
            for n in (math.floor(b), math.ceil(b)):
                p = m + n * self.tau
                if best is None or abs(z - p) < abs(z - best):
                    best = p
        return best

    def check_regular(self, z: complex) -> None:
        p = self.nearest_lattice_point(z)
        d = abs(z - p)
        if d < self.eps:
            raise SingularityError(complex(z), p, d)


def theta(engine: ThetaEngine, z: complex) -> complex:
    """theta(z|tau) from the truncated product formula."""
    z = complex(z)
    u = cmath.exp(TWO_PI_I * z)
    qs = engine._qs
    num = np.prod(1 - qs * u) * np.prod(1 - qs / u) * (1 - 1 / u)
    den = TWO_PI_I * np.prod(1 - qs) ** 2
    return complex(cmath.exp(1j * math.pi * z) * num / den)


def theta_logderiv(engine: ThetaEngine, z: complex) -> complex:
    """theta'(z)/theta(z) by logarithmic differentiation of each factor."""
    z = complex(z)
    engine.check_regular(z)
    u = cmath.exp(TWO_PI_I * z)
    qs = engine._qs
    a = qs * u
    b = qs / u
    total = 1j * math.pi - TWO_PI_I * np.sum(a / (1 - a)) + TWO_PI_I * np.sum(b / (1 - b))
    return complex(total + TWO_PI_I / (u - 1))


def eta(engine: ThetaEngine) -> complex:
    """Dedekind eta q^{1/24} prod (1 - q^n)."""
    return complex(cmath.exp(TWO_PI_I * engine.tau / 24) * np.prod(1 - engine._qs))


def _shift_factor(engine: ThetaEngine, z: complex, order: int) -> tuple[XSeries, XSeries]:
    """theta(z+x)/theta(z) split as (trigonometric part, log of q-part)."""
    u = cmath.exp(TWO_PI_I * complex(z))
    w = 1 / u
    trig = XSeries.exp_linear(1j * math.pi, order) * (
        (1 - w * XSeries.exp_linear(-TWO_PI_I, order)) / (1 - w)
    )
    qs = engine._qs
    logq = _factor_log_sum(qs * u, 1, order) + _factor_log_sum(qs / u, -1, order)
    return trig, logq


def _sinc_series(order: int) -> XSeries:
    c = np.zeros(order + 1, dtype=complex)
    for j in range(0, order + 1, 2):
        c[j] = (-1) ** (j // 2) * math.pi**j / math.factorial(j + 1)
    return XSeries(c)


def _theta_over_x(engine: ThetaEngine, order: int) -> tuple[XSeries, XSeries]:
    """theta(x)/x split as (sin(pi x)/(pi x), log of q-part)."""
    qs = engine._qs
    logq = _factor_log_sum(qs, 1, order) + _factor_log_sum(qs, -1, order)
    return _sinc_series(order), logq


def theta_taylor(engine: ThetaEngine, z: complex, order: int) -> XSeries:
    """Taylor coefficients of x -> theta(z + x|tau)."""
    trig, logq = _shift_factor(engine, z, order)
    return trig * logq.exp() * theta(engine, z)


def k_series(engine: ThetaEngine, z: complex, order: int = 8) -> XSeries:
    """Coefficients of k(z, x|tau) = theta(z+x)/(theta(z)theta(x)) - 1/x in x."""
    if order < 0:
        raise EllipticError("order must be >= 0")
    engine.check_regular(complex(z))
    trig_a, log_a = _shift_factor(engine, z, order + 1)
    trig_t, log_t = _theta_over_x(engine, order + 1)
    ratio = trig_a / trig_t * (log_a - log_t).exp()
    return ratio.shift_down(1)


def k_q_correction(engine: ThetaEngine, z: complex, order: int = 8) -> XSeries:
    """k(z, x|tau) minus its trigonometric limit, computed without cancellation."""
    engine.check_regular(complex(z))
    trig_a, log_a = _shift_factor(engine, z, order + 1)
    trig_t, log_t = _theta_over_x(engine, order + 1)
    return (trig_a / trig_t * (log_a - log_t).expm1()).shift_down(1)


def trig_k_series(z: complex, order: int = 8) -> XSeries:
    """Trigonometric kernel pi cot(pi z) + pi cot(pi x) - 1/x as a series in x."""
    z = complex(z)
    if abs(z - round(z.real)) < 1e-12:
        raise SingularityError(z, complex(round(z.real)), abs(z - round(z.real)))
    c = np.zeros(order + 1, dtype=complex)
    c[0] = math.pi * cmath.cos(math.pi * z) / cmath.sin(math.pi * z)
    for i, cc in enumerate(trig_c_coeffs(order // 2)):
        j = 2 * i + 1
        if j <= order:
            c[j] = cc.value()
    return XSeries(c)


def g_series(engine: ThetaEngine, z: complex, order: int = 8) -> XSeries:
    """g(z, x|tau) = d/dx k(z, x|tau) as a series in x."""
    return k_series(engine, z, order + 1).derivative()


def phi_series(engine: ThetaEngine, order: int = 8) -> XSeries:
    """phi(x) = g(0,0) - g(0,x) = -(log T)''(x) + (log T)''(0), T = theta(x)/x."""
    if order < 2 or order % 2:
        raise EllipticError("phi_series needs an even order >= 2")
    sinc, logq = _theta_over_x(engine, order + 2)
    log_t = sinc.log() + logq
    second = -log_t.derivative().derivative()
    out = second.coeffs.copy()
    out[0] = 0
    return XSeries(out)


_A_TABLE_MAX = 24


def eisenstein(engine: ThetaEngine, n: int) -> complex:
    """E_{2n+2}(tau) := coeff_{2n}(phi)/a_{2n}; constant term 1 in q."""
    if not 1 <= n <= _A_TABLE_MAX:
        raise EllipticError(f"eisenstein index n must lie in 1..{_A_TABLE_MAX}, got {n}")
    phi = phi_series(engine, 2 * n)
    return phi[2 * n] / a_coeffs(n)[n - 1].value()


def heat_equation_residual(engine: ThetaEngine, z: complex, h: float = 1e-4) -> float:
    """|d_tau vartheta - (1/4 pi i) d_z^2 vartheta| for vartheta = eta^3 theta."""
    z = complex(z)

    def vt(e: ThetaEngine, w: complex) -> complex:
        return eta(e) ** 3 * theta(e, w)

    plus, minus = engine.with_tau(engine.tau + h), engine.with_tau(engine.tau - h)
    d_tau = (vt(plus, z) - vt(minus, z)) / (2 * h)
    d_zz = (vt(engine, z + h) - 2 * vt(engine, z) + vt(engine, z - h)) / h**2
    return abs(d_tau - d_zz / (4j * math.pi))


def k_value(engine: ThetaEngine, z: complex, x: complex) -> complex:
    """k(z, x|tau) at a point; the x = 0 removable pole is handled by the series."""
    z, x = complex(z), complex(x)
    if abs(x) < 1e-3:
        return k_series(engine, z, 10).evaluate(x)
    engine.check_regular(z)
    engine.check_regular(x)
    return theta(engine, z + x) / (theta(engine, z) * theta(engine, x)) - 1 / x


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def theta_property_residuals(engine: ThetaEngine, z: complex) -> dict[str, float]:
    """Relative residuals of the characterizing properties of theta at one point.

    ``zeros`` compares the residue of theta'/theta at the nearest lattice
    point with 1 (contour integral), ``normalization`` compares theta'(0)
    from a Cauchy integral with 1, and the remaining keys are the periodicity
    and modular identities.
    """
    z = complex(z)
    tau = engine.tau
    th = theta(engine, z)
    lam = engine.nearest_lattice_point(z)
    out = {
        "zeros": abs(_contour_mean(lambda w: theta_logderiv(engine, w), lam, 0.05) - 1),
        "normalization": abs(_contour_mean(lambda w: theta(engine, w) / (w * w), 0, 0.1) - 1),
        "shift_1": _rel(theta(engine, z + 1), -th),
        "odd": _rel(theta(engine, -z), -th),
        "shift_tau": _rel(
            theta(engine, z + tau), -cmath.exp(-1j * math.pi * tau) * cmath.exp(-TWO_PI_I * z) * th
        ),
        "tau_plus_1": _rel(theta(engine.with_tau(tau + 1), z), th),
        "s_transform": _rel(
            theta(engine.with_tau(-1 / tau), -z / tau),
            -(1 / tau) * cmath.exp(1j * math.pi * z * z / tau) * th,
        ),
    }
    return out


def _contour_mean(f, center: complex, radius: float, points: int = 64) -> complex:
    """(1/2 pi i) times the integral of f around a circle, by the trapezoid rule."""
    total = 0j
    for j in range(points):
        w = cmath.exp(TWO_PI_I * j / points)
        total += f(center + radius * w) * radius * w
    return total / points
