"""Exact finite root systems.

Roots are stored as integer coordinate vectors in the basis of simple roots,
and the bilinear form is the rational Gram matrix of the simple roots.  Every
inner product is therefore an exact :class:`fractions.Fraction`.  Long roots
have squared length 2 in every type; short roots have squared length 1, except
for G2 where they have squared length 2/3.

The full root list is produced by closing the simple roots under the simple
reflections, which handles the exceptional types without hardcoded tables.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Vector = tuple  # tuple of int or Fraction, simple-root coordinates

__all__ = [
    "RootSystem",
    "RootSystemError",
    "build_root_system",
    "dual_coxeter",
    "root_string",
    "reflection",
    "classify_sum_pairs",
    "sum_pairs",
    "SUPPORTED",
]


class RootSystemError(ValueError):
    """Raised for unsupported types or inconsistent root data."""


_EXPECTED_COUNTS = {"E6": 72, "E7": 126, "E8": 240, "F4": 48, "G2": 12}

SUPPORTED = (
    "A_r (r>=1), B_r (r>=2), C_r (r>=2), D_r (r>=3), E6, E7, E8, F4, G2"
)


def _chain_gram(r: int) -> list[list[Fraction]]:
    g = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        g[i][i] = Fraction(2)
        if i + 1 < r:
            g[i][i + 1] = g[i + 1][i] = Fraction(-1)
    return g


def _gram_for(label: str, rank: int) -> list[list[Fraction]]:
    """Gram matrix of the simple roots in Bourbaki numbering."""
    if label == "A":
        return _chain_gram(rank)
    if label == "B":
        g = _chain_gram(rank)
        g[rank - 1][rank - 1] = Fraction(1)
        return g
    if label == "C":
        g = [[x / 2 for x in row] for row in _chain_gram(rank)]
        g[rank - 1][rank - 1] = Fraction(2)
        g[rank - 2][rank - 1] = g[rank - 1][rank - 2] = Fraction(-1)
        return g
    if label == "D":
        g = _chain_gram(rank)
        g[rank - 2][rank - 1] = g[rank - 1][rank - 2] = Fraction(0)
        g[rank - 3][rank - 1] = g[rank - 1][rank - 3] = Fraction(-1)
        return g
    if label == "E":
        g = [[Fraction(0)] * rank for _ in range(rank)]
        edges = [(0, 2), (1, 3), (2, 3)] + [(i, i + 1) for i in range(3, rank - 1)]
        for i in range(rank):
            g[i][i] = Fraction(2)
        for i, j in edges:
            g[i][j] = g[j][i] = Fraction(-1)
        return g
    if label == "F":
        g = _chain_gram(4)
        g[2][2] = g[3][3] = Fraction(1)
        g[2][3] = g[3][2] = Fraction(-1, 2)
        return g
    if label == "G":
        return [[Fraction(2, 3), Fraction(-1)], [Fraction(-1), Fraction(2)]]
    raise AssertionError(label)


def _normalize_label(label: str, rank: int | None) -> tuple[str, int]:
    text = str(label).strip().upper()
    if len(text) > 1 and text[1:].isdigit():
        fixed = int(text[1:])
        if rank is not None and int(rank) != fixed:
            raise RootSystemError(f"unsupported root system ({label!r}, {rank!r})")
        text, rank = text[0], fixed
    if rank is None:
        raise RootSystemError(f"unsupported root system ({label!r}, {rank!r}): rank required")
    rank = int(rank)
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 3,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }.get(text, False)
    if not ok:
        raise RootSystemError(
            f"unsupported root system ({label!r}, {rank!r}); supported: {SUPPORTED}"
        )
    return text, rank


@dataclass(frozen=True)
class RootSystem:
    """A reduced crystallographic root system with exact rational data."""

    label: str
    rank: int
    gram: tuple[tuple[Fraction, ...], ...]
    roots: tuple[Vector, ...]
    positive_roots: tuple[Vector, ...] = field(repr=False)
    simple_roots: tuple[Vector, ...] = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.label}{self.rank}"

    @cached_property
    def _scaled_gram(self) -> tuple[int, tuple[tuple[int, ...], ...]]:
        den = 1
        for row in self.gram:
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
        return den, tuple(tuple(int(x * den) for x in row) for row in self.gram)

    def inner(self, u: Sequence, v: Sequence) -> Fraction:
        """Exact inner product of two vectors in simple-root coordinates."""
        den, g = self._scaled_gram
        if all(type(x) is int for x in u) and all(type(x) is int for x in v):
            total = 0
            for i, ui in enumerate(u):
                if ui:
                    row = g[i]
                    total += ui * sum(row[j] * vj for j, vj in enumerate(v) if vj)
            return Fraction(total, den)
        total = Fraction(0)
        for i, ui in enumerate(u):
            if ui:
                row = self.gram[i]
                total += ui * sum((row[j] * vj for j, vj in enumerate(v) if vj), Fraction(0))
        return total

    def norm2(self, v: Sequence) -> Fraction:
        return self.inner(v, v)

    def pairing(self, beta: Sequence, alpha: Sequence) -> Fraction:
        """Cartan integer <beta, alpha> = 2 (beta, alpha) / (alpha, alpha)."""
        return 2 * self.inner(beta, alpha) / self.norm2(alpha)

    def coroot(self, alpha: Sequence) -> tuple[Fraction, ...]:
        s = 2 / self.norm2(alpha)
        return tuple(s * a for a in alpha)

    @cached_property
    def root_set(self) -> frozenset:
        return frozenset(self.roots)

    def is_root(self, v: Sequence) -> bool:
        return tuple(v) in self.root_set

    @cached_property
    def long_length(self) -> Fraction:
        return max(self.norm2(a) for a in self.simple_roots)

    def is_long(self, alpha: Sequence) -> bool:
        return self.norm2(alpha) == self.long_length

    def __len__(self) -> int:
        return len(self.roots)


def _add(u: Vector, v: Vector, s=1) -> Vector:
    return tuple(a + s * b for a, b in zip(u, v))


def _as_int_vector(v: Iterable) -> Vector:
    out = []
    for x in v:
        x = Fraction(x)
        out.append(int(x) if x.denominator == 1 else x)
    return tuple(out)


def build_root_system(label: str, rank: int | None = None) -> RootSystem:
    """Build a root system by Weyl-orbit closure of the simple roots.

    ``label`` is one of A, B, C, D, E, F, G (with ``rank``), or a fused name
    such as ``"E6"`` or ``"G2"``.
    """
    letter, rank = _normalize_label(label, rank)
    gram = _gram_for(letter, rank)
    simple = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]
    norms = [gram[i][i] for i in range(rank)]

    def reflect_simple(v: Vector, i: int) -> Vector:
        c = 2 * sum(gram[i][j] * v[j] for j in range(rank)) / norms[i]
        assert c.denominator == 1, "non-crystallographic pairing"
        out = list(v)
        out[i] -= int(c)
        return tuple(out)

    found = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(rank):
                w = reflect_simple(v, i)
                if w not in found:
                    found.add(w)
                    nxt.append(w)
        frontier = nxt

    roots = tuple(sorted(found))
    positive = tuple(r for r in roots if all(c >= 0 for c in r))
    if len(positive) * 2 != len(roots) or any(
        not (all(c >= 0 for c in r) or all(c <= 0 for c in r)) for r in roots
    ):
        raise RootSystemError(f"root data for {letter}{rank} is not sign-coherent")
    expected = _EXPECTED_COUNTS.get(f"{letter}{rank}")
    if expected is None:
        expected = {
            "A": rank * (rank + 1),
            "B": 2 * rank * rank,
            "C": 2 * rank * rank,
            "D": 2 * rank * (rank - 1),
        }[letter]
    if len(roots) != expected:
        raise RootSystemError(
            f"{letter}{rank}: generated {len(roots)} roots, expected {expected}"
        )
    return RootSystem(
        label=letter,
        rank=rank,
        gram=tuple(tuple(row) for row in gram),
        roots=roots,
        positive_roots=positive,
        simple_roots=tuple(simple),
    )


def dual_coxeter(rs: RootSystem) -> Fraction:
    """Dual Coxeter number from (u|v) = (1/h) sum over positive roots (g,u)(g,v)."""
    u = rs.simple_roots[0]
    h = sum((rs.inner(g, u) ** 2 for g in rs.positive_roots), Fraction(0)) / rs.norm2(u)
    for a in rs.simple_roots:
        for b in rs.simple_roots:
            lhs = sum(
                (rs.inner(g, a) * rs.inner(g, b) for g in rs.positive_roots), Fraction(0)
            )
            if lhs != h * rs.inner(a, b):
                raise RootSystemError(
                    f"{rs.name}: Casimir identity fails for simple pair ({a}, {b})"
                )
    return h


def root_string(rs: RootSystem, alpha: Sequence, beta: Sequence) -> tuple[int, int]:
    """Return (r, q) for the alpha-string beta - r alpha, ..., beta + q alpha."""
    alpha, beta = tuple(alpha), tuple(beta)
    if not (rs.is_root(alpha) and rs.is_root(beta)):
        raise RootSystemError("root_string expects two roots")
    if beta == alpha or beta == tuple(-a for a in alpha):
        raise RootSystemError("root string undefined for beta = +-alpha")
    r = 0
    while rs.is_root(_add(beta, alpha, -(r + 1))):
        r += 1
    q = 0
    while rs.is_root(_add(beta, alpha, q + 1)):
        q += 1
    return r, q


def reflection(rs: RootSystem, alpha: Sequence, v: Sequence) -> Vector:
    """s_alpha(v) = v - <v, alpha> alpha."""
    if not rs.is_root(alpha):
        raise RootSystemError("reflection expects a root")
    c = rs.pairing(v, alpha)
    return _as_int_vector(Fraction(x) - c * a for x, a in zip(v, alpha))


def sum_pairs(rs: RootSystem) -> list[tuple[Vector, Vector, Vector]]:
    """All ordered pairs (alpha, beta) of roots with alpha + beta a root."""
    out = []
    for a in rs.roots:
        for b in rs.roots:
            s = _add(a, b)
            if s in rs.root_set:
                out.append((a, b, s))
    return out


def classify_sum_pairs(rs: RootSystem) -> dict[tuple[Fraction, Fraction, Fraction], int]:
    """Count ordered pairs with alpha + beta a root, keyed by squared lengths."""
    counts: Counter = Counter()
    for a, b, s in sum_pairs(rs):
        counts[(rs.norm2(a), rs.norm2(b), rs.norm2(s))] += 1
    return dict(sorted(counts.items()))
