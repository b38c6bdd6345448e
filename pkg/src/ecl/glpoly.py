"""Exact differential operators on C[x_1..x_k][1/prod(x_a - x_b)] (x) C[m_{a,i}].

A state is a finite linear combination of atoms ``(mono, den, xexp)``:

* ``mono`` -- exponents of the matrix variables m_{a,i} (row a, column i),
  flattened row-major into a tuple of length k*n;
* ``den`` -- exponents e_{ab} of the factors (x_a - x_b), a < b, in the
  denominator;
* ``xexp`` -- exponents of the Cartan coordinates x_1..x_k.

Coefficients are exact rationals (``gmpy2.mpq``).  Atoms are not unique
representatives (x_1/(x_1-x_2) - x_2/(x_1-x_2) equals 1), so equality goes
through :meth:`PolyState.canonical`, which groups by m-monomial, puts each
group over a common denominator and cancels every (x_a - x_b) factor that
divides the numerator.

Operators are expression trees.  Applying a commutator node evaluates
``A(B v) - B(A v)``; nothing is ever normal ordered.  Public indices are
1-based, matching the usual matrix-unit notation E_ij.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

from gmpy2 import mpq

__all__ = [
    "Model",
    "PolyState",
    "DiffOp",
    "IdentityReport",
    "WEIGHT_MODES",
    "check_identity",
    "state_family",
    "weight_ok",
    "binomial_identity_holds",
    "sl2_probe",
    "SUITES",
    "run_suite",
    "check_many",
]

Atom = tuple  # (mono, den, xexp)
Terms = dict  # Atom -> mpq

WEIGHT_MODES = ("none", "slk_zero", "sln_zero")


def _q(c) -> mpq:
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


def _add_into(acc: Terms, terms: Terms, scale: mpq = mpq(1)) -> None:
    for atom, c in terms.items():
        v = acc.get(atom)
        v = c * scale if v is None else v + c * scale
        if v:
            acc[atom] = v
        else:
            acc.pop(atom, None)


# ---------------------------------------------------------------------------
# polynomial helpers for canonical forms (dict: exponent tuple -> mpq)


def _pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


@lru_cache(maxsize=None)
def _diff_power(k: int, a: int, b: int, p: int) -> tuple:
    """(x_a - x_b)^p as a tuple of (exponent, coefficient) pairs."""
    poly = {tuple([0] * k): mpq(1)}
    ea = tuple(1 if i == a else 0 for i in range(k))
    eb = tuple(1 if i == b else 0 for i in range(k))
    lin = {ea: mpq(1), eb: mpq(-1)}
    for _ in range(p):
        poly = _pmul(poly, lin)
    return tuple(poly.items())


def _divides(poly: dict, a: int, b: int) -> bool:
    sub: dict = {}
    for e, c in poly.items():
        e2 = list(e)
        e2[b] += e2[a]
        e2[a] = 0
        key = tuple(e2)
        v = sub.get(key, 0) + c
        if v:
            sub[key] = v
        else:
            sub.pop(key, None)
    return not sub


def _divide_linear(poly: dict, a: int, b: int) -> dict:
    """Exact quotient of ``poly`` by (x_a - x_b), assuming divisibility."""
    by_deg: dict[int, dict] = {}
    for e, c in poly.items():
        rest = list(e)
        d = rest[a]
        rest[a] = 0
        by_deg.setdefault(d, {})[tuple(rest)] = c
    top = max(by_deg)
    quot: dict = {}
    carry: dict = {}
    # q_{j-1} = p_j + x_b q_j, from the top degree down
    for j in range(top, 0, -1):
        cur = dict(by_deg.get(j, {}))
        for e, c in carry.items():
            e2 = list(e)
            e2[b] += 1
            key = tuple(e2)
            v = cur.get(key, 0) + c
            if v:
                cur[key] = v
            else:
                cur.pop(key, None)
        for e, c in cur.items():
            e2 = list(e)
            e2[a] = j - 1
            quot[tuple(e2)] = c
        carry = cur
    return quot


# ---------------------------------------------------------------------------
# states


class PolyState:
    """Immutable exact element of the polynomial / rational-function module."""

    __slots__ = ("k", "n", "terms", "_canon")

    def __init__(self, k: int, n: int, terms: Terms | None = None):
        self.k = k
        self.n = n
        self.terms: Terms = terms if terms is not None else {}
        self._canon = None

    # construction -------------------------------------------------------
    @classmethod
    def monomial(
        cls,
        k: int,
        n: int,
        mono: Sequence[int],
        xexp: Sequence[int] | None = None,
        den: Sequence[int] | None = None,
        coeff=1,
    ) -> "PolyState":
        npairs = k * (k - 1) // 2
        xexp = tuple(xexp) if xexp is not None else (0,) * k
        den = tuple(den) if den is not None else (0,) * npairs
        if len(mono) != k * n or len(xexp) != k or len(den) != npairs:
            raise ValueError("monomial shape does not match (k, n)")
        return cls(k, n, {(tuple(mono), den, xexp): _q(coeff)})

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "PolyState") -> None:
        if (self.k, self.n) != (other.k, other.n):
            raise ValueError("states live in different models")

    def __add__(self, other: "PolyState") -> "PolyState":
        self._check(other)
        acc = dict(self.terms)
        _add_into(acc, other.terms)
        return PolyState(self.k, self.n, acc)

    def __sub__(self, other: "PolyState") -> "PolyState":
        self._check(other)
        acc = dict(self.terms)
        _add_into(acc, other.terms, mpq(-1))
        return PolyState(self.k, self.n, acc)

    def scale(self, c) -> "PolyState":
        c = _q(c)
        if not c:
            return PolyState(self.k, self.n, {})
        return PolyState(self.k, self.n, {a: v * c for a, v in self.terms.items()})

    def __neg__(self) -> "PolyState":
        return self.scale(-1)

    # canonical form -----------------------------------------------------
    def canonical(self) -> tuple:
        """Unique normal form: sorted tuple of (mono, den, sorted numerator)."""
        if self._canon is not None:
            return self._canon
        k = self.k
        pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
        groups: dict = {}
        for (mono, den, xexp), c in self.terms.items():
            groups.setdefault(mono, []).append((den, xexp, c))
        out = []
        for mono in sorted(groups):
            items = groups[mono]
            top = tuple(max(d[p] for d, _, _ in items) for p in range(len(pairs)))
            num: dict = {}
            for den, xexp, c in items:
                poly = {xexp: c}
                for p, (a, b) in enumerate(pairs):
                    miss = top[p] - den[p]
                    if miss:
                        poly = _pmul(poly, dict(_diff_power(k, a, b, miss)))
                for e, v in poly.items():
                    s = num.get(e, 0) + v
                    if s:
                        num[e] = s
                    else:
                        num.pop(e, None)
            if not num:
                continue
            top = list(top)
            for p, (a, b) in enumerate(pairs):
                while top[p] and _divides(num, a, b):
                    num = _divide_linear(num, a, b)
                    top[p] -= 1
            out.append((mono, tuple(top), tuple(sorted(num.items()))))
        self._canon = tuple(out)
        return self._canon

    def is_zero(self) -> bool:
        return not self.canonical()

    def normalized(self) -> "PolyState":
        """Re-expand the canonical form into atoms (shrinks cancelling sums)."""
        terms: Terms = {}
        for mono, den, num in self.canonical():
            for xexp, c in num:
                terms[(mono, den, xexp)] = c
        return PolyState(self.k, self.n, terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyState):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __len__(self) -> int:
        return len(self.terms)

    # degrees ------------------------------------------------------------
    def m_degrees(self) -> set[int]:
        return {sum(mono) for mono, _, _ in self.terms}

    def to_text(self) -> str:
        """Human-readable canonical form, deterministic."""
        k, n = self.k, self.n
        pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
        if not self.canonical():
            return "0"
        chunks = []
        for mono, den, num in self.canonical():
            mpart = "*".join(
                f"m{a + 1}{i + 1}" + (f"^{e}" if e > 1 else "")
                for a in range(k)
                for i in range(n)
                if (e := mono[a * n + i])
            ) or "1"
            npart = " + ".join(
                f"({c})" + "".join(f"*x{j + 1}^{e}" for j, e in enumerate(xe) if e)
                for xe, c in num
            )
            dpart = "*".join(
                f"(x{a + 1}-x{b + 1})^{e}" for (a, b), e in zip(pairs, den) if e
            )
            frac = f"[{npart}]" + (f"/[{dpart}]" if dpart else "")
            chunks.append(f"{frac}*{mpart}")
        return " + ".join(chunks)

    def __repr__(self) -> str:
        return f"PolyState(k={self.k}, n={self.n}, {self.to_text()})"


# ---------------------------------------------------------------------------
# operators


class DiffOp:
    """Expression-tree operator; subclasses implement ``_apply`` on raw terms."""

    def apply(self, state: PolyState) -> PolyState:
        return PolyState(state.k, state.n, self._apply(state.terms))

    __call__ = apply

    def _apply(self, terms: Terms) -> Terms:  # pragma: no cover - abstract
        raise NotImplementedError

    # algebra ------------------------------------------------------------
    def __add__(self, other: "DiffOp") -> "DiffOp":
        return LinComb([(mpq(1), self), (mpq(1), other)])

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return LinComb([(mpq(1), self), (mpq(-1), other)])

    def __neg__(self) -> "DiffOp":
        return LinComb([(mpq(-1), self)])

    def __mul__(self, c) -> "DiffOp":
        if isinstance(c, DiffOp):
            return Compose([self, c])
        return LinComb([(_q(c), self)])

    __rmul__ = __mul__

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return Compose([self, other])


class _Prim(DiffOp):
    """Atom-wise linear map with a memo table."""

    __slots__ = ("key", "fn", "memo")

    def __init__(self, key: tuple, fn: Callable[[Atom], tuple]):
        self.key = key
        self.fn = fn
        self.memo: dict = {}

    def _apply(self, terms: Terms) -> Terms:
        out: Terms = {}
        memo, fn = self.memo, self.fn
        for atom, c in terms.items():
            img = memo.get(atom)
            if img is None:
                img = fn(atom)
                memo[atom] = img
            for a2, c2 in img:
                v = out.get(a2)
                v = c * c2 if v is None else v + c * c2
                if v:
                    out[a2] = v
                else:
                    del out[a2]
        return out

    def __repr__(self) -> str:
        return f"Prim{self.key}"


class LinComb(DiffOp):
    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[tuple]):
        flat = []
        for c, op in parts:
            c = _q(c)
            if not c:
                continue
            if isinstance(op, LinComb):
                flat.extend((c * c2, o2) for c2, o2 in op.parts)
            else:
                flat.append((c, op))
        self.parts = flat

    def _apply(self, terms: Terms) -> Terms:
        acc: Terms = {}
        for c, op in self.parts:
            _add_into(acc, op._apply(terms), c)
        return acc


class Compose(DiffOp):
    """Product A1 A2 ... Ar, applied right to left."""

    __slots__ = ("ops",)

    def __init__(self, ops: Sequence[DiffOp]):
        flat: list = []
        for op in ops:
            flat.extend(op.ops if isinstance(op, Compose) else [op])
        self.ops = flat

    def _apply(self, terms: Terms) -> Terms:
        for op in reversed(self.ops):
            if not terms:
                return {}
            terms = op._apply(terms)
        return terms


class Commutator(DiffOp):
    __slots__ = ("a", "b")

    def __init__(self, a: DiffOp, b: DiffOp):
        self.a, self.b = a, b

    def _apply(self, terms: Terms) -> Terms:
        acc = self.a._apply(self.b._apply(terms))
        _add_into(acc, self.b._apply(self.a._apply(terms)), mpq(-1))
        return acc


class Scalar(DiffOp):
    __slots__ = ("c",)

    def __init__(self, c):
        self.c = _q(c)

    def _apply(self, terms: Terms) -> Terms:
        if not self.c:
            return {}
        return {a: v * self.c for a, v in terms.items()}


ZERO = Scalar(0)
IDENTITY = Scalar(1)


def comm(a: DiffOp, b: DiffOp) -> DiffOp:
    return Commutator(a, b)


def anticomm(a: DiffOp, b: DiffOp) -> DiffOp:
    """S(a, b) = ab + ba."""
    return Compose([a, b]) + Compose([b, a])


def lin(parts: Iterable[tuple]) -> DiffOp:
    parts = list(parts)
    return LinComb(parts) if parts else ZERO


# ---------------------------------------------------------------------------
# the concrete model


Matrix = dict  # (i, j) -> coefficient, 1-based gl_n matrix entries


class Model:
    """Operators of gl_k x gl_n and the DDCA realization at fixed (k, n).

    Deformation parameters default to lambda = -1, beta = n/4.
    """

    def __init__(self, k: int, n: int, lam=-1, beta=None):
        if k < 1 or n < 1:
            raise ValueError("k and n must be positive")
        self.k = k
        self.n = n
        self.lam = _q(lam)
        self.beta = _q(beta) if beta is not None else mpq(n, 4)
        self.pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
        self._pair_index = {p: i for i, p in enumerate(self.pairs)}
        self._prims: dict = {}
        self._cache: dict = {}

    # index checks -------------------------------------------------------
    def _row(self, a: int) -> int:
        if not 1 <= a <= self.k:
            raise IndexError(f"gl_k index {a} outside 1..{self.k}")
        return a - 1

    def _col(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"gl_n index {i} outside 1..{self.n}")
        return i - 1

    def _memo(self, key, build):
        op = self._cache.get(key)
        if op is None:
            op = build()
            self._cache[key] = op
        return op

    # primitives ---------------------------------------------------------
    def _prim(self, key: tuple, fn) -> _Prim:
        p = self._prims.get(key)
        if p is None:
            p = _Prim(key, fn)
            self._prims[key] = p
        return p

    def mat_unit(self, a: int, i: int, b: int, j: int) -> DiffOp:
        """m_{a,i} d/dm_{b,j} (0-based indices)."""
        n = self.n
        src = b * n + j
        dst = a * n + i

        def fn(atom):
            mono, den, xexp = atom
            e = mono[src]
            if not e:
                return ()
            m = list(mono)
            m[src] -= 1
            m[dst] += 1
            return (((tuple(m), den, xexp), mpq(e)),)

        return self._prim(("E", a, i, b, j), fn)

    def mul_m(self, a: int, i: int) -> DiffOp:
        idx = a * self.n + i

        def fn(atom):
            mono, den, xexp = atom
            m = list(mono)
            m[idx] += 1
            return (((tuple(m), den, xexp), mpq(1)),)

        return self._prim(("m", a, i), fn)

    def d_m(self, a: int, i: int) -> DiffOp:
        idx = a * self.n + i

        def fn(atom):
            mono, den, xexp = atom
            e = mono[idx]
            if not e:
                return ()
            m = list(mono)
            m[idx] -= 1
            return (((tuple(m), den, xexp), mpq(e)),)

        return self._prim(("dm", a, i), fn)

    def mul_x(self, a: int) -> DiffOp:
        """Multiplication by x_{a+1} (0-based)."""

        def fn(atom):
            mono, den, xexp = atom
            x = list(xexp)
            x[a] += 1
            return (((mono, den, tuple(x)), mpq(1)),)

        return self._prim(("x", a), fn)

    def d_x(self, a: int) -> DiffOp:
        """d/dx_{a+1} (0-based), acting on x^mu / prod (x_c - x_d)^e."""
        pairs = self.pairs

        def fn(atom):
            mono, den, xexp = atom
            out = []
            if xexp[a]:
                x = list(xexp)
                x[a] -= 1
                out.append(((mono, den, tuple(x)), mpq(xexp[a])))
            for p, (c, d) in enumerate(pairs):
                e = den[p]
                if not e or a not in (c, d):
                    continue
                sign = -1 if a == c else 1
                dd = list(den)
                dd[p] += 1
                out.append(((mono, tuple(dd), xexp), mpq(sign * e)))
            return tuple(out)

        return self._prim(("dx", a), fn)

    def inv_diff(self, a: int, b: int) -> DiffOp:
        """Multiplication by 1/(x_{b+1} - x_{a+1}) (0-based, a != b)."""
        if a == b:
            raise ValueError("inv_diff needs distinct indices")
        lo, hi = min(a, b), max(a, b)
        p = self._pair_index[(lo, hi)]
        # x_b - x_a = -(x_a - x_b); with lo < hi the stored factor is (x_lo - x_hi)
        sign = mpq(-1) if a < b else mpq(1)

        def fn(atom):
            mono, den, xexp = atom
            dd = list(den)
            dd[p] += 1
            return (((mono, tuple(dd), xexp), sign),)

        return self._prim(("inv", a, b), fn)

    # gl_k x gl_n --------------------------------------------------------
    def glk_gen(self, a: int, b: int, i: int) -> DiffOp:
        """(E_ab^{(k)})^{(i)} = m_{ai} d/dm_{bi}."""
        a, b, i = self._row(a), self._row(b), self._col(i)
        return self.mat_unit(a, i, b, i)

    def gln_gen(self, i: int, j: int, a: int) -> DiffOp:
        """(E_ij^{(n)})^{(a)} = m_{ai} d/dm_{aj}."""
        i, j, a = self._col(i), self._col(j), self._row(a)
        return self.mat_unit(a, i, a, j)

    def gln(self, X: Matrix | tuple) -> DiffOp:
        """Total gl_n action of a matrix X = sum_a X^{(a)}."""
        X = _as_matrix(X)
        key = ("gln", _mkey(X))
        return self._memo(
            key,
            lambda: lin(
                (c, self.gln_gen(i, j, a))
                for (i, j), c in sorted(X.items())
                for a in range(1, self.k + 1)
            ),
        )

    def gln_local(self, X: Matrix | tuple, a: int) -> DiffOp:
        X = _as_matrix(X)
        return lin((c, self.gln_gen(i, j, a)) for (i, j), c in sorted(X.items()))

    def euler(self) -> DiffOp:
        """Total m-degree operator, sum_e E_ee."""
        return self.gln({(e, e): 1 for e in range(1, self.n + 1)})

    def row_degree(self, a: int) -> DiffOp:
        """sum_i (E_aa^{(k)})^{(i)}: degree in row a."""
        return lin((1, self.glk_gen(a, a, i)) for i in range(1, self.n + 1))

    # elliptic Hecke images ------------------------------------------------
    def cee_x(self, i: int) -> DiffOp:
        self._col(i)
        return self._memo(
            ("cx", i),
            lambda: lin(
                (1, Compose([self.mul_x(a - 1), self.glk_gen(a, a, i)]))
                for a in range(1, self.k + 1)
            ),
        )

    def cee_y(self, i: int) -> DiffOp:
        self._col(i)

        def build():
            parts = [
                (-1, Compose([self.d_x(a - 1), self.glk_gen(a, a, i)]))
                for a in range(1, self.k + 1)
            ]
            for j in range(1, self.n + 1):
                for a in range(1, self.k + 1):
                    for b in range(1, self.k + 1):
                        if a == b:
                            continue
                        parts.append(
                            (
                                1,
                                Compose(
                                    [
                                        self.inv_diff(a - 1, b - 1),
                                        self.glk_gen(a, b, i),
                                        self.glk_gen(b, a, j),
                                    ]
                                ),
                            )
                        )
            return lin(parts)

        return self._memo(("cy", i), build)

    def cee_t(self, i: int, j: int) -> DiffOp:
        if i == j:
            raise ValueError("t_ij needs i != j")
        self._col(i), self._col(j)
        return self._memo(
            ("ct", i, j),
            lambda: lin(
                (1, Compose([self.glk_gen(a, b, i), self.glk_gen(b, a, j)]))
                for a in range(1, self.k + 1)
                for b in range(1, self.k + 1)
            ),
        )

    # DDCA generators ------------------------------------------------------
    def K(self, X: Matrix | tuple) -> DiffOp:
        """K(X) = sum_a x_a X^{(a)}, linear in X."""
        X = _as_matrix(X)
        return self._memo(
            ("K", _mkey(X)),
            lambda: lin(
                (1, Compose([self.mul_x(a - 1), self.gln_local(X, a)]))
                for a in range(1, self.k + 1)
            ),
        )

    def Q(self, X: Matrix | tuple) -> DiffOp:
        """Q(X) = -sum_a d_a X^{(a)} + sum_{a!=b} (x_b-x_a)^{-1}(X_ab-product + X^{(a)})."""
        X = _as_matrix(X)

        def build():
            n = self.n
            parts = [
                (-1, Compose([self.d_x(a - 1), self.gln_local(X, a)]))
                for a in range(1, self.k + 1)
            ]
            for a in range(1, self.k + 1):
                for b in range(1, self.k + 1):
                    if a == b:
                        continue
                    inner = []
                    for (i, j), c in sorted(X.items()):
                        for e in range(1, n + 1):
                            inner.append(
                                (c, Compose([self.gln_gen(i, e, a), self.gln_gen(e, j, b)]))
                            )
                        inner.append((c, self.gln_gen(i, j, a)))
                    parts.append((1, Compose([self.inv_diff(a - 1, b - 1), lin(inner)])))
            return lin(parts)

        return self._memo(("Q", _mkey(X)), build)

    def P(self, X: Matrix | tuple) -> DiffOp:
        """P(X) per the explicit action, with Y_a = x_a d_a + 1/2."""
        X = _as_matrix(X)

        def build():
            n = self.n
            half = mpq(1, 2)
            parts = []
            for a in range(1, self.k + 1):
                Ya = lin([(1, Compose([self.mul_x(a - 1), self.d_x(a - 1)])), (half, IDENTITY)])
                parts.append((-1, Compose([Ya, self.gln_local(X, a)])))
            for a in range(1, self.k + 1):
                for b in range(1, self.k + 1):
                    if a == b:
                        continue
                    inv = self.inv_diff(a - 1, b - 1)
                    parts.append(
                        (1, Compose([self.mul_x(a - 1), inv, self.gln_local(X, a)]))
                    )
                    prod = lin(
                        (c, Compose([self.gln_gen(i, e, a), self.gln_gen(e, j, b)]))
                        for (i, j), c in sorted(X.items())
                        for e in range(1, n + 1)
                    )
                    xs = lin([(1, self.mul_x(a - 1)), (1, self.mul_x(b - 1))])
                    parts.append((half, Compose([xs, inv, prod])))
            return lin(parts)

        return self._memo(("P", _mkey(X)), build)

    def E(self, i: int, j: int) -> DiffOp:
        """Total gl_n matrix unit E_ij."""
        return self.gln({(i, j): 1})

    def ddca_K(self, i: int, j: int) -> DiffOp:
        _root_only(i, j)
        return self.K({(i, j): 1})

    def ddca_Q(self, i: int, j: int) -> DiffOp:
        _root_only(i, j)
        return self.Q({(i, j): 1})

    def ddca_P(self, i: int, j: int) -> DiffOp:
        _root_only(i, j)
        return self.P({(i, j): 1})

    def K_cartan(self, i: int, j: int) -> DiffOp:
        """K(E_ii - E_jj) assembled as [K(E_ij), E_ji]."""
        return Commutator(self.ddca_K(i, j), self.E(j, i))

    def Q_cartan(self, i: int, j: int) -> DiffOp:
        """Q(E_ii - E_jj) assembled as [Q(E_ij), E_ji]."""
        return Commutator(self.ddca_Q(i, j), self.E(j, i))

    # central element --------------------------------------------------------
    def S_sum(self, h1: Matrix, h2: Matrix) -> DiffOp:
        """sum_{i!=j} S([h1, E_ij], [E_ji, h2]) for diagonal h1, h2."""
        n = self.n
        parts = []
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    continue
                w1 = h1.get((i, i), 0) - h1.get((j, j), 0)
                w2 = h2.get((i, i), 0) - h2.get((j, j), 0)
                c = _q(w1) * _q(w2)
                if c:
                    parts.append((c, anticomm(self.E(i, j), self.E(j, i))))
        return lin(parts)

    def Z_pair(self, a: int, b: int, c: int, d: int) -> DiffOp:
        """Z_{ab,cd} = [K(H_ab), Q(H_cd)] - (lam/4) sum S([H_ab,E_ij],[E_ji,H_cd])."""
        hab = {(a, a): 1, (b, b): -1}
        hcd = {(c, c): 1, (d, d): -1}
        return lin(
            [
                (1, Commutator(self.K_cartan(a, b), self.Q_cartan(c, d))),
                (-self.lam / 4, self.S_sum(hab, hcd)),
            ]
        )

    def Zn(self) -> DiffOp:
        """Z_n = sum over the cyclic pairs (a, a+1), with (n, 1) closing the cycle."""
        n = self.n
        return self._memo(
            ("Zn",),
            lambda: lin(
                (1, self.Z_pair(a, a % n + 1, a, a % n + 1)) for a in range(1, n + 1)
            ),
        )

    # composed map A_ell -> operators ----------------------------------------
    def traceless(self, u: Sequence) -> Matrix:
        if len(u) != self.n:
            raise ValueError("Cartan vector has wrong length")
        if sum(_q(c) for c in u) != 0:
            raise ValueError("Cartan vector must be traceless")
        return {(i + 1, i + 1): _q(c) for i, c in enumerate(u) if _q(c)}

    def aell_x(self, u: Sequence) -> DiffOp:
        return self.K(self.traceless(u))

    def aell_y(self, u: Sequence) -> DiffOp:
        return self.Q(self.traceless(u))

    def aell_t(self, i: int, j: int, sign: int = 1) -> DiffOp:
        """(lam/2)(E_ij E_ji + E_ji E_ij) + Z_n/(2n^2) + 2(beta-lam/2)((E_ii+E_jj)/n - 2D/n^2).

        ``sign=-1`` returns the negated image (see the module notes in the
        README for why both are exposed).
        """
        if i == j:
            raise ValueError("t_ij needs i != j")
        n = self.n
        lam, beta = self.lam, self.beta
        c = 2 * (beta - lam / 2)

        def build():
            op = lin(
                [
                    (lam / 2, anticomm(self.E(i, j), self.E(j, i))),
                    (mpq(1, 2 * n * n), self.Zn()),
                    (c / n, self.E(i, i)),
                    (c / n, self.E(j, j)),
                    (-2 * c / (n * n), self.euler()),
                ]
            )
            return op if sign == 1 else -op

        return self._memo(("aell_t", i, j, sign), build)

    # current modes ------------------------------------------------------------
    def current_mode(self, word, degree: int, kind: str = "u") -> DiffOp:
        """Operator for X (x) u^d (kind 'u') or X (x) v^d (kind 'v').

        ``word`` is either a matrix (allowed for degree <= 1) or a nested
        bracket ``(Y, W)`` of matrices with X = [Y, W]; then
        X u^d = [Y u, W u^{d-1}].
        """
        if kind not in ("u", "v"):
            raise ValueError("kind must be 'u' or 'v'")
        gen = self.Q if kind == "u" else self.K
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        if isinstance(word, dict) or _is_unit(word):
            X = _as_matrix(word)
            if degree == 0:
                return self.gln(X)
            if degree == 1:
                return gen(X)
            raise ValueError("degree >= 2 needs a bracket word")
        left, right = word
        if degree == 0:
            return Commutator(self.current_mode(left, 0, kind), self.current_mode(right, 0, kind))
        return Commutator(
            self.current_mode(left, 1, kind), self.current_mode(right, degree - 1, kind)
        )


    # u-direction modes --------------------------------------------------------
    def root_u_mode(self, i: int, j: int, p: int) -> DiffOp:
        """E_ij (x) u^p realized as ad(Q((E_ii - E_jj)/2))^p (E_ij)."""
        _root_only(i, j)
        if p < 0:
            raise ValueError("mode degree must be nonnegative")

        def build():
            if p == 0:
                return self.E(i, j)
            half = {(i, i): mpq(1, 2), (j, j): mpq(-1, 2)}
            return Commutator(self.Q(half), self.root_u_mode(i, j, p - 1))

        return self._memo(("umode", i, j, p), build)

    def cartan_u_mode(self, h: Sequence, p: int) -> DiffOp:
        """h (x) u^p for a traceless diagonal h, via [E_ij u, E_ji u^{p-1}] on coroots."""
        H = self.traceless(h)
        if p == 0:
            return self.gln(H)
        if p == 1:
            return self.Q(H)
        coeffs = _coroot_coefficients([H.get((e, e), 0) for e in range(1, self.n + 1)])
        return lin(
            (c, Commutator(self.root_u_mode(a, a + 1, 1), self.root_u_mode(a + 1, a, p - 1)))
            for a, c in enumerate(coeffs, start=1)
            if c
        )

    def omega(self, p: int, q: int) -> DiffOp:
        """Omega_{p,q} = sum_roots (X_a u^p)(X_-a u^q) + sum_i (h_i u^p)(h^i u^q)."""

        def build():
            n = self.n
            parts = []
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i != j:
                        parts.append(
                            (1, Compose([self.root_u_mode(i, j, p), self.root_u_mode(j, i, q)]))
                        )
            # dual bases of the sl_n Cartan: h_a = E_aa - E_{a+1,a+1}, Gram inverse
            # (G^{-1})_{ab} = min(a, b) - ab/n.
            for a in range(1, n):
                for b in range(1, n):
                    c = mpq(min(a, b)) - mpq(a * b, n)
                    parts.append(
                        (
                            c,
                            Compose(
                                [
                                    self.cartan_u_mode(_coroot(n, a), p),
                                    self.cartan_u_mode(_coroot(n, b), q),
                                ]
                            ),
                        )
                    )
            return lin(parts)

        return self._memo(("omega", p, q), build)

    def kappa(self, i: int, j: int) -> DiffOp:
        """Truncated Casimir E_ij E_ji + E_ji E_ij."""
        return anticomm(self.E(i, j), self.E(j, i))

    def lemma_qv_sides(self, h: Sequence, order: int = 1) -> tuple[DiffOp, DiffOp]:
        """Both sides of the ad(Q)^{2n+1} kappa identity, with 2n + 1 = 2 * order + 1."""
        H = self.traceless(h)
        hv = [H.get((e, e), 0) for e in range(1, self.n + 1)]
        m = 2 * order + 1
        lhs_parts = []
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                w = _q(hv[i - 1]) - _q(hv[j - 1])
                if not w:
                    continue
                op = self.kappa(i, j)
                half = self.Q({(i, i): mpq(1, 2), (j, j): mpq(-1, 2)})
                for _ in range(m):
                    op = Commutator(half, op)
                lhs_parts.append((w, op))
        from math import comb

        qh = self.Q(H)
        rhs = lin(
            ((-1) ** p * comb(2 * order, p), Commutator(qh, self.omega(p, 2 * order - p)))
            for p in range(2 * order + 1)
        )
        return lin(lhs_parts), rhs

    # sl2 probe ----------------------------------------------------------------
    def tilde_E(self, h: Sequence) -> DiffOp:
        """E~(h) = ([h v, h u^3] - (lam/4) sum_{p+q=2} sum_a a(h)^2 S(X_a u^p, X_-a u^q))/(h,h)."""
        H = self.traceless(h)
        hv = [_q(H.get((e, e), 0)) for e in range(1, self.n + 1)]
        norm = sum(c * c for c in hv)
        if not norm:
            raise ValueError("h must be nonzero")
        parts = [(1, Commutator(self.K(H), self.cartan_u_mode(hv, 3)))]
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                w = hv[i - 1] - hv[j - 1]
                if i == j or not w:
                    continue
                for p in range(3):
                    parts.append(
                        (
                            -self.lam / 4 * w * w,
                            anticomm(self.root_u_mode(i, j, p), self.root_u_mode(j, i, 2 - p)),
                        )
                    )
        return lin(parts) * (1 / norm)

    def corollary_sides(self, h: Sequence, hprime: Sequence) -> tuple[DiffOp, DiffOp]:
        """[h' v, h u^3] against (lam/4) sum_{p+q=2} sum_a a(h) a(h') S(X_a u^p, X_-a u^q)."""
        H, Hp = self.traceless(h), self.traceless(hprime)
        hv = [_q(H.get((e, e), 0)) for e in range(1, self.n + 1)]
        hp = [_q(Hp.get((e, e), 0)) for e in range(1, self.n + 1)]
        lhs = Commutator(self.K(Hp), self.cartan_u_mode(hv, 3))
        parts = []
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                w = (hv[i - 1] - hv[j - 1]) * (hp[i - 1] - hp[j - 1])
                if i == j or not w:
                    continue
                for p in range(3):
                    parts.append(
                        (
                            self.lam / 4 * w,
                            anticomm(self.root_u_mode(i, j, p), self.root_u_mode(j, i, 2 - p)),
                        )
                    )
        return lhs, lin(parts)

    # main relation --------------------------------------------------------------
    def main_relation_sides(self, a: int, b: int, c: int, d: int) -> tuple[DiffOp, DiffOp]:
        """[K(E_ab), Q(E_cd)] against its rewritten right-hand side."""
        if a == b or c == d or (a, b) == (d, c):
            raise ValueError("main relation needs a != b, c != d and (a, b) != (d, c)")
        n, lam, beta, E = self.n, self.lam, self.beta, self.E
        parts = []
        br = bracket_matrix(({(a, b): 1}, {(c, d): 1}))
        if br:
            parts.append((1, self.P(br)))
        if b == c:
            parts.extend((lam / 2, Compose([E(a, j), E(j, d)])) for j in range(1, n + 1))
        if a == d:
            parts.extend((lam / 2, Compose([E(c, i), E(i, b)])) for i in range(1, n + 1))
        parts.append((-lam, Compose([E(a, d), E(c, b)])))
        co = beta - lam / 2 - lam * n / 4
        if b == c:
            parts.append((co, E(a, d)))
        if a == d:
            parts.append((co, E(c, b)))
        return Commutator(self.ddca_K(a, b), self.ddca_Q(c, d)), lin(parts)

    def main_relation_correction(self, a: int, b: int, c: int, d: int) -> DiffOp:
        """(1/2) sum_r (delta_bc E_ad^{(r)} + delta_ad E_cb^{(r)})(D_r - 1).

        Adding this to the rewritten right-hand side makes the relation exact
        on every state, weight-filtered or not.
        """
        parts = []
        for r in range(1, self.k + 1):
            shifted = self.row_degree(r) - IDENTITY
            if b == c:
                parts.append((mpq(1, 2), Compose([self.gln_local({(a, d): 1}, r), shifted])))
            if a == d:
                parts.append((mpq(1, 2), Compose([self.gln_local({(c, b): 1}, r), shifted])))
        return lin(parts)

    def admissible_quadruples(self) -> list[tuple[int, int, int, int]]:
        rng = range(1, self.n + 1)
        return [
            (a, b, c, d)
            for a, b, c, d in itertools.product(rng, repeat=4)
            if a != b and c != d and (a, b) != (d, c)
        ]

    # duality helpers ----------------------------------------------------------
    def abelian_coefficient(self, i: int, j: int) -> DiffOp:
        """(E_ii + E_jj)/n - 1/n^2."""
        n = self.n
        return lin(
            [
                (mpq(1, n), self.E(i, i)),
                (mpq(1, n), self.E(j, j)),
                (mpq(-1, n * n), IDENTITY),
            ]
        )

    def degree_corrected_abelian_coefficient(self, i: int, j: int) -> DiffOp:
        """(E_ii + E_jj)/n + (sum_a D_a^2 - 2 D)/n^2, D_a the row degrees, D = sum_a D_a."""
        n = self.n
        parts = [(mpq(1, n), self.E(i, i)), (mpq(1, n), self.E(j, j))]
        for a in range(1, self.k + 1):
            parts.append((mpq(1, n * n), Compose([self.row_degree(a), self.row_degree(a)])))
        parts.append((mpq(-2, n * n), self.euler()))
        return lin(parts)


def _coroot(n: int, a: int) -> list[int]:
    v = [0] * n
    v[a - 1], v[a] = 1, -1
    return v


def _coroot_coefficients(h: Sequence) -> list[mpq]:
    """c_a with h = sum_a c_a (e_a - e_{a+1}) for traceless h (partial sums)."""
    out, acc = [], mpq(0)
    for x in h[:-1]:
        acc += _q(x)
        out.append(acc)
    return out


def _is_unit(word) -> bool:
    return isinstance(word, tuple) and len(word) == 2 and all(isinstance(x, int) for x in word)


def _as_matrix(X) -> Matrix:
    if isinstance(X, dict):
        return {key: _q(c) for key, c in X.items() if _q(c)}
    if _is_unit(X):
        return {X: mpq(1)}
    raise TypeError(f"cannot interpret {X!r} as a gl_n matrix")


def _mkey(X: Matrix) -> tuple:
    return tuple(sorted(X.items()))


def _root_only(i: int, j: int) -> None:
    if i == j:
        raise ValueError(
            "diagonal generators are not primitive; assemble Cartan values by "
            "commutators, e.g. Model.K_cartan / Model.Q_cartan"
        )


def bracket_matrix(word) -> Matrix:
    """Evaluate a bracket word of matrix units to a gl_n matrix."""
    if isinstance(word, dict) or _is_unit(word):
        return _as_matrix(word)
    left, right = (bracket_matrix(w) for w in word)
    out: dict = {}
    for (i, j), c1 in left.items():
        for (p, q), c2 in right.items():
            if j == p:
                out[(i, q)] = out.get((i, q), 0) + c1 * c2
            if q == i:
                out[(p, j)] = out.get((p, j), 0) - c1 * c2
    return {key: c for key, c in out.items() if c}


# ---------------------------------------------------------------------------
# test families and identity checks


def weight_ok(mono: Sequence[int], k: int, n: int, mode: str) -> bool:
    if mode == "none":
        return True
    if mode == "slk_zero":
        degs = {sum(mono[a * n : (a + 1) * n]) for a in range(k)}
    elif mode == "sln_zero":
        degs = {sum(mono[a * n + i] for a in range(k)) for i in range(n)}
    else:
        raise ValueError(f"unknown weight mode {mode!r}")
    return len(degs) <= 1


def _monomials(nvars: int, max_deg: int) -> Iterator[tuple]:
    for d in range(max_deg + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            yield tuple(e)


def state_family(
    k: int,
    n: int,
    degree_bound: int = 3,
    weight: str = "none",
    x_degree: int = 2,
    inverse_factor: bool = True,
    exact_degree: int | None = None,
) -> list[PolyState]:
    """Monomial states: m-degree <= bound x x-degree <= x_degree x at most one 1/(x_a - x_b)."""
    if weight not in WEIGHT_MODES:
        raise ValueError(f"unknown weight mode {weight!r}")
    npairs = k * (k - 1) // 2
    dens = [(0,) * npairs]
    if inverse_factor:
        for p in range(npairs):
            d = [0] * npairs
            d[p] = 1
            dens.append(tuple(d))
    xs = list(_monomials(k, x_degree))
    out = []
    for mono in _monomials(k * n, degree_bound):
        if exact_degree is not None and sum(mono) != exact_degree:
            continue
        if not weight_ok(mono, k, n, weight):
            continue
        for den in dens:
            for xe in xs:
                out.append(PolyState(k, n, {(mono, den, xe): mpq(1)}))
    return out


@dataclass
class IdentityReport:
    name: str
    passed: bool
    states: int
    skipped: int = 0
    counterexample: str | None = None
    residual: str | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "states": self.states,
            "skipped": self.skipped,
            "counterexample": self.counterexample,
            "residual": self.residual,
            "notes": list(self.notes),
        }


def check_identity(
    lhs: DiffOp,
    rhs: DiffOp,
    k: int,
    n: int,
    degree_bound: int = 3,
    weight: str = "none",
    *,
    name: str = "identity",
    states: Sequence[PolyState] | None = None,
    x_degree: int = 2,
    inverse_factor: bool = True,
) -> IdentityReport:
    """Apply ``lhs - rhs`` to every test state; report the first nonzero residual."""
    family = (
        list(states)
        if states is not None
        else state_family(k, n, degree_bound, weight, x_degree, inverse_factor)
    )
    diff = lhs - rhs
    for v in family:
        r = diff.apply(v)
        if not r.is_zero():
            return IdentityReport(
                name, False, len(family), 0, v.to_text(), r.to_text()
            )
    return IdentityReport(name, True, len(family))


def binomial_identity_holds(nmax: int = 12) -> bool:
    """sum_{m=0}^{n} C(m, j) C(n-m, k-j) == C(n+1, k+1) for 0 <= j <= k <= n <= nmax."""
    from math import comb

    for nn in range(nmax + 1):
        for kk in range(nn + 1):
            for j in range(kk + 1):
                lhs = sum(comb(m, j) * comb(nn - m, kk - j) for m in range(nn + 1))
                if lhs != comb(nn + 1, kk + 1):
                    return False
    return True


def sl2_probe(
    h: Sequence,
    hprime: Sequence,
    *,
    n: int = 4,
    k: int = 2,
    tilde_c=None,
    degree_bound: int = 2,
    weight: str = "none",
    x_degree: int = 1,
) -> dict:
    """Exploratory residuals around the sl2-triple; nothing is asserted.

    Reports E~(alpha_1^v) - E~(alpha_2^v), [E~(h), K(h')] - C Q(h') with
    C = (lam^2/4) C~, and the corollary residual, each on a small family.
    """
    from .constants import tilde_c_bracket
    from .rootsys import build_root_system

    M = Model(k, n)
    if tilde_c is None:
        tilde_c = tilde_c_bracket(build_root_system("A", n - 1))
    C = M.lam * M.lam / 4 * _q(Fraction(tilde_c))
    fam = state_family(k, n, degree_bound, weight, x_degree)
    Hp = M.traceless(hprime)
    checks = [
        check_identity(
            M.tilde_E(_coroot(n, 1)), M.tilde_E(_coroot(n, 2)), k, n,
            name="E_tilde_independent_of_h", states=fam,
        ),
        check_identity(
            Commutator(M.tilde_E(h), M.K(Hp)), M.Q(Hp) * C, k, n,
            name="E_tilde_K_bracket", states=fam,
        ),
        check_identity(*M.corollary_sides(h, hprime), k, n, name="corollary", states=fam),
    ]
    return {
        "k": k,
        "n": n,
        "C": str(C),
        "states": len(fam),
        "weight": weight,
        "status": "probe",
        "checks": [c.to_dict() for c in checks],
    }


# ---------------------------------------------------------------------------
# suites


def check_many(
    name: str,
    pairs: Iterable[tuple[str, DiffOp, DiffOp]],
    states: Sequence[PolyState],
    k: int,
    n: int,
) -> IdentityReport:
    """One report for a family of identities; notes list every failing label."""
    failed, first = [], None
    count = 0
    for label, lhs, rhs in pairs:
        count += 1
        rep = check_identity(lhs, rhs, k, n, name=label, states=states)
        if not rep.passed:
            failed.append(label)
            if first is None:
                first = rep
    notes = [f"instances={count}", f"failed_instances={len(failed)}"]
    notes += [f"failed: {lab}" for lab in failed[:10]]
    if first is None:
        return IdentityReport(name, True, len(states), notes=notes)
    return IdentityReport(
        name,
        False,
        len(states),
        counterexample=f"{first.name}: {first.counterexample}",
        residual=first.residual,
        notes=notes,
    )


def _filtered(reports: list, weight: str) -> list:
    for r in reports:
        r.notes.insert(0, f"weight={weight}")
    return reports


def suite_dualpair(k: int, n: int, degree: int = 4) -> list[IdentityReport]:
    """The three dual-pair identities on m-monomials of degree <= ``degree``."""
    M = Model(k, n)
    fam = state_family(k, n, degree, "none", x_degree=0, inverse_factor=False)
    rows, cols = range(1, k + 1), range(1, n + 1)
    one = [
        (f"({a},{i})", M.glk_gen(a, a, i), M.gln_gen(i, i, a)) for a in rows for i in cols
    ]
    two = [
        (
            f"({a},{b},{i},{j})",
            Compose([M.glk_gen(a, b, i), M.glk_gen(b, a, j)]),
            Compose([M.gln_gen(i, j, a), M.gln_gen(j, i, b)]),
        )
        for a in rows for b in rows for i in cols for j in cols
        if a != b and i != j
    ]
    three = [
        (
            f"({a},{b},{i})",
            Compose([M.glk_gen(a, b, i), M.glk_gen(b, a, i)]),
            Compose([M.gln_gen(i, i, a), M.gln_gen(i, i, b)]) + M.gln_gen(i, i, a),
        )
        for a in rows for b in rows for i in cols
        if a != b
    ]
    return _filtered(
        [
            check_many("dualpair_1", one, fam, k, n),
            check_many("dualpair_2", two, fam, k, n),
            check_many("dualpair_3", three, fam, k, n),
        ],
        "none",
    )


def suite_xyt(k: int, n: int, degree: int = 3) -> list[IdentityReport]:
    """Images of the Hecke generators.

    [x_i, y_j] = t_ij holds in B_n and is checked unfiltered.  The other four
    vanish only in the quotient by B_n h^diag, so they run on the filters the
    module documents: slk_zero for [x_i,y_i] + sum t_ij and the two sums,
    sln_zero for [y_a, y_b].
    """
    M = Model(k, n)
    cols = range(1, n + 1)
    fams = {w: state_family(k, n, degree, w) for w in ("none", "slk_zero", "sln_zero")}
    xy = [
        (f"({i},{j})", Commutator(M.cee_x(i), M.cee_y(j)), M.cee_t(i, j))
        for i in cols for j in cols if i != j
    ]
    xy_ii = [
        (
            f"({i})",
            lin([(1, Commutator(M.cee_x(i), M.cee_y(i)))]
                + [(1, M.cee_t(i, j)) for j in cols if j != i]),
            ZERO,
        )
        for i in cols
    ]
    yy = [
        (f"({a},{b})", Commutator(M.cee_y(a), M.cee_y(b)), ZERO)
        for a in cols for b in cols if a < b
    ]
    sumx = [("sum", lin((1, M.cee_x(i)) for i in cols), ZERO)]
    sumy = [("sum", lin((1, M.cee_y(i)) for i in cols), ZERO)]
    out = []
    for name, pairs, w in (
        ("x_i_y_j_equals_t_ij", xy, "none"),
        ("x_i_y_i_plus_sum_t", xy_ii, "slk_zero"),
        ("y_a_y_b", yy, "sln_zero"),
        ("sum_x", sumx, "slk_zero"),
        ("sum_y", sumy, "slk_zero"),
    ):
        out += _filtered([check_many(name, pairs, fams[w], k, n)], w)
    return out


def suite_main_relation(
    k: int, n: int, degree: int = 3, *, corrected: bool = False, weight: str = "none"
) -> list[IdentityReport]:
    """[K(E_ab), Q(E_cd)] against its right-hand side for all admissible (a,b,c,d)."""
    M = Model(k, n)
    fam = state_family(k, n, degree, weight)

    def pairs():
        for q in M.admissible_quadruples():
            lhs, rhs = M.main_relation_sides(*q)
            if corrected:
                rhs = rhs + M.main_relation_correction(*q)
            yield str(q).replace(" ", ""), lhs, rhs

    name = "main_relation_corrected" if corrected else "main_relation"
    return _filtered([check_many(name, pairs(), fam, k, n)], weight)


def suite_zn(k: int, n: int, degree: int = 3) -> list[IdentityReport]:
    """Z_n centrality, and Z_n against 2(n+1) times the m-degree Euler operator."""
    M = Model(k, n)
    fam = state_family(k, n, degree, "none")
    Zn = M.Zn()
    central = [
        (label, Commutator(Zn, op), ZERO)
        for label, op in (("K(E_12)", M.ddca_K(1, 2)), ("Q(E_12)", M.ddca_Q(1, 2)), ("E_13", M.E(1, 3)))
    ]
    euler = [("Z_n", Zn, M.euler() * (2 * (n + 1)))]
    return _filtered(
        [
            check_many("Zn_central", central, fam, k, n),
            check_many("Zn_equals_2(n+1)_euler", euler, fam, k, n),
        ],
        "none",
    )


def lemma_qv_vectors(n: int) -> list[tuple]:
    return [
        tuple([1, -1] + [0] * (n - 2)),
        tuple([n - 1] + [-1] * (n - 1)),
    ]


def suite_lemma_qv(
    k: int, n: int, degree: int = 3, *, weight: str = "none"
) -> list[IdentityReport]:
    """The ad(Q)^3 kappa identity for two Cartan vectors, plus the binomial identity."""
    M = Model(k, n)
    fam = state_family(k, n, degree, weight)
    pairs = ((str(list(h)), *M.lemma_qv_sides(h, 1)) for h in lemma_qv_vectors(n))
    reports = _filtered([check_many("lemma_Q_v_order_3", pairs, fam, k, n)], weight)
    ok = binomial_identity_holds(12)
    reports.append(IdentityReport("binomial_identity_n_le_12", ok, 0, notes=["exact integers"]))
    return reports


def _eps_diff(n: int, i: int, j: int) -> list[int]:
    u = [0] * n
    u[i - 1] += 1
    u[j - 1] -= 1
    return u


def suite_aell(
    k: int, n: int, degree: int = 3, *, weight: str = "sln_zero", sign: int = 1
) -> list[IdentityReport]:
    """Relations (1)-(4) of the elliptic algebra under the composed map."""
    M = Model(k, n)
    fam = state_family(k, n, degree, weight)
    rng = range(1, n + 1)
    basis = [_eps_diff(n, i, i + 1) for i in range(1, n)]

    def t(i, j):
        return M.aell_t(min(i, j), max(i, j), sign)

    rel1 = [
        (f"[t_{a}{b}, t_{i}{j}+t_{j}{l}+t_{i}{l}]", Commutator(t(a, b), t(i, j) + t(j, l) + t(i, l)), ZERO)
        for i, j, l in itertools.combinations(rng, 3)
        for a, b in ((i, j), (j, l), (i, l))
    ] + [
        (f"[t_{i}{j}, t_{a}{b}]", Commutator(t(i, j), t(a, b)), ZERO)
        for i, j in itertools.combinations(rng, 2)
        for a, b in itertools.combinations(rng, 2)
        if not {i, j} & {a, b} and (i, j) < (a, b)
    ]
    rel2 = [
        (f"[x({u}),x({v})]", Commutator(M.aell_x(u), M.aell_x(v)), ZERO)
        for u, v in itertools.combinations(basis, 2)
    ] + [
        (f"[y({u}),y({v})]", Commutator(M.aell_y(u), M.aell_y(v)), ZERO)
        for u, v in itertools.combinations(basis, 2)
    ]

    def rel3_rhs(u, v):
        return lin(
            ((u[i - 1] - u[j - 1]) * (v[i - 1] - v[j - 1]), t(i, j))
            for i, j in itertools.combinations(rng, 2)
            if (u[i - 1] - u[j - 1]) * (v[i - 1] - v[j - 1])
        )

    rel3 = [
        (f"[y({u}),x({v})]", Commutator(M.aell_y(u), M.aell_x(v)), rel3_rhs(u, v))
        for u in basis for v in basis
    ]
    rel4 = []
    for i, j in itertools.combinations(rng, 2):
        rest = [e for e in rng if e not in (i, j)]
        orth = [_eps_diff(n, a, b) for a, b in itertools.combinations(rest, 2)]
        if len(rest) >= 1:
            u = [0] * n
            u[i - 1] = u[j - 1] = len(rest)
            for e in rest:
                u[e - 1] = -2
            orth.append(u)
        for u in orth:
            rel4.append((f"[t_{i}{j},x({u})]", Commutator(t(i, j), M.aell_x(u)), ZERO))
            rel4.append((f"[t_{i}{j},y({u})]", Commutator(t(i, j), M.aell_y(u)), ZERO))
    reports = [
        check_many("aell_relation_1", rel1, fam, k, n),
        check_many("aell_relation_2", rel2, fam, k, n),
        check_many("aell_relation_3", rel3, fam, k, n),
        check_many("aell_relation_4", rel4, fam, k, n),
    ]
    for r in reports:
        r.notes.insert(0, f"t_sign={sign}")
    return _filtered(reports, weight)


SUITES: dict[str, Callable[..., list[IdentityReport]]] = {
    "main-relation": suite_main_relation,
    "prop41": suite_xyt,
    "dualpair": suite_dualpair,
    "zn": suite_zn,
    "lemmaQv": suite_lemma_qv,
    "aell": suite_aell,
}


def run_suite(name: str, k: int, n: int, degree: int | None = None, **kw) -> list[IdentityReport]:
    """Run a named suite; ``degree`` defaults to 4 for dualpair and 3 otherwise."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if degree is None:
        degree = 4 if name == "dualpair" else 3
    return SUITES[name](k, n, degree, **kw)
