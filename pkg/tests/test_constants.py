"""The sl2-triple constant C~.

The matrix oracles below build sp(2n) and so(2n+1) in their defining
representations and evaluate the defining bracket sum directly with floats,
independently of root strings.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from ecl.constants import (
    ConstantError,
    chevalley_c2,
    constant_report,
    tilde_c_bracket,
    tilde_c_classified,
    tilde_c_general,
)
from ecl.rootsys import build_root_system

F = Fraction

# frozen outputs of the three routes
FROZEN = {
    "B3": (F(33), F(33), F(36)),
    "B4": (F(57), F(57), F(60)),
    "C3": (F(12), F(12), F(15)),
    "C4": (F(15), F(15), F(18)),
    "D4": (F(48), F(48), F(48)),
    "D5": (F(72), F(72), F(72)),
    "E6": (F(144), F(144), F(144)),
    "F4": (F(81), F(81), F(90)),
    "G2": (F(206, 9), F(67, 2), F(80, 3)),
}


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_type_a_is_6n(n):
    rs = build_root_system("A", n - 1)
    for fn in (tilde_c_general, tilde_c_classified, tilde_c_bracket):
        assert fn(rs) == 6 * n


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen_values(name):
    rs = build_root_system(name[0], int(name[1:]))
    assert (tilde_c_general(rs), tilde_c_classified(rs), tilde_c_bracket(rs)) == FROZEN[name]


def test_report_headline_is_bracket():
    rep = constant_report(build_root_system("F", 4))
    assert rep.tildeC == 90
    assert rep.C_over_lambda2 == F(45, 2)
    assert not rep.agree
    assert rep.to_dict()["methods_agree"] is False
    assert constant_report(build_root_system("E", 6)).agree


def test_rank_one_is_undefined():
    with pytest.raises(ConstantError):
        tilde_c_general(build_root_system("A", 1))


def test_chevalley_c2_simply_laced_is_one():
    rs = build_root_system("D", 4)
    for a in rs.roots:
        for b in rs.roots:
            s = tuple(x + y for x, y in zip(a, b))
            assert chevalley_c2(rs, a, b) == (1 if rs.is_root(s) else 0)


@pytest.mark.parametrize("name", ["B3", "C3", "F4", "G2"])
def test_chevalley_c2_is_symmetric(name):
    # [x_a, x_b] = -[x_b, x_a], so c_ab^2 = c_ba^2
    rs = build_root_system(name[0], int(name[1:]))
    for a in rs.roots:
        for b in rs.roots:
            s = tuple(x + y for x, y in zip(a, b))
            if rs.is_root(s):
                assert chevalley_c2(rs, a, b) == chevalley_c2(rs, b, a)


# ---------------------------------------------------------------------------
# matrix oracles


def _unit(N, i, j):
    m = np.zeros((N, N))
    m[i, j] = 1
    return m


def _sp(n):
    N = 2 * n
    R = {}
    for i, j in itertools.permutations(range(n), 2):
        v = np.zeros(n)
        v[i], v[j] = 1, -1
        R[tuple(v)] = _unit(N, i, j) - _unit(N, n + j, n + i)
    for i, j in itertools.combinations(range(n), 2):
        v = np.zeros(n)
        v[i] = v[j] = 1
        R[tuple(v)] = _unit(N, i, n + j) + _unit(N, j, n + i)
        R[tuple(-v)] = R[tuple(v)].T.copy()
    for i in range(n):
        v = np.zeros(n)
        v[i] = 2
        R[tuple(v)], R[tuple(-v)] = _unit(N, i, n + i), _unit(N, n + i, i)
    # long roots 2 e_i have length 2 when (e_i, e_j) = delta_ij / 2; trace form is normalized
    return R, lambda a, b: float(np.dot(a, b)) / 2, 1.0


def _so_odd(n):
    N, z = 2 * n + 1, 2 * n
    R = {}
    for i, j in itertools.permutations(range(n), 2):
        v = np.zeros(n)
        v[i], v[j] = 1, -1
        R[tuple(v)] = _unit(N, i, j) - _unit(N, n + j, n + i)
    for i, j in itertools.combinations(range(n), 2):
        v = np.zeros(n)
        v[i] = v[j] = 1
        R[tuple(v)] = _unit(N, i, n + j) - _unit(N, j, n + i)
        R[tuple(-v)] = _unit(N, n + j, i) - _unit(N, n + i, j)
    for i in range(n):
        v = np.zeros(n)
        v[i] = 1
        R[tuple(v)] = _unit(N, i, z) - _unit(N, z, n + i)
        R[tuple(-v)] = _unit(N, z, i) - _unit(N, n + i, z)
    # normalized form is half the trace form, so brackets scale by 2
    return R, lambda a, b: float(np.dot(a, b)), 2.0


def _oracle(R, ip, scale):
    rank = len(next(iter(R)))
    total = 0.0
    for a in R:
        for b in R:
            A, B = np.array(a), np.array(b)
            ma, mb = tuple(-A), tuple(-B)
            xma = R[ma] / np.trace(R[a] @ R[ma])
            xmb = R[mb] / np.trace(R[b] @ R[mb])
            br = np.trace((R[b] @ xma - xma @ R[b]) @ (xmb @ R[a] - R[a] @ xmb))
            total += (ip(A, B) ** 2 - ip(A, A) * ip(B, B)) * br * scale
    return total / (rank * (rank - 1))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bracket_matches_sp_matrices(n):
    assert _oracle(*_sp(n)) == pytest.approx(float(tilde_c_bracket(build_root_system("C", n))), abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bracket_matches_so_odd_matrices(n):
    assert _oracle(*_so_odd(n)) == pytest.approx(float(tilde_c_bracket(build_root_system("B", n))), abs=1e-9)


def test_oracle_reproduces_type_a():
    n = 4
    N = n
    R = {}
    for i, j in itertools.permutations(range(n), 2):
        v = np.zeros(n)
        v[i], v[j] = 1, -1
        R[tuple(v)] = _unit(N, i, j)
    # the sum runs over sl_n of rank n - 1 although vectors live in C^n
    val = _oracle(R, lambda a, b: float(np.dot(a, b)), 1.0) * (n * (n - 1)) / ((n - 1) * (n - 2))
    assert val == pytest.approx(6 * n)
