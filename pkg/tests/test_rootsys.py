"""Root system enumeration, reflections and root strings."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ecl.rootsys import (
    RootSystemError,
    build_root_system,
    classify_sum_pairs,
    dual_coxeter,
    reflection,
    root_string,
    sum_pairs,
)

TYPES = [
    ("A", 1, 2, 2), ("A", 3, 12, 4), ("A", 6, 42, 7),
    ("B", 2, 8, 3), ("B", 3, 18, 5), ("B", 4, 32, 7),
    ("C", 3, 18, 4), ("C", 4, 32, 5),
    ("D", 4, 24, 6), ("D", 5, 40, 8),
    ("E", 6, 72, 12), ("E", 7, 126, 18), ("E", 8, 240, 30),
    ("F", 4, 48, 9), ("G", 2, 12, 4),
]


@pytest.mark.parametrize("label,rank,count,hv", TYPES)
def test_counts_and_dual_coxeter(label, rank, count, hv):
    rs = build_root_system(label, rank)
    assert len(rs.roots) == count
    assert len(rs.positive_roots) * 2 == count
    assert dual_coxeter(rs) == hv


@pytest.mark.parametrize("name", ["E6", "F4", "G2"])
def test_fused_names(name):
    assert build_root_system(name).name == name


@pytest.mark.parametrize("label,rank", [("A", 0), ("B", 1), ("C", 1), ("D", 2), ("E", 5), ("F", 3), ("X", 2)])
def test_unsupported(label, rank):
    with pytest.raises(RootSystemError):
        build_root_system(label, rank)


@pytest.mark.parametrize("label,rank", [("B", 3), ("C", 3), ("F", 4), ("G", 2)])
def test_long_roots_have_length_two(label, rank):
    rs = build_root_system(label, rank)
    lengths = {rs.norm2(a) for a in rs.roots}
    assert max(lengths) == 2
    assert len(lengths) == 2
    short = Fraction(2, 3) if label == "G" else Fraction(1)
    assert min(lengths) == short


@pytest.mark.parametrize("label,rank", [("A", 3), ("B", 3), ("C", 3), ("G", 2), ("F", 4)])
def test_closed_under_reflections(label, rank):
    rs = build_root_system(label, rank)
    for a in rs.positive_roots:
        for b in rs.roots:
            assert rs.is_root(reflection(rs, a, b))


def test_pairings_are_integers():
    rs = build_root_system("G", 2)
    for a in rs.roots:
        for b in rs.roots:
            assert rs.pairing(b, a).denominator == 1


@st.composite
def system_and_pair(draw):
    label, rank = draw(st.sampled_from([("A", 3), ("B", 3), ("C", 4), ("D", 4), ("G", 2), ("F", 4)]))
    rs = build_root_system(label, rank)
    a = draw(st.sampled_from(rs.roots))
    b = draw(st.sampled_from(rs.roots))
    return rs, a, b


@settings(max_examples=150, deadline=None)
@given(system_and_pair())
def test_root_string_matches_pairing(data):
    rs, a, b = data
    if b == a or b == tuple(-x for x in a):
        with pytest.raises(RootSystemError):
            root_string(rs, a, b)
        return
    r, q = root_string(rs, a, b)
    assert r - q == rs.pairing(b, a)
    assert r + q <= 3


@settings(max_examples=100, deadline=None)
@given(system_and_pair())
def test_reflection_is_an_involution(data):
    rs, a, b = data
    assert reflection(rs, a, reflection(rs, a, b)) == tuple(b)
    assert rs.norm2(reflection(rs, a, b)) == rs.norm2(b)


def test_sum_pair_classes_b3():
    rs = build_root_system("B", 3)
    counts = classify_sum_pairs(rs)
    assert sum(counts.values()) == len(sum_pairs(rs))
    one, two = Fraction(1), Fraction(2)
    # short+short: 6 shorts times 4 partners; long+long: the D3 = A3 count 12 * 4
    assert counts == {(one, one, two): 24, (one, two, one): 24, (two, one, one): 24, (two, two, two): 48}
