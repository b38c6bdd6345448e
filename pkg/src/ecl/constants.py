"""The structure constant C~ of the sl2-triple, computed three ways.

* ``tilde_c_general``: closed sum over ordered pairs with alpha + beta a root,
  weighted by (1 - (a,b)^2/((a,a)(b,b))) ((b,b)^2 + (a,a)^2) (a+b,a+b) and
  divided by 4 dim h (dim h - 1).
* ``tilde_c_classified``: the same sum regrouped by the length class of
  (alpha, beta, alpha + beta), with the per-class weights quoted per type.
* ``tilde_c_bracket``: the defining bracket sum, with the Killing pairing of
  [X_b, X_-a] and [X_-b, X_a] evaluated from Chevalley constants
  c^2 = q (r + 1) (a+b, a+b)/(b, b) read off actual root strings.

All three are exact rationals.  They agree on simply-laced types.  For B, C,
F4 and G2 they do not, see ``ConstantReport.agree``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .rootsys import (
    RootSystem,
    classify_sum_pairs,
    dual_coxeter,
    root_string,
    sum_pairs,
)

__all__ = [
    "ConstantError",
    "ConstantReport",
    "CLASS_WEIGHTS",
    "chevalley_c2",
    "tilde_c_general",
    "tilde_c_classified",
    "tilde_c_bracket",
    "constant_report",
]

F = Fraction


class ConstantError(ValueError):
    """Raised when a constant is undefined for the requested root system."""


_L, _S, _G = F(2), F(1), F(2, 3)

# Per-class weights keyed by (|a|^2, |b|^2, |a+b|^2).  Mixed long/short
# classes appear in both orders because the summand is symmetric in a, b.
CLASS_WEIGHTS: dict[str, dict[tuple[Fraction, Fraction, Fraction], Fraction]] = {
    "ADE": {(_L, _L, _L): F(12)},
    "B": {
        (_L, _L, _L): F(12),
        (_S, _S, _L): F(4),
        (_L, _S, _S): F(5, 2),
        (_S, _L, _S): F(5, 2),
    },
    "C": {
        (_L, _S, _S): F(5, 2),
        (_S, _L, _S): F(5, 2),
        (_S, _S, _S): F(3, 2),
        (_S, _S, _L): F(4),
    },
    "F": {
        (_L, _L, _L): F(12),
        (_L, _S, _S): F(5, 2),
        (_S, _L, _S): F(5, 2),
        (_S, _S, _S): F(3, 2),
        (_S, _S, _L): F(4),
    },
    "G": {
        (_L, _L, _L): F(12),
        (_L, _G, _G): F(5, 2),
        (_G, _L, _G): F(5, 2),
        (_G, _G, _L): F(32, 9),
        (_G, _G, _G): F(16, 9),
    },
}


def _denominator(rs: RootSystem) -> int:
    if rs.rank < 2:
        raise ConstantError(f"{rs.name}: C~ needs rank >= 2 (dim h - 1 vanishes)")
    return rs.rank * (rs.rank - 1)


def _pair_weight(rs: RootSystem, a, b, s) -> Fraction:
    aa, bb, ab = rs.norm2(a), rs.norm2(b), rs.inner(a, b)
    return (1 - ab * ab / (aa * bb)) * (aa * aa + bb * bb) * rs.norm2(s)


def tilde_c_general(rs: RootSystem) -> Fraction:
    """Closed pair-sum formula for C~."""
    d = _denominator(rs)
    total = sum((_pair_weight(rs, a, b, s) for a, b, s in sum_pairs(rs)), F(0))
    return total / (4 * d)


def class_weights_for(rs: RootSystem) -> dict:
    return CLASS_WEIGHTS["ADE" if rs.label in "ADE" else rs.label]


def tilde_c_classified(rs: RootSystem) -> Fraction:
    """C~ from class counts times the tabulated per-class weights."""
    d = _denominator(rs)
    weights = class_weights_for(rs)
    total = F(0)
    for key, count in classify_sum_pairs(rs).items():
        if key not in weights:
            raise ConstantError(f"{rs.name}: no tabulated weight for class {key}")
        total += weights[key] * count
    return total / (4 * d)


def chevalley_c2(rs: RootSystem, alpha, beta) -> Fraction:
    """Square of the Chevalley constant c_{alpha,beta} from the alpha-string through beta."""
    s = tuple(x + y for x, y in zip(alpha, beta))
    if not rs.is_root(s):
        return F(0)
    r, q = root_string(rs, alpha, beta)
    return F(q * (r + 1)) * rs.norm2(s) / rs.norm2(beta)


def tilde_c_bracket(rs: RootSystem) -> Fraction:
    """Defining bracket sum with Chevalley constants from root strings.

    With X_g = sqrt((g,g)/2) x_g and (x_g | x_-g) = 2/(g,g), a pair (a, b)
    with a + b a root contributes
    ((a,a)(b,b) - (a,b)^2) (a,a)(b,b)/4 * c_{ab}^2 * 2/(a+b,a+b).
    """
    d = _denominator(rs)
    total = F(0)
    for a, b, s in sum_pairs(rs):
        aa, bb, ab = rs.norm2(a), rs.norm2(b), rs.inner(a, b)
        total += (aa * bb - ab * ab) * aa * bb / 4 * chevalley_c2(rs, a, b) * 2 / rs.norm2(s)
    return total / d


@dataclass
class ConstantReport:
    label: str
    rank: int
    tildeC: Fraction
    C_over_lambda2: Fraction
    methods: dict[str, Fraction]
    pair_classification: dict
    dual_coxeter: Fraction
    notes: list[str] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return len(set(self.methods.values())) == 1

    def to_dict(self) -> dict:
        return {
            "type": self.label,
            "rank": self.rank,
            "tildeC": str(self.tildeC),
            "C_over_lambda2": str(self.C_over_lambda2),
            "methods": {k: str(v) for k, v in self.methods.items()},
            "methods_agree": self.agree,
            "dual_coxeter": str(self.dual_coxeter),
            "pair_classification": [
                {"lengths": [str(x) for x in key], "count": count}
                for key, count in self.pair_classification.items()
            ],
            "notes": list(self.notes),
        }


def constant_report(rs: RootSystem) -> ConstantReport:
    """All three evaluations.

    The headline value is the bracket evaluation, which is the one that
    matches a direct matrix computation in sp(2n).
    """
    methods = {
        "general_formula": tilde_c_general(rs),
        "classified_sum": tilde_c_classified(rs),
        "bracket_killing": tilde_c_bracket(rs),
    }
    notes = []
    if rs.name in ("B2", "G2"):
        notes.append(
            f"{rs.name}: the double current algebra is not defined in this type; "
            "the constant is reported for the root system only"
        )
    if not len(set(methods.values())) == 1:
        notes.append(
            "methods disagree: the closed pair formula and the class weights "
            "assume c^2 = q (a+b,a+b)/(b,b), which fails for mixed-length pairs"
        )
    tc = methods["bracket_killing"]
    return ConstantReport(
        label=rs.label,
        rank=rs.rank,
        tildeC=tc,
        C_over_lambda2=tc / 4,
        methods=methods,
        pair_classification=classify_sum_pairs(rs),
        dual_coxeter=dual_coxeter(rs),
        notes=notes,
    )
