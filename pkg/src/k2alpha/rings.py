"""The 0-line invariant rings and their topological bases.

The maximal-finite-subgroup invariants in E_* form
W[[j]][c4, c6, Delta^{+-1}] / (c4^3 - c6^2 = 1728 Delta, c4^3 = Delta j)
with topological W-basis {c6^e c4^m Delta^n : e in {0,1}, m >= 0, n in Z};
the C6-invariants form W[[u1^3]][v1^2, v1 v2, v2^{+-2}] with basis
{(v1 v2)^e (v1^2)^a (v2^2)^b}.  In v-coordinates

    c4 = 9 (v1^4 + 8 v1 v2)
    c6 = 27 (v1^6 - 20 v1^3 v2 - 8 v2^2)
    Delta = 27 v2 (v1^3 - v2)^3
    j = c4^3 / Delta

(Delta's v2-exponent is forced by degree 24 and by the relation
c4^3 - c6^2 = 1728 Delta, which is checked exactly in tests.)

A C6-basis monomial (v1 v2)^e (v1^2)^a (v2^2)^b expands to the bare series
u1^(2a + e) in its degree, so membership in the C6-invariants of a fixed
degree is exactly a support condition on u1-orders, and expressing an element
in the basis is reading off coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NotInSpan
from .series import GradedElem, USeries, monomial_v
from .witt import WittElem

MODULAR_TAGS = ("c4", "c6", "delta", "delta_inv", "j")


@lru_cache(maxsize=None)
def modular(tag: str, prec2: int, precU: int) -> GradedElem:
    """The classical invariants c4, c6, Delta, Delta^-1, j as graded elements."""
    if tag == "c4":
        s = USeries.from_witt([0, 72, 0, 0, 9], prec2, precU)
        return GradedElem(s, 8)
    if tag == "c6":
        s = USeries.from_witt([-216, 0, 0, -540, 0, 0, 27], prec2, precU)
        return GradedElem(s, 12)
    if tag == "delta":
        base = USeries.from_witt([-1, 0, 0, 1], prec2, precU)  # u1^3 - 1
        return GradedElem((base**3) * 27, 24)
    if tag == "delta_inv":
        return modular("delta", prec2, precU).invert()
    if tag == "j":
        c4 = modular("c4", prec2, precU)
        return c4**3 * modular("delta_inv", prec2, precU)
    raise ValueError(f"unknown modular element {tag!r}")


# -- expressions over the two bases ------------------------------------------------


def _degree_g24(key) -> int:
    e, m, n = key
    return 12 * e + 8 * m + 24 * n


def _degree_c6(key) -> int:
    e, a, b = key
    return 8 * e + 4 * a + 12 * b


@dataclass
class G24Expr:
    """W-combination of c6^e c4^m Delta^n monomials in one even degree."""

    degree: int
    terms: dict = field(default_factory=dict)  # (e, m, n) -> WittElem

    def __post_init__(self):
        for key in self.terms:
            e, m, n = key
            if e not in (0, 1) or m < 0:
                raise ValueError(f"bad basis key {key}")
            if _degree_g24(key) != self.degree:
                raise ValueError(f"key {key} not of degree {self.degree}")

    def to_json(self) -> dict:
        return {
            "ring": "G24",
            "degree": self.degree,
            "terms": [
                {"key": list(k), "coeff": w.to_json()}
                for k, w in sorted(self.terms.items())
            ],
        }


@dataclass
class C6Expr:
    """W-combination of (v1 v2)^e (v1^2)^a (v2^2)^b monomials in one degree."""

    degree: int
    terms: dict = field(default_factory=dict)  # (e, a, b) -> WittElem

    def __post_init__(self):
        for key in self.terms:
            e, a, b = key
            if e not in (0, 1) or a < 0:
                raise ValueError(f"bad basis key {key}")
            if _degree_c6(key) != self.degree:
                raise ValueError(f"key {key} not of degree {self.degree}")

    def leading_order(self, key) -> int:
        e, a, _ = key
        return 2 * a + e

    def to_json(self) -> dict:
        return {
            "ring": "C6",
            "degree": self.degree,
            "terms": [
                {"key": list(k), "coeff": w.to_json()}
                for k, w in sorted(self.terms.items())
            ],
        }


def basis_in_degree(ring: str, t: int, window: int) -> list[tuple]:
    """Basis keys of degree t whose u1-leading order is < window, sorted by order.

    The enumeration is finite because the order grows linearly with the
    c4-power (resp. the v1^2-power), which grows as the Delta-power drops.
    """
    if t % 2:
        raise ValueError("E_* lives in even degrees")
    out = []
    if ring == "G24":
        for e in (0, 1):
            u = t - 12 * e
            if u % 8:
                continue
            q = u // 8
            m0 = q % 3
            m = m0
            while 6 * e + 4 * m < window:
                out.append(((e, m, (q - m) // 3), 6 * e + 4 * m))
                m += 3
    elif ring == "C6":
        for e in (0, 1):
            u = t - 8 * e
            if u % 4:
                continue
            q = u // 4
            a0 = q % 3
            a = a0
            while 2 * a + e < window:
                out.append(((e, a, (q - a) // 3), 2 * a + e))
                a += 3
    else:
        raise ValueError(f"unknown ring {ring!r}")
    out.sort(key=lambda p: p[1])
    return [k for k, _ in out]


@lru_cache(maxsize=None)
def _pow_cache(tag: str, n: int, prec2: int, precU: int) -> GradedElem:
    if n == 0:
        return GradedElem(USeries.one(prec2, precU), 0)
    base = modular(tag if n > 0 else "delta_inv", prec2, precU)
    if tag != "delta" and n < 0:
        raise ValueError("only Delta is invertible among the generators")
    return base ** abs(n)


def expand_g24(expr: G24Expr, prec2: int, precU: int) -> GradedElem:
    acc = GradedElem(USeries.zeros(prec2, precU), expr.degree)
    for (e, m, n), w in sorted(expr.terms.items()):
        mono = (
            _pow_cache("c6", e, prec2, precU)
            * _pow_cache("c4", m, prec2, precU)
            * _pow_cache("delta", n, prec2, precU)
        )
        acc = acc + mono * w
    return acc


def expand_c6(expr: C6Expr, prec2: int, precU: int) -> GradedElem:
    acc = GradedElem(USeries.zeros(prec2, precU), expr.degree)
    for (e, a, b), w in sorted(expr.terms.items()):
        mono = monomial_v(e + 2 * a, e + 2 * b, prec2, precU)
        acc = acc + mono * w
    return acc


def express_in_c6_basis(x: GradedElem) -> C6Expr:
    """Write x as a combination of C6-basis monomials, or raise NotInSpan.

    In a fixed degree the basis monomial with key (e, a, b) is the bare series
    u1^(2a + e), and 2a + e determines the key, so the expression is read off
    the u1-support; a nonzero coefficient at an order matching no key means x
    is not C6-invariant at precision.
    """
    keys = {}
    for key in basis_in_degree("C6", x.degree, x.precU):
        e, a, _ = key
        keys[2 * a + e] = key
    terms = {}
    for i in range(x.precU):
        w = x.series[i]
        if w.is_zero():
            continue
        key = keys.get(i)
        if key is None:
            raise NotInSpan(
                f"u1^{i} coefficient {w} matches no C6-basis key in degree {x.degree}"
            )
        terms[key] = w
    return C6Expr(x.degree, terms)


def expr_from_json(d: dict):
    cls = G24Expr if d["ring"] == "G24" else C6Expr
    return cls(
        d["degree"],
        {tuple(t["key"]): WittElem.from_json(t["coeff"]) for t in d["terms"]},
    )
