"""Formal group laws of the deformation curve and its supersingular fiber.

The deformation curve is y^2 + 3*u1*x*y + (u1^3 - 1)*y = x^3 over W[[u1]];
its reduction mod (2, u1) is the supersingular curve y^2 + y = x^3 over F4.
The group law is expanded in the parameter z = -x/y by the chord construction,
which stays integral (no division by 2 or 3 anywhere):

    w(z) = z^3 + a1 z w + a3 w^2           (so w = -1/y as a series in z)
    lambda(z1, z2) = (w(z2) - w(z1)) / (z2 - z1)   (a polynomial identity)
    z3 = -z1 - z2 - (a1 lambda + a3 lambda^2)
    inv(z) = -z / (1 - a1 z - a3 w(z))
    F(z1, z2) = inv(z3)

A coefficient of F at total degree d has u1-degree at most d - 1, so the
whole table is exact whenever the u1-window satisfies M >= D.  That exactness
is what makes substituting u1 -> gamma_*(u1) into the table well-defined.

Stabilizer digits act on the fiber through the dictionary "T is x -> x^2,
Teichmuller units act linearly"; the sign convention T^2 = -2 is gated by the
supersingular identity [-2](x) = x^4, checked in mandatory tests.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import WindowOverflow
from .poly import PolyE, compose_1var, eval_2var, mono_index, monomials
from .series import USeries
from .witt import F4_MUL, teich_lift

# An XSeries is simply a one-variable PolyE over W[[u1]].
XSeries = PolyE


class Fgl2:
    """A commutative formal group law F(x, y) to total degree <= D."""

    __slots__ = ("poly", "a1", "a3", "_inv", "_du1")

    def __init__(self, poly: PolyE, a1: USeries, a3: USeries):
        self.poly = poly
        self.a1 = a1
        self.a3 = a3
        self._inv = None
        self._du1 = None

    @property
    def deg(self):
        return self.poly.deg

    @property
    def prec2(self):
        return self.poly.prec2

    @property
    def precU(self):
        return self.poly.precU

    def coeff(self, i: int, j: int) -> USeries:
        return self.poly.coeff((i, j))

    def add(self, g: PolyE, h: PolyE) -> PolyE:
        """Formal sum g +_F h of two parameter series."""
        return eval_2var(self.poly, g, h)

    def inverse_series(self) -> PolyE:
        """The series i(x) with F(x, i(x)) = 0, computed by blind iteration."""
        if self._inv is None:
            n, m, d = self.prec2, self.precU, self.deg
            x = PolyE.variable(0, 1, d, n, m)
            inv = -x
            for _ in range(d):
                r = self.add(x, inv)
                if r.is_zero():
                    break
                inv = inv - r
            self._inv = inv
        return self._inv

    def du1(self) -> PolyE:
        if self._du1 is None:
            self._du1 = self.poly.derivative_u1()
        return self._du1

    def to_json(self) -> dict:
        d = self.deg
        table = {}
        for i, j in monomials(2, d):
            c = self.coeff(i, j)
            if not c.is_zero():
                table[f"{i},{j}"] = c.to_json()
        return {"deg": d, "prec2": self.prec2, "precU": self.precU, "coeffs": table}


def weierstrass_fgl(a1: USeries, a3: USeries, deg: int) -> Fgl2:
    """Group law of y^2 + a1 x y + a3 y = x^3 in the parameter z = -x/y."""
    if deg < 2:
        raise WindowOverflow("need degree >= 2 for a group law")
    n = min(a1.prec2, a3.prec2)
    m = min(a1.precU, a3.precU)
    a1 = a1.reduce(n, m)
    a3 = a3.reduce(n, m)

    # w(z) = z^3 + a1 z w + a3 w^2, iterated to degree deg + 1.
    dw = deg + 1
    z = PolyE.variable(0, 1, dw, n, m)
    z3 = z.mul_monomial((2,))  # z^3 = z * z^2 shift
    w = z3
    for _ in range(dw):
        nxt = z3 + (z * w).series_mul(a1) + (w * w).series_mul(a3)
        if nxt == w:
            break
        w = nxt

    # lambda(z1, z2) = sum_d w_d * (z1^d - z2^d)/(z1 - z2); no products needed.
    t2 = len(monomials(2, dw))
    lam = np.zeros((t2, m, 2), dtype=np.int64)
    idx2 = mono_index(2, dw)
    for d in range(3, dw + 1):
        wd = w.coeffs[mono_index(1, dw)[(d,)]]
        if not wd.any():
            continue
        for i in range(d):
            lam[idx2[(i, d - 1 - i)]] += wd
    lam = PolyE(2, dw, n, lam)

    # z3 = -(a1 lambda + a3 lambda^2) - z1 - z2
    x1 = PolyE.variable(0, 2, dw, n, m)
    x2 = PolyE.variable(1, 2, dw, n, m)
    zsum = lam.series_mul(a1) + (lam * lam).series_mul(a3)
    third = -zsum - x1 - x2

    # inv(z) = -z * (1 - a1 z - a3 w)^(-1), inverted by Newton iteration.
    one1 = PolyE.const(USeries.one(n, m), 1, dw)
    den = one1 - z.series_mul(a1) - w.series_mul(a3)
    dinv = one1
    for _ in range(dw.bit_length() + 1):
        dinv = dinv * (one1 + one1 - den * dinv)
    invz = -(z * dinv)

    F = compose_1var(invz, third).reduce(precU=m)
    # restrict the window to the requested degree
    keep = [mono_index(2, dw)[mo] for mo in monomials(2, deg)]
    F = PolyE(2, deg, n, F.coeffs[keep], _canonical=True)

    fgl = Fgl2(F, a1, a3)
    _gate_axioms(fgl)
    return fgl


def _gate_axioms(fgl: Fgl2):
    """Cheap fail-fast checks: F(x, 0) = x and symmetry of the table."""
    idx = mono_index(2, fgl.deg)
    for i, j in monomials(2, fgl.deg):
        if j == 0:
            want = 1 if i == 1 else 0
            c = fgl.poly.coeffs[idx[(i, 0)]]
            ok = (c[0, 0] == want) and not c[1:].any() and c[0, 1] == 0
            if not ok:
                raise ArithmeticError("group law fails F(x, 0) = x")
        if not np.array_equal(fgl.poly.coeffs[idx[(i, j)]], fgl.poly.coeffs[idx[(j, i)]]):
            raise ArithmeticError("group law is not symmetric")


@lru_cache(maxsize=None)
def deformation_fgl(prec2: int, precU: int, deg: int) -> Fgl2:
    """The law of y^2 + 3 u1 x y + (u1^3 - 1) y = x^3 over W[[u1]]/(2^N, u1^M).

    Requires precU >= deg: a coefficient at formal degree d is a u1-polynomial
    of degree <= d - 1 (weights 1 and 3 for a1 and a3 against the matching
    degree growth), so the stored table is then exact and substitution of
    gamma_*(u1) into it is well-defined.
    """
    if precU < deg:
        raise WindowOverflow(f"u1-window {precU} too small for x-degree {deg}")
    a1 = USeries.from_witt([0, 3], prec2, precU)
    a3 = USeries.from_witt([-1, 0, 0, 1], prec2, precU)
    return weierstrass_fgl(a1, a3, deg)


@lru_cache(maxsize=None)
def special_fiber_fgl(deg: int) -> Fgl2:
    """The supersingular fiber y^2 + y = x^3 over F4 (the (1,1)-window law)."""
    a1 = USeries.zeros(1, 1)
    a3 = USeries.one(1, 1)
    return weierstrass_fgl(a1, a3, deg)


def n_series(F: Fgl2, n: int) -> PolyE:
    """The multiplication-by-n series [n](x); [m+1] = F([m], x), [-n] = [n] o inv."""
    d = F.deg
    x = PolyE.variable(0, 1, d, F.prec2, F.precU)
    if n == 0:
        return PolyE.zeros(1, d, F.prec2, F.precU)
    if n < 0:
        return compose_1var(n_series(F, -n), F.inverse_series())
    acc = x
    for _ in range(n - 1):
        acc = F.add(acc, x)
    return acc


def gamma_endo(digits, deg: int) -> PolyE:
    """Endomorphism of the special fiber attached to Teichmuller T-digits.

    digits[i] scales the i-fold Frobenius, so the result is the formal sum
    over i of digits[i] * x^(2^i); digits with 2^i beyond the degree window
    cannot contribute and are ignored.
    """
    F = special_fiber_fgl(deg)
    acc = PolyE.zeros(1, deg, 1, 1)
    for i, tag in enumerate(digits):
        p = 1 << i
        if p > deg:
            break
        if not tag:
            continue
        t = teich_lift(tag, 1)
        term = PolyE.zeros(1, deg, 1, 1).with_coeff(
            (p,), USeries.from_witt([t], 1, 1)
        )
        acc = F.add(acc, term) if not acc.is_zero() else term
    return acc


def formal_digit_extract(f: PolyE, F: Fgl2, r: int) -> tuple[list[USeries], PolyE]:
    """Greedy Teichmuller-style digits of f against F.

    g_0 = f; t_i is the x^(2^i) coefficient of g_i and
    g_(i+1) = g_i -_F t_i x^(2^i).  Returns ([t_0 .. t_(r-1)], remainder);
    the remainder is reported, not asserted zero.
    """
    if f.nvars != 1:
        raise ValueError("digit extraction expects a one-variable series")
    if f.coeffs[0].any():
        raise ValueError("series must vanish at 0")
    if (1 << (r - 1)) > F.deg:
        raise WindowOverflow(f"extracting t_{r-1} needs x-degree >= {1 << (r - 1)}")
    inv = F.inverse_series()
    g = f
    ts = []
    for i in range(r):
        p = 1 << i
        t = g.coeff((p,))
        ts.append(t)
        if not t.is_zero():
            mono = PolyE.zeros(1, F.deg, g.prec2, g.precU).with_coeff((p,), t)
            g = F.add(g, compose_1var(inv, mono))
    return ts, g


def f4_scale(poly: PolyE, tag: int) -> PolyE:
    """Scale an F4-level polynomial by the tag (used by fiber bookkeeping)."""
    return poly.scalar_mul(teich_lift(tag, poly.prec2))


def frobenius_twist_tags(tags: np.ndarray, power: int = 1) -> np.ndarray:
    """Apply the field Frobenius to an array of F4 tags."""
    out = np.array(tags)
    for _ in range(power % 2):
        out = np.where(out == 2, 3, np.where(out == 3, 2, out))
    return out


def f4_mul_tags(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    table = np.array(F4_MUL, dtype=np.uint8)
    return table[x, y]
