"""Truncated power series over W(F4) and the graded model of E_*.

E_* = W[[u1]][u^{+-1}] with u1 in degree 0 and u in degree -2.  A USeries is
an element of W[[u1]] known to u1-order < precU and 2-adic precision prec2;
a GradedElem is series(u1) * u^{-t/2} in even degree t.  The standard
generators are v1 = u1 * u^{-1} in E_2 and v2 = u^{-3} in E_6, so a monomial
v1^a v2^b is the series u1^a placed in degree 2a + 6b.

Coefficients live in a (M, 2) int64 array (a- and b-components, canonical mod
2^N).  Binary operations align operands to (min N, min M); the precision
ledger only ever decreases.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import (
    NotAUnit,
    NotDivisible,
    PrecisionError,
    WindowOverflow,
)
from .witt import WittElem

# int64 overflow headroom in the kernels requires mod^2 * M < 2^63.
MAX_PREC2 = 24
MAX_PRECU = 128


def _check_windows(prec2: int, precU: int):
    if not 1 <= prec2 <= MAX_PREC2:
        raise PrecisionError(f"prec2 must be in [1, {MAX_PREC2}], got {prec2}")
    if not 1 <= precU <= MAX_PRECU:
        raise WindowOverflow(f"precU must be in [1, {MAX_PRECU}], got {precU}")


class USeries:
    """Element of W[[u1]] / (2^prec2, u1^precU)."""

    __slots__ = ("coeffs", "prec2")

    def __init__(self, coeffs, prec2: int, *, _canonical=False):
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("coeffs must have shape (M, 2)")
        _check_windows(prec2, arr.shape[0])
        if not _canonical:
            arr = arr % (1 << prec2)
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self.coeffs = arr
        self.prec2 = prec2

    # -- constructors --------------------------------------------------------

    @classmethod
    def zeros(cls, prec2: int, precU: int) -> "USeries":
        return cls(np.zeros((precU, 2), dtype=np.int64), prec2, _canonical=True)

    @classmethod
    def one(cls, prec2: int, precU: int) -> "USeries":
        c = np.zeros((precU, 2), dtype=np.int64)
        c[0, 0] = 1
        return cls(c, prec2, _canonical=True)

    @classmethod
    def u1_power(cls, k: int, prec2: int, precU: int) -> "USeries":
        if k < 0:
            raise WindowOverflow("negative u1-power is not an element of W[[u1]]")
        if k >= precU:
            raise WindowOverflow(f"u1^{k} exceeds the window {precU}")
        c = np.zeros((precU, 2), dtype=np.int64)
        c[k, 0] = 1
        return cls(c, prec2, _canonical=True)

    @classmethod
    def from_witt(cls, items, prec2: int, precU: int) -> "USeries":
        """Series from a list of WittElem/int coefficients (index = u1-power)."""
        c = np.zeros((precU, 2), dtype=np.int64)
        for i, w in enumerate(items):
            if i >= precU:
                raise WindowOverflow("more coefficients than the window holds")
            if isinstance(w, WittElem):
                c[i, 0], c[i, 1] = w.a, w.b
            else:
                c[i, 0] = w
        return cls(c, prec2)

    # -- shape plumbing --------------------------------------------------------

    @property
    def precU(self) -> int:
        return int(self.coeffs.shape[0])

    def reduce(self, prec2=None, precU=None) -> "USeries":
        n = self.prec2 if prec2 is None else prec2
        m = self.precU if precU is None else precU
        if n > self.prec2 or m > self.precU:
            raise PrecisionError(
                f"cannot raise precision ({self.prec2},{self.precU}) -> ({n},{m})"
            )
        if n == self.prec2 and m == self.precU:
            return self
        return USeries(self.coeffs[:m] % (1 << n), n, _canonical=True)

    def _align(self, other):
        if isinstance(other, (int, WittElem)):
            other = USeries.from_witt([other], self.prec2, self.precU)
        n = min(self.prec2, other.prec2)
        m = min(self.precU, other.precU)
        return self.reduce(n, m), other.reduce(n, m), n, m

    # -- ring operations ---------------------------------------------------------

    def __add__(self, other):
        x, y, n, _ = self._align(other)
        return USeries(x.coeffs + y.coeffs, n)

    __radd__ = __add__

    def __sub__(self, other):
        x, y, n, _ = self._align(other)
        return USeries(x.coeffs - y.coeffs, n)

    def __rsub__(self, other):
        x, y, n, _ = self._align(other)
        return USeries(y.coeffs - x.coeffs, n)

    def __neg__(self):
        return USeries(-self.coeffs, self.prec2)

    def __mul__(self, other):
        if isinstance(other, (int, WittElem)):
            return self.scalar_mul(other)
        x, y, n, _ = self._align(other)
        out = kernels.conv_mul(x.coeffs, y.coeffs, 1 << n)
        return USeries(out, n, _canonical=True)

    __rmul__ = __mul__

    def scalar_mul(self, w) -> "USeries":
        if isinstance(w, int):
            return USeries(self.coeffs * w, self.prec2)
        n = min(self.prec2, w.prec2)
        a, b = self.coeffs[:, 0], self.coeffs[:, 1]
        out = np.empty_like(self.coeffs)
        out[:, 0] = a * w.a - b * w.b
        out[:, 1] = a * w.b + b * w.a - b * w.b
        return USeries(out % (1 << n), n, _canonical=True)

    def __pow__(self, e: int) -> "USeries":
        base = self if e >= 0 else self.invert()
        e = abs(e)
        acc = USeries.one(base.prec2, base.precU)
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def invert(self) -> "USeries":
        """Inverse of a series whose constant coefficient is a unit of W/2^N."""
        c0 = self[0]
        if not c0.is_unit():
            raise NotAUnit("constant coefficient is not a unit")
        inv = USeries.from_witt([c0.inv()], self.prec2, self.precU)
        # Newton iteration r <- r(2 - x r); doubles the valid u1-order.
        for _ in range(max(1, self.precU).bit_length() + 1):
            inv = inv * (2 - self * inv) + USeries.zeros(self.prec2, self.precU)
        return inv

    # -- structure maps ---------------------------------------------------------

    def frobenius(self) -> "USeries":
        """Coefficientwise Galois action; u1 is fixed."""
        out = np.empty_like(self.coeffs)
        out[:, 0] = self.coeffs[:, 0] - self.coeffs[:, 1]
        out[:, 1] = -self.coeffs[:, 1]
        return USeries(out, self.prec2)

    def shift_u1(self, k: int) -> "USeries":
        """Multiply by u1^k (k >= 0); top coefficients fall off the window."""
        if k < 0:
            raise WindowOverflow("negative u1-shift")
        out = np.zeros_like(self.coeffs)
        if k < self.precU:
            out[k:] = self.coeffs[: self.precU - k]
        return USeries(out, self.prec2, _canonical=True)

    def substitute(self, g: "USeries") -> "USeries":
        """Composition self(g(u1)); g may have a (topologically nilpotent)
        constant term, so the result is the image of the *stored* truncation."""
        n = min(self.prec2, g.prec2)
        m = min(self.precU, g.precU)
        x = self.reduce(n, m)
        gg = g.reduce(n, m)
        acc = USeries.from_witt([x[m - 1]], n, m)
        for k in range(m - 2, -1, -1):
            acc = acc * gg
            c = np.array(acc.coeffs)
            c[0, 0] += x.coeffs[k, 0]
            c[0, 1] += x.coeffs[k, 1]
            acc = USeries(c, n)
        return acc

    def div2_exact(self, j: int) -> "USeries":
        """Exact division by 2^j; the 2-adic ledger drops to prec2 - j."""
        if j <= 0:
            return self
        if j >= self.prec2:
            raise PrecisionError(f"dividing by 2^{j} at precision {self.prec2}")
        mask = (1 << j) - 1
        if np.any(self.coeffs & mask):
            raise NotDivisible(f"series not divisible by 2^{j} at precision")
        return USeries(self.coeffs >> j, self.prec2 - j, _canonical=True)

    # -- inspection -----------------------------------------------------------------

    def __getitem__(self, i: int) -> WittElem:
        return WittElem(int(self.coeffs[i, 0]), int(self.coeffs[i, 1]), self.prec2)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def u1_valuation(self):
        """Smallest u1-order with nonzero coefficient, or None for zero."""
        nz = np.nonzero(self.coeffs.any(axis=1))[0]
        return int(nz[0]) if nz.size else None

    def __eq__(self, other):
        if not isinstance(other, USeries):
            return NotImplemented
        return (
            self.prec2 == other.prec2
            and self.precU == other.precU
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.prec2, self.coeffs.tobytes()))

    def to_json(self) -> list:
        return [self[i].to_json() for i in range(self.precU)]

    @classmethod
    def from_json(cls, items: list, prec2=None, precU=None) -> "USeries":
        ws = [WittElem.from_json(d) for d in items]
        n = prec2 if prec2 is not None else min(w.prec2 for w in ws)
        m = precU if precU is not None else len(ws)
        return cls.from_witt(ws, n, m)

    def __repr__(self):
        terms = []
        for i in range(self.precU):
            w = self[i]
            if not w.is_zero():
                terms.append(f"({w.a}+{w.b}w)u1^{i}")
            if len(terms) > 4:
                terms.append("...")
                break
        body = " + ".join(terms) if terms else "0"
        return f"<USeries {body} | 2^{self.prec2}, u1^{self.precU}>"


class GradedElem:
    """series(u1) * u^{-t/2} in E_t; t must be even (E_t = 0 in odd degrees)."""

    __slots__ = ("series", "degree")

    def __init__(self, series: USeries, degree: int):
        if degree % 2:
            raise ValueError("E_* vanishes in odd degrees")
        self.series = series
        self.degree = degree

    @property
    def prec2(self):
        return self.series.prec2

    @property
    def precU(self):
        return self.series.precU

    def __add__(self, other):
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} != {other.degree}")
        return GradedElem(self.series + other.series, self.degree)

    def __sub__(self, other):
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} != {other.degree}")
        return GradedElem(self.series - other.series, self.degree)

    def __neg__(self):
        return GradedElem(-self.series, self.degree)

    def __mul__(self, other):
        if isinstance(other, (int, WittElem)):
            return GradedElem(self.series * other, self.degree)
        return GradedElem(self.series * other.series, self.degree + other.degree)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.invert() ** (-e)
        acc = GradedElem(USeries.one(self.prec2, self.precU), 0)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def invert(self) -> "GradedElem":
        return GradedElem(self.series.invert(), -self.degree)

    def frobenius(self) -> "GradedElem":
        return GradedElem(self.series.frobenius(), self.degree)

    def reduce(self, prec2=None, precU=None) -> "GradedElem":
        return GradedElem(self.series.reduce(prec2, precU), self.degree)

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def __eq__(self, other):
        if not isinstance(other, GradedElem):
            return NotImplemented
        return self.degree == other.degree and self.series == other.series

    def __hash__(self):
        return hash((self.degree, self.series))

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "prec2": self.prec2,
            "precU": self.precU,
            "coeffs": self.series.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "GradedElem":
        s = USeries.from_json(d["coeffs"], prec2=d["prec2"], precU=d["precU"])
        return cls(s, d["degree"])

    def __repr__(self):
        return f"<E_{self.degree}: {self.series!r}>"


# -- the operations of the graded layer -----------------------------------------


def monomial_v(a: int, b: int, prec2: int, precU: int) -> GradedElem:
    """v1^a v2^b = u1^a u^{-(a + 3b)} in degree 2a + 6b."""
    if a < 0:
        raise WindowOverflow("v1-exponent must be nonnegative in E_*")
    return GradedElem(USeries.u1_power(a, prec2, precU), 2 * a + 6 * b)


def u1_elem(prec2: int, precU: int) -> GradedElem:
    return GradedElem(USeries.u1_power(1, prec2, precU), 0)


def ser_invert(x: GradedElem) -> GradedElem:
    return x.invert()


def divide_by_2pow(x: GradedElem, j: int) -> GradedElem:
    """x / 2^j, exact; the result lives at 2-adic precision prec2 - j."""
    return GradedElem(x.series.div2_exact(j), x.degree)


def in_ideal(x, gens) -> bool:
    """Membership of x in the ideal generated by {2^a * u1^b : (a, b) in gens}.

    The required 2-power at u1-order i is min{a : (a, b) in gens, b <= i};
    orders no generator reaches are unconstrained.  v1-power ideals in a fixed
    degree translate to u1-power ideals since v1 = u1 * u^{-1} and u is a unit.
    """
    s = x.series if isinstance(x, GradedElem) else x
    need = 0
    for a, b in gens:
        if b < s.precU:
            need = max(need, a)
    if need > s.prec2:
        raise PrecisionError(
            f"ideal requires 2^{need} but element carries precision 2^{s.prec2}"
        )
    for i in range(s.precU):
        exps = [a for a, b in gens if b <= i]
        if not exps:
            continue
        mod = 1 << min(exps)
        if (s.coeffs[i, 0] % mod) or (s.coeffs[i, 1] % mod):
            return False
    return True


def congruent_mod(x: GradedElem, y: GradedElem, ideal: tuple[int, int]) -> bool:
    """x = y mod (2^a, u1^b) for ideal = (a, b), checked coefficientwise."""
    a, b = ideal
    if x.degree != y.degree:
        raise ValueError("congruence requires equal degrees")
    d = x - y
    if b > d.precU:
        raise PrecisionError(f"ideal needs u1-window {b}, have {d.precU}")
    return in_ideal(d, [(a, 0), (0, b)])


def m_power_gens(k: int) -> list[tuple[int, int]]:
    """Generators of (2, u1)^k as (2-exponent, u1-exponent) pairs."""
    return [(k - b, b) for b in range(k + 1)]
