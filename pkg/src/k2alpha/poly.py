"""Dense truncated polynomials over W[[u1]] in up to three formal variables.

A PolyE holds one u1-coefficient-series per monomial of total degree <= deg;
the block is a single (T, M, 2) int64 array so that products reduce to one
batched convolution call into the kernel backend.  Monomial order and
pair-product tables are cached per (nvars, deg).

Products are only ever needed for one and two variables; three-variable
polynomials appear in the associativity gate and are assembled by embedding
and monomial shifts, never by a 3-variable convolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import PrecisionError, WindowOverflow
from .series import USeries
from .witt import WittElem


@lru_cache(maxsize=None)
def monomials(nvars: int, deg: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples with total degree <= deg, sorted by (total, tuple)."""
    out = []

    def rec(prefix, remaining, left):
        if left == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining + 1):
            rec(prefix + (e,), remaining - e, left - 1)

    for total in range(deg + 1):
        block = []

        def rec2(prefix, used, left):
            if left == 0:
                if used == total:
                    block.append(prefix)
                return
            for e in range(total - used + 1):
                rec2(prefix + (e,), used + e, left - 1)

        rec2((), 0, nvars)
        out.extend(sorted(block))
    return tuple(out)


@lru_cache(maxsize=None)
def mono_index(nvars: int, deg: int) -> dict:
    return {m: i for i, m in enumerate(monomials(nvars, deg))}


@dataclass(frozen=True)
class PairTable:
    ia: np.ndarray
    ib: np.ndarray
    iout: np.ndarray  # per-pair output index, sorted ascending
    group_starts: np.ndarray
    group_ids: np.ndarray


@lru_cache(maxsize=None)
def pair_table(nvars: int, deg: int) -> PairTable:
    monos = monomials(nvars, deg)
    idx = mono_index(nvars, deg)
    pairs = []
    for i, m1 in enumerate(monos):
        d1 = sum(m1)
        for j, m2 in enumerate(monos):
            if d1 + sum(m2) > deg:
                continue
            s = tuple(a + b for a, b in zip(m1, m2))
            pairs.append((idx[s], i, j))
    pairs.sort()
    iout = np.array([p[0] for p in pairs], dtype=np.int64)
    ia = np.array([p[1] for p in pairs], dtype=np.int64)
    ib = np.array([p[2] for p in pairs], dtype=np.int64)
    starts = np.flatnonzero(np.r_[True, iout[1:] != iout[:-1]]).astype(np.int64)
    gids = iout[starts]
    return PairTable(ia, ib, iout, starts, gids)


class PolyE:
    """Polynomial over W[[u1]]/(2^prec2, u1^M) in nvars variables, degree <= deg."""

    __slots__ = ("nvars", "deg", "prec2", "coeffs")

    def __init__(self, nvars, deg, prec2, coeffs, *, _canonical=False):
        arr = np.asarray(coeffs, dtype=np.int64)
        t = len(monomials(nvars, deg))
        if arr.shape[0] != t or arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError(f"coefficient block must have shape ({t}, M, 2)")
        if not _canonical:
            arr = arr % (1 << prec2)
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self.nvars = nvars
        self.deg = deg
        self.prec2 = prec2
        self.coeffs = arr

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zeros(cls, nvars, deg, prec2, precU) -> "PolyE":
        t = len(monomials(nvars, deg))
        return cls(nvars, deg, prec2, np.zeros((t, precU, 2), dtype=np.int64), _canonical=True)

    @classmethod
    def const(cls, s: USeries, nvars, deg) -> "PolyE":
        p = cls.zeros(nvars, deg, s.prec2, s.precU)
        c = np.array(p.coeffs)
        c[0] = s.coeffs
        return cls(nvars, deg, s.prec2, c, _canonical=True)

    @classmethod
    def variable(cls, var, nvars, deg, prec2, precU) -> "PolyE":
        p = cls.zeros(nvars, deg, prec2, precU)
        mono = tuple(1 if k == var else 0 for k in range(nvars))
        c = np.array(p.coeffs)
        c[mono_index(nvars, deg)[mono], 0, 0] = 1
        return cls(nvars, deg, prec2, c, _canonical=True)

    # -- plumbing -----------------------------------------------------------------

    @property
    def precU(self):
        return int(self.coeffs.shape[1])

    @property
    def nmono(self):
        return int(self.coeffs.shape[0])

    def reduce(self, prec2=None, precU=None) -> "PolyE":
        n = self.prec2 if prec2 is None else prec2
        m = self.precU if precU is None else precU
        if n > self.prec2 or m > self.precU:
            raise PrecisionError("cannot raise precision")
        if n == self.prec2 and m == self.precU:
            return self
        return PolyE(self.nvars, self.deg, n, self.coeffs[:, :m] % (1 << n), _canonical=True)

    def _align(self, other):
        if self.nvars != other.nvars or self.deg != other.deg:
            raise ValueError("shape mismatch")
        n = min(self.prec2, other.prec2)
        m = min(self.precU, other.precU)
        return self.reduce(n, m), other.reduce(n, m), n

    # -- arithmetic -------------------------------------------------------------------

    def __add__(self, other):
        x, y, n = self._align(other)
        return PolyE(self.nvars, self.deg, n, x.coeffs + y.coeffs)

    def __sub__(self, other):
        x, y, n = self._align(other)
        return PolyE(self.nvars, self.deg, n, x.coeffs - y.coeffs)

    def __neg__(self):
        return PolyE(self.nvars, self.deg, self.prec2, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, WittElem)):
            return self.scalar_mul(other)
        if isinstance(other, USeries):
            return self.series_mul(other)
        if self.nvars > 2:
            raise ValueError("convolution products are limited to <= 2 variables")
        x, y, n = self._align(other)
        tab = pair_table(self.nvars, self.deg)
        out = kernels.pair_conv_acc(x.coeffs, y.coeffs, tab, self.nmono, 1 << n)
        return PolyE(self.nvars, self.deg, n, out, _canonical=True)

    __rmul__ = __mul__

    def scalar_mul(self, w) -> "PolyE":
        if isinstance(w, int):
            return PolyE(self.nvars, self.deg, self.prec2, self.coeffs * w)
        n = min(self.prec2, w.prec2)
        a, b = self.coeffs[..., 0], self.coeffs[..., 1]
        out = np.empty_like(self.coeffs)
        out[..., 0] = a * w.a - b * w.b
        out[..., 1] = a * w.b + b * w.a - b * w.b
        return PolyE(self.nvars, self.deg, n, out % (1 << n), _canonical=True)

    def series_mul(self, g: USeries) -> "PolyE":
        n = min(self.prec2, g.prec2)
        m = min(self.precU, g.precU)
        x = self.reduce(n, m)
        out = kernels.rowwise_conv(x.coeffs, g.reduce(n, m).coeffs, 1 << n)
        return PolyE(self.nvars, self.deg, n, out, _canonical=True)

    def pow_list(self, top: int) -> list["PolyE"]:
        """[self^0 .. self^top] (self^0 = 1)."""
        one = PolyE.const(USeries.one(self.prec2, self.precU), self.nvars, self.deg)
        out = [one]
        for _ in range(top):
            out.append(out[-1] * self)
        return out

    # -- coefficient access ------------------------------------------------------------

    def coeff(self, mono) -> USeries:
        if isinstance(mono, int):
            mono = (mono,) if self.nvars == 1 else mono
        i = mono_index(self.nvars, self.deg)[tuple(mono)]
        return USeries(np.array(self.coeffs[i]), self.prec2, _canonical=True)

    def with_coeff(self, mono, s: USeries) -> "PolyE":
        i = mono_index(self.nvars, self.deg)[tuple(mono)]
        c = np.array(self.coeffs)
        c[i] = s.reduce(self.prec2, self.precU).coeffs
        return PolyE(self.nvars, self.deg, self.prec2, c, _canonical=True)

    # -- structural maps ------------------------------------------------------------------

    def substitute_u1(self, g: USeries) -> "PolyE":
        """Apply u1 -> g(u1) to every coefficient series (batched Horner).

        Well-defined on the quotient only when the stored coefficients are the
        exact polynomials, which holds for the formal group data used here
        (their u1-degree is bounded by the formal-variable degree).
        """
        n = min(self.prec2, g.prec2)
        m = min(self.precU, g.precU)
        x = self.reduce(n, m)
        gg = g.reduce(n, m).coeffs
        mod = 1 << n
        acc = np.zeros_like(x.coeffs)
        acc[:, 0, :] = x.coeffs[:, m - 1, :]
        for k in range(m - 2, -1, -1):
            acc = kernels.rowwise_conv(acc, gg, mod)
            acc = np.array(acc)
            acc[:, 0, :] = (acc[:, 0, :] + x.coeffs[:, k, :]) % mod
        return PolyE(self.nvars, self.deg, n, acc, _canonical=True)

    def derivative(self, var: int) -> "PolyE":
        monos = monomials(self.nvars, self.deg)
        idx = mono_index(self.nvars, self.deg)
        out = np.zeros_like(self.coeffs)
        for i, m in enumerate(monos):
            e = m[var]
            if e:
                tgt = list(m)
                tgt[var] = e - 1
                out[idx[tuple(tgt)]] = self.coeffs[i] * e
        return PolyE(self.nvars, self.deg, self.prec2, out)

    def derivative_u1(self) -> "PolyE":
        out = np.zeros_like(self.coeffs)
        m = self.precU
        ks = np.arange(1, m, dtype=np.int64)
        out[:, : m - 1, :] = self.coeffs[:, 1:, :] * ks[None, :, None]
        return PolyE(self.nvars, self.deg, self.prec2, out)

    def embed(self, nvars: int, var_map: tuple[int, ...], deg=None) -> "PolyE":
        """Place variable k of self at position var_map[k] of a larger shape."""
        deg = self.deg if deg is None else deg
        src = monomials(self.nvars, self.deg)
        idx = mono_index(nvars, deg)
        out = np.zeros((len(monomials(nvars, deg)), self.precU, 2), dtype=np.int64)
        for i, m in enumerate(src):
            if sum(m) > deg:
                continue
            tgt = [0] * nvars
            for k, e in enumerate(m):
                tgt[var_map[k]] = e
            out[idx[tuple(tgt)]] = self.coeffs[i]
        return PolyE(nvars, deg, self.prec2, out, _canonical=True)

    def mul_monomial(self, expvec: tuple[int, ...]) -> "PolyE":
        """Multiply by the monomial with exponents expvec; overflow is truncated."""
        src = monomials(self.nvars, self.deg)
        idx = mono_index(self.nvars, self.deg)
        out = np.zeros_like(self.coeffs)
        for i, m in enumerate(src):
            tgt = tuple(a + b for a, b in zip(m, expvec))
            if sum(tgt) <= self.deg:
                out[idx[tgt]] = self.coeffs[i]
        return PolyE(self.nvars, self.deg, self.prec2, out, _canonical=True)

    def mod2u1(self) -> "PolyE":
        """Reduction mod (2, u1): an F4-coefficient polynomial at (N, M) = (1, 1)."""
        return self.reduce(1, 1)

    def tags(self) -> np.ndarray:
        """F4 tags per monomial of a (1, 1)-reduced polynomial."""
        r = self.mod2u1()
        return (r.coeffs[:, 0, 0] | (r.coeffs[:, 0, 1] << 1)).astype(np.uint8)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __eq__(self, other):
        if not isinstance(other, PolyE):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.deg == other.deg
            and self.prec2 == other.prec2
            and self.precU == other.precU
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.nvars, self.deg, self.prec2, self.coeffs.tobytes()))

    def __repr__(self):
        nz = int(np.count_nonzero(self.coeffs.any(axis=(1, 2))))
        return (
            f"<PolyE {self.nvars}var deg<={self.deg} {nz} terms"
            f" | 2^{self.prec2}, u1^{self.precU}>"
        )


# -- composition helpers ------------------------------------------------------------


def compose_1var(outer: PolyE, inner: PolyE) -> PolyE:
    """outer(inner) for a one-variable outer; inner must kill the constant term."""
    if outer.nvars != 1:
        raise ValueError("outer must be one-variable")
    if inner.coeffs[0].any():
        raise ValueError("inner must have zero constant term")
    n = min(outer.prec2, inner.prec2)
    m = min(outer.precU, inner.precU)
    inner = inner.reduce(n, m)
    outer = outer.reduce(n, m)
    top = outer.deg
    acc = PolyE.const(outer.coeff((top,)), inner.nvars, inner.deg).reduce(n, m)
    for j in range(top - 1, -1, -1):
        acc = acc * inner
        c = np.array(acc.coeffs)
        c[0] = (c[0] + outer.coeffs[j][:m]) % (1 << n)
        acc = PolyE(inner.nvars, inner.deg, n, c, _canonical=True)
    return acc


def eval_2var(F: PolyE, g: PolyE, h: PolyE) -> PolyE:
    """F(g, h) for a two-variable F; g, h share a shape and kill constants."""
    if F.nvars != 2:
        raise ValueError("F must be two-variable")
    if g.coeffs[0].any() or h.coeffs[0].any():
        raise ValueError("arguments must have zero constant term")
    n = min(F.prec2, g.prec2, h.prec2)
    m = min(F.precU, g.precU, h.precU)
    g = g.reduce(n, m)
    h = h.reduce(n, m)
    F = F.reduce(n, m)
    D = F.deg
    gp = g.pow_list(D)
    idx = mono_index(2, D)
    # C_j = sum_i F_(i,j) g^i, then Horner in h.
    cjs = []
    for j in range(D + 1):
        c = PolyE.zeros(g.nvars, g.deg, n, m)
        for i in range(D + 1 - j):
            fij = F.coeffs[idx[(i, j)]]
            if fij.any():
                c = c + gp[i].series_mul(USeries(np.array(fij), n, _canonical=True))
        cjs.append(c)
    acc = cjs[D]
    for j in range(D - 1, -1, -1):
        acc = acc * h + cjs[j]
    return acc


def teich_digit_planes(arr: np.ndarray, prec2: int) -> np.ndarray:
    """Teichmuller digit tags of each coefficient against powers of -2.

    arr has shape (..., 2), canonical mod 2^prec2; the result has shape
    (..., prec2) with F4 tags, so arr = sum_i teich(tag_i) * (-2)^i holds
    componentwise.
    """
    wa = arr[..., 0].astype(np.int64).copy()
    wb = arr[..., 1].astype(np.int64).copy()
    planes = np.zeros(arr.shape[:-1] + (prec2,), dtype=np.uint8)
    for i in range(prec2):
        modc = 1 << (prec2 - i)
        ra = wa & 1
        rb = wb & 1
        planes[..., i] = (ra | (rb << 1)).astype(np.uint8)
        ta = ra * 1 + (ra & rb) * (modc - 2)  # 1 for tag 1, modc-1 for tag 3
        tb = rb * 1 + (ra & rb) * (modc - 2)
        wa = (wa - ta) % modc
        wb = (wb - tb) % modc
        modc2 = modc >> 1
        if modc2:
            wa = (modc2 - (wa >> 1)) % modc2
            wb = (modc2 - (wb >> 1)) % modc2
    return planes
