"""Exact arithmetic in the truncated Witt ring W(F4)/2^N.

W(F4) = Z2[w]/(1 + w + w^2) for a fixed primitive cube root of unity w.  An
element is a + b*w with canonical residues a, b in [0, 2^N); the reduction
w^2 = -1 - w is applied eagerly so the (a, b) form is unique.  N is a 2-adic
precision ledger: binary operations return min(N1, N2) and exact division by
2 costs one unit of N.  Asking for precision an operand does not carry raises
PrecisionError rather than silently truncating.

The residue field F4 shows up everywhere as small integer tags::

    0 -> 0,  1 -> 1,  2 -> w,  3 -> w^2

which agrees bitwise with the residues (a mod 2, b mod 2) = (tag & 1, tag >> 1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoSolution, NotAUnit, PrecisionError

F4_ZERO, F4_ONE, F4_W, F4_W2 = 0, 1, 2, 3
F4_NAMES = ("0", "1", "w", "w2")

# Cayley tables for F4 with the tag encoding above.
F4_ADD = (
    (0, 1, 2, 3),
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 1, 0),
)
F4_MUL = (
    (0, 0, 0, 0),
    (0, 1, 2, 3),
    (0, 2, 3, 1),
    (0, 3, 1, 2),
)
F4_CONJ = (0, 1, 3, 2)  # Frobenius x -> x^2
F4_INV = (None, 1, 3, 2)  # x^-1 = x^2 for x != 0


def f4_from_bits(a_bit: int, b_bit: int) -> int:
    return (a_bit & 1) | ((b_bit & 1) << 1)


@dataclass(frozen=True)
class WittElem:
    """a + b*w in W(F4)/2^prec2, residues canonical in [0, 2^prec2)."""

    a: int
    b: int
    prec2: int

    def __post_init__(self):
        if self.prec2 < 1:
            raise PrecisionError("prec2 must be >= 1")
        mod = 1 << self.prec2
        object.__setattr__(self, "a", self.a % mod)
        object.__setattr__(self, "b", self.b % mod)

    # -- precision plumbing -------------------------------------------------

    def reduce(self, prec2: int) -> "WittElem":
        if prec2 > self.prec2:
            raise PrecisionError(
                f"cannot raise precision {self.prec2} -> {prec2}"
            )
        return WittElem(self.a, self.b, prec2)

    def _align(self, other) -> tuple["WittElem", "WittElem", int]:
        if isinstance(other, int):
            other = WittElem(other, 0, self.prec2)
        n = min(self.prec2, other.prec2)
        return self.reduce(n), other.reduce(n), n

    # -- ring structure ------------------------------------------------------

    def __add__(self, other):
        x, y, n = self._align(other)
        return WittElem(x.a + y.a, x.b + y.b, n)

    __radd__ = __add__

    def __sub__(self, other):
        x, y, n = self._align(other)
        return WittElem(x.a - y.a, x.b - y.b, n)

    def __rsub__(self, other):
        x, y, n = self._align(other)
        return WittElem(y.a - x.a, y.b - x.b, n)

    def __neg__(self):
        return WittElem(-self.a, -self.b, self.prec2)

    def __mul__(self, other):
        x, y, n = self._align(other)
        # (a1 + b1 w)(a2 + b2 w) with w^2 = -1 - w
        return WittElem(
            x.a * y.a - x.b * y.b,
            x.a * y.b + x.b * y.a - x.b * y.b,
            n,
        )

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "WittElem":
        base = self if e >= 0 else self.inv()
        e = abs(e)
        acc = WittElem(1, 0, self.prec2)
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return bool((self.a | self.b) & 1)

    def inv(self) -> "WittElem":
        if not self.is_unit():
            raise NotAUnit(f"{self} is not a unit")
        n = self.norm()  # lies in Z/2^N, odd
        ninv = pow(n.a, -1, 1 << self.prec2)
        return self.frobenius() * ninv

    # -- Galois / norm -------------------------------------------------------

    def frobenius(self) -> "WittElem":
        """The lift of x -> x^2 on F4; Z2-linear, sends w to w^2 = -1 - w."""
        return WittElem(self.a - self.b, -self.b, self.prec2)

    def norm(self) -> "WittElem":
        """x * sigma(x) = a^2 - a*b + b^2; always has zero w-part."""
        return WittElem(self.a * self.a - self.a * self.b + self.b * self.b, 0, self.prec2)

    # -- residues and exact 2-division ----------------------------------------

    def residue(self) -> int:
        """F4 tag of x mod 2."""
        return f4_from_bits(self.a, self.b)

    def div2_exact(self, j: int = 1) -> "WittElem":
        """x / 2^j, requiring exact divisibility; costs j units of precision."""
        if j >= self.prec2:
            raise PrecisionError(f"dividing by 2^{j} at precision {self.prec2}")
        mask = (1 << j) - 1
        if (self.a & mask) or (self.b & mask):
            from .errors import NotDivisible

            raise NotDivisible(f"{self} not divisible by 2^{j}")
        return WittElem(self.a >> j, self.b >> j, self.prec2 - j)

    # -- encoding --------------------------------------------------------------

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "prec2": self.prec2}

    @classmethod
    def from_json(cls, d: dict) -> "WittElem":
        return cls(int(d["a"]), int(d["b"]), int(d["prec2"]))

    def __str__(self):
        return f"{self.a}+{self.b}w mod 2^{self.prec2}"


# -- constructors ---------------------------------------------------------------


def wint(n: int, prec2: int) -> WittElem:
    return WittElem(n, 0, prec2)


def wzero(prec2: int) -> WittElem:
    return WittElem(0, 0, prec2)


def wone(prec2: int) -> WittElem:
    return WittElem(1, 0, prec2)


def womega(prec2: int) -> WittElem:
    return WittElem(0, 1, prec2)


def frobenius(x: WittElem) -> WittElem:
    return x.frobenius()


def norm(x: WittElem) -> WittElem:
    return x.norm()


def teich_lift(c: int, prec2: int) -> WittElem:
    """The multiplicative lift of the F4 tag c; satisfies x^4 = x exactly.

    The lifts are 0, 1 and the two cube roots of unity w, w^2 = -1 - w.
    """
    if c == F4_ZERO:
        return wzero(prec2)
    if c == F4_ONE:
        return wone(prec2)
    if c == F4_W:
        return womega(prec2)
    if c == F4_W2:
        return WittElem(-1, -1, prec2)
    raise ValueError(f"not an F4 tag: {c!r}")


def teich_digits(x: WittElem) -> tuple[int, ...]:
    """F4 tags d_i with x = sum_i teich(d_i) * (-2)^i mod 2^prec2 (prec2 digits)."""
    tags = []
    cur = x
    for i in range(x.prec2):
        t = cur.residue()
        tags.append(t)
        n = cur.prec2
        if n == 1:
            break
        cur = (cur - teich_lift(t, n)).div2_exact()
        cur = -cur  # the base is -2
    tags += [0] * (x.prec2 - len(tags))
    return tuple(tags)


def teich_expand(x: WittElem) -> list[WittElem]:
    """Teichmuller digits of x against powers of -2, trailing zeros trimmed."""
    tags = teich_digits(x)
    k = len(tags)
    while k > 0 and tags[k - 1] == 0:
        k -= 1
    return [teich_lift(t, x.prec2) for t in tags[:k]]


def teich_sum(tags, prec2: int) -> WittElem:
    """Recombine digit tags: sum_i teich(tags[i]) * (-2)^i."""
    acc = wzero(prec2)
    p = 1
    for i, t in enumerate(tags):
        if t:
            d = teich_lift(t, prec2)
            acc = acc + WittElem(d.a * p, d.b * p, prec2)
        p = (-2 * p) % (1 << prec2)
    return acc


def hensel_unit_solve(target: WittElem, congruence: WittElem, m: int) -> WittElem:
    """Find x with norm(x) = target mod 2^N and x = congruence mod 2^m.

    Lifts digit by digit; at each 2-adic stage the lexicographically smallest
    admissible correction pair (da, db) in {0,1}^2 is chosen, which makes the
    output deterministic.  N is the precision of `target`.
    """
    n = target.prec2
    if target.b % (1 << n) != 0:
        raise ValueError("target must lie in Z/2^N (zero w-part)")
    if not 1 <= m <= n:
        raise ValueError(f"congruence modulus exponent {m} out of range")
    modm = 1 << m
    x = WittElem(congruence.a % modm, congruence.b % modm, n)
    if (x.norm().a - target.a) % modm != 0:
        raise NoSolution(
            f"norm({x}) != target mod 2^{m}; no lift can fix the congruence class"
        )
    for k in range(m, n):
        modk1 = 1 << (k + 1)
        step = 1 << k
        for da in (0, 1):
            for db in (0, 1):
                cand = WittElem(x.a + da * step, x.b + db * step, n)
                if (cand.norm().a - target.a) % modk1 == 0:
                    x = cand
                    break
            else:
                continue
            break
        else:
            raise NoSolution(f"no admissible digit at stage 2^{k}")
    return x
