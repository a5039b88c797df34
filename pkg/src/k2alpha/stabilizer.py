"""Arithmetic in the maximal order W<T>/(T^2 = -2, aT = T a^sigma).

An element is stored in Teichmuller digit form: digits[i] is the F4 tag of
the coefficient of T^i, for i < precT.  Units (automorphisms of the fiber,
i.e. members of the height-2 stabilizer group) are exactly the elements with
digits[0] != 0.  Writing x = A + B*T with A, B in W recovered from the even
and odd digit positions (T^2 = -2 makes even digits a base-(-2) expansion),
multiplication is

    (A1 + B1 T)(A2 + B2 T) = (A1 A2 - 2 B1 sigma(B2)) + (A1 B2 + B1 sigma(A2)) T

and the reduced norm det(x) = A sigma(A) + 2 B sigma(B) lands in Z/2^N and is
multiplicative (property-tested rather than assumed).

precT = 2N is tied to the Witt precision N of the two components.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import NotAUnit
from .witt import (
    F4_CONJ,
    F4_NAMES,
    WittElem,
    hensel_unit_solve,
    teich_digits,
    teich_sum,
    wint,
)

_TAG_OF_NAME = {"0": 0, "1": 1, "w": 2, "w2": 3}


@dataclass(frozen=True)
class StabElem:
    digits: tuple[int, ...]
    precT: int

    def __post_init__(self):
        d = tuple(self.digits)[: self.precT]
        d = d + (0,) * (self.precT - len(d))
        if any(t not in (0, 1, 2, 3) for t in d):
            raise ValueError("digits must be F4 tags 0..3")
        if self.precT < 2 or self.precT % 2:
            raise ValueError("precT must be even and >= 2")
        object.__setattr__(self, "digits", d)

    # -- digit / Witt-pair views ----------------------------------------------

    @property
    def prec2(self) -> int:
        return self.precT // 2

    def witt_pair(self) -> tuple[WittElem, WittElem]:
        n = self.prec2
        a = teich_sum(self.digits[0::2], n)
        b = teich_sum(self.digits[1::2], n)
        return a, b

    @classmethod
    def from_witt_pair(cls, a: WittElem, b: WittElem) -> "StabElem":
        n = min(a.prec2, b.prec2)
        da = teich_digits(a.reduce(n))
        db = teich_digits(b.reduce(n))
        digits = []
        for i in range(n):
            digits.append(da[i])
            digits.append(db[i])
        return cls(tuple(digits), 2 * n)

    def is_unit(self) -> bool:
        return self.digits[0] != 0

    def a(self, i: int) -> int:
        """The F4 tag of the T^i digit."""
        return self.digits[i]

    def reduce(self, precT: int) -> "StabElem":
        return StabElem(self.digits[:precT], precT)

    # -- encoding --------------------------------------------------------------

    def to_json(self) -> dict:
        return {"digits": [F4_NAMES[t] for t in self.digits], "precT": self.precT}

    @classmethod
    def from_json(cls, d: dict) -> "StabElem":
        return cls(tuple(_TAG_OF_NAME[s] for s in d["digits"]), int(d["precT"]))

    def literal(self) -> str:
        return ",".join(F4_NAMES[t] for t in self.digits)

    @classmethod
    def from_literal(cls, s: str, precT=None) -> "StabElem":
        tags = tuple(_TAG_OF_NAME[t.strip()] for t in s.split(","))
        k = precT if precT is not None else max(2, len(tags) + len(tags) % 2)
        return cls(tags, k)

    def __str__(self):
        return f"[{self.literal()}] (T-adic {self.precT})"


# -- operations ------------------------------------------------------------------


def s_mul(x: StabElem, y: StabElem) -> StabElem:
    k = min(x.precT, y.precT)
    x, y = x.reduce(k), y.reduce(k)
    a1, b1 = x.witt_pair()
    a2, b2 = y.witt_pair()
    a = a1 * a2 - 2 * b1 * b2.frobenius()
    b = a1 * b2 + b1 * a2.frobenius()
    return StabElem.from_witt_pair(a, b)


def s_inv(x: StabElem) -> StabElem:
    """Inverse of a unit: conjugate over the reduced norm."""
    if not x.is_unit():
        raise NotAUnit("only units of the order are invertible")
    a, b = x.witt_pair()
    n = det(x)
    ninv = wint(pow(n.a, -1, 1 << n.prec2), n.prec2)
    return StabElem.from_witt_pair(a.frobenius() * ninv, -b * ninv)


def embed_witt(x: WittElem) -> StabElem:
    """W sits in the order along the even T-digits (T^2 = -2)."""
    return StabElem.from_witt_pair(x, wint(0, x.prec2))


def det(x: StabElem) -> WittElem:
    """Reduced norm A sigma(A) + 2 B sigma(B); lands in Z/2^N."""
    a, b = x.witt_pair()
    d = a.norm() + 2 * b.norm()
    assert d.b == 0
    return d


def is_in_S21(x: StabElem) -> bool:
    """Kernel test for det followed by Z2^x -> Z2^x / {+-1}.

    At finite precision the kernel condition is det(x) = +-1 mod 2^N, since
    Z2^x = {+-1} x (1 + 4 Z2) and the free factor meets {+-1 mod 2^N} trivially
    for N >= 3.
    """
    if not x.is_unit():
        raise NotAUnit("membership test is for units only")
    d = det(x)
    mod = 1 << d.prec2
    return d.a % mod in (1 % mod, (mod - 1) % mod)


def galois(x: StabElem) -> StabElem:
    """The Galois action: digitwise Frobenius, fixing T."""
    return StabElem(tuple(F4_CONJ[t] for t in x.digits), x.precT)


@lru_cache(maxsize=None)
def named(tag: str, prec2: int) -> StabElem:
    """The distinguished elements alpha, pi, omega, -1.

    alpha is the deterministic Hensel lift with alpha = 1 + 2w mod 4 and
    det(alpha) = -1; pi = 1 + 2w; omega and -1 are Teichmuller/integer
    embeddings.
    """
    if tag == "alpha":
        w = hensel_unit_solve(wint(-1, prec2), WittElem(1, 2, prec2), 2)
        return embed_witt(w)
    if tag == "pi":
        return embed_witt(WittElem(1, 2, prec2))
    if tag == "omega":
        return embed_witt(WittElem(0, 1, prec2))
    if tag in ("minus_one", "minus1"):
        return embed_witt(wint(-1, prec2))
    raise ValueError(f"unknown named element {tag!r}")


def random_unit(rng, prec2: int, a0=None, a1=None) -> StabElem:
    """Uniform Teichmuller digits with digits[0] forced nonzero.

    a0/a1 pin the first two digits (the congruence shapes used by the
    verification batteries are a0 = 1, a1 = 0).
    """
    k = 2 * prec2
    digits = [rng.randrange(4) for _ in range(k)]
    digits[0] = rng.randrange(1, 4) if a0 is None else a0
    if a1 is not None:
        digits[1] = a1
    return StabElem(tuple(digits), k)
