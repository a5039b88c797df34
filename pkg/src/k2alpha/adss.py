"""The duality-complex 0-line: d1 = 1 - alpha_*, b-classes, and detection.

The first differential out of the maximal-finite-subgroup invariants is
induced by 1 - alpha_* for the distinguished Witt unit alpha (= 1 + 2w mod 4,
reduced norm -1).  Everything here is certified inside a finite window: a
2-adic precision N, a u1-window M, and a degree window |t| <= degree bound.
Kernel statements are reported for *primitive* vectors (the ones that lift;
at finite precision the nullspace always contains 2-power torsion artifacts),
and cokernel orders combine an explicit divisibility witness with a windowed
insolvability certificate.

Images of the basis generators are computed once per context and combined
multiplicatively, so every d1 value is the reduction of the exact one (the
generators are exact polynomials; negative Delta-powers invert the image).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from . import anss_chart, linalg
from .action import StarIso, act_on, lift_action, named_iso, truncate_iso, u1_image_consistent
from .errors import NotDivisible, NotInSpan
from .rings import (
    C6Expr,
    G24Expr,
    basis_in_degree,
    expand_c6,
    expand_g24,
    express_in_c6_basis,
    modular,
)
from .series import GradedElem, USeries, divide_by_2pow, in_ideal, m_power_gens, monomial_v
from .stabilizer import StabElem, named, random_unit
from .witt import WittElem, teich_lift, wint

# Internal precision profiles.  The verification batteries pick whichever
# window their stated ranges require; the congruences themselves fix the
# required u1-exponents (e.g. the mod-2 differentials need v1-exponents up
# to 94, far beyond the default working window of 24).
FAST_PREC = (6, 10, 9)
DEEP_PREC = (9, 40, 9)
WIDE_PREC = (2, 96, 9)


class D1Context:
    """A window (N, M) together with the alpha action at that window."""

    def __init__(self, iso: StarIso):
        self.iso = iso
        self.prec2 = iso.u1_image.prec2
        self.precU = iso.u1_image.precU
        self._gen_images = {}
        self._img_pows = {}

    @property
    def prec(self):
        return (self.prec2, self.precU)

    def _gen(self, tag: str) -> GradedElem:
        return modular(tag, self.prec2, self.precU)

    def _image(self, tag: str) -> GradedElem:
        if tag not in self._gen_images:
            self._gen_images[tag] = act_on(self.iso, self._gen(tag))
        return self._gen_images[tag]

    def _image_pow(self, tag: str, e: int) -> GradedElem:
        key = (tag, e)
        if key not in self._img_pows:
            if e == 0:
                val = GradedElem(USeries.one(self.prec2, self.precU), 0)
            elif e < 0:
                val = self._image(tag).invert() ** (-e)
            else:
                val = self._image(tag) ** e
            self._img_pows[key] = val
        return self._img_pows[key]

    @lru_cache(maxsize=None)
    def _mono(self, e: int, m: int, n: int) -> GradedElem:
        c6 = self._gen("c6") ** e
        c4 = self._gen("c4") ** m
        dl = self._gen("delta" if n >= 0 else "delta_inv") ** abs(n)
        return c6 * c4 * dl

    def act_key(self, e: int, m: int, n: int) -> GradedElem:
        """alpha_*(c6^e c4^m Delta^n), assembled from exact generator images."""
        return (
            self._image_pow("c6", e)
            * self._image_pow("c4", m)
            * self._image_pow("delta", n)
        )

    def d1_key(self, e: int, m: int, n: int) -> GradedElem:
        return self._mono(e, m, n) - self.act_key(e, m, n)

    def d1(self, x: GradedElem) -> GradedElem:
        """d1 on an arbitrary element (window semantics for true power series)."""
        return x - act_on(self.iso, x)


@lru_cache(maxsize=None)
def default_context(prec2: int = 9, precU: int = 24) -> D1Context:
    """Context at the working window, sliced out of the deep solve."""
    n, m, d = DEEP_PREC
    iso = named_iso("alpha", n, m, d)
    if (prec2, precU) == (n, m):
        return D1Context(iso)
    return D1Context(truncate_iso(iso, prec2, precU))


@lru_cache(maxsize=None)
def wide_context() -> D1Context:
    n, m, d = WIDE_PREC
    return D1Context(named_iso("alpha", n, m, d))


@lru_cache(maxsize=None)
def deep_context() -> D1Context:
    n, m, d = DEEP_PREC
    return D1Context(named_iso("alpha", n, m, d))


def d1_apply(x: GradedElem, ctx: D1Context | None = None) -> GradedElem:
    ctx = ctx or default_context()
    return ctx.d1(x)


# -- the canonical generators of the target line --------------------------------------


def b_class(e: int, a: int, b: int, ctx: D1Context | None = None) -> C6Expr:
    """The generator with leading monomial (v1 v2)^e (v1^2)^a (v2^2)^b.

    Cases: an image d1(c6^e' c4^m Delta^n) when the key matches one; a divided
    image d1(c4^n)/2^(k+4) or d1(c6 c4^n)/8 on the (1, even, 0) and
    (1, odd, 0) keys; the bare monomial otherwise.
    """
    ctx = ctx or default_context()
    if e == 0 and b != 0:
        k = (b & -b).bit_length() - 1
        q = b >> k
        if q % 4 == 1:
            t = (q - 1) // 4
            rem = a - 3 * (1 << k)
            if rem >= 0 and rem % 2 in (0, 1):
                eps = rem % 2
                if rem - 3 * eps >= 0 and (rem - 3 * eps) % 2 == 0:
                    m = (rem - 3 * eps) // 2
                    n = (1 << k) * (2 * t + 1)
                    return express_in_c6_basis(ctx.d1_key(eps, m, n))
    if e == 1 and b == 0:
        if a % 2 == 0:
            n = a // 2 + 1
            k = (n & -n).bit_length() - 1
            img = ctx.d1_key(0, n, 0)
            return express_in_c6_basis(divide_by_2pow(img, k + 4))
        n = (a - 1) // 2
        img = ctx.d1_key(1, n, 0)
        return express_in_c6_basis(divide_by_2pow(img, 3))
    return C6Expr(8 * e + 4 * a + 12 * b, {(e, a, b): wint(1, ctx.prec2)})


def b_class_leading_ok(expr: C6Expr, key: tuple) -> bool:
    """Leading coefficient is a unit with residue 1; the rest sits deeper."""
    lead = expr.terms.get(key)
    if lead is None or lead.a % 2 != 1 or lead.b % 2 != 0:
        return False
    my_order = expr.leading_order(key)
    return all(
        expr.leading_order(k) > my_order for k in expr.terms if k != key
    )


# -- windowed linear algebra over the degree lines ---------------------------------------


@dataclass
class DegreeMatrix:
    """d1 in one degree, as a Z/2^N matrix in W-coordinate pairs."""

    degree: int
    g24_keys: list
    c6_keys: list
    rows: list  # 2 * len(c6_keys) rows, 2 * len(g24_keys) columns
    prec2: int


def _c6_coords(x: GradedElem, c6_keys: list) -> list[int]:
    expr = express_in_c6_basis(x)
    out = []
    for key in c6_keys:
        w = expr.terms.get(key)
        out.extend([w.a, w.b] if w is not None else [0, 0])
    return out


def degree_matrix(t: int, ctx: D1Context | None = None) -> DegreeMatrix:
    ctx = ctx or default_context()
    m = ctx.precU
    gkeys = basis_in_degree("G24", t, m)
    ckeys = basis_in_degree("C6", t, m)
    cols = []
    omega = teich_lift(2, ctx.prec2)
    for e, mm, n in gkeys:
        img = ctx.d1_key(e, mm, n)
        v1 = _c6_coords(img, ckeys)
        v2 = _c6_coords(img * omega, ckeys)
        cols.append(v1)
        cols.append(v2)
    nrows = 2 * len(ckeys)
    rows = [[col[r] for col in cols] for r in range(nrows)]
    return DegreeMatrix(t, gkeys, ckeys, rows, ctx.prec2)


def kernel_in_degree(t: int, ctx: D1Context | None = None) -> list[G24Expr]:
    """W-generators of the primitive kernel of d1 in degree t, in the window.

    Returns the nullspace vectors that survive mod 2; torsion artifacts
    2^(N-v) * e_k inherent to finite precision are filtered out, so an empty
    list certifies that no primitive element of the window dies.
    """
    ctx = ctx or default_context()
    dm = degree_matrix(t, ctx)
    if not dm.g24_keys:
        return []
    gens = linalg.nullspace(dm.rows, dm.prec2)
    out = []
    for g in gens:
        if not linalg.is_primitive(g):
            continue
        terms = {}
        for i, key in enumerate(dm.g24_keys):
            w = WittElem(g[2 * i], g[2 * i + 1], dm.prec2)
            if not w.is_zero():
                terms[key] = w
        out.append(G24Expr(t, terms))
    return out


def cokernel_order_check(e: int, a: int, b: int, j: int, ctx: D1Context | None = None) -> bool:
    """Certify that b_(e,a,b) has order exactly 2^j in the cokernel window.

    (i) 2^j * b is hit by d1 (witnessed by the defining class), and
    (ii) d1(x) = 2^(j-1) * b has no window solution at precision N-1.
    """
    ctx = ctx or default_context()
    try:
        expr = b_class(e, a, b, ctx)
    except (NotDivisible, NotInSpan):
        return False
    t = expr.degree
    dm = degree_matrix(t, ctx)
    n = dm.prec2

    target_elem = expand_c6(expr, expr.terms[next(iter(expr.terms))].prec2, ctx.precU)
    # (i) the defining witness: 2^j * b must land back in the image of d1.
    lifted = _c6_coords(target_elem, dm.c6_keys)
    full = [(x << j) % (1 << n) for x in lifted]
    if linalg.solve(dm.rows, full, n) is None:
        return False
    # (ii) windowed insolvability one step down, at the precision the divided
    # class actually carries.
    half = [(x << (j - 1)) % (1 << (n - 1)) for x in lifted]
    rows1 = [[x % (1 << (n - 1)) for x in row] for row in dm.rows]
    return linalg.solve(rows1, half, n - 1) is None


# -- the detection table --------------------------------------------------------------------


@dataclass(frozen=True)
class DetectionRecord:
    i: int
    j: int
    slot: tuple
    generator_label: str
    order: int
    computed: bool

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "slot": list(self.slot),
            "generator_label": self.generator_label,
            "order": self.order,
            "computed": self.computed,
        }


def _odd_label(s: int) -> str:
    if s == 1:
        return "eta"
    if s == 3:
        return "mu"
    if s % 4 == 1:
        e, m = 0, (s - 1) // 4
    else:
        e, m = 1, (s - 7) // 4
    parts = ["eta"]
    if e:
        parts.append("c6")
    if m:
        parts.append(f"c4^{m}" if m > 1 else "c4")
    return " ".join(parts)


def bockstein_detect(i: int, j: int, ctx: D1Context | None = None) -> DetectionRecord:
    """Locate alpha_(i/j): slot, generator label, order; engine-computed
    generators for the even-index classes hit through the divided d1 images."""
    cls = anss_chart.class_order(i, j)  # validates the index pair
    if i % 2 == 1:
        return DetectionRecord(i, j, (0, 1, 2 * i), _odd_label(i), 2, False)
    if (i, j) == (2, 2):
        return DetectionRecord(i, j, (0, 1, 4), "nu", 4, False)
    ctx = ctx or default_context()
    v = (i & -i).bit_length() - 1
    if v == 1:
        s = i // 2
        r = s - 2
    else:
        k = v - 2
        s = i >> v
        r = 2 * ((1 << k) * s - 1)
    expr = b_class(1, r, 0, ctx)
    if not b_class_leading_ok(expr, (1, r, 0)):
        raise ArithmeticError(f"generator b_(1,{r},0) failed its leading-term check")
    return DetectionRecord(i, j, (1, 0, 2 * i), f"b_{{1,{r},0}}", cls, True)


# -- verification batteries -------------------------------------------------------------------


def _case(cases, name, ok, detail=""):
    cases.append(
        {"case": name, "status": "pass" if ok else "fail", "detail": detail}
    )
    return ok


def _gamma_batch(count: int, seed: int, prec2: int) -> list[StabElem]:
    rng = random.Random(seed)
    return [random_unit(rng, prec2, a0=1, a1=0) for _ in range(count)]


def _a2_witt(gamma: StabElem, prec2: int) -> WittElem:
    return teich_lift(gamma.digits[2], prec2)


def _suite_t0t1(seed: int) -> list[dict]:
    n, m, d = FAST_PREC
    cases = []
    gammas = [("alpha", named("alpha", n))] + [
        (f"rand{i}", g) for i, g in enumerate(_gamma_batch(20, seed, n))
    ]
    u1 = USeries.u1_power(1, n, m)
    for label, g in gammas:
        iso = lift_action(g, n, m, d)
        a2 = _a2_witt(g, n)
        t0, t1 = iso.tseries[0], iso.tseries[1]
        want0 = USeries.from_witt([1 + 2 * a2], n, m)
        _case(
            cases,
            f"t0[{label}]",
            in_ideal(t0 - want0, m_power_gens(2)),
            "t0 = 1 + 2 a2 mod (2,u1)^2",
        )
        want1 = USeries.from_witt([0, a2 * a2], n, m)
        _case(
            cases,
            f"t1[{label}]",
            in_ideal(t1 - want1, [(1, 0), (0, 2)]),
            "t1 = a2^2 u1 mod (2, u1^2)",
        )
        rel = t0**4 - (t0 + u1 * t1 * t1 + u1 * u1 * t1 * t0 * t0)
        _case(cases, f"t0_quartic[{label}]", in_ideal(rel, [(1, 0)]), "t0^4 relation mod 2")
        _case(
            cases,
            f"u1_image[{label}]",
            u1_image_consistent(iso),
            "u1-image matches t0 u1 + (2/3) t1/t0",
        )
    return cases


def _suite_prop_act(seed: int) -> list[dict]:
    n, m, d = FAST_PREC
    cases = []
    gammas = [("alpha", named("alpha", n))] + [
        (f"rand{i}", g) for i, g in enumerate(_gamma_batch(10, seed + 1, n))
    ]
    c4 = modular("c4", n, m)
    c6 = modular("c6", n, m)
    v1v2 = monomial_v(1, 1, n, m)
    v13v2 = monomial_v(3, 1, n, m)
    for label, g in gammas:
        iso = lift_action(g, n, m, d)
        a2 = _a2_witt(g, n)
        scal = a2 + a2 * a2
        d4 = (act_on(iso, c4) - c4) - v1v2 * (scal * 16)
        _case(
            cases,
            f"c4[{label}]",
            in_ideal(d4, [(5, 0), (4, 2)]),
            "c4 moves by 16(a2+a2^2) v1 v2 mod (32, 16 u1^2)",
        )
        d6 = (act_on(iso, c6) - c6) - v13v2 * (scal * 8)
        _case(
            cases,
            f"c6[{label}]",
            in_ideal(d6, [(4, 0), (3, 4)]),
            "c6 moves by 8(a2+a2^2) v1^3 v2 mod (16, 8 u1^4)",
        )
    return cases


def _suite_prop_invariants(_seed: int) -> list[dict]:
    n, m, d = DEEP_PREC
    cases = []
    for label in ("alpha", "pi"):
        iso = named_iso(label, n, m, d)
        for s in (1, 3, 5, 7, 9):
            x = monomial_v(s, 0, n, m)
            _case(
                cases,
                f"(a) v1^{s}[{label}]",
                in_ideal(act_on(iso, x) - x, [(1, 0)]),
                "v1^s invariant mod 2",
            )
        x = monomial_v(2, 0, n, m)
        _case(
            cases,
            f"(b) v1^2[{label}]",
            in_ideal(act_on(iso, x) - x, [(2, 0)]),
            "v1^2 invariant mod 4",
        )
        c4 = modular("c4", n, m)
        img4 = act_on(iso, c4)
        for nn in (1, 2, 3, 4, 6):
            k = (nn & -nn).bit_length() - 1
            _case(
                cases,
                f"(c) c4^{nn}[{label}]",
                in_ideal(img4**nn - c4**nn, [(k + 4, 0)]),
                f"c4^{nn} invariant mod 2^{k + 4}",
            )
        c6 = modular("c6", n, m)
        img6 = act_on(iso, c6)
        for nn in range(5):
            _case(
                cases,
                f"(d) c6c4^{nn}[{label}]",
                in_ideal(img6 * img4**nn - c6 * c4**nn, [(3, 0)]),
                f"c6 c4^{nn} invariant mod 8",
            )
    return cases


def _suite_prop_d1diff(_seed: int) -> list[dict]:
    cases = []
    wide = wide_context()
    _case(cases, "(a) unit", wide.d1_key(0, 0, 0).is_zero(), "d1(Delta^0) = 0")
    for nn in [x for x in range(-8, 9) if x]:
        k = (abs(nn) & -abs(nn)).bit_length() - 1
        odd = nn >> k
        t = (odd - 1) // 2
        for m in range(5):
            for e in (0, 1):
                lhs = wide.d1_key(e, m, nn)
                A = 3 * (1 << k) + 2 * m + 3 * e
                B = (1 << k) * (1 + 4 * t)
                tgt = monomial_v(2 * A, 2 * B, wide.prec2, wide.precU)
                bound = 9 * (1 << k) + 4 * m + 6 * e
                ok = in_ideal(lhs - tgt, [(1, 0), (0, bound)])
                _case(
                    cases,
                    f"(a) n={nn} m={m} e={e}",
                    ok,
                    f"leading (v1^2)^{A} (v2^2)^{B} mod (2, v1^{bound})",
                )
    deep = deep_context()
    for nn in (1, 2, 3, 4, 5, 6, 8):
        k = (nn & -nn).bit_length() - 1
        lhs = deep.d1_key(0, nn, 0)
        tgt = monomial_v(4 * nn - 3, 1, deep.prec2, deep.precU) * (1 << (k + 4))
        ok = in_ideal(lhs - tgt, [(k + 5, 0), (k + 4, 4 * (nn - 1) + 2)])
        _case(
            cases,
            f"(b) n={nn}",
            ok,
            f"2^{k + 4} (v1 v2)(v1^2)^{2 * (nn - 1)} mod (2^{k + 5}, 2^{k + 4} v1^{4 * (nn - 1) + 2})",
        )
    for nn in range(6):
        lhs = deep.d1_key(1, nn, 0)
        tgt = monomial_v(4 * nn + 3, 1, deep.prec2, deep.precU) * 8
        ok = in_ideal(lhs - tgt, [(4, 0), (3, 4 * nn + 4)])
        _case(
            cases,
            f"(c) n={nn}",
            ok,
            f"8 (v1 v2)(v1^2)^{2 * nn + 1} mod (16, 8 v1^{4 * nn + 4})",
        )
    return cases


def _suite_thm_adsse(_seed: int, degree_bound: int = 96, window: int = 24) -> list[dict]:
    cases = []
    ctx = default_context(9, window)
    gens = kernel_in_degree(0, ctx)
    ok0 = (
        len(gens) == 1
        and set(gens[0].terms) == {(0, 0, 0)}
        and gens[0].terms[(0, 0, 0)].is_unit()
    )
    _case(cases, "kernel t=0", ok0, "rank one, generated by the unit")
    bad = [
        t
        for t in range(-degree_bound, degree_bound + 1, 2)
        if t and kernel_in_degree(t, ctx)
    ]
    _case(
        cases,
        "kernel t!=0",
        not bad,
        f"no primitive kernel in even degrees |t| <= {degree_bound}"
        + (f"; failures at {bad}" if bad else ""),
    )
    for r in range(10):
        if r % 2 == 1:
            j = 3
        else:
            nn = r // 2 + 1
            j = ((nn & -nn).bit_length() - 1) + 4
        _case(
            cases,
            f"order b(1,{r},0)",
            cokernel_order_check(1, r, 0, j, ctx),
            f"order 2^{j} in degree {8 + 4 * r}",
        )
    return cases


def _suite_cross_anss(_seed: int) -> list[dict]:
    cases = []
    n, m = 9, 24
    c4 = modular("c4", n, m)
    x12 = anss_chart.x1n_image(2, 1, 4)
    diff = c4.reduce(4, min(m, x12.precU)) - x12.reduce(4, min(m, x12.precU)) * 9
    _case(cases, "c4 vs 9 x_{1,2}", in_ideal(diff, [(4, 0)]), "congruent mod 16")

    ctx = default_context(9, 24)
    for cls in anss_chart.alpha_classes(2 * 24 - 1):
        rec = bockstein_detect(cls.i, cls.j, ctx)
        if cls.i % 2 == 1:
            want = (0, 1, 2 * cls.i)
        elif (cls.i, cls.j) == (2, 2):
            want = (0, 1, 4)
        else:
            want = (1, 0, 2 * cls.i)
        ok = rec.slot == want and rec.order == cls.order
        if cls.i % 2 == 0 and (cls.i, cls.j) != (2, 2):
            ok = ok and rec.computed and rec.generator_label.startswith("b_")
        _case(
            cases,
            f"detect {cls.name}",
            ok,
            f"slot {rec.slot}, {rec.generator_label}, order {rec.order}",
        )
        if cls.i % 2 == 0 and (cls.i, cls.j) != (2, 2):
            r = int(rec.generator_label.split(",")[1])
            _case(
                cases,
                f"order {cls.name}",
                cokernel_order_check(1, r, 0, cls.j, ctx),
                f"chart order 2^{cls.j} certified in the cokernel window",
            )

    e2 = anss_chart.build_e2(25)
    einf = anss_chart.apply_d3(e2)
    listed = {(c.i, c.j) for c in anss_chart.alpha_classes(25)}
    present = {e.base for e in e2.all_entries() if e.k == 0 and e.base != (0, 0)}
    _case(cases, "chart E2 complete", listed == present, "every alpha class listed")
    orders_ok = all(
        e.order == anss_chart.class_order(*e.base)
        for e in e2.all_entries()
        if e.k == 0 and e.base != (0, 0)
    )
    _case(cases, "chart E2 orders", orders_ok, "order 2^j at E2")
    s3 = einf.entries.get(3, [])
    tot3 = 1
    for e in s3:
        tot3 *= e.order
    marks3 = [mk for mk in einf.marks if mk.kind == "ext2" and mk.stem == 3]
    _case(cases, "Einf stem 3", tot3 == 8 and len(marks3) == 1, f"total order {tot3} with ext2 mark")
    s7 = einf.entries.get(7, [])
    _case(
        cases,
        "Einf stem 7",
        len(s7) == 1 and s7[0].order == 16,
        "alpha_{4/4} of order 16 survives alone",
    )
    return cases


_SUITES = {
    "t0t1": _suite_t0t1,
    "prop-act": _suite_prop_act,
    "prop-invariants": _suite_prop_invariants,
    "prop-d1diff": _suite_prop_d1diff,
    "thm-adsse": _suite_thm_adsse,
    "cross-anss": _suite_cross_anss,
}

SUITE_NAMES = tuple(sorted(_SUITES))


def verify_suite(name: str, seed: int = 0) -> dict:
    """Run one battery; the report is deterministic (cases sorted by key)."""
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; have {SUITE_NAMES}")
    cases = sorted(_SUITES[name](seed), key=lambda c: c["case"])
    return {
        "suite": name,
        "passed": all(c["status"] == "pass" for c in cases),
        "window": "all statements certified within finite (2-adic, u1, degree) windows",
        "cases": cases,
    }
