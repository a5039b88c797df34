"""The alpha-family chart: classes, x_{1,n} images, d3, and emission.

Index law for the classes alpha_{i/j} (stem 2i-1, filtration 1, order 2^j):
j = 1 for odd i; (i, j) = (2, 2); and j = n + 2 when i = 2^n s with s odd and
either n >= 2, or n = 1 with s >= 3.  Multiples alpha_1^k alpha_{i/j} are
nonzero for all k >= 0 except alpha_1 alpha_{2/2} = 0.

The two d3 rules are applied verbatim and are alpha_1-linear:

    d3(alpha_{i/1}) = alpha_1^3 alpha_{(i-2)/1}        i = 3 mod 4
    d3(alpha_{i/3}) = alpha_1^3 alpha_{(i-2)/(n+2)}    n = v_2(i - 2)

(the case often quoted as d3(alpha_1) = alpha_1^4 is the first rule at i = 3,
since the stems only line up that way).  Sources of order 8 retain their
index-2 kernel; order-2 sources and all targets die.  Exotic 2-extension
marks on the settled page are data keyed to the stems = 3 mod 8, matching the
final-page chart; they are emitted, not derived.

Order 0 in a chart entry encodes a free Z2 summand (the unit in stem 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NegativePowerSurvives
from .series import GradedElem, USeries


def class_order(i: int, j: int) -> int:
    """Order 2^j of alpha_{i/j}; raises on an invalid index pair."""
    if i < 1:
        raise ValueError(f"alpha index i must be positive, got {i}")
    if i % 2 == 1:
        if j != 1:
            raise ValueError(f"odd index {i} forces j = 1, got {j}")
        return 2
    if (i, j) == (2, 2):
        return 4
    n = (i & -i).bit_length() - 1
    s = i >> n
    if n == 1 and s < 3:
        raise ValueError("i = 2 admits only alpha_{2/2}")
    if j != n + 2:
        raise ValueError(f"i = 2^{n}*{s} forces j = {n + 2}, got {j}")
    return 1 << j


@dataclass(frozen=True)
class AlphaClass:
    i: int
    j: int
    stem: int
    filtration: int
    order: int
    name: str


def _name(i: int, j: int) -> str:
    return f"alpha_{{{i}/{j}}}"


def alpha_classes(max_stem: int) -> list[AlphaClass]:
    """All valid alpha_{i/j} with stem 2i - 1 <= max_stem."""
    out = []
    i = 1
    while 2 * i - 1 <= max_stem:
        if i % 2 == 1:
            j = 1
        elif i == 2:
            j = 2
        else:
            n = (i & -i).bit_length() - 1
            s = i >> n
            if n == 1 and s < 3:
                i += 1
                continue
            j = n + 2
        out.append(AlphaClass(i, j, 2 * i - 1, 1, class_order(i, j), _name(i, j)))
        i += 1
    return out


# -- the chromatic elements x_{1,n} ------------------------------------------------


def _x1n_laurent(n: int) -> dict:
    """x_{1,n} as a Laurent polynomial {(v1-exp, v2-exp): int coeff}."""
    if n == 0:
        return {(1, 0): 1}
    if n == 1:
        return {(2, 0): 1, (-1, 1): -4}
    if n == 2:
        return {(4, 0): 1, (1, 1): -8}
    prev = _x1n_laurent(n - 1)
    return _laurent_mul(prev, prev)


def _laurent_mul(x: dict, y: dict) -> dict:
    out = {}
    for (a1, b1), c1 in x.items():
        for (a2, b2), c2 in y.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def x1n_image(n: int, s: int, w: int) -> GradedElem:
    """The image of x_{1,n}^s in E_* / 2^w (degree 2^(n+1) s).

    Negative v1-powers must die at the modulus; otherwise the element does
    not land in the graded ring and NegativePowerSurvives is raised.  The
    mod-2 image is always v1^(2^n s).
    """
    if s < 1 or s % 2 == 0:
        raise ValueError("the exponent s must be odd and positive")
    acc = {(0, 0): 1}
    base = _x1n_laurent(n)
    for _ in range(s):
        acc = _laurent_mul(acc, base)
    deg = (1 << (n + 1)) * s
    mod = 1 << w
    top = 0
    for (e1, e2), c in acc.items():
        if 2 * e1 + 6 * e2 != deg:
            raise AssertionError("x_{1,n} power is not homogeneous")
        if c % mod == 0:
            continue
        if e1 < 0:
            raise NegativePowerSurvives(
                f"coefficient {c} on v1^{e1} v2^{e2} is nonzero mod 2^{w}"
            )
        top = max(top, e1)
    series = USeries.zeros(w, top + 1)
    arr = series.coeffs.copy()
    arr.flags.writeable = True
    for (e1, _e2), c in acc.items():
        if c % mod:
            arr[e1, 0] = c % mod
    return GradedElem(USeries(arr, w), deg)


# -- chart pages ----------------------------------------------------------------------


@dataclass(frozen=True)
class ChartEntry:
    stem: int
    filtration: int
    name: str
    order: int  # 0 encodes a Z2 summand
    base: tuple
    k: int


@dataclass(frozen=True)
class ChartMark:
    kind: str  # "d3" or "ext2"
    stem: int
    source: str
    target: str


@dataclass
class ChartPage:
    page: str
    max_stem: int
    entries: dict = field(default_factory=dict)
    marks: list = field(default_factory=list)

    def all_entries(self):
        for stem in sorted(self.entries):
            yield from sorted(
                self.entries[stem], key=lambda e: (e.filtration, e.name)
            )

    def add(self, e: ChartEntry):
        self.entries.setdefault(e.stem, []).append(e)


def entry_name(base: tuple, k: int) -> str:
    i, j = base
    if base == (0, 0):
        return "1"
    if base == (1, 1):
        return "alpha_1" if k == 0 else f"alpha_1^{k + 1}"
    b = _name(i, j)
    if k == 0:
        return b
    if k == 1:
        return f"alpha_1 {b}"
    return f"alpha_1^{k} {b}"


def _d3_target(base: tuple, k: int):
    """(target base, target k) of the d3 on alpha_1^k alpha_base, or None."""
    i, j = base
    if j == 1 and i % 4 == 3:
        if i - 2 == 1:
            return ((1, 1), k + 3)
        return ((i - 2, 1), k + 3)
    if j == 3:
        n = ((i - 2) & -(i - 2)).bit_length() - 1
        return ((i - 2, n + 2), k + 3)
    return None


def build_e2(max_stem: int) -> ChartPage:
    page = ChartPage("E2", max_stem)
    if max_stem < 1:
        return page  # nothing of the family in range; emit headers only
    page.add(ChartEntry(0, 0, "1", 0, (0, 0), 0))
    for cls in alpha_classes(max_stem):
        base = (cls.i, cls.j)
        k = 0
        while cls.stem + k <= max_stem:
            if base == (2, 2) and k >= 1:
                break  # alpha_1 alpha_{2/2} = 0
            order = cls.order if k == 0 else 2
            page.add(
                ChartEntry(cls.stem + k, 1 + k, entry_name(base, k), order, base, k)
            )
            k += 1
    for e in list(page.all_entries()):
        tgt = _d3_target(e.base, e.k)
        if tgt is not None:
            page.marks.append(
                ChartMark("d3", e.stem, e.name, entry_name(tgt[0], tgt[1]))
            )
    page.marks.sort(key=lambda mk: (mk.stem, mk.source))
    return page


def apply_d3(page: ChartPage) -> ChartPage:
    """Settle the chart: kill d3 targets, cut sources to their kernels."""
    index = {(e.base, e.k): e for e in page.all_entries()}
    killed = set()
    reduced = {}
    for key, e in index.items():
        tgt = _d3_target(e.base, e.k)
        if tgt is None:
            continue
        if tgt in index:
            killed.add(tgt)
        if e.order > 2:
            reduced[key] = e.order // 2
        else:
            killed.add(key)
    out = ChartPage("Einf", page.max_stem)
    for e in page.all_entries():
        key = (e.base, e.k)
        if key in killed:
            continue
        order = reduced.get(key, e.order)
        out.add(ChartEntry(e.stem, e.filtration, e.name, order, e.base, e.k))
    out.marks = list(page.marks)
    for stem in range(3, page.max_stem + 1, 8):
        t = (stem - 3) // 8
        src = entry_name((1, 1), 2) if t == 0 else entry_name((4 * t + 1, 1), 2)
        tgt = entry_name((2, 2), 0) if t == 0 else entry_name((4 * t + 2, 3), 0)
        out.marks.append(ChartMark("ext2", stem, src, tgt))
    out.marks.sort(key=lambda mk: (mk.kind, mk.stem, mk.source))
    return out


# -- emission ------------------------------------------------------------------------------


def _order_str(order: int) -> str:
    return "Z2" if order == 0 else str(order)


def emit_chart(page: ChartPage, fmt: str) -> str:
    if fmt == "tsv":
        lines = ["stem\tfiltration\tname\torder\tpage"]
        for e in page.all_entries():
            lines.append(
                f"{e.stem}\t{e.filtration}\t{e.name}\t{_order_str(e.order)}\t{page.page}"
            )
        for mk in page.marks:
            lines.append(
                f"{mk.stem}\t{mk.kind}\t{mk.source}->{mk.target}\t\t{page.page}"
            )
        return "\n".join(lines) + "\n"
    if fmt == "json":
        import json

        return json.dumps(
            {
                "page": page.page,
                "max_stem": page.max_stem,
                "entries": [
                    {
                        "stem": e.stem,
                        "filtration": e.filtration,
                        "name": e.name,
                        "order": e.order,
                    }
                    for e in page.all_entries()
                ],
                "marks": [
                    {
                        "kind": mk.kind,
                        "stem": mk.stem,
                        "source": mk.source,
                        "target": mk.target,
                    }
                    for mk in page.marks
                ],
            },
            indent=1,
        )
    if fmt == "svg":
        return _emit_svg(page)
    raise ValueError(f"unknown chart format {fmt!r}")


def _emit_svg(page: ChartPage) -> str:
    """Static grid render: squares are Z2, a dot with j-1 rings is Z/2^j."""
    cell = 28
    maxf = max((e.filtration for e in page.all_entries()), default=1) + 1
    width = (page.max_stem + 2) * cell
    height = (maxf + 2) * cell
    pos = {}

    def xy(stem, fil):
        return (stem + 1) * cell, height - (fil + 1.5) * cell

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="4" y="14" font-size="12">{page.page} (stems 0..{page.max_stem})</text>',
    ]
    for s in range(page.max_stem + 1):
        x, _ = xy(s, 0)
        parts.append(
            f'<text x="{x - 3}" y="{height - 6}" font-size="9">{s}</text>'
        )
    for e in page.all_entries():
        x, y = xy(e.stem, e.filtration)
        pos[e.name] = (x, y)
        if e.order == 0:
            parts.append(
                f'<rect x="{x - 4}" y="{y - 4}" width="8" height="8" fill="black">'
                f"<title>{e.name}</title></rect>"
            )
        else:
            parts.append(
                f'<circle cx="{x}" cy="{y}" r="2.2" fill="black">'
                f"<title>{e.name} (Z/{e.order})</title></circle>"
            )
            rings = max(0, e.order.bit_length() - 2)
            for r in range(rings):
                parts.append(
                    f'<circle cx="{x}" cy="{y}" r="{4.5 + 2 * r}" fill="none" '
                    'stroke="black" stroke-width="0.8"/>'
                )
    for mk in page.marks:
        a = pos.get(mk.source)
        b = pos.get(mk.target)
        if a is None or b is None:
            continue
        dash = ' stroke-dasharray="3,2"' if mk.kind == "ext2" else ""
        parts.append(
            f'<line x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" '
            f'stroke="black" stroke-width="0.8"{dash}/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
