"""The deformation action solver.

For a unit gamma of the order (an automorphism of the supersingular fiber),
there is a unique pair (phi, f) with

    f = gamma-endomorphism  mod (2, u1),
    f(F^phi(x, y)) = F(f(x), f(y)),

where F is the deformation group law and F^phi substitutes phi = gamma_*(u1)
into its coefficients.  The pair is found by induction over powers of the
maximal ideal m = (2, u1): at stage n the defect of the homomorphism equation
lies in m^n, its graded pieces along the Teichmuller base-(-2) planes are
F4-vectors, and the correction (d_phi, d_f) restricted to the n-th graded
piece solves a fixed F4-linear system (the same matrix at every stage, built
from the mod-m reduction of the data).  A nontrivial nullspace or an
unsolvable stage raises SolverInconsistent; neither occurs when the window is
sane, because the pair is rigid.

From f the digit series t_0, t_1, ... are read off greedily, and they act on
E_* by gamma_*(u) = t_0 u together with the substitution u1 -> gamma_*(u1).
The extracted data always satisfies

    gamma_*(u1) = t_0 u1 + (2/3) t_1 / t_0

at full window precision, which validate_iso checks (3 is a 2-adic unit).

Composition convention: act_on(s_mul(x, y), -) agrees with
act_on(x, act_on(y, -)); chains of act_on calls are exact modulo the window
ideal (2^N, (2, u1)^M) because gamma_*(u1) has a nonzero (divisible) constant
term, so substitution into a *truncated* series loses tails in m^M.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NotAUnit, SolverInconsistent
from .fgl import (
    Fgl2,
    deformation_fgl,
    formal_digit_extract,
    gamma_endo,
    n_series,
    special_fiber_fgl,
)
from .poly import (
    PolyE,
    compose_1var,
    eval_2var,
    mono_index,
    monomials,
    teich_digit_planes,
)
from .series import GradedElem, USeries
from .stabilizer import StabElem, named, s_mul
from .witt import F4_ADD, F4_MUL

_F4_ADD = np.array(F4_ADD, dtype=np.uint8)
_F4_MUL = np.array(F4_MUL, dtype=np.uint8)
_F4_INV = (0, 1, 3, 2)


class _F4Solver:
    """Row-reduced solver for the stage systems over F4.

    The model is rigid up to a window artifact: the columns of the pure
    Frobenius directions x^(2^i) vanish identically once 4 * 2^i exceeds the
    degree window (their obstruction lives at total degree 4 * 2^i), because
    the nonlinear part of the fiber law carries only even exponents.  Such
    zero columns are tolerated and the canonical solution sets them to zero;
    they cannot feed back into the u1-image or the low digit series, whose
    rows only the first three columns reach.  Any other deficiency is a
    genuine inconsistency.
    """

    def __init__(self, cols):
        A = np.stack(cols, axis=1).astype(np.uint8)
        nrows, ncols = A.shape
        aug = np.concatenate(
            [A, np.eye(nrows, dtype=np.uint8)], axis=1
        )
        r = 0
        pivot_of_col = {}
        for c in range(ncols):
            nz = np.nonzero(aug[r:, c])[0]
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                aug[[r, p]] = aug[[p, r]]
            aug[r] = _F4_MUL[_F4_INV[aug[r, c]], aug[r]]
            col = np.array(aug[:, c])
            col[r] = 0
            for i in np.nonzero(col)[0]:
                aug[i] = _F4_ADD[aug[i], _F4_MUL[col[i], aug[r]]]
            pivot_of_col[c] = r
            r += 1
        for c in range(ncols):
            if c in pivot_of_col:
                continue
            if c < 3 or A[:, c].any():
                raise SolverInconsistent(
                    f"stage system is rank-deficient in column {c};"
                    " the window is too small or the model is wrong"
                )
        T = aug[:, ncols:]
        self.t1 = (T & 1).astype(np.uint8)
        self.t2 = (T >> 1).astype(np.uint8)
        self.ncols = ncols
        self.pivot_cols = np.array(sorted(pivot_of_col), dtype=np.int64)
        self.pivot_rows = np.array(
            [pivot_of_col[c] for c in self.pivot_cols], dtype=np.int64
        )
        free = np.ones(nrows, dtype=bool)
        free[self.pivot_rows] = False
        self.check_rows = np.nonzero(free)[0]

    def transform(self, b: np.ndarray) -> np.ndarray:
        """Apply the recorded row operations to a right-hand side."""
        b1 = (b & 1).astype(np.uint8)
        b2 = (b >> 1).astype(np.uint8)
        p1 = np.bitwise_xor.reduce((self.t1 & b1) ^ (self.t2 & b2), axis=1)
        p2 = np.bitwise_xor.reduce(
            (self.t1 & b2) ^ (self.t2 & (b1 ^ b2)), axis=1
        )
        return (p1 | (p2 << 1)).astype(np.uint8)

    def solve_reduced(self, y: np.ndarray) -> np.ndarray:
        if y[self.check_rows].any():
            raise SolverInconsistent("stage system has no solution")
        out = np.zeros(self.ncols, dtype=np.uint8)
        out[self.pivot_cols] = y[self.pivot_rows]
        return out

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self.solve_reduced(self.transform(b))


@dataclass
class StarIso:
    """The computed action data of one gamma.

    tseries holds [t_0 .. t_3] when the x-degree window allows the full
    extraction (D >= 8); narrower windows hold the extractable prefix.
    """

    gamma: StabElem
    u1_image: USeries
    f: PolyE
    tseries: tuple
    remainder: PolyE
    prec: tuple

    @property
    def t0(self) -> USeries:
        return self.tseries[0]


def _teich_int(tag: int, shift: int, mod: int) -> tuple[int, int]:
    if tag == 0:
        return 0, 0
    if tag == 1:
        return (1 << shift) % mod, 0
    if tag == 2:
        return 0, (1 << shift) % mod
    return (-(1 << shift)) % mod, (-(1 << shift)) % mod


def _defect(F: Fgl2, phi: USeries, f: PolyE) -> PolyE:
    A = F.poly.substitute_u1(phi)
    lhs = compose_1var(f, A)
    rhs = eval_2var(F.poly, f.embed(2, (0,)), f.embed(2, (1,)))
    return lhs - rhs


def _two_series_residual(F: Fgl2, phi: USeries, f: PolyE) -> PolyE:
    """f([2]_{F^phi}(x)) - [2]_F(f(x)); zero for a true homomorphism."""
    two = n_series(F, 2)
    return compose_1var(f, two.substitute_u1(phi)) - compose_1var(two, f)


def _stage_solver(F: Fgl2, fbar: PolyE, rows: np.ndarray) -> _F4Solver:
    d = F.deg
    Fb = special_fiber_fgl(d)
    x2 = fbar.embed(2, (0,))
    y2 = fbar.embed(2, (1,))
    P1 = eval_2var(Fb.poly.derivative(0), x2, y2)
    P2 = eval_2var(Fb.poly.derivative(1), x2, y2)
    # column of the u1-image correction: f'(F) * (dF/du1 mod m)
    fd_at_F = compose_1var(fbar.derivative(0), Fb.poly)
    gbar = F.du1().mod2u1()
    colphi = fd_at_F * gbar
    fpows = Fb.poly.pow_list(d)
    cols = [colphi.tags()[rows]]
    for j in range(1, d + 1):
        cj = fpows[j] - P1.mul_monomial((j, 0)) - P2.mul_monomial((0, j))
        cols.append(cj.tags()[rows])
    return _F4Solver(cols)


class _FreeDirData:
    """Bookkeeping for the window-free Frobenius directions x^g (4g > D).

    A correction c * 2^a u1^b x^g has an identically zero column in the
    stage system of its own level; one level up it feeds the defect inside
    the image of the stage system (so the pinned sweep silently absorbs it)
    and feeds the 2-series residual visibly.  Per free degree this records:

    - resp10/resp01: the pinned corrections the sweep absorbs, i.e. the
      stage solutions of the next-level defect pieces of
      C_g = (F^phi)^g - d1F(f,f) x^g - d2F(f,f) y^g (2-part and u1-part);
    - k10/k01: the matching graded pieces of K_g = ([2]^phi)^g - [2]'(f) x^g,
      the 2-series sensitivity (the 2-part diagonal (2^g - 2)/2 is odd);
    - jphi: the mod-m sensitivity of the 2-series residual to the u1-image,
      f'([2]) * d[2]/du1, through which the absorbed corrections leak back.

    The measured residual column is then k + jphi * resp_phi, and solving it
    recovers the previous level's true choices, after which the absorbed
    pinned corrections are backed out (F4-addition; digit carries are
    cleaned up by later stages).
    """

    def __init__(self, F: Fgl2, phi: USeries, f: PolyE, free_degs, rows, solver):
        n = F.prec2
        A = F.poly.substitute_u1(phi)
        fx = f.embed(2, (0,))
        fy = f.embed(2, (1,))
        P1 = eval_2var(F.poly.derivative(0), fx, fy)
        P2 = eval_2var(F.poly.derivative(1), fx, fy)
        two = n_series(F, 2)
        two_phi = two.substitute_u1(phi)
        dtwo_at_f = compose_1var(two.derivative(0), f)
        fbar = f.mod2u1()
        two_bar = two.mod2u1()
        self.jphi = (
            compose_1var(fbar.derivative(0), two_bar)
            * two.derivative_u1().mod2u1()
        ).tags()
        pw = {1: A}
        pw2 = {1: two_phi}
        g = 1
        while g < max(free_degs):
            pw[2 * g] = pw[g] * pw[g]
            pw2[2 * g] = pw2[g] * pw2[g]
            g *= 2
        self.data = {}
        for g in free_degs:
            C = pw[g] - P1.mul_monomial((g, 0)) - P2.mul_monomial((0, g))
            cpl = teich_digit_planes(C.coeffs, n)
            K = pw2[g] - dtwo_at_f.mul_monomial((g,))
            kpl = teich_digit_planes(K.coeffs, n)
            if cpl[rows, 0, 0].any() or kpl[:, 0, 0].any():
                raise SolverInconsistent("free direction escapes the filtration")
            out = {}
            for shift, cvec, kvec in (
                ("2", cpl[rows, 0, 1], kpl[:, 0, 1]),
                (
                    "u1",
                    cpl[rows, 1, 0] if C.precU > 1 else None,
                    kpl[:, 1, 0] if K.precU > 1 else None,
                ),
            ):
                if cvec is None:
                    out[shift] = None
                    continue
                y = solver.transform(cvec)
                if y[solver.check_rows].any():
                    raise SolverInconsistent(
                        "free direction is not absorbed by the stage system"
                    )
                out[shift] = (solver.solve_reduced(y), kvec)
            self.data[g] = out

    def column(self, g: int, shift: str, xdeg: int):
        """Residual column entry at an x-row: K-part plus the u1-image leak."""
        resp, kvec = self.data[g][shift]
        return _F4_ADD[kvec[xdeg], _F4_MUL[self.jphi[xdeg], resp[0]]]


def _solve_f4_rows(rows, rhs, ncols: int):
    """Small dense F4 solve; unpinned unknowns must carry zero columns."""
    if not rows or ncols == 0:
        return np.zeros(ncols, dtype=np.uint8)
    A = np.array(rows, dtype=np.uint8).reshape(len(rows), ncols)
    b = np.array(rhs, dtype=np.uint8)
    nr, nc = A.shape
    aug = np.concatenate([A, b[:, None]], axis=1)
    r = 0
    piv = {}
    for c in range(nc):
        nz = np.nonzero(aug[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            aug[[r, p]] = aug[[p, r]]
        aug[r] = _F4_MUL[_F4_INV[aug[r, c]], aug[r]]
        col = np.array(aug[:, c])
        col[r] = 0
        for i in np.nonzero(col)[0]:
            aug[i] = _F4_ADD[aug[i], _F4_MUL[col[i], aug[r]]]
        piv[c] = r
        r += 1
    if aug[r:, nc].any():
        raise SolverInconsistent("2-series rows are inconsistent")
    for c in range(nc):
        if c not in piv and A[:, c].any():
            raise SolverInconsistent("2-series rows underdetermine a visible choice")
    out = np.zeros(nc, dtype=np.uint8)
    for c, rr in piv.items():
        out[c] = aug[rr, nc]
    return out


_ISO_CACHE: dict = {}


def lift_action(gamma: StabElem, prec2: int, precU: int, xdeg: int) -> StarIso:
    """Solve for (gamma_*(u1), f_gamma) and extract the digit series."""
    key = (gamma.digits, gamma.precT, prec2, precU, xdeg)
    hit = _ISO_CACHE.get(key)
    if hit is not None:
        return hit
    if not gamma.is_unit():
        raise NotAUnit("only units act on the deformation ring")
    n, m, d = prec2, precU, xdeg
    for i in range(2, d.bit_length() + 1):
        g = 1 << i
        if g <= d and 4 * g > d and 2 * g + 2 <= d:
            # the free direction x^g would feed its square back into the
            # stage rows before the 2-series rows can resolve it
            raise WindowOverflow(
                f"x-degree window {d} is unsafe (use one of 8, 9, 16, 17, 32, 33)"
            )
    F = deformation_fgl(n, m, d)
    fbar = gamma_endo(gamma.digits, d)

    mono1 = monomials(1, d)
    idx2 = mono_index(2, d)
    rows = np.array(
        [idx2[mo] for mo in monomials(2, d) if mo[0] >= 1 and mo[1] >= 1],
        dtype=np.int64,
    )
    solver = _stage_solver(F, fbar, rows)
    free_degs = [c for c in range(1, d + 1) if c not in set(solver.pivot_cols)]

    mod = 1 << n
    phi_arr = np.zeros((m, 2), dtype=np.int64)
    f_arr = np.zeros((len(mono1), m, 2), dtype=np.int64)
    ftags = fbar.tags()
    for i, tag in enumerate(ftags):
        f_arr[i, 0, 0], f_arr[i, 0, 1] = _teich_int(tag, 0, mod)

    lev = np.arange(m)[:, None] + np.arange(n)[None, :]  # (u1-order, 2-digit)
    pending = []
    freedata = None

    def _apply(arrs, idx, a, b, tag):
        ca, cb = _teich_int(int(tag), a, mod)
        arrs[idx][b, 0] = (arrs[idx][b, 0] + ca) % mod
        arrs[idx][b, 1] = (arrs[idx][b, 1] + cb) % mod

    arrs = [phi_arr] + [f_arr[j] for j in range(1, len(mono1))]  # arrs[j] = x^j row

    def _apply_stage_solution(a, b, sol):
        if sol[0]:
            _apply(arrs, 0, a, b, sol[0])
        for j in range(1, d + 1):
            if sol[j]:
                _apply(arrs, j, a, b, sol[j])

    for stage in range(1, n + m - 1):
        phi = USeries(np.array(phi_arr), n, _canonical=True)
        f = PolyE(1, d, n, np.array(f_arr), _canonical=True)
        defect = _defect(F, phi, f)
        if defect.is_zero() and _two_series_residual(F, phi, f).is_zero():
            pending = []
            break
        planes = teich_digit_planes(defect.coeffs, n)
        if planes[:, lev < stage].any():
            raise SolverInconsistent(
                f"defect escaped the filtration at stage {stage}"
            )
        slots = [
            (a, stage - a)
            for a in range(min(stage, n - 1) + 1)
            if stage - a < m
        ]
        # pinned sweep; invisible contributions from the previous level's
        # free choices are absorbed here and backed out below
        absorbed = {}
        for a, b in slots:
            y = solver.transform(planes[rows, b, a])
            if not y.any():
                continue
            sol = solver.solve_reduced(y)
            absorbed[(a, b)] = sol
            _apply_stage_solution(a, b, sol)
        if pending and free_degs:
            if freedata is None:
                # the state is exact mod m^2 from stage 2 on, which is all
                # the graded column data depends on
                freedata = _FreeDirData(F, phi, f, free_degs, rows, solver)
            phi = USeries(np.array(phi_arr), n, _canonical=True)
            f = PolyE(1, d, n, np.array(f_arr), _canonical=True)
            r2 = _two_series_residual(F, phi, f)
            planes2 = teich_digit_planes(r2.coeffs, n)
            if planes2[:, lev < stage].any():
                raise SolverInconsistent(
                    f"2-series residual escaped the filtration at stage {stage}"
                )
            unknowns = [(p, g) for p in pending for g in free_degs]
            targets = {
                (pa + 1, pb): "2" for (pa, pb) in pending if pa + 1 < n
            }
            targets.update(
                ((pa, pb + 1), "u1") for (pa, pb) in pending if pb + 1 < m
            )
            eq_rows, eq_rhs = [], []
            for al, be in sorted(targets):
                for deg in range(1, d + 1):
                    row = []
                    for (pa, pb), g in unknowns:
                        if (al, be) == (pa + 1, pb):
                            row.append(int(freedata.column(g, "2", deg)))
                        elif (al, be) == (pa, pb + 1) and freedata.data[g]["u1"]:
                            row.append(int(freedata.column(g, "u1", deg)))
                        else:
                            row.append(0)
                    eq_rows.append(row)
                    eq_rhs.append(int(planes2[deg, be, al]))
            sol = _solve_f4_rows(eq_rows, eq_rhs, len(unknowns))
            for ((pa, pb), g), c in zip(unknowns, sol):
                if not c:
                    continue
                # place the recovered choice and back out what the pinned
                # sweep absorbed in its stead (F4-addition undoes mod 2^N
                # up to digit carries, which later stages clean up)
                _apply(arrs, g, pa, pb, c)
                for (al, be), shift in (
                    ((pa + 1, pb), "2"),
                    ((pa, pb + 1), "u1"),
                ):
                    if al >= n or be >= m or freedata.data[g][shift] is None:
                        continue
                    resp = freedata.data[g][shift][0]
                    undo = _F4_MUL[c, resp]
                    if undo.any():
                        _apply_stage_solution(al, be, undo)
        pending = slots

    phi = USeries(phi_arr, n, _canonical=True)
    f = PolyE(1, d, n, f_arr, _canonical=True)
    if not _defect(F, phi, f).is_zero():
        raise SolverInconsistent("homomorphism equation not satisfied at window")
    if not _two_series_residual(F, phi, f).is_zero():
        raise SolverInconsistent("2-series relation not satisfied at window")

    r = min(4, d.bit_length())  # extract t_i while 2^i <= d
    ts, rem = formal_digit_extract(f, F, r)
    iso = StarIso(gamma, phi, f, tuple(ts), rem, (n, m, d))
    _ISO_CACHE[key] = iso
    return iso


def named_iso(tag: str, prec2: int, precU: int, xdeg: int) -> StarIso:
    return lift_action(named(tag, prec2), prec2, precU, xdeg)


def truncate_iso(iso: StarIso, prec2: int, precU: int) -> StarIso:
    """Restrict an iso to a smaller window (truncations stay exact)."""
    return StarIso(
        iso.gamma,
        iso.u1_image.reduce(prec2, precU),
        iso.f.reduce(prec2, precU),
        tuple(t.reduce(prec2, precU) for t in iso.tseries),
        iso.remainder.reduce(prec2, precU),
        (prec2, precU, iso.prec[2]),
    )


# -- the induced maps on E_* -------------------------------------------------------


def act_on(iso: StarIso, x: GradedElem) -> GradedElem:
    """gamma_*(x): substitute u1 -> gamma_*(u1) and scale by t_0^(-t/2)."""
    s = x.series
    n = min(s.prec2, iso.u1_image.prec2)
    m = min(s.precU, iso.u1_image.precU)
    sub = s.reduce(n, m).substitute(iso.u1_image.reduce(n, m))
    e = -x.degree // 2
    return GradedElem(sub * (iso.t0.reduce(n, m) ** e), x.degree)


def galois_act(x: GradedElem) -> GradedElem:
    """Coefficientwise Frobenius; u1 and u are fixed.  An involution."""
    return x.frobenius()


def act_compose(x: StabElem, y: StabElem, e: GradedElem, prec) -> tuple:
    """(act(xy, e), act(x, act(y, e))) at a common precision profile."""
    n, m, d = prec
    exy = act_on(lift_action(s_mul(x, y), n, m, d), e)
    ex = act_on(lift_action(x, n, m, d), act_on(lift_action(y, n, m, d), e))
    return exy, ex


# -- consistency checks and fixtures ----------------------------------------------


def validate_iso(iso: StarIso) -> None:
    """Re-check the defining equations of a StarIso; raises on any failure."""
    n, m, d = iso.prec
    F = deformation_fgl(n, m, d)
    if iso.f.mod2u1() != gamma_endo(iso.gamma.digits, d):
        raise SolverInconsistent("f does not reduce to the fiber endomorphism")
    if not _defect(F, iso.u1_image, iso.f).is_zero():
        raise SolverInconsistent("homomorphism equation fails")
    ts, rem = formal_digit_extract(iso.f, F, len(iso.tseries))
    if tuple(ts) != tuple(iso.tseries) or rem != iso.remainder:
        raise SolverInconsistent("digit series do not match f")
    if not u1_image_consistent(iso):
        raise SolverInconsistent("u1-image fails the t-series consistency law")


def u1_image_consistent(iso: StarIso) -> bool:
    """gamma_*(u1) = t_0 u1 + (2/3) t_1 / t_0 at full window precision."""
    n = iso.u1_image.prec2
    t0, t1 = iso.tseries[0], iso.tseries[1]
    scal = (2 * pow(3, -1, 1 << n)) % (1 << n)
    rhs = t0.shift_u1(1) + (t1 * t0.invert()) * scal
    return rhs == iso.u1_image


def iso_to_json(iso: StarIso) -> dict:
    n, m, d = iso.prec
    return {
        "gamma": iso.gamma.to_json(),
        "prec": {"prec2": n, "precU": m, "xdeg": d},
        "u1_image": iso.u1_image.to_json(),
        "tseries": [t.to_json() for t in iso.tseries],
        "f": [iso.f.coeff((j,)).to_json() for j in range(d + 1)],
        "remainder": [iso.remainder.coeff((j,)).to_json() for j in range(d + 1)],
    }


def iso_from_json(data: dict, validate: bool = True) -> StarIso:
    n = data["prec"]["prec2"]
    m = data["prec"]["precU"]
    d = data["prec"]["xdeg"]
    gamma = StabElem.from_json(data["gamma"])

    def poly_from(rows):
        c = np.zeros((len(monomials(1, d)), m, 2), dtype=np.int64)
        for j, row in enumerate(rows):
            s = USeries.from_json(row, prec2=n, precU=m)
            c[j] = s.coeffs
        return PolyE(1, d, n, c)

    iso = StarIso(
        gamma,
        USeries.from_json(data["u1_image"], prec2=n, precU=m),
        poly_from(data["f"]),
        tuple(USeries.from_json(t, prec2=n, precU=m) for t in data["tseries"]),
        poly_from(data["remainder"]),
        (n, m, d),
    )
    if validate:
        validate_iso(iso)
    return iso


def fixture_path(root, tag: str, prec) -> Path:
    n, m, d = prec
    return Path(root) / f"stariso_{tag}_N{n}_M{m}_D{d}.json"


def save_fixture(iso: StarIso, path) -> None:
    Path(path).write_text(json.dumps(iso_to_json(iso), indent=1, sort_keys=False))


def load_fixture(path, validate: bool = True) -> StarIso:
    return iso_from_json(json.loads(Path(path).read_text()), validate=validate)
