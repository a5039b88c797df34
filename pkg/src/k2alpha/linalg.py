"""Kernel and solvability computations over Z/2^N.

Gaussian elimination fails over Z/2^N because 2 is a zero divisor; the
valuation-pivot reduction below produces U A V = S with U, V invertible and S
diagonal with 2-power entries, which is the canonical-form data needed here:
complete nullspaces, membership of a vector in the column span, and explicit
solutions.  Pivot selection scans for the globally minimal 2-adic valuation
in reading order, so the output is deterministic.

Entries are Python ints canonical in [0, 2^N).  At finite precision the
nullspace always contains torsion artifacts 2^(N-v) * (column combination);
callers that certify injectivity therefore filter for *primitive* generators
(nonzero mod 2), which are exactly the kernel vectors that lift.
"""

from __future__ import annotations


def _val2(x: int, n: int) -> int:
    if x == 0:
        return n
    v = 0
    while not x & 1:
        x >>= 1
        v += 1
    return min(v, n)


def diagonalize(A: list[list[int]], n: int):
    """Return (U, V, S, vals) with U A V = S diagonal, diag entries 2^v or 0.

    U is rows x rows, V is cols x cols, both invertible mod 2^n; vals lists
    the pivot valuations in order (vals[i] = n encodes a zero diagonal).
    """
    mod = 1 << n
    nr = len(A)
    nc = len(A[0]) if nr else 0
    S = [[x % mod for x in row] for row in A]
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]
    vals = []
    for pos in range(min(nr, nc)):
        best = None
        bestv = n
        for i in range(pos, nr):
            for j in range(pos, nc):
                v = _val2(S[i][j], n)
                if v < bestv:
                    bestv, best = v, (i, j)
                    if v == 0:
                        break
            if bestv == 0:
                break
        if best is None:
            vals.extend([n] * (min(nr, nc) - pos))
            break
        bi, bj = best
        if bi != pos:
            S[bi], S[pos] = S[pos], S[bi]
            U[bi], U[pos] = U[pos], U[bi]
        if bj != pos:
            for row in S:
                row[bj], row[pos] = row[pos], row[bj]
            for row in V:
                row[bj], row[pos] = row[pos], row[bj]
        piv = S[pos][pos]
        unit = piv >> bestv
        uinv = pow(unit, -1, mod)
        S[pos] = [(x * uinv) % mod for x in S[pos]]
        U[pos] = [(x * uinv) % mod for x in U[pos]]
        pw = 1 << bestv
        for i in range(nr):
            if i == pos:
                continue
            q = S[i][pos] // pw  # exact: bestv is the minimal valuation
            if S[i][pos] % pw:
                raise AssertionError("pivot was not minimal")
            if q:
                S[i] = [(x - q * y) % mod for x, y in zip(S[i], S[pos])]
                U[i] = [(x - q * y) % mod for x, y in zip(U[i], U[pos])]
        for j in range(nc):
            if j == pos:
                continue
            q = S[pos][j] // pw
            if q:
                for row in S:
                    row[j] = (row[j] - q * row[pos]) % mod
                for row in V:
                    row[j] = (row[j] - q * row[pos]) % mod
        vals.append(bestv)
    return U, V, S, vals


def nullspace(A: list[list[int]], n: int) -> list[list[int]]:
    """Generators of {x : A x = 0 mod 2^n} (complete, deterministic order)."""
    mod = 1 << n
    nr = len(A)
    nc = len(A[0]) if nr else 0
    if nc == 0:
        return []
    if nr == 0:
        return [[int(i == j) for i in range(nc)] for j in range(nc)]
    _, V, _, vals = diagonalize(A, n)
    gens = []
    for i in range(nc):
        v = vals[i] if i < len(vals) else n
        if v == 0:
            continue
        scale = 1 << (n - v)
        gens.append([(V[r][i] * scale) % mod for r in range(nc)])
    return gens


def solve(A: list[list[int]], c: list[int], n: int):
    """One solution of A x = c mod 2^n, or None when the system is unsolvable."""
    mod = 1 << n
    nr = len(A)
    nc = len(A[0]) if nr else 0
    U, V, _, vals = diagonalize(A, n)
    y = [sum(U[i][k] * c[k] for k in range(nr)) % mod for i in range(nr)]
    xp = [0] * nc
    for i in range(nr):
        v = vals[i] if i < len(vals) else n
        if i < min(nr, nc) and v < n:
            if y[i] % (1 << v):
                return None
            xp[i] = (y[i] >> v) % mod
        elif y[i] % mod:
            return None
    return [sum(V[r][k] * xp[k] for k in range(nc)) % mod for r in range(nc)]


def is_primitive(vec) -> bool:
    """True when the vector is nonzero mod 2 (has an odd entry)."""
    return any(x % 2 for x in vec)
