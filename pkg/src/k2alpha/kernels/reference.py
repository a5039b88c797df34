"""Numpy reference kernels for truncated Witt-series convolution.

All arrays are int64 with a trailing axis of size 2 holding the (a, b)
components of W(F4)-coefficients, canonical mod `mod`.  Products use the
Karatsuba split into three integer convolutions:

    (a1 + b1 w)(a2 + b2 w) = (P - Q) + (R - P - 2 Q) w

with P = a1*a2, Q = b1*b2, R = (a1+b1)(a2+b2), convolved over the u1-axis
and truncated to the window length M.

Intermediate magnitudes stay below 2^63 for mod <= 2^24 and M <= 128, which
is enforced at the series layer.
"""

from __future__ import annotations

import numpy as np

name = "reference"


def conv_mul(x: np.ndarray, y: np.ndarray, mod: int) -> np.ndarray:
    """Single product: x, y of shape (M, 2) -> (M, 2)."""
    m = x.shape[0]
    p = np.convolve(x[:, 0], y[:, 0])[:m]
    q = np.convolve(x[:, 1], y[:, 1])[:m]
    r = np.convolve(x[:, 0] + x[:, 1], y[:, 0] + y[:, 1])[:m]
    out = np.empty((m, 2), dtype=np.int64)
    out[:, 0] = (p - q) % mod
    out[:, 1] = (r - p - 2 * q) % mod
    return out


def _shift_conv(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Row-wise truncated convolution of (P, M) against (P, M) or (M,)."""
    m = u.shape[-1]
    out = np.zeros(u.shape if u.ndim == 2 else v.shape, dtype=np.int64)
    if v.ndim == 1:
        for k in range(m):
            if v[k]:
                out[..., k:] += u[..., : m - k] * v[k]
    else:
        for k in range(m):
            out[..., k:] += u[..., : m - k] * v[..., k : k + 1]
    return out


def rowwise_conv(A: np.ndarray, g: np.ndarray, mod: int) -> np.ndarray:
    """Multiply every coefficient row of A (T, M, 2) by the series g (M, 2)."""
    aa, ab = A[..., 0], A[..., 1]
    ga, gb = g[:, 0], g[:, 1]
    p = _shift_conv(aa, ga)
    q = _shift_conv(ab, gb)
    r = _shift_conv(aa + ab, ga + gb)
    out = np.empty_like(A)
    out[..., 0] = (p - q) % mod
    out[..., 1] = (r - p - 2 * q) % mod
    return out


def pair_conv_acc(A, B, table, n_out: int, mod: int) -> np.ndarray:
    """Batched monomial-pair products with accumulation.

    out[table.group_ids[g]] = sum over the pairs of group g of
    conv(A[ia[p]], B[ib[p]]), each convolution truncated to M.
    """
    a1 = A[table.ia]
    b1 = B[table.ib]
    p = _shift_conv(a1[..., 0], b1[..., 0])
    q = _shift_conv(a1[..., 1], b1[..., 1])
    r = _shift_conv(a1[..., 0] + a1[..., 1], b1[..., 0] + b1[..., 1])
    ca = (p - q) % mod
    cb = (r - p - 2 * q) % mod
    m = A.shape[1]
    out = np.zeros((n_out, m, 2), dtype=np.int64)
    sa = np.add.reduceat(ca, table.group_starts, axis=0)
    sb = np.add.reduceat(cb, table.group_starts, axis=0)
    out[table.group_ids, :, 0] = sa % mod
    out[table.group_ids, :, 1] = sb % mod
    return out
