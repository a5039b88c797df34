# Compiled convolution kernels for truncated Witt-series arithmetic.
#
# Mirrors kernels/reference.py: int64 arrays, trailing axis of size 2 for the
# (a, b) components of W(F4) coefficients, products truncated to the window
# length M and reduced mod `mod`.

import numpy as np

name = "fast"


def conv_mul(x, y, long long mod):
    cdef const long long[:, ::1] xv = np.ascontiguousarray(x)
    cdef const long long[:, ::1] yv = np.ascontiguousarray(y)
    cdef Py_ssize_t m = xv.shape[0]
    out = np.zeros((m, 2), dtype=np.int64)
    cdef long long[:, ::1] ov = out
    cdef Py_ssize_t i, j
    cdef long long pa, pb, qa, qb, sa, sb
    with nogil:
        for i in range(m):
            pa = xv[i, 0]
            pb = xv[i, 1]
            if pa == 0 and pb == 0:
                continue
            for j in range(m - i):
                qa = yv[j, 0]
                qb = yv[j, 1]
                sa = pa * qa - pb * qb
                sb = pa * qb + pb * qa - pb * qb
                ov[i + j, 0] = (ov[i + j, 0] + sa) % mod
                ov[i + j, 1] = (ov[i + j, 1] + sb) % mod
        for i in range(m):
            ov[i, 0] = ov[i, 0] % mod
            if ov[i, 0] < 0:
                ov[i, 0] += mod
            ov[i, 1] = ov[i, 1] % mod
            if ov[i, 1] < 0:
                ov[i, 1] += mod
    return out


def rowwise_conv(A, g, long long mod):
    cdef const long long[:, :, ::1] av = np.ascontiguousarray(A)
    cdef const long long[:, ::1] gv = np.ascontiguousarray(g)
    cdef Py_ssize_t t = av.shape[0]
    cdef Py_ssize_t m = av.shape[1]
    out = np.zeros((t, m, 2), dtype=np.int64)
    cdef long long[:, :, ::1] ov = out
    cdef Py_ssize_t r, i, j
    cdef long long pa, pb, qa, qb, sa, sb
    with nogil:
        for r in range(t):
            for i in range(m):
                pa = av[r, i, 0]
                pb = av[r, i, 1]
                if pa == 0 and pb == 0:
                    continue
                for j in range(m - i):
                    qa = gv[j, 0]
                    qb = gv[j, 1]
                    sa = pa * qa - pb * qb
                    sb = pa * qb + pb * qa - pb * qb
                    ov[r, i + j, 0] = (ov[r, i + j, 0] + sa) % mod
                    ov[r, i + j, 1] = (ov[r, i + j, 1] + sb) % mod
        for r in range(t):
            for i in range(m):
                if ov[r, i, 0] < 0:
                    ov[r, i, 0] += mod
                if ov[r, i, 1] < 0:
                    ov[r, i, 1] += mod
    return out


def pair_conv_acc(A, B, table, Py_ssize_t n_out, long long mod):
    cdef const long long[:, :, ::1] av = np.ascontiguousarray(A)
    cdef const long long[:, :, ::1] bv = np.ascontiguousarray(B)
    cdef const long long[::1] ia = table.ia
    cdef const long long[::1] ib = table.ib
    cdef const long long[::1] io = table.iout
    cdef Py_ssize_t npairs = ia.shape[0]
    cdef Py_ssize_t m = av.shape[1]
    out = np.zeros((n_out, m, 2), dtype=np.int64)
    cdef long long[:, :, ::1] ov = out
    cdef Py_ssize_t p, i, j, r, s, o
    cdef long long pa, pb, qa, qb, sa, sb
    with nogil:
        for p in range(npairs):
            r = ia[p]
            s = ib[p]
            o = io[p]
            for i in range(m):
                pa = av[r, i, 0]
                pb = av[r, i, 1]
                if pa == 0 and pb == 0:
                    continue
                for j in range(m - i):
                    qa = bv[s, j, 0]
                    qb = bv[s, j, 1]
                    sa = pa * qa - pb * qb
                    sb = pa * qb + pb * qa - pb * qb
                    ov[o, i + j, 0] = (ov[o, i + j, 0] + sa) % mod
                    ov[o, i + j, 1] = (ov[o, i + j, 1] + sb) % mod
        for o in range(n_out):
            for i in range(m):
                if ov[o, i, 0] < 0:
                    ov[o, i, 0] += mod
                if ov[o, i, 1] < 0:
                    ov[o, i, 1] += mod
    return out
