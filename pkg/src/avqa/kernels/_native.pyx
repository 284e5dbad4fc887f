# Compiled twins of avqa.kernels.pure — same update sequences, C speed.

import numpy as np

cimport cython
from libc.math cimport INFINITY


def smo_solve(double[:, ::1] K, double[::1] y, double C, double eps,
              double tol, long max_iter, long[::1] perm, long record_every=0):
    """See avqa.kernels.pure.smo_solve; identical contract."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t n2 = 2 * n
    a_arr = np.zeros(n)
    b_arr = np.zeros(n)
    h_arr = np.zeros(n)
    cdef double[::1] a = a_arr
    cdef double[::1] b = b_arr
    cdef double[::1] h = h_arr
    cdef Py_ssize_t max_rec = (max_iter // record_every + 2) if record_every else 1
    traj_arr = np.zeros(max_rec)
    cdef double[::1] traj = traj_arr
    cdef Py_ssize_t n_rec = 0

    cdef long it = 0
    cdef double viol = INFINITY
    cdef double m, M, v, eta, lam, cap_i, cap_j
    cdef Py_ssize_t q, p, pi, pj, ri, rj, k
    cdef bint ok

    while True:
        # maximal violating pair, scanning in perm order (first max wins)
        m = -INFINITY
        pi = -1
        for q in range(n2):
            p = perm[q]
            if p < n:
                ok = a[p] < C
                v = y[p] - h[p] - eps
            else:
                ok = b[p - n] > 0.0
                v = y[p - n] - h[p - n] + eps
            if ok and v > m:
                m = v
                pi = p
        M = INFINITY
        pj = -1
        for q in range(n2):
            p = perm[q]
            if p < n:
                ok = a[p] > 0.0
                v = y[p] - h[p] - eps
            else:
                ok = b[p - n] < C
                v = y[p - n] - h[p - n] + eps
            if ok and v < M:
                M = v
                pj = p
        viol = m - M
        if record_every and it % record_every == 0:
            traj[n_rec] = _dual_objective(y, h, a, b, eps)
            n_rec += 1
        if not viol > tol or it >= max_iter:
            break
        ri = pi if pi < n else pi - n
        rj = pj if pj < n else pj - n
        cap_i = (C - a[ri]) if pi < n else b[ri]
        cap_j = a[rj] if pj < n else (C - b[rj])
        eta = K[ri, ri] + K[rj, rj] - 2.0 * K[ri, rj]
        lam = viol / eta if eta > 1e-12 else INFINITY
        if cap_i < lam:
            lam = cap_i
        if cap_j < lam:
            lam = cap_j
        if pi < n:
            a[ri] = min(a[ri] + lam, C)
        else:
            b[ri] = max(b[ri] - lam, 0.0)
        if pj < n:
            a[rj] = max(a[rj] - lam, 0.0)
        else:
            b[rj] = min(b[rj] + lam, C)
        for k in range(n):
            h[k] += lam * (K[ri, k] - K[rj, k])
        it += 1
    if record_every:
        traj[n_rec] = _dual_objective(y, h, a, b, eps)
        n_rec += 1
    return a_arr, b_arr, int(it), float(viol), traj_arr[:n_rec].copy()


cdef double _dual_objective(double[::1] y, double[::1] h, double[::1] a,
                            double[::1] b, double eps):
    cdef double acc = 0.0
    cdef double beta
    cdef Py_ssize_t k
    for k in range(y.shape[0]):
        beta = a[k] - b[k]
        acc += y[k] * beta - 0.5 * beta * h[k] - eps * (a[k] + b[k])
    return acc


@cython.boundscheck(False)
@cython.wraparound(False)
def edge_widths(double[:, ::1] image, unsigned char[:, ::1] edges,
                signed char[:, ::1] codes, long max_scan=100):
    """See avqa.kernels.pure.edge_widths; identical contract."""
    cdef Py_ssize_t height = image.shape[0]
    cdef Py_ssize_t width = image.shape[1]
    out_arr = np.zeros((height, width))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, c, margin, outer
    cdef long wl, wr
    cdef signed char code
    cdef double d
    cdef bint stop

    for r in range(1, height - 1):
        for c in range(1, width - 1):
            if edges[r, c] == 0:
                continue
            code = codes[r, c]
            if code < 0:
                continue
            wl = max_scan + 1
            for margin in range(max_scan + 1):
                outer = c - 2 - margin
                if outer < 0:
                    wl = margin + 1
                    break
                d = image[r, outer] - image[r, c - 1 - margin]
                stop = (d <= 0.0) if code == 1 else (d >= 0.0)
                if stop:
                    wl = margin + 1
                    break
            wr = max_scan + 1
            for margin in range(max_scan + 1):
                outer = c + 2 + margin
                if outer >= width:
                    wr = margin + 1
                    break
                d = image[r, outer] - image[r, c + 1 + margin]
                stop = (d >= 0.0) if code == 1 else (d <= 0.0)
                if stop:
                    wr = margin + 1
                    break
            out[r, c] = wl + wr
    return out_arr
