"""Pure NumPy implementations of the hot inner-loop kernels.

These mirror ``avqa.kernels._native`` update for update, so both backends
walk the same iterate sequence and return the same results (up to the
floating-point differences of reduction order in reported objectives).
"""

import numpy as np

BACKEND_NAME = "pure"


def smo_solve(K, y, C, eps, tol, max_iter, perm, record_every=0):
    """Solve the box dual of epsilon-insensitive kernel regression by
    pairwise coordinate updates on maximal violating pairs.

    Variables are ``(a, b)``: per-sample multipliers for the upper and
    lower sides of the insensitivity tube, each in ``[0, C]``, coupled by
    ``sum(a - b) = 0``. ``perm`` is a permutation of ``range(2n)`` fixing
    the scan order used to break ties in pair selection.

    Returns ``(a, b, iterations, violation, trajectory)`` where
    ``trajectory`` holds the maximized dual objective sampled every
    ``record_every`` updates (empty when ``record_every == 0``).
    """
    n = y.shape[0]
    a = np.zeros(n)
    b = np.zeros(n)
    h = np.zeros(n)  # K @ (a - b), maintained incrementally
    traj = []
    it = 0
    while True:
        e = y - h
        up = np.concatenate(
            [np.where(a < C, e - eps, -np.inf), np.where(b > 0.0, e + eps, -np.inf)]
        )
        down = np.concatenate(
            [np.where(a > 0.0, e - eps, np.inf), np.where(b < C, e + eps, np.inf)]
        )
        pi = int(perm[int(np.argmax(up[perm]))])
        pj = int(perm[int(np.argmin(down[perm]))])
        viol = up[pi] - down[pj]
        if record_every and it % record_every == 0:
            traj.append(_dual_objective(y, h, a, b, eps))
        if not viol > tol or it >= max_iter:
            break
        ri = pi if pi < n else pi - n
        rj = pj if pj < n else pj - n
        cap_i = (C - a[ri]) if pi < n else b[ri]
        cap_j = a[rj] if pj < n else (C - b[rj])
        eta = K[ri, ri] + K[rj, rj] - 2.0 * K[ri, rj]
        lam = viol / eta if eta > 1e-12 else np.inf
        lam = min(lam, cap_i, cap_j)
        if pi < n:
            a[ri] = min(a[ri] + lam, C)
        else:
            b[ri] = max(b[ri] - lam, 0.0)
        if pj < n:
            a[rj] = max(a[rj] - lam, 0.0)
        else:
            b[rj] = min(b[rj] + lam, C)
        h += lam * (K[ri] - K[rj])
        it += 1
    if record_every:
        traj.append(_dual_objective(y, h, a, b, eps))
    return a, b, it, float(viol), np.asarray(traj, dtype=np.float64)


def _dual_objective(y, h, a, b, eps):
    beta = a - b
    return float(y @ beta - 0.5 * (beta @ h) - eps * (a.sum() + b.sum()))


def edge_widths(image, edges, codes, max_scan=100):
    """Measure the blur width at each edge pixel by tracing the monotone
    intensity ramp through the edge along its row.

    ``codes`` holds 0 where the quantized gradient angle is 0 degrees,
    1 where it is +/-180 degrees, and -1 elsewhere (not measured).
    Returns a float64 array of total ramp widths, 0 at unmeasured pixels.
    """
    height, width = image.shape
    out = np.zeros((height, width))
    for r in range(1, height - 1):
        for c in range(1, width - 1):
            if not edges[r, c]:
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
                if (d <= 0.0) if code == 1 else (d >= 0.0):
                    wl = margin + 1
                    break
            wr = max_scan + 1
            for margin in range(max_scan + 1):
                outer = c + 2 + margin
                if outer >= width:
                    wr = margin + 1
                    break
                d = image[r, outer] - image[r, c + 1 + margin]
                if (d >= 0.0) if code == 1 else (d <= 0.0):
                    wr = margin + 1
                    break
            out[r, c] = wl + wr
    return out
