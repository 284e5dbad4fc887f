"""Independent oracles used by the test suite.

These deliberately re-derive everything from first principles (their own
kernel evaluation, their own dual assembly, a brute-force solver) so they
share no code path with the package implementations they check.
"""

import numpy as np
from numba import njit


def rbf_gram(A, B, gamma):
    out = np.empty((len(A), len(B)))
    for i in range(len(A)):
        for j in range(len(B)):
            out[i, j] = np.exp(-gamma * np.sum((A[i] - B[j]) ** 2))
    return out


def svr_dual_problem(K, y, C, eps):
    """Box QP formulation: minimize 0.5 z'Qz + p'z, 0 <= z <= C, t'z = 0."""
    n = len(y)
    Q = np.block([[K, -K], [-K, K]])
    p = np.concatenate([eps - y, eps + y])
    t = np.concatenate([np.ones(n), -np.ones(n)])
    return Q, p, t


@njit(cache=True)
def _project(v, t, C):
    """Euclidean projection onto {0 <= z <= C, t'z = 0} by bisection on
    the multiplier of the equality constraint."""
    bound = C
    for k in range(len(v)):
        if abs(v[k]) > bound:
            bound = abs(v[k])
    lo = -2.0 * bound
    hi = 2.0 * bound
    for _ in range(48):
        theta = 0.5 * (lo + hi)
        acc = 0.0
        for k in range(len(v)):
            z = v[k] - theta * t[k]
            if z < 0.0:
                z = 0.0
            elif z > C:
                z = C
            acc += t[k] * z
        if acc > 0.0:
            lo = theta
        else:
            hi = theta
    theta = 0.5 * (lo + hi)
    out = np.empty_like(v)
    for k in range(len(v)):
        z = v[k] - theta * t[k]
        if z < 0.0:
            z = 0.0
        elif z > C:
            z = C
        out[k] = z
    return out


@njit(cache=True, fastmath=True)
def projected_gradient_qp(Q, p, t, C, step, iterations):
    """Brute-force projected gradient descent on the box QP."""
    m = len(p)
    z = np.zeros(m)
    v = np.empty(m)
    for _ in range(iterations):
        # v = z - step * (Qz + p)
        for i in range(m):
            acc = p[i]
            for j in range(m):
                acc += Q[i, j] * z[j]
            v[i] = z[i] - step * acc
        # project v onto {0 <= z <= C, t'z = 0}, bisecting the multiplier
        bound = C
        for k in range(m):
            if abs(v[k]) > bound:
                bound = abs(v[k])
        lo = -2.0 * bound
        hi = 2.0 * bound
        for _b in range(40):
            theta = 0.5 * (lo + hi)
            acc = 0.0
            for k in range(m):
                w = v[k] - theta * t[k]
                if w < 0.0:
                    w = 0.0
                elif w > C:
                    w = C
                acc += t[k] * w
            if acc > 0.0:
                lo = theta
            else:
                hi = theta
        theta = 0.5 * (lo + hi)
        for k in range(m):
            w = v[k] - theta * t[k]
            if w < 0.0:
                w = 0.0
            elif w > C:
                w = C
            z[k] = w
    return z


def qp_objective(Q, p, z):
    return 0.5 * z @ Q @ z + p @ z


def solve_svr_oracle(X, y, C, eps, gamma, step=1e-4, iterations=10**6):
    """Reference dual solution and predictor built from the PG solver.

    Returns (beta, bias, objective) where objective is the maximized dual
    value -W(z), matching the solver's reporting convention.
    """
    K = rbf_gram(X, X, gamma)
    Q, p, t = svr_dual_problem(K, y, C, eps)
    z = projected_gradient_qp(Q, p, t, C, step, iterations)
    n = len(y)
    beta = z[:n] - z[n:]
    resid = y - K @ beta
    # Midpoint of the optimality interval. A bound-classification margin
    # absorbs the O(step) crumbs the finite-step solver leaves near bounds.
    tau = 1e-3 * C
    up = np.concatenate(
        [
            np.where(z[:n] < C - tau, resid - eps, -np.inf),
            np.where(z[n:] > tau, resid + eps, -np.inf),
        ]
    )
    down = np.concatenate(
        [
            np.where(z[:n] > tau, resid - eps, np.inf),
            np.where(z[n:] < C - tau, resid + eps, np.inf),
        ]
    )
    bias = float((np.max(up) + np.min(down)) / 2.0)
    return beta, bias, -qp_objective(Q, p, z)


def oracle_predict(X_train, beta, bias, gamma, X_test):
    return rbf_gram(X_test, X_train, gamma) @ beta + bias


def random_svr_instance(rng, max_n=14, max_d=5):
    """A well-posed small regression instance (n <= 20, d <= 5).

    Resamples until the kernel matrix is safely away from singular
    (lowest eigenvalue >= 0.25), so the dual solution is determined well
    enough for the finite-step brute-force solver and the working-pair
    solver to land on the same predictor.
    """
    gamma = 1.5
    while True:
        n = int(rng.integers(5, max_n + 1))
        d = int(rng.integers(2, max_d + 1))
        X = rng.uniform(0.0, 2.0, size=(n, d))
        if np.linalg.eigvalsh(rbf_gram(X, X, gamma)).min() >= 0.25:
            break
    y = rng.normal(0.0, 1.0, size=n)
    C = float(rng.uniform(0.5, 3.0))
    eps = float(rng.uniform(0.05, 0.2))
    X_test = rng.uniform(0.0, 2.0, size=(8, d))
    return X, y, C, eps, gamma, X_test
