"""Epsilon-insensitive support vector regression with an RBF kernel.

Features are z-scored with training-set statistics, the dual problem is
solved by a pairwise coordinate (working-pair) method in the kernels
backend, and hyperparameters are picked by grid search on training RMSE.
Models serialize to versioned JSON and round-trip bit-exactly.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels

DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 100_000
DEFAULT_GRID = {
    "C": (1.0, 10.0, 100.0, 1000.0),
    "gamma": tuple(2.0**e for e in (-8, -6, -4, -2, 0)),
    "epsilon": (0.1, 1.0),
}

MODEL_FORMAT_VERSION = 1


@dataclass
class Scaler:
    """Per-dimension training mean/std; constant dims pass through unscaled."""

    mean: np.ndarray
    std: np.ndarray  # 1.0 on constant dims
    constant_dims: tuple


def standardize_fit(X) -> Scaler:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a matrix with at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = np.flatnonzero(std == 0.0)
    std = std.copy()
    std[constant] = 1.0
    mean = mean.copy()
    mean[constant] = 0.0
    return Scaler(mean, std, tuple(int(i) for i in constant))


def standardize_apply(scaler: Scaler, X):
    X = np.asarray(X, dtype=np.float64)
    return (X - scaler.mean) / scaler.std


def rbf(x, y, gamma) -> float:
    """exp(-gamma * ||x - y||^2)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("dimension mismatch")
    return float(np.exp(-gamma * np.sum((x - y) ** 2)))


def rbf_matrix(A, B, gamma):
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    sq = (
        np.sum(A**2, axis=1)[:, None]
        + np.sum(B**2, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class SvrModel:
    support_vectors: np.ndarray  # standardized rows
    dual_coeffs: np.ndarray
    bias: float
    c: float
    epsilon: float
    gamma: float
    scaler: Scaler
    feature_names: tuple = None


@dataclass
class TrainReport:
    iterations: int
    dual_objective: float
    kkt_violation: float
    train_rmse: float
    converged: bool
    objective_trajectory: np.ndarray = field(default=None, repr=False)


def train(
    X,
    y,
    C=1.0,
    epsilon=0.1,
    gamma=0.1,
    seed=0,
    tol=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    record_every=0,
):
    """Fit an SVR model; returns (model, report).

    The solver is deterministic given the seed, which only fixes the scan
    order used to break ties in working-pair selection. A run that hits
    ``max_iter`` still returns a model, with ``report.converged`` False.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training inputs")
    if X.shape[0] != y.shape[0] or X.shape[0] < 2:
        raise ValueError("need at least 2 samples with matching targets")
    scaler = standardize_fit(X)
    Xs = standardize_apply(scaler, X)
    K = np.ascontiguousarray(rbf_matrix(Xs, Xs, gamma))
    return _train_standardized(
        Xs, y, scaler, K, C, epsilon, gamma, seed, tol, max_iter, record_every
    )


def solve_dual(
    K,
    y,
    C,
    epsilon,
    seed=0,
    tol=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    record_every=0,
):
    """Solve the regression dual on a precomputed kernel matrix.

    Returns ``(beta, bias, objective, iterations, violation, trajectory)``
    with ``beta`` the per-sample dual coefficients, ``bias`` averaged over
    free support vectors (midpoint of the optimality interval when none
    are free), and ``objective`` the maximized dual value.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = len(y)
    perm = np.random.default_rng(seed).permutation(2 * n).astype(np.int64)
    a, b, iters, viol, traj = kernels.smo_solve(
        np.ascontiguousarray(K), y, float(C), float(epsilon), float(tol),
        int(max_iter), perm, int(record_every),
    )
    beta = a - b
    h = K @ beta
    e = y - h
    free_vals = np.concatenate(
        [(e - epsilon)[(a > 0) & (a < C)], (e + epsilon)[(b > 0) & (b < C)]]
    )
    if free_vals.size:
        bias = float(np.mean(free_vals))
    else:
        up = np.concatenate([np.where(a < C, e - epsilon, -np.inf),
                             np.where(b > 0, e + epsilon, -np.inf)])
        down = np.concatenate([np.where(a > 0, e - epsilon, np.inf),
                               np.where(b < C, e + epsilon, np.inf)])
        bias = float((np.max(up) + np.min(down)) / 2.0)
    objective = float(y @ beta - 0.5 * (beta @ h) - epsilon * (a.sum() + b.sum()))
    return beta, bias, objective, int(iters), float(viol), traj


def _train_standardized(Xs, y, scaler, K, C, epsilon, gamma, seed, tol, max_iter, record_every):
    beta, bias, objective, iters, viol, traj = solve_dual(
        K, y, C, epsilon, seed, tol, max_iter, record_every
    )
    sv = beta != 0.0
    model = SvrModel(
        support_vectors=Xs[sv].copy(),
        dual_coeffs=beta[sv].copy(),
        bias=bias,
        c=float(C),
        epsilon=float(epsilon),
        gamma=float(gamma),
        scaler=scaler,
    )
    preds = K @ beta + bias
    report = TrainReport(
        iterations=iters,
        dual_objective=objective,
        kkt_violation=viol,
        train_rmse=float(np.sqrt(np.mean((preds - y) ** 2))),
        converged=bool(viol <= tol),
        objective_trajectory=traj,
    )
    return model, report


def predict(model: SvrModel, X):
    """Predicted score(s); accepts one vector or a matrix of rows."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    Xs = standardize_apply(model.scaler, np.atleast_2d(X))
    if Xs.shape[1] != len(model.scaler.mean):
        raise ValueError("feature dimensionality differs from training")
    if len(model.support_vectors) == 0:
        out = np.full(len(Xs), model.bias)
    else:
        out = rbf_matrix(Xs, model.support_vectors, model.gamma) @ model.dual_coeffs
        out += model.bias
    return float(out[0]) if single else out


def grid_search(X, y, grid=None, seed=0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Exhaustive hyperparameter search selected by training RMSE.

    Points are visited in ascending (C, gamma, epsilon) order and replaced
    only on strictly smaller RMSE, so ties resolve to the smallest C, then
    gamma, then epsilon. Non-converged points are skipped; raises if every
    point fails to converge.

    Returns (best_params, model, report).
    """
    grid = dict(DEFAULT_GRID if grid is None else grid)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    scaler = standardize_fit(X)
    Xs = standardize_apply(scaler, X)
    grams = {
        g: np.ascontiguousarray(rbf_matrix(Xs, Xs, g)) for g in set(grid["gamma"])
    }
    best = None
    for C in sorted(grid["C"]):
        for gamma in sorted(grid["gamma"]):
            for epsilon in sorted(grid["epsilon"]):
                model, report = _train_standardized(
                    Xs, y, scaler, grams[gamma], C, epsilon, gamma,
                    seed, tol, max_iter, 0,
                )
                if not report.converged:
                    continue
                if best is None or report.train_rmse < best[2].train_rmse:
                    params = {"C": C, "gamma": gamma, "epsilon": epsilon}
                    best = (params, model, report)
    if best is None:
        raise RuntimeError("no grid point converged")
    return best


# -- serialization ---------------------------------------------------------


def model_to_dict(model: SvrModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "model": "epsilon_svr_rbf",
        "hyperparams": {"C": model.c, "epsilon": model.epsilon, "gamma": model.gamma},
        "scaler": {
            "mean": model.scaler.mean.tolist(),
            "std": model.scaler.std.tolist(),
            "constant_dims": list(model.scaler.constant_dims),
        },
        "support_vectors": model.support_vectors.tolist(),
        "dual_coeffs": model.dual_coeffs.tolist(),
        "bias": model.bias,
        "feature_names": list(model.feature_names) if model.feature_names else None,
    }


def model_from_dict(data: dict) -> SvrModel:
    if data.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format: {data.get('format_version')}")
    hp = data["hyperparams"]
    sc = data["scaler"]
    n_dims = len(sc["mean"])
    return SvrModel(
        support_vectors=np.array(data["support_vectors"], dtype=np.float64).reshape(
            -1, n_dims
        ),
        dual_coeffs=np.array(data["dual_coeffs"], dtype=np.float64),
        bias=float(data["bias"]),
        c=float(hp["C"]),
        epsilon=float(hp["epsilon"]),
        gamma=float(hp["gamma"]),
        scaler=Scaler(
            np.array(sc["mean"], dtype=np.float64),
            np.array(sc["std"], dtype=np.float64),
            tuple(sc["constant_dims"]),
        ),
        feature_names=tuple(data["feature_names"]) if data.get("feature_names") else None,
    )


def save_model(model: SvrModel, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=1)


def load_model(path) -> SvrModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
