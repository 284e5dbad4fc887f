"""Agreement metrics and the content-separated split/repeat protocol.

Each repeat draws a fresh content-level 80/20 split, grid-searches the
regressor on the training set (selection by training RMSE), and scores
the held-out set with rank correlation (SRCC), linear correlation (PLCC),
and RMSE. Repeats use seeds derived from a master seed with a splittable
scheme, so they are order-independent and the whole report is
reproducible bit for bit.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import regressor
from .features import FeatureTable

REPORT_FORMAT_VERSION = 1


# -- correlation metrics ---------------------------------------------------


def _midranks(x):
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x))
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def plcc(a, b) -> float:
    """Pearson linear correlation; raises on zero-variance input."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 3:
        raise ValueError("need two equal-length vectors of length >= 3")
    a0 = a - a.mean()
    b0 = b - b.mean()
    va = float(a0 @ a0)
    vb = float(b0 @ b0)
    if va == 0.0 or vb == 0.0:
        raise ValueError("correlation undefined for a constant vector")
    return float((a0 @ b0) / np.sqrt(va * vb))


def srcc(a, b) -> float:
    """Spearman rank correlation (midranks for ties)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 3:
        raise ValueError("need two equal-length vectors of length >= 3")
    return plcc(_midranks(a), _midranks(b))


def rmse(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("length mismatch")
    return float(np.sqrt(np.mean((a - b) ** 2)))


# -- dataset manifest ------------------------------------------------------


@dataclass
class ManifestEntry:
    id: str
    video: str
    audio: str
    group: str
    mos: float


@dataclass
class DatasetManifest:
    entries: list

    def __post_init__(self):
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sequence ids in manifest")
        for e in self.entries:
            if not e.group:
                raise ValueError(f"entry {e.id!r} has no content group")
            if not np.isfinite(e.mos):
                raise ValueError(f"entry {e.id!r} has non-finite MOS")

    @property
    def kind(self):
        if all(e.group == e.id for e in self.entries):
            return "in-the-wild"
        return "reference-grouped"

    def ids(self):
        return [e.id for e in self.entries]

    def mos_by_id(self):
        return {e.id: e.mos for e in self.entries}

    @classmethod
    def load_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"id", "video", "audio", "group", "mos"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ValueError(f"{path}: manifest needs columns id,video,audio,group,mos")
            entries = [
                ManifestEntry(
                    row["id"], row["video"], row["audio"], row["group"], float(row["mos"])
                )
                for row in reader
            ]
        return cls(entries)

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "video", "audio", "group", "mos"])
            for e in self.entries:
                writer.writerow([e.id, e.video, e.audio, e.group, repr(float(e.mos))])


# -- splitting -------------------------------------------------------------


def derive_seed(master_seed, index) -> int:
    """Per-repeat seed from a splittable counter scheme; order-independent."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def content_split(manifest: DatasetManifest, ratio, seed):
    """Whole-group train/test split at the given training fraction.

    Content groups are shuffled with a counter-based generator keyed by
    ``seed`` and assigned whole to the training side until the training
    fraction reaches ``ratio``; the remainder is the test side, so no
    group ever straddles the boundary.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must be in (0, 1)")
    members = {}
    for e in manifest.entries:
        members.setdefault(e.group, []).append(e.id)
    groups = sorted(members)
    if len(groups) < 2:
        raise ValueError("cannot split a single content group")
    rng = np.random.Generator(np.random.Philox(key=seed))
    order = rng.permutation(len(groups))
    total = len(manifest.entries)
    train_ids = []
    position = 0
    while len(train_ids) < ratio * total - 1e-9 and position < len(order):
        train_ids.extend(members[groups[order[position]]])
        position += 1
    test_ids = []
    for k in range(position, len(order)):
        test_ids.extend(members[groups[order[k]]])
    if not test_ids:
        raise ValueError("split leaves an empty test set; lower the ratio")
    return train_ids, test_ids


# -- protocol --------------------------------------------------------------


@dataclass
class RepeatResult:
    index: int
    seed: int
    srcc: float = None
    plcc: float = None
    rmse: float = None
    hyperparams: dict = None
    error: str = None


@dataclass
class EvalReport:
    params: dict
    repeats: list
    aggregate: dict = field(default=None)

    def __post_init__(self):
        if self.aggregate is None:
            self.aggregate = aggregate_repeats(self.repeats)

    def to_dict(self):
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "params": self.params,
            "repeats": [
                {
                    "index": r.index,
                    "seed": r.seed,
                    "srcc": r.srcc,
                    "plcc": r.plcc,
                    "rmse": r.rmse,
                    "hyperparams": r.hyperparams,
                    "error": r.error,
                }
                for r in self.repeats
            ],
            "aggregate": self.aggregate,
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("format_version") != REPORT_FORMAT_VERSION:
            raise ValueError(f"unsupported report format: {data.get('format_version')}")
        repeats = [RepeatResult(**r) for r in data["repeats"]]
        return cls(params=data["params"], repeats=repeats, aggregate=data["aggregate"])

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    def save_json(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def aggregate_repeats(repeats):
    good = [r for r in repeats if r.error is None]
    agg = {"n_repeats": len(repeats), "n_failed": len(repeats) - len(good)}
    for metric in ("srcc", "plcc", "rmse"):
        vals = np.array([getattr(r, metric) for r in good], dtype=np.float64)
        agg[f"{metric}_mean"] = float(np.mean(vals)) if len(vals) else None
        agg[f"{metric}_median"] = float(np.median(vals)) if len(vals) else None
    return agg


def run_protocol(
    manifest: DatasetManifest,
    features: FeatureTable,
    repeats=100,
    ratio=0.8,
    master_seed=0,
    grid=None,
    tol=regressor.DEFAULT_TOL,
    max_iter=regressor.DEFAULT_MAX_ITER,
) -> EvalReport:
    """Split/train/test ``repeats`` times and aggregate the metrics.

    Every manifest id must be present in the feature table. A failed
    repeat is recorded with its error message; aggregates cover the
    successful repeats and ``n_failed`` flags the rest.
    """
    missing = [i for i in manifest.ids() if i not in features.rows]
    if missing:
        raise ValueError(f"features missing for ids: {missing[:5]}")
    mos = manifest.mos_by_id()
    results = []
    for r in range(repeats):
        seed = derive_seed(master_seed, r)
        result = RepeatResult(index=r, seed=seed)
        try:
            train_ids, test_ids = content_split(manifest, ratio, seed)
            X_train = features.matrix(train_ids)
            y_train = np.array([mos[i] for i in train_ids])
            params, model, _ = regressor.grid_search(
                X_train, y_train, grid=grid, seed=seed, tol=tol, max_iter=max_iter
            )
            X_test = features.matrix(test_ids)
            y_test = np.array([mos[i] for i in test_ids])
            preds = regressor.predict(model, X_test)
            result.srcc = srcc(y_test, preds)
            result.plcc = plcc(y_test, preds)
            result.rmse = rmse(y_test, preds)
            result.hyperparams = params
        except Exception as exc:  # recorded per repeat, not fatal
            result.error = f"{type(exc).__name__}: {exc}"
        results.append(result)
    params = {
        "repeats": repeats,
        "ratio": ratio,
        "master_seed": master_seed,
        "n_items": len(manifest.entries),
        "manifest_kind": manifest.kind,
        "n_features": len(features.names),
    }
    return EvalReport(params=params, repeats=results)
