"""Subjective score processing: normalization, screening, and MOS.

Raw opinion scores are z-scored per subject and mapped to a 0-100 scale,
outlier subjects are screened with the classic per-sequence threshold
test (thresholds widened for non-normal score distributions), and the
mean opinion score of each sequence is the mean over retained subjects.
Screening runs on the normalized scores; normalization statistics are
not recomputed afterwards.
"""

import csv
from dataclasses import dataclass

import numpy as np


@dataclass
class ScoreMatrix:
    """Opinion scores, subjects x sequences; NaN marks a missing entry."""

    subjects: tuple
    sequences: tuple
    scores: np.ndarray
    bounds: tuple = (0.0, 100.0)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.shape != (len(self.subjects), len(self.sequences)):
            raise ValueError("score matrix shape must be subjects x sequences")
        lo, hi = self.bounds
        present = self.scores[~np.isnan(self.scores)]
        if present.size and (present.min() < lo or present.max() > hi):
            raise ValueError(f"scores outside declared bounds [{lo}, {hi}]")


@dataclass
class MosTable:
    sequences: tuple
    mos: np.ndarray
    counts: np.ndarray
    rejected_subjects: tuple


def zscore_normalize(raw: ScoreMatrix):
    """Per-subject z-scores mapped to 0-100 via 100*(z+3)/6, clipped.

    Returns (normalized matrix, number of clipped entries). Raises for a
    subject whose scores have zero variance (population std).
    """
    out = np.full_like(raw.scores, np.nan)
    clipped = 0
    for i, subject in enumerate(raw.subjects):
        row = raw.scores[i]
        vals = row[~np.isnan(row)]
        if vals.size < 2 or np.std(vals) == 0.0:
            raise ValueError(f"subject {subject!r} has zero score variance")
        z = (row - np.mean(vals)) / np.std(vals)
        mapped = 100.0 * (z + 3.0) / 6.0
        clipped += int(np.count_nonzero((mapped < 0) | (mapped > 100)))
        out[i] = np.clip(mapped, 0.0, 100.0)
    return ScoreMatrix(raw.subjects, raw.sequences, out, (0.0, 100.0)), clipped


def screen_subjects(matrix: ScoreMatrix):
    """Outlier-subject mask (True = rejected).

    Per sequence, scores beyond mean +/- 2*std count as extremes when the
    score distribution looks normal (kurtosis in [2, 4]); otherwise the
    band widens to sqrt(20)*std. A subject is rejected when extremes
    exceed 5% of their ratings and are two-sided (|P-Q|/(P+Q) < 0.3).
    Zero-variance sequences are skipped entirely.
    """
    scores = matrix.scores
    n_subjects = len(matrix.subjects)
    if n_subjects < 3:
        raise ValueError("screening needs at least 3 subjects")
    p_counts = np.zeros(n_subjects)
    q_counts = np.zeros(n_subjects)
    n_counts = np.zeros(n_subjects)
    for j in range(len(matrix.sequences)):
        col = scores[:, j]
        present = ~np.isnan(col)
        vals = col[present]
        if vals.size < 2:
            continue
        mean = np.mean(vals)
        std = np.std(vals)
        if std == 0.0:
            continue
        beta2 = np.mean((vals - mean) ** 4) / std**4
        threshold = (2.0 if 2.0 <= beta2 <= 4.0 else np.sqrt(20.0)) * std
        p_counts[present] += col[present] > mean + threshold
        q_counts[present] += col[present] < mean - threshold
        n_counts[present] += 1
    total = p_counts + q_counts
    with np.errstate(invalid="ignore", divide="ignore"):
        frequent = np.where(n_counts > 0, total / np.maximum(n_counts, 1), 0.0) > 0.05
        two_sided = np.where(total > 0, np.abs(p_counts - q_counts) / np.maximum(total, 1), 1.0) < 0.3
    return frequent & two_sided


def compute_mos(normalized: ScoreMatrix, rejected=None) -> MosTable:
    """Per-sequence mean over retained subjects' normalized scores."""
    if rejected is None:
        rejected = np.zeros(len(normalized.subjects), dtype=bool)
    rejected = np.asarray(rejected, dtype=bool)
    keep = ~rejected
    mos = np.empty(len(normalized.sequences))
    counts = np.empty(len(normalized.sequences), dtype=np.int64)
    for j, seq in enumerate(normalized.sequences):
        col = normalized.scores[keep, j]
        col = col[~np.isnan(col)]
        if col.size == 0:
            raise ValueError(f"sequence {seq!r} has no retained scores")
        mos[j] = np.mean(col)
        counts[j] = col.size
    rejected_ids = tuple(s for s, r in zip(normalized.subjects, rejected) if r)
    return MosTable(normalized.sequences, mos, counts, rejected_ids)


def process_scores(raw: ScoreMatrix, screen="bt500"):
    """Normalize, optionally screen, and average: the full chain."""
    normalized, clipped = zscore_normalize(raw)
    if screen == "bt500":
        rejected = screen_subjects(normalized)
    elif screen == "none":
        rejected = None
    else:
        raise ValueError(f"unknown screening mode {screen!r}")
    table = compute_mos(normalized, rejected)
    return table, clipped


# -- CSV interface ---------------------------------------------------------


def load_score_csv(path, bounds=(0.0, 100.0)) -> ScoreMatrix:
    """Rows = subjects, columns = sequence ids; blank cells are missing.

    Header row carries sequence ids; the first column carries subject ids.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise ValueError(f"{path}: header row with sequence ids required")
        sequences = tuple(header[1:])
        subjects = []
        rows = []
        for record in reader:
            if not record:
                continue
            subjects.append(record[0])
            rows.append(
                [float(v) if v.strip() else np.nan for v in record[1:]]
            )
    return ScoreMatrix(tuple(subjects), sequences, np.array(rows), bounds)


def save_mos_csv(table: MosTable, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "mos", "n"])
        for seq, mos, n in zip(table.sequences, table.mos, table.counts):
            writer.writerow([seq, repr(float(mos)), int(n)])
