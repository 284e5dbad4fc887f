"""Quality-feature assembly and the on-disk feature cache.

The model input concatenates, in fixed order: video width and height,
the 36 NSS video features, and (unless disabled) the 26 pooled mel-
cepstral audio features. Dropping the audio block yields the video-only
variant of the same layout.
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import brisque, mfcc
from .media import load_wav, load_y4m, sample_frames, segment_audio

VIDEO_NAMES = tuple(f"fv_{i}" for i in range(brisque.FEATURES_PER_FRAME))
AUDIO_NAMES = tuple(f"fa_mean_{i}" for i in range(mfcc.N_COEFFS)) + tuple(
    f"fa_std_{i}" for i in range(mfcc.N_COEFFS)
)


@dataclass
class FeatureVector:
    """Named model-input vector; names and values align positionally."""

    names: tuple
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.names) != len(self.values):
            raise ValueError("names and values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")


def assemble(width, height, video_feats, audio_feats=None) -> FeatureVector:
    """Concatenate (w, h, video block, optional audio block)."""
    video_feats = np.asarray(video_feats, dtype=np.float64)
    if video_feats.shape != (len(VIDEO_NAMES),):
        raise ValueError(f"expected {len(VIDEO_NAMES)} video features")
    names = ("w", "h") + VIDEO_NAMES
    blocks = [np.array([float(width), float(height)]), video_feats]
    if audio_feats is not None:
        audio_feats = np.asarray(audio_feats, dtype=np.float64)
        if audio_feats.shape != (len(AUDIO_NAMES),):
            raise ValueError(f"expected {len(AUDIO_NAMES)} audio features")
        names = names + AUDIO_NAMES
        blocks.append(audio_feats)
    return FeatureVector(names, np.concatenate(blocks))


def extract_features(video_path, audio_path, stride=10, with_audio=True) -> FeatureVector:
    """Full feature extraction for one media pair."""
    seq = load_y4m(video_path)
    fv = brisque.video_features(seq, stride)
    if not with_audio:
        return assemble(seq.width, seq.height, fv)
    audio = load_wav(audio_path)
    segments = segment_audio(audio, sample_frames(seq, stride))
    fa = mfcc.audio_features(segments, audio.sample_rate)
    return assemble(seq.width, seq.height, fv, fa)


@dataclass
class FeatureTable:
    """Feature vectors keyed by sequence id, all sharing one layout."""

    names: tuple
    rows: dict  # id -> np.ndarray

    def matrix(self, ids):
        return np.stack([self.rows[i] for i in ids])

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", *self.names])
            for seq_id, values in self.rows.items():
                writer.writerow([seq_id, *(repr(v) for v in values)])

    @classmethod
    def load_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[0] != "id":
                raise ValueError(f"{path}: expected a header starting with 'id'")
            names = tuple(header[1:])
            rows = {}
            for record in reader:
                if not record:
                    continue
                rows[record[0]] = np.array([float(v) for v in record[1:]])
        return cls(names, rows)
