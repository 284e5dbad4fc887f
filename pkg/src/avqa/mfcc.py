"""Mel-cepstral audio features with segment-level pooling.

Audio is analyzed in 25 ms Hann frames (10 ms hop); the one-sided power
spectrum is pooled through 26 triangular mel filters spanning 0..fs/2,
log-compressed, and decorrelated with an orthonormal DCT-II. The first
13 coefficients form the per-frame descriptor.
"""

import warnings

import numpy as np
from scipy.fft import dct

WIN = 0.025  # s
HOP = 0.010  # s
N_FILTERS = 26
N_COEFFS = 13
LOG_FLOOR = 1e-10


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_filters, frame_len, sample_rate):
    """Triangular filters evaluated at the rfft bin frequencies."""
    freqs = np.fft.rfftfreq(frame_len, d=1.0 / sample_rate)
    points = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_filters + 2))
    bank = np.zeros((n_filters, len(freqs)))
    for m in range(n_filters):
        lo, mid, hi = points[m], points[m + 1], points[m + 2]
        rising = (freqs - lo) / (mid - lo)
        falling = (hi - freqs) / (hi - mid)
        bank[m] = np.maximum(0.0, np.minimum(rising, falling))
    return bank


def mfcc(samples, sample_rate, win=WIN, hop=HOP, n_filters=N_FILTERS, n_coeffs=N_COEFFS):
    """Mel cepstra of a sample array; shape (n_coeffs, n_frames)."""
    x = np.asarray(samples, dtype=np.float64)
    frame_len = int(round(win * sample_rate))
    hop_len = int(round(hop * sample_rate))
    if len(x) < frame_len:
        raise ValueError(f"segment of {len(x)} samples shorter than one analysis frame")
    starts = range(0, len(x) - frame_len + 1, hop_len)
    frames = np.stack([x[s : s + frame_len] for s in starts]) * np.hanning(frame_len)
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    logmel = np.log(power @ mel_filterbank(n_filters, frame_len, sample_rate).T + LOG_FLOOR)
    return dct(logmel.T, type=2, norm="ortho", axis=0)[:n_coeffs]


def audio_features(segments, sample_rate, **kwargs):
    """Pool per-segment mel cepstra into one feature vector.

    Each usable segment contributes the mean of its per-frame cepstra;
    the result concatenates the mean and the population std of those
    segment vectors (26 dims). Segments shorter than one analysis frame
    are skipped with a warning; raises if none are usable.
    """
    per_segment = []
    skipped = 0
    for seg in segments:
        samples = getattr(seg, "samples", seg)
        try:
            coeffs = mfcc(samples, sample_rate, **kwargs)
        except ValueError:
            skipped += 1
            continue
        per_segment.append(coeffs.mean(axis=1))
    if not per_segment:
        raise ValueError("no segment is long enough for analysis")
    if skipped:
        warnings.warn(f"skipped {skipped} too-short audio segment(s)", stacklevel=2)
    stacked = np.stack(per_segment)
    return np.concatenate([stacked.mean(axis=0), stacked.std(axis=0)])
