"""Content-diversity attributes of an audio-visual sequence.

Five video attributes (contrast, colorfulness, blur-detection score,
spatial information, temporal information) computed on every 10th frame
and averaged, plus four audio attributes (energy fluctuation, zero
crossing rate, spectral centroid, spectral entropy spread) computed over
short-time frames of the whole signal.
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.signal import correlate2d

from .cpbd import cpbd_detailed
from .media import AudioSignal, FrameSequence, sample_frames, to_grayscale

DEFAULT_FRAME_STRIDE = 10
DEFAULT_WIN = 0.050  # s
DEFAULT_HOP = 0.025  # s

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


@dataclass
class VideoAttributeVector:
    contrast: float
    colorfulness: float
    cpbd: float
    si: float
    ti: float
    flags: tuple = ()


@dataclass
class AudioAttributeVector:
    sef: float
    zcr: float
    sc: float  # Hz
    se: float
    flags: tuple = ()


@dataclass
class GradientField:
    """Per-pixel Sobel gradient magnitude and direction (radians)."""

    gmag: np.ndarray
    gdir: np.ndarray


# -- video attributes ----------------------------------------------------


def contrast(gray) -> float:
    """Population std of grayscale intensities."""
    return float(np.std(np.asarray(gray, dtype=np.float64)))


def colorfulness(frame) -> float:
    """Opponent-axis colorfulness of an RGB frame.

    With rg = R - G and yb = (R + G)/2 - B, returns
    sqrt(var(rg) + var(yb)) + sqrt(mean(rg)^2 + mean(yb)^2).
    """
    rgb = np.asarray(frame, dtype=np.float64)
    rg = rgb[..., 0] - rgb[..., 1]
    yb = 0.5 * (rgb[..., 0] + rgb[..., 1]) - rgb[..., 2]
    sigma = np.sqrt(np.var(rg) + np.var(yb))
    mu = np.sqrt(np.mean(rg) ** 2 + np.mean(yb) ** 2)
    return float(sigma + mu)


def sobel_gradient_field(gray) -> GradientField:
    """Sobel gradients over the frame interior (valid 3x3 region)."""
    g = np.asarray(gray, dtype=np.float64)
    if g.shape[0] < 3 or g.shape[1] < 3:
        raise ValueError("frame must be at least 3x3")
    gx = correlate2d(g, _SOBEL_X, mode="valid")
    gy = correlate2d(g, _SOBEL_Y, mode="valid")
    return GradientField(np.hypot(gx, gy), np.arctan2(gy, gx))


def spatial_information(gray) -> float:
    """Half the sum of the population stds of Sobel gradient magnitude
    and direction over interior pixels."""
    field = sobel_gradient_field(gray)
    return float(0.5 * (np.std(field.gmag) + np.std(field.gdir)))


def temporal_information(prev_gray, cur_gray) -> float:
    """Population std of the pixel-wise difference of two frames."""
    a = np.asarray(prev_gray, dtype=np.float64)
    b = np.asarray(cur_gray, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"frame shape mismatch: {a.shape} vs {b.shape}")
    return float(np.std(b - a))


# -- audio attributes ----------------------------------------------------


def _frame_starts(n_samples, frame_len, hop_len):
    if frame_len > n_samples:
        raise ValueError(
            f"window of {frame_len} samples longer than signal of {n_samples}"
        )
    return range(0, n_samples - frame_len + 1, hop_len)


def _raw_frames(signal: AudioSignal, win, hop):
    frame_len = int(round(win * signal.sample_rate))
    hop_len = int(round(hop * signal.sample_rate))
    if frame_len <= 0 or hop_len <= 0:
        raise ValueError("window and hop must be positive")
    starts = _frame_starts(len(signal.samples), frame_len, hop_len)
    return np.stack([signal.samples[s : s + frame_len] for s in starts])


def frame_audio(signal: AudioSignal, win=DEFAULT_WIN, hop=DEFAULT_HOP):
    """Hann-windowed short-time frames; a trailing partial frame is dropped."""
    frames = _raw_frames(signal, win, hop)
    return frames * np.hanning(frames.shape[1])


def energy_fluctuation(signal: AudioSignal, win=DEFAULT_WIN, hop=DEFAULT_HOP) -> float:
    """Normalized mean absolute difference of successive frame energies.

    Frame energy is the mean squared amplitude of the unwindowed frame;
    the mean |E_j - E_{j-1}| is divided by the mean energy (+1e-12), so
    the result is invariant to amplitude scaling.
    """
    frames = _raw_frames(signal, win, hop)
    if frames.shape[0] < 2:
        raise ValueError("need at least 2 frames")
    energy = np.mean(frames**2, axis=1)
    return float(np.mean(np.abs(np.diff(energy))) / (np.mean(energy) + 1e-12))


def zero_crossing_rate(signal: AudioSignal, win=DEFAULT_WIN, hop=DEFAULT_HOP) -> float:
    """Mean over frames of (sign changes)/(frame length - 1)."""
    frames = _raw_frames(signal, win, hop)
    changes = np.count_nonzero(frames[:, :-1] * frames[:, 1:] < 0, axis=1)
    return float(np.mean(changes / (frames.shape[1] - 1)))


def _magnitude_spectra(signal, win, hop):
    frames = frame_audio(signal, win, hop)
    mag = np.abs(np.fft.rfft(frames, axis=1))
    freqs = np.fft.rfftfreq(frames.shape[1], d=1.0 / signal.sample_rate)
    return mag, freqs


def spectral_centroid(signal: AudioSignal, win=DEFAULT_WIN, hop=DEFAULT_HOP) -> float:
    """Max over frames of the magnitude-weighted mean frequency (Hz).

    An all-zero frame contributes a centroid of 0.
    """
    mag, freqs = _magnitude_spectra(signal, win, hop)
    total = mag.sum(axis=1)
    safe = np.where(total > 0, total, 1.0)
    cent = np.where(total > 0, (mag * freqs).sum(axis=1) / safe, 0.0)
    return float(np.max(cent))


def spectral_entropy_std(signal: AudioSignal, win=DEFAULT_WIN, hop=DEFAULT_HOP) -> float:
    """Population std over frames of the normalized spectral entropy.

    Per frame the one-sided power spectrum is normalized to a probability
    vector p and H = -sum(p log2 p) / log2(K); all-zero frames get H = 0.
    """
    mag, _ = _magnitude_spectra(signal, win, hop)
    power = mag**2
    total = power.sum(axis=1, keepdims=True)
    p = power / np.where(total > 0, total, 1.0)
    plogp = np.where(p > 0, p * np.log2(p, where=p > 0), 0.0)
    h = -plogp.sum(axis=1) / np.log2(p.shape[1])
    h[total[:, 0] == 0] = 0.0
    return float(np.std(h))


# -- sequence-level aggregation ------------------------------------------


def compute_attributes(
    seq: FrameSequence,
    audio: AudioSignal,
    stride=DEFAULT_FRAME_STRIDE,
    win=DEFAULT_WIN,
    hop=DEFAULT_HOP,
):
    """Attribute vectors for one A/V sequence.

    Video attributes are computed on every ``stride``-th frame and
    averaged; audio attributes use short-time framing of the full signal.
    """
    sampled = sample_frames(seq, stride)
    grays = [to_grayscale(f) for f in sampled.frames]
    flags = []

    cpbd_vals = []
    degenerate = False
    for g in grays:
        value, n_widths = cpbd_detailed(g)
        cpbd_vals.append(value)
        degenerate = degenerate or n_widths == 0
    if degenerate:
        flags.append("cpbd_no_edges")

    if len(grays) > 1:
        ti = float(
            np.mean(
                [temporal_information(a, b) for a, b in zip(grays[:-1], grays[1:])]
            )
        )
    else:
        ti = 0.0
        flags.append("ti_single_frame")

    video = VideoAttributeVector(
        contrast=float(np.mean([contrast(g) for g in grays])),
        colorfulness=float(np.mean([colorfulness(f) for f in sampled.frames])),
        cpbd=float(np.mean(cpbd_vals)),
        si=float(np.mean([spatial_information(g) for g in grays])),
        ti=ti,
        flags=tuple(flags),
    )
    audio_flags = ("silent_audio",) if audio.silent else ()
    aud = AudioAttributeVector(
        sef=energy_fluctuation(audio, win, hop),
        zcr=zero_crossing_rate(audio, win, hop),
        sc=spectral_centroid(audio, win, hop),
        se=spectral_entropy_std(audio, win, hop),
        flags=audio_flags,
    )
    return video, aud


ATTRIBUTE_NAMES = ("contrast", "colorfulness", "cpbd", "si", "ti", "sef", "zcr", "sc", "se")


def attribute_row(video: VideoAttributeVector, audio: AudioAttributeVector):
    return (
        video.contrast,
        video.colorfulness,
        video.cpbd,
        video.si,
        video.ti,
        audio.sef,
        audio.zcr,
        audio.sc,
        audio.se,
    )


def histogram(values, bins):
    """Equal-width histogram over [min, max]; counts sum to len(values)."""
    counts, edges = np.histogram(np.asarray(values, dtype=np.float64), bins=bins)
    return edges, counts


def write_histogram_csv(path, values, bins):
    edges, counts = histogram(values, bins)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "count"])
        for k, count in enumerate(counts):
            writer.writerow([repr(float(edges[k])), repr(float(edges[k + 1])), int(count)])
