"""Natural-scene-statistics video features.

Each frame is locally mean-subtracted and contrast-normalized (MSCN); the
coefficient distribution and its four pairwise neighbor products are fit
with (asymmetric) generalized Gaussian models at two scales, yielding a
36-dimensional frame descriptor:

    per scale (original, then half-scale):
        [ggd_shape, ggd_variance]                      of the MSCN field
        [shape, mean_offset, sigma_l^2, sigma_r^2]     of H products
        [shape, mean_offset, sigma_l^2, sigma_r^2]     of V products
        [shape, mean_offset, sigma_l^2, sigma_r^2]     of D1 products
        [shape, mean_offset, sigma_l^2, sigma_r^2]     of D2 products

The sequence-level feature vector is the mean over sampled frames.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d
from scipy.special import gamma as gamma_fn

from .media import FrameSequence, sample_frames, to_grayscale

FEATURES_PER_FRAME = 36

KERNEL_SIZE = 7
KERNEL_SIGMA = 7.0 / 6.0
MSCN_C = 1.0  # stabilizer on the 0-255 intensity scale

_offsets = np.arange(KERNEL_SIZE) - KERNEL_SIZE // 2
_g1d = np.exp(-(_offsets**2) / (2.0 * KERNEL_SIGMA**2))
_g1d /= _g1d.sum()

# shape-parameter lookup: rho(alpha) is monotone increasing on [0.2, 10]
_ALPHA_GRID = np.linspace(0.2, 10.0, 4901)
_RHO_GRID = gamma_fn(2.0 / _ALPHA_GRID) ** 2 / (
    gamma_fn(1.0 / _ALPHA_GRID) * gamma_fn(3.0 / _ALPHA_GRID)
)


@dataclass
class AggdParams:
    """Asymmetric generalized Gaussian fit (moment matching)."""

    alpha: float
    sigma_left: float
    sigma_right: float
    mean_offset: float

    def as_features(self):
        return (self.alpha, self.mean_offset, self.sigma_left**2, self.sigma_right**2)


def _alpha_from_rho(rho):
    return float(np.interp(rho, _RHO_GRID, _ALPHA_GRID))


def mscn(gray):
    """Mean-subtracted contrast-normalized coefficients of a gray frame.

    Local statistics use a 7x7 Gaussian window (sigma 7/6) with replicated
    borders, so the result is exactly invariant to constant intensity shifts.
    """
    image = np.asarray(gray, dtype=np.float64)
    if image.shape[0] < KERNEL_SIZE or image.shape[1] < KERNEL_SIZE:
        raise ValueError(f"frame must be at least {KERNEL_SIZE}x{KERNEL_SIZE}")

    def blur(x):
        out = convolve1d(x, _g1d, axis=0, mode="nearest")
        return convolve1d(out, _g1d, axis=1, mode="nearest")

    mu = blur(image)
    sigma = np.sqrt(np.abs(blur(image * image) - mu * mu))
    return (image - mu) / (sigma + MSCN_C)


def ggd_fit(samples):
    """Symmetric generalized Gaussian fit: returns (shape, variance)."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    _check_samples(x)
    second = np.mean(x**2)
    rho = np.mean(np.abs(x)) ** 2 / second
    return _alpha_from_rho(rho), float(second)


def aggd_fit(samples) -> AggdParams:
    """Asymmetric generalized Gaussian fit via moment matching.

    Left/right scales come from one-sided second moments (strict sign
    split, so a mirrored sample set yields exactly equal scales); the
    shape parameter inverts the moment-ratio relation on a lookup grid.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    _check_samples(x)
    left = x[x < 0]
    right = x[x > 0]
    sigma_l = np.sqrt(np.mean(left**2)) if left.size else 0.0
    sigma_r = np.sqrt(np.mean(right**2)) if right.size else 0.0
    gamma_hat = sigma_l / sigma_r if sigma_r > 0 else np.inf
    r_hat = np.mean(np.abs(x)) ** 2 / np.mean(x**2)
    if np.isfinite(gamma_hat):
        big_r = r_hat * (gamma_hat**3 + 1) * (gamma_hat + 1) / (gamma_hat**2 + 1) ** 2
    else:
        big_r = r_hat
    alpha = _alpha_from_rho(big_r)
    ratio = gamma_fn(2.0 / alpha) / gamma_fn(1.0 / alpha)
    const = np.sqrt(gamma_fn(1.0 / alpha) / gamma_fn(3.0 / alpha))
    mean_offset = (sigma_r - sigma_l) * ratio * const
    return AggdParams(float(alpha), float(sigma_l), float(sigma_r), float(mean_offset))


def _check_samples(x):
    if x.size < 16:
        raise ValueError("need at least 16 samples to fit")
    if not np.any(x):
        raise ValueError("degenerate all-zero input")


def _half_scale(image):
    # 2-tap box low-pass then 2x decimation == 2x2 block mean (odd edge cropped)
    h, w = image.shape[0] // 2 * 2, image.shape[1] // 2 * 2
    return image[:h, :w].reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def _scale_features(image):
    coeffs = mscn(image)
    feats = list(ggd_fit(coeffs))
    pairs = (
        coeffs[:, :-1] * coeffs[:, 1:],  # H
        coeffs[:-1, :] * coeffs[1:, :],  # V
        coeffs[:-1, :-1] * coeffs[1:, 1:],  # D1
        coeffs[1:, :-1] * coeffs[:-1, 1:],  # D2
    )
    for prod in pairs:
        feats.extend(aggd_fit(prod).as_features())
    return feats


def brisque_frame(gray):
    """36-dimensional NSS descriptor of one gray frame (two scales)."""
    image = np.asarray(gray, dtype=np.float64)
    if image.shape[0] < 2 * KERNEL_SIZE or image.shape[1] < 2 * KERNEL_SIZE:
        raise ValueError(f"frame must be at least {2 * KERNEL_SIZE}x{2 * KERNEL_SIZE}")
    feats = _scale_features(image) + _scale_features(_half_scale(image))
    return np.asarray(feats, dtype=np.float64)


def video_features(seq: FrameSequence, stride=10):
    """Mean frame descriptor over every ``stride``-th frame."""
    sampled = sample_frames(seq, stride)
    frames = [brisque_frame(to_grayscale(f)) for f in sampled.frames]
    return np.mean(frames, axis=0)
