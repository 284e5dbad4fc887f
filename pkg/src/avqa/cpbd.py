"""Sharpness via the cumulative probability of blur detection.

Edges found by a thinned Sobel response are measured for ramp width along
their gradient rows; each width is converted into a probability that a
human would notice blur there, using a just-noticeable width that depends
on local contrast. The score is the fraction of edges whose blur stays
below the detection threshold, so 1.0 is perfectly sharp.
"""

import numpy as np
from scipy.ndimage import convolve

from . import kernels

BLOCK_SIZE = 64
EDGE_BLOCK_FRACTION = 0.002  # min fraction of edge pixels per counted block
BETA = 3.6
DETECTION_THRESHOLD = 0.63
_SOBEL_ROW = np.array([[1.0, 2.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -2.0, -1.0]]) / 8.0


def _sobel_edges(image):
    """Thresholded, thinned Sobel edge map (vertical edges).

    Thinning keeps local maxima along either axis; the >= on the trailing
    side keeps exactly one pixel of a tied two-pixel plateau, which a
    symmetric step edge always produces.
    """
    strength2 = convolve(image, _SOBEL_ROW.T) ** 2
    strength2[strength2 <= 2.0 * np.sqrt(np.mean(strength2))] = 0.0
    zc = np.zeros((image.shape[0], 1))
    zr = np.zeros((1, image.shape[1]))
    s = strength2
    nonzero = s > 0
    local_x = (s > np.c_[zc, s[:, :-1]]) & (s >= np.c_[s[:, 1:], zc]) & nonzero
    local_y = (s > np.r_[zr, s[:-1, :]]) & (s >= np.r_[s[1:, :], zr]) & nonzero
    return local_x | local_y


def _angle_codes(image):
    """0 where the quantized gradient angle is 0 deg, 1 at +/-180, else -1."""
    gy, gx = np.gradient(image)
    quantized = 45.0 * np.round(np.degrees(np.arctan2(gy, gx)) / 45.0)
    codes = np.full(image.shape, -1, dtype=np.int8)
    codes[quantized == 0.0] = 0
    codes[np.abs(quantized) == 180.0] = 1
    return codes


def _jnb_width(block):
    # just-noticeable ramp width, wider for low-contrast blocks
    block_contrast = int(np.max(block) - np.min(block))
    return 5.0 if block_contrast <= 50 else 3.0


def cpbd_detailed(gray, max_scan=100):
    """Blur-detection score plus the number of measured edge widths.

    Returns ``(value, n_widths)``; a frame with no measurable edges is
    degenerate and scores 1.0 with ``n_widths == 0``.
    """
    image = np.ascontiguousarray(gray, dtype=np.float64)
    edges = np.ascontiguousarray(_sobel_edges(image), dtype=np.uint8)
    codes = np.ascontiguousarray(_angle_codes(image))
    widths = kernels.edge_widths(image, edges, codes, max_scan)

    min_edge_px = BLOCK_SIZE * BLOCK_SIZE * EDGE_BLOCK_FRACTION
    pblur = []
    for bi in range(image.shape[0] // BLOCK_SIZE):
        for bj in range(image.shape[1] // BLOCK_SIZE):
            rows = slice(bi * BLOCK_SIZE, (bi + 1) * BLOCK_SIZE)
            cols = slice(bj * BLOCK_SIZE, (bj + 1) * BLOCK_SIZE)
            if np.count_nonzero(edges[rows, cols]) <= min_edge_px:
                continue
            w = widths[rows, cols]
            w = w[w != 0]
            if w.size == 0:
                continue
            jnb = _jnb_width(image[rows, cols])
            pblur.append(1.0 - np.exp(-((w / jnb) ** BETA)))
    if not pblur:
        return 1.0, 0
    pblur = np.concatenate(pblur)
    return float(np.mean(pblur <= DETECTION_THRESHOLD)), int(pblur.size)


def cpbd(gray, max_scan=100) -> float:
    """Blur-detection score in [0, 1]; higher is sharper."""
    return cpbd_detailed(gray, max_scan)[0]
