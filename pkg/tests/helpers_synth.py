"""Deterministic synthetic media used across the test suite.

Everything here is seeded; the same call always produces the same bytes.
"""

import csv

import numpy as np
from scipy.ndimage import gaussian_filter

from avqa.media import write_wav, write_y4m

BLUR_LEVELS = (0.0, 0.8, 1.6, 2.4, 3.2)
NOISE_LEVELS = (0.0, 0.07, 0.18, 0.4, 0.9)
CONTENT_SIZES = ((192, 144), (176, 144), (192, 128), (160, 120))


def blur_ladder_image(height=384, width=768, seed=20260811):
    """Step-edge test image whose blur score degrades smoothly.

    Strips of low-amplitude square-wave bars at several spatial periods
    (plus one smoothed-noise strip) keep measurable edges alive across a
    wide range of blur strengths; amplitudes stay below the contrast knee
    so every block shares the wide just-noticeable width.
    """
    rng = np.random.default_rng(seed)
    x = np.arange(width)

    def bars(period, amp):
        return np.where(np.sin(2 * np.pi * x / period) >= 0, amp / 2, -amp / 2) + 128.0

    img = np.empty((height, width))
    for k, period in enumerate((16, 5, 6, 8, 10)):
        img[k * 64 : (k + 1) * 64] = bars(period, 44)
    noise = gaussian_filter(rng.normal(0, 1, (height - 320, width)), 1.2)
    noise = (noise - noise.mean()) / np.abs(noise - noise.mean()).max()
    img[320:] = 128 + 20 * noise
    return np.clip(img, 0, 255)


def texture_image(seed, height=256, width=384, low=20.0, high=235.0):
    """Natural-looking multi-scale texture, intensities in [low, high]."""
    rng = np.random.default_rng(seed)
    img = gaussian_filter(rng.normal(0, 1, (height, width)), 1.2)
    img += 0.6 * gaussian_filter(rng.normal(0, 1, (height, width)), 4.0)
    img -= img.min()
    return img / img.max() * (high - low) + low


def clip_frames(content_seed, blur_sigma, n_frames=40, height=144, width=192):
    """RGB frames: drifting multi-scale color texture, optionally blurred."""
    rng = np.random.default_rng(content_seed)
    base = np.empty((height, width, 3))
    for ch in range(3):
        plane = gaussian_filter(rng.normal(0, 1, (height, width)), 1.0)
        plane += 0.7 * gaussian_filter(rng.normal(0, 1, (height, width)), 4.0)
        base[..., ch] = plane
    base -= base.min()
    base = base / base.max() * 215.0 + 20.0
    frames = []
    for k in range(n_frames):
        frame = np.roll(base, shift=3 * k, axis=1)
        if blur_sigma > 0:
            frame = gaussian_filter(frame, sigma=(blur_sigma, blur_sigma, 0))
        frames.append(np.clip(np.rint(frame), 0, 255).astype(np.uint8))
    return frames


def clip_audio(content_seed, noise_level, duration=4.0, sample_rate=16000):
    """Harmonic carrier with slow amplitude modulation plus white noise."""
    rng = np.random.default_rng(content_seed + 1)
    t = np.arange(int(duration * sample_rate)) / sample_rate
    f0 = rng.uniform(180.0, 420.0)
    carrier = np.zeros_like(t)
    for k in range(1, 6):
        carrier += rng.uniform(0.3, 1.0) / k * np.sin(2 * np.pi * k * f0 * t + rng.uniform(0, 2 * np.pi))
    carrier *= 0.6 + 0.4 * np.sin(2 * np.pi * rng.uniform(0.5, 2.0) * t)
    carrier /= np.max(np.abs(carrier))
    noise = rng.normal(0, 1, len(t))
    noise /= np.max(np.abs(noise))
    signal = carrier + noise_level * noise
    return signal / np.max(np.abs(signal)) * 0.9


def pseudo_mos(blur_idx, noise_idx, rng):
    """Monotone quality model: blur and audio noise both hurt."""
    return float(np.clip(92.0 - 13.0 * blur_idx - 5.0 * noise_idx + rng.normal(0, 1.0), 2.0, 98.0))


def write_benchmark(root, fps=10, master_seed=909):
    """Write the 100-clip synthetic benchmark; returns manifest rows.

    4 contents x 5 blur levels x 5 audio-noise levels, each a 4 s clip.
    Rows are (id, video_path, audio_path, group, mos); group == id, so
    splits treat every clip as its own content.
    """
    root = str(root)
    rng = np.random.default_rng(master_seed)
    rows = []
    for content in range(4):
        width, height = CONTENT_SIZES[content]
        for bi, blur in enumerate(BLUR_LEVELS):
            frames = clip_frames(1000 + content, blur, n_frames=fps * 4,
                                 height=height, width=width)
            for ni, noise in enumerate(NOISE_LEVELS):
                clip_id = f"c{content}_b{bi}_n{ni}"
                video = f"{root}/{clip_id}.y4m"
                audio = f"{root}/{clip_id}.wav"
                if ni == 0:
                    write_y4m(video, frames, fps)
                    first_video = video
                else:
                    video = first_video  # same visual stream for all noise levels
                write_wav(audio, clip_audio(2000 + content, noise), 16000)
                rows.append((clip_id, video, audio, clip_id, pseudo_mos(bi, ni, rng)))
    return rows


def write_manifest_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "video", "audio", "group", "mos"])
        for row in rows:
            writer.writerow(row)
