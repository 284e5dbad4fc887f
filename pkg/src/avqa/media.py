"""Media ingestion: raw video (YUV4MPEG2) and PCM audio (RIFF/WAVE).

Decoded media are plain NumPy containers with timing metadata, the
substrate for frame sampling and for aligning audio segments to sampled
video frames. Input formats are deliberately uncompressed; transcode
with any external tool, e.g.::

    ffmpeg -i clip.mp4 -pix_fmt yuv420p clip.y4m
    ffmpeg -i clip.mp4 -ac 1 clip.wav
"""

import struct
from dataclasses import dataclass, field

import numpy as np


class MediaError(ValueError):
    """Raised on malformed or unsupported media input."""


# BT.601 full-range YUV <-> RGB
_YUV_TO_RGB = np.array(
    [
        [1.0, 0.0, 1.402],
        [1.0, -0.344136, -0.714136],
        [1.0, 1.772, 0.0],
    ]
)
_LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass
class FrameSequence:
    """Decoded video: RGB frames plus timing metadata."""

    frames: list  # (H, W, 3) uint8 arrays, all the same shape
    width: int
    height: int
    frame_rate: float
    timestamps: np.ndarray  # seconds, strictly increasing

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise MediaError("frame dimensions must be positive")
        if self.frame_rate <= 0:
            raise MediaError("frame rate must be positive")
        for f in self.frames:
            if f.shape != (self.height, self.width, 3):
                raise MediaError("all frames must share width/height")
        ts = np.asarray(self.timestamps, dtype=np.float64)
        if len(ts) != len(self.frames):
            raise MediaError("one timestamp per frame required")
        if len(ts) > 1 and not np.all(np.diff(ts) > 0):
            raise MediaError("timestamps must be strictly increasing")
        self.timestamps = ts

    def __len__(self):
        return len(self.frames)


@dataclass
class AudioSignal:
    """Decoded single-channel audio, amplitude-normalized to [-1, 1]."""

    samples: np.ndarray  # float64
    sample_rate: int
    silent: bool = False  # true when peak normalization was skipped

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise MediaError("sample rate must be positive")
        self.samples = np.asarray(self.samples, dtype=np.float64)

    @property
    def duration(self):
        return len(self.samples) / self.sample_rate


@dataclass
class AudioSegment:
    """A contiguous slice of an AudioSignal mapped to one sampled frame."""

    start: float
    end: float
    samples: np.ndarray = field(repr=False)


def load_y4m(path) -> FrameSequence:
    """Decode an uncompressed YUV4MPEG2 file to RGB frames.

    Supports 4:2:0 (jpeg/mpeg2/paldv tags) and 4:4:4 planar layouts;
    chroma is upsampled by sample duplication and converted with the
    full-range BT.601 matrix.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    eol = data.find(b"\n")
    if eol < 0 or not data.startswith(b"YUV4MPEG2"):
        raise MediaError(f"{path}: not a YUV4MPEG2 stream")
    width = height = None
    rate_num, rate_den = None, None
    chroma = "420jpeg"
    for token in data[:eol].split(b" ")[1:]:
        if not token:
            continue
        tag, val = token[:1], token[1:].decode("ascii", "replace")
        if tag == b"W":
            width = int(val)
        elif tag == b"H":
            height = int(val)
        elif tag == b"F":
            num, den = val.split(":")
            rate_num, rate_den = int(num), int(den)
        elif tag == b"C":
            chroma = val
    if not width or not height or not rate_num or not rate_den:
        raise MediaError(f"{path}: malformed header (need W, H, F tags)")
    if chroma in ("420", "420jpeg", "420mpeg2", "420paldv"):
        sub = 2
    elif chroma == "444":
        sub = 1
    else:
        raise MediaError(f"{path}: unsupported chroma subsampling C{chroma}")

    y_size = width * height
    c_size = (width // sub) * (height // sub)
    frame_bytes = y_size + 2 * c_size
    frames = []
    pos = eol + 1
    while pos < len(data):
        eol = data.find(b"\n", pos)
        if eol < 0 or not data[pos:eol].startswith(b"FRAME"):
            raise MediaError(f"{path}: bad FRAME marker at byte {pos}")
        pos = eol + 1
        payload = data[pos : pos + frame_bytes]
        if len(payload) < frame_bytes:
            raise MediaError(f"{path}: truncated frame payload (frame {len(frames)})")
        frames.append(_yuv_frame_to_rgb(payload, width, height, sub))
        pos += frame_bytes
    if not frames:
        raise MediaError(f"{path}: no frames")
    rate = rate_num / rate_den
    timestamps = np.arange(len(frames)) * (rate_den / rate_num)
    return FrameSequence(frames, width, height, rate, timestamps)


def _yuv_frame_to_rgb(payload, width, height, sub):
    y_size = width * height
    c_w, c_h = width // sub, height // sub
    c_size = c_w * c_h
    y = np.frombuffer(payload, np.uint8, y_size).reshape(height, width)
    u = np.frombuffer(payload, np.uint8, c_size, y_size).reshape(c_h, c_w)
    v = np.frombuffer(payload, np.uint8, c_size, y_size + c_size).reshape(c_h, c_w)
    if sub > 1:
        u = u.repeat(sub, axis=0).repeat(sub, axis=1)[:height, :width]
        v = v.repeat(sub, axis=0).repeat(sub, axis=1)[:height, :width]
    yuv = np.stack([y, u, v], axis=-1).astype(np.float64)
    yuv[..., 1:] -= 128.0
    rgb = yuv @ _YUV_TO_RGB.T
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)


def write_y4m(path, frames, frame_rate_num, frame_rate_den=1):
    """Write RGB frames as a 4:2:0 YUV4MPEG2 file (inverse of load_y4m).

    Chroma is box-averaged over 2x2 blocks; width and height must be even.
    """
    frames = [np.asarray(f) for f in frames]
    height, width = frames[0].shape[:2]
    if width % 2 or height % 2:
        raise MediaError("4:2:0 output needs even dimensions")
    inv = np.linalg.inv(_YUV_TO_RGB)
    with open(path, "wb") as fh:
        fh.write(
            f"YUV4MPEG2 W{width} H{height} F{frame_rate_num}:{frame_rate_den} "
            "Ip A1:1 C420jpeg\n".encode()
        )
        for frame in frames:
            yuv = frame.astype(np.float64) @ inv.T
            yuv[..., 1:] += 128.0
            yuv = np.clip(np.rint(yuv), 0, 255).astype(np.uint8)
            u = yuv[..., 1].reshape(height // 2, 2, width // 2, 2).mean(axis=(1, 3))
            v = yuv[..., 2].reshape(height // 2, 2, width // 2, 2).mean(axis=(1, 3))
            fh.write(b"FRAME\n")
            fh.write(yuv[..., 0].tobytes())
            fh.write(np.rint(u).astype(np.uint8).tobytes())
            fh.write(np.rint(v).astype(np.uint8).tobytes())


def load_wav(path) -> AudioSignal:
    """Decode a RIFF/WAVE file (PCM 16-bit or IEEE float 32-bit, 1-2 ch).

    Stereo is downmixed by channel mean, then the signal is peak-normalized
    to max |sample| = 1. An all-zero signal skips normalization and sets
    the ``silent`` flag instead of dividing by zero.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MediaError(f"{path}: not a RIFF/WAVE file")
    fmt = None
    raw = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        size = struct.unpack_from("<I", data, pos + 4)[0]
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            raw = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None:
        raise MediaError(f"{path}: missing fmt chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if raw is None or len(raw) == 0:
        raise MediaError(f"{path}: zero-length data chunk")
    if audio_format == 1 and bits == 16:
        samples = np.frombuffer(raw, "<i2").astype(np.float64) / 32768.0
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(raw, "<f4").astype(np.float64)
    else:
        raise MediaError(
            f"{path}: non-PCM codec (format {audio_format}, {bits}-bit); "
            "only PCM16 and float32 are supported"
        )
    if channels not in (1, 2):
        raise MediaError(f"{path}: {channels} channels unsupported (need 1-2)")
    if channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    peak = np.max(np.abs(samples)) if len(samples) else 0.0
    if peak > 0:
        return AudioSignal(samples / peak, sample_rate)
    return AudioSignal(samples, sample_rate, silent=True)


def write_wav(path, samples, sample_rate):
    """Write mono float samples in [-1, 1] as a 16-bit PCM WAV file."""
    pcm = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = np.rint(pcm * 32767.0).astype("<i2")
    raw = pcm.tobytes()
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 36 + len(raw)))
        fh.write(b"WAVEfmt ")
        fh.write(struct.pack("<IHHIIHH", 16, 1, 1, sample_rate, sample_rate * 2, 2, 16))
        fh.write(b"data")
        fh.write(struct.pack("<I", len(raw)))
        fh.write(raw)


def sample_frames(seq: FrameSequence, stride: int) -> FrameSequence:
    """Keep frames at indices 0, stride, 2*stride, ...; timestamps kept."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    idx = range(0, len(seq), stride)
    return FrameSequence(
        [seq.frames[i] for i in idx],
        seq.width,
        seq.height,
        seq.frame_rate,
        seq.timestamps[list(idx)],
    )


def segment_audio(audio: AudioSignal, sampled: FrameSequence):
    """Partition the audio into one segment per sampled video frame.

    Segment k spans the midpoint-to-midpoint interval between sampled
    timestamps; the first starts at 0 and the last ends at the audio
    duration, so the segments tile the signal exactly.
    """
    if len(sampled) == 0:
        raise MediaError("cannot segment against an empty frame sequence")
    ts = sampled.timestamps
    if audio.duration < ts[-1]:
        raise MediaError(
            f"audio ends at {audio.duration:.3f}s before last sampled frame at {ts[-1]:.3f}s"
        )
    fs = audio.sample_rate
    n = len(audio.samples)
    mids = (ts[:-1] + ts[1:]) / 2.0
    bounds = [0] + [min(int(round(m * fs)), n) for m in mids] + [n]
    segments = []
    for k in range(len(ts)):
        lo, hi = bounds[k], bounds[k + 1]
        segments.append(AudioSegment(lo / fs, hi / fs, audio.samples[lo:hi]))
    return segments


def to_grayscale(frame) -> np.ndarray:
    """BT.601 luma of an RGB frame, unquantized, on the 0-255 scale."""
    rgb = np.asarray(frame, dtype=np.float64)
    r, g, b = _LUMA_WEIGHTS
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]
