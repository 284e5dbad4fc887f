"""Audio-visual quality assessment toolkit.

Pipeline stages: media ingestion (Y4M/WAV), content attributes,
quality-aware feature extraction (NSS video + mel-cepstral audio),
SVR fusion, subjective score processing, and the content-separated
split/repeat evaluation protocol.
"""

from .attributes import AudioAttributeVector, VideoAttributeVector, compute_attributes
from .brisque import brisque_frame, video_features
from .evaluation import (
    DatasetManifest,
    EvalReport,
    content_split,
    plcc,
    rmse,
    run_protocol,
    srcc,
)
from .features import FeatureTable, FeatureVector, assemble, extract_features
from .kernels import BACKEND as KERNEL_BACKEND
from .media import (
    AudioSegment,
    AudioSignal,
    FrameSequence,
    load_wav,
    load_y4m,
    sample_frames,
    segment_audio,
    to_grayscale,
)
from .mfcc import audio_features
from .regressor import SvrModel, grid_search, predict, train
from .subjective import MosTable, ScoreMatrix, compute_mos, screen_subjects, zscore_normalize

__version__ = "0.1.0"
