"""Deterministic tooling for lip-sync evaluation pipelines.

The toolkit covers five areas: landmark-driven mask geometry and
occlusion handling, leakage metrics built on the mouth aspect ratio,
the preconditioned masked-diffusion core exercised by a toy two-stage
trainer, a manifest-driven dataset curation pipeline, and Elo-based
analysis of pairwise human studies (with an HTTP collection service).
"""

__version__ = "0.1.0"

from .diffusion import (
    AudioFeatureTrack,
    EdmParams,
    GuidanceWeights,
    Schedule,
    add_audio_to_timestep,
    build_interpolation_input,
    denoise,
    edm_coefficients,
    guided_combine,
    keyframe_indices,
    latent_loss,
    rgb_loss,
    total_loss,
)
from .landmarks import (
    FaceBox,
    LandmarkFrame,
    LandmarkTrack,
    face_bounding_box,
    is_mouth_open,
    mouth_aspect_ratio,
)
from .latents import LatentClip
from .masking import (
    MaskParams,
    MaskRaster,
    MaskVariant,
    blend_latents,
    build_mask,
    downsample_to_latent,
    refine_with_occlusion,
)
from .metrics import (
    GrayFrame,
    MarSeries,
    lipleak,
    lipleak_threshold_sweep,
    mae_trace,
    variance_of_laplacian,
)
from .ranking import (
    ComparisonRecord,
    EloConfig,
    bootstrap_elo,
    elo_ratings,
    rating_distribution,
    win_rate_matrix,
)
from .curation import (
    CurationConfig,
    CurationManifest,
    CurationReport,
    VideoEntry,
    curate,
)
from .toy import Stage, ToyDenoiser, toy_sample, toy_train

__all__ = [
    "AudioFeatureTrack",
    "ComparisonRecord",
    "CurationConfig",
    "CurationManifest",
    "CurationReport",
    "EdmParams",
    "EloConfig",
    "FaceBox",
    "GrayFrame",
    "GuidanceWeights",
    "LandmarkFrame",
    "LandmarkTrack",
    "LatentClip",
    "MarSeries",
    "MaskParams",
    "MaskRaster",
    "MaskVariant",
    "Schedule",
    "Stage",
    "ToyDenoiser",
    "VideoEntry",
    "add_audio_to_timestep",
    "blend_latents",
    "bootstrap_elo",
    "build_interpolation_input",
    "build_mask",
    "curate",
    "denoise",
    "downsample_to_latent",
    "edm_coefficients",
    "elo_ratings",
    "face_bounding_box",
    "guided_combine",
    "is_mouth_open",
    "keyframe_indices",
    "latent_loss",
    "lipleak",
    "lipleak_threshold_sweep",
    "mae_trace",
    "mouth_aspect_ratio",
    "rating_distribution",
    "refine_with_occlusion",
    "rgb_loss",
    "total_loss",
    "toy_sample",
    "toy_train",
    "variance_of_laplacian",
    "win_rate_matrix",
]
