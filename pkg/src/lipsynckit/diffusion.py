"""EDM-style preconditioning, scheduling, guidance, and masked losses.

The denoiser is assembled around a raw network F as

    D(x; sigma) = c_skip(sigma) * x + c_out(sigma) * F(c_in(sigma) * x; c_noise(sigma))

with the standard coefficient forms for data scale sigma_data. Keyframe
scheduling, the interpolation input sequence, dual-condition guidance,
and the masked latent/pixel losses live here as pure functions; the toy
network that exercises them end to end is in :mod:`lipsynckit.toy`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .latents import LatentClip
from .masking import MaskRaster

# Shape-preserving raw network: (scaled input, noise label, conditioning) -> clip.
DenoiserFn = Callable[[LatentClip, float, object], LatentClip]


@dataclass(frozen=True)
class EdmParams:
    """Preconditioning parameters; sigma_data is the data standard deviation."""

    sigma_data: float = 0.5

    def __post_init__(self):
        if not (self.sigma_data > 0 and math.isfinite(self.sigma_data)):
            raise ValueError(f"sigma_data must be positive, got {self.sigma_data}")


@dataclass(frozen=True)
class Schedule:
    """Keyframe layout: ``keyframe_count`` anchors spaced ``spacing`` frames apart."""

    keyframe_count: int = 14
    spacing: int = 12

    def __post_init__(self):
        if self.keyframe_count < 2:
            raise ValueError(f"keyframe_count must be >= 2, got {self.keyframe_count}")
        if self.spacing < 1:
            raise ValueError(f"spacing must be >= 1, got {self.spacing}")


@dataclass(frozen=True)
class GuidanceWeights:
    """Separate guidance scales for the audio and identity conditions."""

    w_aud: float = 5.0
    w_id: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.w_aud) and math.isfinite(self.w_id)):
            raise ValueError("guidance weights must be finite")


@dataclass(frozen=True)
class AudioFeatureTrack:
    """Per-frame audio feature vectors with a shared dimension."""

    features: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.features, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"features must be [frames, dim], got ndim={arr.ndim}")
        if not np.isfinite(arr).all():
            raise ValueError("audio features must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "features", arr)

    @property
    def frames(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


class EdmCoefficients(NamedTuple):
    c_skip: float
    c_out: float
    c_in: float
    c_noise: float


def edm_coefficients(sigma: float, params: EdmParams = EdmParams()) -> EdmCoefficients:
    """Preconditioning scales at noise level sigma.

    As sigma -> 0, c_skip -> 1 and c_out -> 0, so the denoiser tends to
    the identity on clean input.
    """
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be positive and finite, got {sigma}")
    sd = params.sigma_data
    total = sigma * sigma + sd * sd
    return EdmCoefficients(
        c_skip=sd * sd / total,
        c_out=sigma * sd / math.sqrt(total),
        c_in=1.0 / math.sqrt(total),
        c_noise=math.log(sigma) / 4.0,
    )


def loss_weight(sigma: float, params: EdmParams = EdmParams()) -> float:
    """Per-noise-level loss weight lambda(sigma) = (sigma^2 + sd^2) / (sigma * sd)^2."""
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be positive and finite, got {sigma}")
    sd = params.sigma_data
    return (sigma * sigma + sd * sd) / (sigma * sd) ** 2


def denoise(
    x: LatentClip,
    sigma: float,
    network: DenoiserFn,
    conditioning: object = None,
    params: EdmParams = EdmParams(),
) -> LatentClip:
    """Apply the preconditioned denoiser D(x; sigma) around ``network``."""
    c = edm_coefficients(sigma, params)
    raw = network(LatentClip(c.c_in * x.data), c.c_noise, conditioning)
    if raw.shape != x.shape:
        raise ValueError(
            f"network returned shape {raw.shape}, expected {x.shape}"
        )
    return LatentClip(c.c_skip * x.data + c.c_out * raw.data)


def keyframe_indices(schedule: Schedule) -> list[int]:
    """Frame indices of the keyframe anchors: [S, 2S, ..., T*S]."""
    s = schedule.spacing
    return [k * s for k in range(1, schedule.keyframe_count + 1)]


def build_interpolation_input(
    z_a: np.ndarray, z_b: np.ndarray, slot: np.ndarray, spacing: int
) -> tuple[np.ndarray, np.ndarray]:
    """Conditioning sequence between two keyframes: [z_a, slot * S, z_b].

    ``slot`` is the learnable stand-in for the missing frames, broadcast
    to the keyframe shape. Returns the stacked sequence of length S + 2
    and a boolean array marking slot positions.
    """
    if spacing < 1:
        raise ValueError(f"spacing must be >= 1, got {spacing}")
    z_a = np.asarray(z_a, dtype=np.float64)
    z_b = np.asarray(z_b, dtype=np.float64)
    if z_a.shape != z_b.shape:
        raise ValueError(f"keyframe shapes differ: {z_a.shape} vs {z_b.shape}")
    slot_frame = np.broadcast_to(np.asarray(slot, dtype=np.float64), z_a.shape)
    sequence = np.stack([z_a, *([slot_frame] * spacing), z_b])
    is_slot = np.zeros(spacing + 2, dtype=bool)
    is_slot[1:-1] = True
    return sequence, is_slot


def add_audio_to_timestep(
    t_emb: np.ndarray,
    audio_feat: np.ndarray,
    mlp: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """Inject audio into the timestep embedding: t' = t + mlp(audio)."""
    t_emb = np.asarray(t_emb, dtype=np.float64)
    projected = np.asarray(mlp(np.asarray(audio_feat, dtype=np.float64)))
    if projected.shape != t_emb.shape:
        raise ValueError(
            f"mlp output shape {projected.shape} does not match timestep "
            f"embedding shape {t_emb.shape}"
        )
    return t_emb + projected


def guided_combine(
    z_empty: LatentClip,
    z_id: LatentClip,
    z_id_aud: LatentClip,
    weights: GuidanceWeights = GuidanceWeights(),
) -> LatentClip:
    """Dual-condition guidance:

        z = z_empty + w_id * (z_id - z_empty) + w_aud * (z_id_aud - z_id)

    evaluated in the algebraically equivalent collected form
    ``(1 - w_id) * z_empty + (w_id - w_aud) * z_id + w_aud * z_id_aud``,
    which makes the unit-weight case return z_id_aud exactly.
    """
    if not (z_empty.shape == z_id.shape == z_id_aud.shape):
        raise ValueError(
            f"clip shapes differ: {z_empty.shape}, {z_id.shape}, {z_id_aud.shape}"
        )
    w_id, w_aud = weights.w_id, weights.w_aud
    combined = (
        (1.0 - w_id) * z_empty.data
        + (w_id - w_aud) * z_id.data
        + w_aud * z_id_aud.data
    )
    return LatentClip(combined)


def latent_loss(
    prediction: LatentClip,
    target: LatentClip,
    weight: float,
    latent_mask: MaskRaster,
) -> float:
    """Weighted mean squared error over masked latent elements only.

    Returns 0 when the mask is empty; unmasked elements never contribute.
    """
    if prediction.shape != target.shape:
        raise ValueError(f"clip shapes differ: {prediction.shape} vs {target.shape}")
    if (latent_mask.height, latent_mask.width) != (prediction.height, prediction.width):
        raise ValueError(
            f"mask {latent_mask.width}x{latent_mask.height} does not match clip "
            f"spatial dimensions {prediction.width}x{prediction.height}"
        )
    selector = np.broadcast_to(
        latent_mask.bits.astype(bool)[None, None, :, :], prediction.shape
    )
    count = int(np.count_nonzero(selector))
    if count == 0:
        return 0.0
    diff = np.where(selector, prediction.data - target.data, 0.0)
    return weight * float(np.sum(diff * diff) / count)


def rgb_loss(
    decoded_frame: np.ndarray,
    target_frame: np.ndarray,
    weight: float,
    pixel_mask: MaskRaster,
) -> float:
    """Weighted masked MSE in pixel space for one decoded frame.

    The caller picks the frame (uniformly at random per training step)
    and supplies the decoded pixels; decoding itself is injected.
    """
    decoded = np.asarray(decoded_frame, dtype=np.float64)
    target = np.asarray(target_frame, dtype=np.float64)
    if decoded.shape != target.shape:
        raise ValueError(f"frame shapes differ: {decoded.shape} vs {target.shape}")
    if decoded.shape[-2:] != (pixel_mask.height, pixel_mask.width):
        raise ValueError(
            f"mask {pixel_mask.width}x{pixel_mask.height} does not match frame "
            f"spatial dimensions {decoded.shape[-2:]}"
        )
    selector = np.broadcast_to(pixel_mask.bits.astype(bool), decoded.shape)
    count = int(np.count_nonzero(selector))
    if count == 0:
        return 0.0
    diff = np.where(selector, decoded - target, 0.0)
    return weight * float(np.sum(diff * diff) / count)


def total_loss(l_latent: float, l_rgb: float, lambda_t: float, lambda_2: float = 1.0) -> float:
    """Combined objective lambda(t) * (l_latent + lambda_2 * l_rgb).

    Mask application is already folded into the component losses.
    """
    for name, value in (("l_latent", l_latent), ("l_rgb", l_rgb),
                        ("lambda_t", lambda_t), ("lambda_2", lambda_2)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")
    return lambda_t * (l_latent + lambda_2 * l_rgb)


def sigma_grid(
    n_steps: int, sigma_min: float = 0.002, sigma_max: float = 80.0, rho: float = 7.0
) -> np.ndarray:
    """Descending noise-level grid for sampling, with a terminal zero.

    Uses the standard rho-warped interpolation between sigma_max and
    sigma_min; returns n_steps + 1 values ending at 0.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if not (0 < sigma_min < sigma_max):
        raise ValueError(f"need 0 < sigma_min < sigma_max, got {sigma_min}, {sigma_max}")
    if n_steps == 1:
        levels = np.array([sigma_max])
    else:
        i = np.arange(n_steps, dtype=np.float64)
        inv_rho = 1.0 / rho
        levels = (
            sigma_max**inv_rho + i / (n_steps - 1) * (sigma_min**inv_rho - sigma_max**inv_rho)
        ) ** rho
    return np.concatenate([levels, [0.0]])


def sample_training_sigmas(
    rng: np.random.Generator,
    n: int,
    params: EdmParams = EdmParams(),
    log_scale: float = 1.2,
) -> np.ndarray:
    """Log-normal noise levels centered on the data scale."""
    return np.exp(math.log(params.sigma_data) + log_scale * rng.standard_normal(n))
