"""Inpainting-mask construction, occlusion refinement, and latent blending.

A mask marks the region to regenerate (1) versus the region to preserve
from the input video (0). Masks built here are axis-aligned boxes
derived from facial landmarks, but every downstream operation accepts
arbitrary free-form bitmaps, so occlusion-refined masks of any shape
flow through unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .landmarks import (
    MOUTH_INDICES,
    NOSE_TIP,
    LandmarkFrame,
    face_bounding_box,
)
from .latents import LatentClip
from .storage import frame_pgm_name, read_pgm, write_pgm


class MaskVariant(Enum):
    """The masking strategies compared in the ablation."""

    OURS = "ours"
    NOSE_LEVEL = "nose_level"
    MOUTH_ONLY = "mouth_only"
    FULL_LOWER_FACE = "full_lower_face"


@dataclass(frozen=True)
class MaskParams:
    """Fractions of the face box controlling mask placement.

    side_pad_frac: extra width added on each side, as a fraction of the
        face-box width.
    above_nose_frac: how far above the nose tip the top edge sits, as a
        fraction of the face-box height.
    mouth_pad_frac: padding around the mouth box for the mouth-only
        variant, as a fraction of the face-box width.
    """

    side_pad_frac: float = 0.05
    above_nose_frac: float = 0.1
    mouth_pad_frac: float = 0.1

    def __post_init__(self):
        for name in ("side_pad_frac", "above_nose_frac", "mouth_pad_frac"):
            value = getattr(self, name)
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name} must be a finite fraction in [0, 1], got {value}")


@dataclass(frozen=True)
class MaskRaster:
    """Binary per-pixel mask; 1 = regenerate, 0 = preserve."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("mask dimensions must be positive")
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.shape != (self.height, self.width):
            raise ValueError(
                f"bits shape {bits.shape} does not match (height, width)="
                f"({self.height}, {self.width})"
            )
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("mask bits must be 0 or 1")
        bits = bits.copy()
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zeros(cls, width: int, height: int) -> "MaskRaster":
        return cls(width, height, np.zeros((height, width), dtype=np.uint8))

    @classmethod
    def ones(cls, width: int, height: int) -> "MaskRaster":
        return cls(width, height, np.ones((height, width), dtype=np.uint8))

    def count(self) -> int:
        return int(self.bits.sum())


def _rasterize_box(
    left: float, top: float, right: float, bottom: float, width: int, height: int
) -> MaskRaster:
    """Fill the pixels covered by a continuous box, clamped to the image.

    Coverage is conservative: any pixel the box touches is set.
    """
    x0 = max(0, int(math.floor(left)))
    y0 = max(0, int(math.floor(top)))
    x1 = min(width, int(math.ceil(right)))
    y1 = min(height, int(math.ceil(bottom)))
    if x1 <= x0 or y1 <= y0:
        raise ValueError(
            f"mask box ({left}, {top}, {right}, {bottom}) is empty after "
            f"clamping to {width}x{height}"
        )
    bits = np.zeros((height, width), dtype=np.uint8)
    bits[y0:y1, x0:x1] = 1
    return MaskRaster(width, height, bits)


def build_mask(
    frame: LandmarkFrame,
    variant: MaskVariant = MaskVariant.OURS,
    params: MaskParams = MaskParams(),
) -> MaskRaster:
    """Build the inpainting mask for one frame.

    OURS covers the face box widened by ``side_pad_frac`` on each side,
    from ``above_nose_frac`` of the face height above the nose tip down
    to the lower image edge (jaw movements never escape the mask).
    NOSE_LEVEL is the same box with its top at the nose tip.
    MOUTH_ONLY covers the mouth landmarks padded by ``mouth_pad_frac``.
    FULL_LOWER_FACE covers the full image width below the nose tip.
    """
    width, height = frame.image_width, frame.image_height
    box = face_bounding_box(frame)
    nose_y = float(frame.points[NOSE_TIP, 1])

    if variant is MaskVariant.OURS or variant is MaskVariant.NOSE_LEVEL:
        top = nose_y
        if variant is MaskVariant.OURS:
            top -= params.above_nose_frac * box.height
        left = box.left - params.side_pad_frac * box.width
        right = box.right + params.side_pad_frac * box.width
        return _rasterize_box(left, top, right, float(height), width, height)
    if variant is MaskVariant.MOUTH_ONLY:
        mouth = frame.points[list(MOUTH_INDICES)]
        pad = params.mouth_pad_frac * box.width
        left, top = mouth.min(axis=0) - pad
        right, bottom = mouth.max(axis=0) + pad
        return _rasterize_box(float(left), float(top), float(right), float(bottom), width, height)
    if variant is MaskVariant.FULL_LOWER_FACE:
        return _rasterize_box(0.0, nose_y, float(width), float(height), width, height)
    raise ValueError(f"unknown mask variant: {variant!r}")


def refine_with_occlusion(mask: MaskRaster, occlusion: MaskRaster) -> MaskRaster:
    """Remove occluded pixels from the mask: output = mask AND NOT occlusion.

    Pixels covered by the occluder stay in the preserved region, so the
    occluding object survives generation untouched.
    """
    if (mask.width, mask.height) != (occlusion.width, occlusion.height):
        raise ValueError(
            f"mask {mask.width}x{mask.height} and occlusion "
            f"{occlusion.width}x{occlusion.height} differ in size"
        )
    bits = mask.bits * (1 - occlusion.bits)
    return MaskRaster(mask.width, mask.height, bits)


def downsample_to_latent(mask: MaskRaster, factor: int) -> MaskRaster:
    """Reduce a pixel mask to latent resolution by ``factor``.

    A latent cell is marked 1 if any covered pixel is 1: a cell touching
    the inpainting region is always regenerated.
    """
    if factor <= 0:
        raise ValueError(f"factor must be a positive integer, got {factor}")
    if mask.width % factor or mask.height % factor:
        raise ValueError(
            f"mask {mask.width}x{mask.height} not divisible by factor {factor}"
        )
    h, w = mask.height // factor, mask.width // factor
    cells = mask.bits.reshape(h, factor, w, factor).max(axis=(1, 3))
    return MaskRaster(w, h, cells)


def blend_latents(clean: LatentClip, noised: LatentClip, latent_mask: MaskRaster) -> LatentClip:
    """Combine clips through a spatial mask: 1 takes noised, 0 takes clean.

    The mask broadcasts across frames and channels. Preserved positions
    are copied bit-exactly from ``clean``.
    """
    if clean.shape != noised.shape:
        raise ValueError(f"clip shapes differ: {clean.shape} vs {noised.shape}")
    if (latent_mask.height, latent_mask.width) != (clean.height, clean.width):
        raise ValueError(
            f"mask {latent_mask.width}x{latent_mask.height} does not match clip "
            f"spatial dimensions {clean.width}x{clean.height}"
        )
    selector = latent_mask.bits.astype(bool)[None, None, :, :]
    return LatentClip(np.where(selector, noised.data, clean.data))


def save_mask(mask: MaskRaster, directory: str | Path, video_id: str, frame_index: int) -> Path:
    """Write ``<directory>/<video_id>/<frame:06d>.pgm`` (255 = masked)."""
    path = Path(directory) / video_id / frame_pgm_name(frame_index)
    write_pgm(path, mask.bits.astype(np.float64) * 255.0)
    return path


def load_mask(path: str | Path) -> MaskRaster:
    """Read a mask PGM; any nonzero pixel counts as masked."""
    pixels = read_pgm(path)
    bits = (pixels > 0).astype(np.uint8)
    h, w = bits.shape
    return MaskRaster(w, h, bits)
