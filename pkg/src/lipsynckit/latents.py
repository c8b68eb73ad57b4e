"""Latent video clips: [frames, channels, height, width] float grids.

Stands in for VAE latents everywhere the toolkit manipulates video in
latent space. Clips are stored on disk as raw little-endian float32
with a JSON sidecar describing the shape.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class LatentClip:
    """Immutable 4-D real grid [T, C, H, W] with finite values."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 4:
            raise ValueError(f"latent clip must be 4-D [T,C,H,W], got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise ValueError(f"latent clip dimensions must be positive, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("latent clip contains non-finite values")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[2]

    @property
    def width(self) -> int:
        return self.data.shape[3]

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.data.shape


def save_clip(clip: LatentClip, path: str | Path) -> None:
    """Write ``path`` (raw LE float32) and ``path + '.json'`` (shape sidecar)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(clip.data.astype("<f4").tobytes())
    sidecar = {"shape": list(clip.shape), "dtype": "f32"}
    Path(str(path) + ".json").write_text(json.dumps(sidecar), encoding="utf-8")


def load_clip(path: str | Path) -> LatentClip:
    """Read a raw float32 tensor using its JSON sidecar."""
    path = Path(path)
    sidecar = json.loads(Path(str(path) + ".json").read_text(encoding="utf-8"))
    if sidecar.get("dtype") != "f32":
        raise ValueError(f"unsupported dtype {sidecar.get('dtype')!r} in {path}.json")
    shape = tuple(int(s) for s in sidecar["shape"])
    raw = np.frombuffer(path.read_bytes(), dtype="<f4")
    expected = int(np.prod(shape))
    if raw.size != expected:
        raise ValueError(f"{path}: expected {expected} float32 values, found {raw.size}")
    return LatentClip(raw.reshape(shape).astype(np.float64))
