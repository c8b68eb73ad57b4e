"""Leakage and quality metrics: LipLeak, MAR series, blur, and MAE traces.

LipLeak is the fraction of frames with an open mouth in a video that was
generated from silent audio; with no speech driving the lips, any open
mouth is leakage from the input video. This module only counts; feeding
the model silent audio happens upstream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .landmarks import LandmarkTrack, is_mouth_open, mouth_aspect_ratio

DEFAULT_MAR_THRESHOLD = 0.25


@dataclass(frozen=True)
class MarSeries:
    """Per-frame mouth aspect ratios for one video."""

    video_id: str
    values: tuple[tuple[int, float], ...]
    threshold: float = DEFAULT_MAR_THRESHOLD

    def __post_init__(self):
        values = tuple((int(i), float(v)) for i, v in self.values)
        for (prev, _), (cur, _) in zip(values, values[1:]):
            if cur <= prev:
                raise ValueError("frame_index must be strictly increasing")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class GrayFrame:
    """Single-channel frame with intensities in [0, 255]."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=np.float64)
        if arr.shape != (self.height, self.width):
            raise ValueError(
                f"pixels shape {arr.shape} does not match (height, width)="
                f"({self.height}, {self.width})"
            )
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("intensities must lie in [0, 255]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)


def mar_series(track: LandmarkTrack, threshold: float = DEFAULT_MAR_THRESHOLD) -> MarSeries:
    """MAR for every frame of the track."""
    values = tuple((f.frame_index, mouth_aspect_ratio(f)) for f in track.frames)
    return MarSeries(video_id=track.video_id, values=values, threshold=threshold)


def lipleak(track: LandmarkTrack, threshold: float = DEFAULT_MAR_THRESHOLD) -> float:
    """Fraction of frames with the mouth open, in [0, 1]."""
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if len(track) == 0:
        raise ValueError(f"track {track.video_id!r} has no frames")
    open_count = sum(1 for f in track.frames if is_mouth_open(f, threshold))
    return open_count / len(track)


def lipleak_threshold_sweep(
    track: LandmarkTrack, thresholds: Sequence[float]
) -> list[tuple[float, float]]:
    """LipLeak at each threshold of a strictly ascending sweep.

    The resulting values are non-increasing: raising the threshold can
    only reclassify open frames as closed.
    """
    thresholds = [float(t) for t in thresholds]
    if not thresholds:
        raise ValueError("thresholds must be non-empty")
    if any(t <= 0 for t in thresholds):
        raise ValueError("thresholds must be positive")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError(f"thresholds must be strictly ascending, got {thresholds}")
    return [(t, lipleak(track, t)) for t in thresholds]


_LAPLACIAN_CENTER = -4.0  # 3x3 kernel [[0,1,0],[1,-4,1],[0,1,0]]


def variance_of_laplacian(frame: GrayFrame) -> float:
    """Population variance of the 4-neighbor Laplacian response.

    The kernel is applied over interior pixels only (no padding), so the
    score depends purely on real image content. Higher means sharper.
    """
    if frame.width < 3 or frame.height < 3:
        raise ValueError(
            f"frame {frame.width}x{frame.height} smaller than the 3x3 kernel"
        )
    p = frame.pixels
    response = (
        p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:]
        + _LAPLACIAN_CENTER * p[1:-1, 1:-1]
    )
    return float(np.var(response))


def mae_trace(
    generated: Sequence[GrayFrame], reference: Sequence[GrayFrame]
) -> list[tuple[int, float]]:
    """Per-frame mean absolute error between two aligned frame sequences."""
    if len(generated) != len(reference):
        raise ValueError(
            f"sequence lengths differ: {len(generated)} vs {len(reference)}"
        )
    trace = []
    for i, (g, r) in enumerate(zip(generated, reference)):
        if (g.width, g.height) != (r.width, r.height):
            raise ValueError(
                f"frame {i}: dimensions differ ({g.width}x{g.height} vs {r.width}x{r.height})"
            )
        trace.append((i, float(np.mean(np.abs(g.pixels - r.pixels)))))
    return trace


def write_lipleak_csv(
    path: str | Path, rows: Iterable[tuple[str, float, float]]
) -> None:
    """Rows of (video_id, threshold, lipleak)."""
    _write_csv(path, ("video_id", "threshold", "lipleak"), rows)


def write_mar_series_csv(path: str | Path, series: MarSeries) -> None:
    rows = ((series.video_id, frame, mar) for frame, mar in series.values)
    _write_csv(path, ("video_id", "frame", "mar"), rows)


def write_mae_trace_csv(path: str | Path, trace: Iterable[tuple[int, float]]) -> None:
    _write_csv(path, ("frame", "mae"), trace)


def _write_csv(path: str | Path, header: tuple[str, ...], rows: Iterable) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(c) for c in row])
    tmp.replace(path)


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
