"""68-point facial landmark tracks and the geometry derived from them.

Landmarks follow the iBUG 68-point convention. The only geometric
primitives needed downstream are the face bounding box, the mouth
aspect ratio (MAR), and the open/closed-mouth decision derived from it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

N_LANDMARKS = 68

# iBUG indices used by the MAR definition: inner upper/lower lip for the
# vertical gap, outer mouth corners for the horizontal reference.
INNER_UPPER_LIP = 62
INNER_LOWER_LIP = 66
MOUTH_CORNER_LEFT = 48
MOUTH_CORNER_RIGHT = 54

# Full mouth region (outer + inner lip contours).
MOUTH_INDICES = tuple(range(48, 68))
NOSE_TIP = 30


class DegenerateLandmarksError(ValueError):
    """Raised when landmark geometry admits no meaningful measurement."""


@dataclass(frozen=True)
class LandmarkFrame:
    """One frame of 68 (x, y) landmark points in pixel coordinates.

    y grows downward. Points must lie within the image bounds.
    """

    frame_index: int
    points: np.ndarray
    image_width: int
    image_height: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (N_LANDMARKS, 2):
            raise ValueError(
                f"expected {N_LANDMARKS} (x, y) points, got shape {pts.shape}"
            )
        if self.frame_index < 0:
            raise ValueError(f"frame_index must be >= 0, got {self.frame_index}")
        if self.image_width <= 0 or self.image_height <= 0:
            raise ValueError("image dimensions must be positive")
        if not np.isfinite(pts).all():
            raise ValueError("landmark coordinates must be finite")
        x, y = pts[:, 0], pts[:, 1]
        if (x < 0).any() or (x > self.image_width).any():
            raise ValueError("landmark x coordinates outside [0, image_width]")
        if (y < 0).any() or (y > self.image_height).any():
            raise ValueError("landmark y coordinates outside [0, image_height]")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class LandmarkTrack:
    """Landmark frames for one video, sorted by strictly increasing index."""

    video_id: str
    frames: tuple[LandmarkFrame, ...]
    fps: float = 25.0

    def __post_init__(self):
        frames = tuple(self.frames)
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        for prev, cur in zip(frames, frames[1:]):
            if cur.frame_index <= prev.frame_index:
                raise ValueError("frame_index must be strictly increasing")
        dims = {(f.image_width, f.image_height) for f in frames}
        if len(dims) > 1:
            raise ValueError(f"frames disagree on image dimensions: {sorted(dims)}")
        object.__setattr__(self, "frames", frames)

    def __len__(self):
        return len(self.frames)


@dataclass(frozen=True)
class FaceBox:
    """Axis-aligned box in pixel coordinates, left < right and top < bottom."""

    left: float
    top: float
    right: float
    bottom: float

    def __post_init__(self):
        if not (self.left < self.right and self.top < self.bottom):
            raise ValueError(
                f"degenerate box: ({self.left}, {self.top}, {self.right}, {self.bottom})"
            )

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def height(self) -> float:
        return self.bottom - self.top


def mouth_aspect_ratio(frame: LandmarkFrame) -> float:
    """Vertical inner-lip gap divided by the mouth-corner distance.

    Returns 0.0 for a fully collapsed mouth (both distances zero). A zero
    corner distance with a nonzero lip gap has no meaningful ratio and
    raises :class:`DegenerateLandmarksError`.
    """
    pts = frame.points
    vertical = math.dist(pts[INNER_UPPER_LIP], pts[INNER_LOWER_LIP])
    horizontal = math.dist(pts[MOUTH_CORNER_LEFT], pts[MOUTH_CORNER_RIGHT])
    if horizontal == 0.0:
        if vertical == 0.0:
            return 0.0
        raise DegenerateLandmarksError(
            f"frame {frame.frame_index}: coincident mouth corners with open lips"
        )
    return vertical / horizontal


def face_bounding_box(frame: LandmarkFrame) -> FaceBox:
    """Tight axis-aligned box over all 68 points."""
    pts = frame.points
    left, top = pts.min(axis=0)
    right, bottom = pts.max(axis=0)
    return FaceBox(float(left), float(top), float(right), float(bottom))


def is_mouth_open(frame: LandmarkFrame, threshold: float = 0.25) -> bool:
    """True when MAR strictly exceeds ``threshold``.

    A MAR exactly at the threshold counts as closed.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    return mouth_aspect_ratio(frame) > threshold


def load_track(path: str | Path, fps: float = 25.0) -> LandmarkTrack:
    """Read a ``<video_id>.landmarks.jsonl`` file into a LandmarkTrack.

    Each line is ``{"frame": int, "w": int, "h": int, "pts": [[x, y] * 68]}``.
    The video id is the filename with the ``.landmarks.jsonl`` suffix removed.
    """
    path = Path(path)
    name = path.name
    if name.endswith(".landmarks.jsonl"):
        video_id = name[: -len(".landmarks.jsonl")]
    else:
        video_id = path.stem
    frames = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                frames.append(
                    LandmarkFrame(
                        frame_index=int(obj["frame"]),
                        points=np.asarray(obj["pts"], dtype=np.float64),
                        image_width=int(obj["w"]),
                        image_height=int(obj["h"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad landmark record: {exc}") from exc
    return LandmarkTrack(video_id=video_id, frames=tuple(frames), fps=fps)


def save_track(track: LandmarkTrack, directory: str | Path) -> Path:
    """Write ``<video_id>.landmarks.jsonl`` under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{track.video_id}.landmarks.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for frame in track.frames:
            fh.write(
                json.dumps(
                    {
                        "frame": frame.frame_index,
                        "w": frame.image_width,
                        "h": frame.image_height,
                        "pts": frame.points.tolist(),
                    }
                )
                + "\n"
            )
    return path
