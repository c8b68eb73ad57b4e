"""Deterministic synthetic inputs used by the demos and the test suite.

Everything here is procedurally generated: a schematic 68-point face
whose mouth opens sinusoidally, a "sliding bar" latent-video dataset
whose motion is driven by its audio features, a pairwise comparison log
with planted skill gaps, and a curation manifest engineered around the
gate thresholds.
"""

from __future__ import annotations

import math

import numpy as np

from .curation import CurationManifest, VideoEntry
from .diffusion import AudioFeatureTrack, Schedule
from .landmarks import LandmarkFrame, LandmarkTrack
from .latents import LatentClip
from .masking import MaskRaster
from .ranking import ComparisonRecord, elo_expected_score
from .toy import ToyFixture

IMAGE_SIZE = 512
_MOUTH_CENTER = (256.0, 330.0)
_MOUTH_CORNER_WIDTH = 80.0


def _face_template() -> np.ndarray:
    """A schematic frontal face in iBUG 68-point layout, mouth closed."""
    pts = np.zeros((68, 2))
    # Jaw 0-16: arc from left temple to right temple through the chin.
    for i in range(17):
        pts[i] = (136.0 + 15.0 * i, 256.0 + 140.0 * math.sin(math.pi * i / 16.0))
    # Brows 17-26.
    for i in range(5):
        pts[17 + i] = (166.0 + 17.5 * i, 196.0)
        pts[22 + i] = (276.0 + 17.5 * i, 196.0)
    # Nose bridge 27-30 (tip at 30) and nostrils 31-35.
    for i in range(4):
        pts[27 + i] = (256.0, 216.0 + 20.0 * i)
    for i in range(5):
        pts[31 + i] = (236.0 + 10.0 * i, 286.0)
    # Eyes 36-41 and 42-47: small hexagons.
    for eye, cx in ((36, 196.0), (42, 316.0)):
        for i in range(6):
            angle = math.pi * i / 3.0
            pts[eye + i] = (cx + 18.0 * math.cos(angle), 216.0 + 7.0 * math.sin(angle))
    # Outer lips 48-59 around the mouth center, closed.
    mx, my = _MOUTH_CENTER
    half = _MOUTH_CORNER_WIDTH / 2.0
    for i in range(12):
        angle = math.pi * i / 6.0
        pts[48 + i] = (mx - half * math.cos(angle), my - 14.0 * math.sin(angle))
    # Inner lips 60-67, collapsed onto the lip line.
    inner = [(-30.0, 0.0), (-12.0, 0.0), (0.0, 0.0), (12.0, 0.0),
             (30.0, 0.0), (12.0, 0.0), (0.0, 0.0), (-12.0, 0.0)]
    for i, (dx, dy) in enumerate(inner):
        pts[60 + i] = (mx + dx, my + dy)
    return pts


def sinusoidal_track(
    n_frames: int = 75,
    period: float = 25.0,
    max_mar: float = 0.55,
    video_id: str = "sinusoidal",
    fps: float = 25.0,
) -> LandmarkTrack:
    """Track whose mouth opens and closes on a sine wave.

    The inner-lip gap at frame t is chosen so that
    MAR(t) = max_mar * (1 + sin(2*pi*t/period)) / 2.
    """
    template = _face_template()
    frames = []
    for t in range(n_frames):
        mar = max_mar * (1.0 + math.sin(2.0 * math.pi * t / period)) / 2.0
        gap = mar * _MOUTH_CORNER_WIDTH
        pts = template.copy()
        # Open the inner lips symmetrically; drop the lower outer lip with them.
        for idx, scale in ((61, 0.4), (62, 0.5), (63, 0.4)):
            pts[idx, 1] = _MOUTH_CENTER[1] - gap * scale
        for idx, scale in ((65, 0.4), (66, 0.5), (67, 0.4)):
            pts[idx, 1] = _MOUTH_CENTER[1] + gap * scale
        for idx in range(55, 60):
            pts[idx, 1] += gap * 0.55
        frames.append(
            LandmarkFrame(
                frame_index=t, points=pts, image_width=IMAGE_SIZE, image_height=IMAGE_SIZE
            )
        )
    return LandmarkTrack(video_id=video_id, frames=tuple(frames), fps=fps)


def make_sliding_bar_fixture(
    schedule: Schedule = Schedule(),
    channels: int = 2,
    height: int = 8,
    width: int = 8,
    n_clips: int = 8,
    audio_dim: int = 8,
    seed: int = 0,
) -> ToyFixture:
    """Latent clips of a bright bar gliding across the frame.

    The bar's column position advances at a per-clip speed and phase;
    the audio features encode the position, so an audio-conditioned
    model can locate the bar even inside the masked region. Channel 1
    carries a static per-clip pattern standing in for identity. The
    mask covers the lower half of the frame.
    """
    if audio_dim % 2:
        raise ValueError("audio_dim must be even")
    rng = np.random.default_rng(seed)
    n_frames = schedule.keyframe_count * schedule.spacing + 2
    columns = np.arange(width)
    clips = []
    tracks = []
    for _ in range(n_clips):
        phase = rng.uniform(0.0, width)
        speed = rng.uniform(0.2, 0.8)
        identity = rng.normal(0.0, 0.3, size=(height, width))
        data = np.zeros((n_frames, channels, height, width))
        feats = np.zeros((n_frames, audio_dim))
        for t in range(n_frames):
            pos = (phase + speed * t) % width
            dist = np.abs(columns - pos)
            dist = np.minimum(dist, width - dist)
            profile = -0.25 + 1.0 * np.exp(-0.5 * (dist / 1.0) ** 2)
            data[t, 0] = profile[None, :]
            data[t, 1] = identity
            for k in range(audio_dim // 2):
                angle = 2.0 * math.pi * (k + 1) * pos / width
                feats[t, 2 * k] = math.sin(angle)
                feats[t, 2 * k + 1] = math.cos(angle)
        clips.append(LatentClip(data))
        tracks.append(AudioFeatureTrack(feats))

    bits = np.zeros((height, width), dtype=np.uint8)
    bits[height // 2 :, :] = 1
    mask = MaskRaster(width, height, bits)
    return ToyFixture(clips=tuple(clips), audio=tuple(tracks), mask=mask)


def synthetic_comparison_log(
    strengths: dict[str, float],
    n_records: int,
    seed: int = 0,
    annotators: tuple[str, ...] = ("ann-01", "ann-02", "ann-03"),
) -> list[ComparisonRecord]:
    """Pairwise comparisons sampled from planted per-model strengths.

    Pairs are drawn uniformly; the winner follows the standard logistic
    win probability implied by the strength gap.
    """
    if len(strengths) < 2:
        raise ValueError("need at least two models")
    if n_records < 1:
        raise ValueError("n_records must be >= 1")
    rng = np.random.default_rng(seed)
    models = sorted(strengths)
    records = []
    for i in range(n_records):
        a_idx, b_idx = rng.choice(len(models), size=2, replace=False)
        model_a, model_b = models[int(a_idx)], models[int(b_idx)]
        p_a = elo_expected_score(strengths[model_a], strengths[model_b])
        winner = "A" if rng.random() < p_a else "B"
        records.append(
            ComparisonRecord(
                pair_id=f"pair-{i:05d}",
                model_a=model_a,
                model_b=model_b,
                winner=winner,
                annotator=annotators[i % len(annotators)],
                timestamp=f"2025-06-01T{i // 3600:02d}:{(i // 60) % 60:02d}:{i % 60:02d}Z",
            )
        )
    return records


def engineered_manifest(dataset_name: str = "engineered", seed: int = 0) -> CurationManifest:
    """100-entry manifest built so exactly 75 entries fail one gate each.

    25 entries pass every gate (two of them sitting exactly on the
    quality 0.40 and speaker 0.75 boundaries), 25 fail the format check,
    25 fail the quality gate (one at 0.39), and 25 lack an active
    speaker (one at 0.74).
    """
    rng = np.random.default_rng(seed)
    entries = []

    def base(i: int, **overrides) -> VideoEntry:
        duration = float(rng.uniform(4.0, 12.0))
        fields = dict(
            video_id=f"vid-{i:03d}",
            fps=25.0,
            audio_hz=16000,
            audio_channels=1,
            duration_s=duration,
            scene_spans=((0.0, duration),),
            quality_scores=tuple(float(v) for v in rng.uniform(0.55, 0.95, size=9)),
            asd_score=float(rng.uniform(0.8, 0.99)),
        )
        fields.update(overrides)
        return VideoEntry(**fields)

    for i in range(25):  # clean passes, two of them exactly on the boundaries
        if i == 0:
            entries.append(base(i, quality_scores=(0.40,) * 9))
        elif i == 1:
            entries.append(base(i, asd_score=0.75))
        else:
            entries.append(base(i))
    for i in range(25, 50):  # wrong container specs
        kind = i % 3
        if kind == 0:
            entries.append(base(i, fps=30.0))
        elif kind == 1:
            entries.append(base(i, audio_hz=44100))
        else:
            entries.append(base(i, audio_channels=2))
    for i in range(50, 75):  # low quality, strictly below the 0.4 mean
        if i == 50:
            entries.append(base(i, quality_scores=(0.39,) * 9))
        else:
            scores = tuple(float(v) for v in rng.uniform(0.05, 0.38, size=9))
            entries.append(base(i, quality_scores=scores))
    for i in range(75, 100):  # no active speaker
        if i == 75:
            entries.append(base(i, asd_score=0.74))
        else:
            entries.append(base(i, asd_score=float(rng.uniform(0.05, 0.7))))
    return CurationManifest(dataset_name=dataset_name, entries=tuple(entries))
