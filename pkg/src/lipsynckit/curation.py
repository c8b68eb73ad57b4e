"""Manifest-driven dataset curation with pluggable external scorers.

Videos are gated on container format (25 fps, 16 kHz mono), a quality
score (mean of nine evaluations, strictly below 0.4 discards), and an
active-speaker score (strictly below 0.75 discards), then split into
per-scene clips. Deep scorers are never run here: their outputs arrive
either in the manifest or from a configured external command.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

QUALITY_SCORE_COUNT = 9


class DiscardReason(Enum):
    LOW_QUALITY = "LowQuality"
    NO_ACTIVE_SPEAKER = "NoActiveSpeaker"
    MISSING_SCORES = "MissingScores"
    BAD_FORMAT = "BadFormat"


@dataclass(frozen=True)
class VideoEntry:
    """Per-video metadata plus externally supplied scores.

    ``quality_scores`` holds the nine per-video evaluations (first,
    middle, and last frame, three crops each) or None when unscored.
    """

    video_id: str
    fps: float
    audio_hz: int
    audio_channels: int
    duration_s: float
    scene_spans: tuple[tuple[float, float], ...]
    quality_scores: tuple[float, ...] | None = None
    asd_score: float | None = None
    path: str | None = None

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ValueError(f"{self.video_id}: duration_s must be positive")
        spans = tuple((float(a), float(b)) for a, b in self.scene_spans)
        previous_end = None
        for start, end in spans:
            if end <= start:
                raise ValueError(f"{self.video_id}: empty scene span ({start}, {end})")
            if previous_end is not None and start < previous_end:
                raise ValueError(f"{self.video_id}: overlapping scene spans")
            previous_end = end
        object.__setattr__(self, "scene_spans", spans)
        if self.quality_scores is not None:
            scores = tuple(float(s) for s in self.quality_scores)
            if len(scores) != QUALITY_SCORE_COUNT:
                raise ValueError(
                    f"{self.video_id}: expected {QUALITY_SCORE_COUNT} quality scores, "
                    f"got {len(scores)}"
                )
            if any(not 0.0 <= s <= 1.0 for s in scores):
                raise ValueError(f"{self.video_id}: quality scores must lie in [0, 1]")
            object.__setattr__(self, "quality_scores", scores)
        if self.asd_score is not None and not 0.0 <= self.asd_score <= 1.0:
            raise ValueError(f"{self.video_id}: asd_score must lie in [0, 1]")


@dataclass(frozen=True)
class CurationManifest:
    dataset_name: str
    entries: tuple[VideoEntry, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        seen = set()
        for entry in entries:
            if entry.video_id in seen:
                raise ValueError(f"duplicate video_id {entry.video_id!r}")
            seen.add(entry.video_id)
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class ClipRef:
    video_id: str
    start_s: float
    end_s: float

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class DiscardedClip:
    clip: ClipRef
    reason: DiscardReason


@dataclass(frozen=True)
class CurationReport:
    dataset_name: str
    kept: tuple[ClipRef, ...]
    discarded: tuple[DiscardedClip, ...]

    @property
    def kept_hours(self) -> float:
        return sum(c.duration_s for c in self.kept) / 3600.0

    def reason_counts(self) -> dict[str, int]:
        counts = {reason.value: 0 for reason in DiscardReason}
        for item in self.discarded:
            counts[item.reason.value] += 1
        return counts


@dataclass(frozen=True)
class CurationConfig:
    min_clip_s: float = 1.0
    quality_threshold: float = 0.4
    asd_threshold: float = 0.75
    target_fps: float = 25.0
    target_audio_hz: int = 16000
    target_audio_channels: int = 1
    quality_cmd: str | None = None
    asd_cmd: str | None = None
    plugin_workers: int = 4
    plugin_timeout_s: float = 60.0


def normalize_spec_check(
    entry: VideoEntry, config: CurationConfig = CurationConfig()
) -> list[str]:
    """Validate the extraction contract; returns the list of violations.

    An empty list means the entry passes. Transcoding is someone else's
    job; this only checks that it happened.
    """
    problems = []
    if entry.fps != config.target_fps:
        problems.append(f"fps {entry.fps} != {config.target_fps}")
    if entry.audio_hz != config.target_audio_hz:
        problems.append(f"audio_hz {entry.audio_hz} != {config.target_audio_hz}")
    if entry.audio_channels != config.target_audio_channels:
        problems.append(
            f"audio_channels {entry.audio_channels} != {config.target_audio_channels}"
        )
    return problems


def quality_gate(
    entry: VideoEntry, config: CurationConfig = CurationConfig()
) -> DiscardReason | None:
    """None to keep; strictly-below-threshold means of the nine scores discard.

    The mean uses exact float summation so a file of nine identical
    boundary scores sits exactly on the threshold instead of a hair
    below it.
    """
    if entry.quality_scores is None:
        return DiscardReason.MISSING_SCORES
    mean = math.fsum(entry.quality_scores) / len(entry.quality_scores)
    if mean < config.quality_threshold:
        return DiscardReason.LOW_QUALITY
    return None


def speaker_gate(
    entry: VideoEntry, config: CurationConfig = CurationConfig()
) -> DiscardReason | None:
    """None to keep; a strictly-below-threshold active-speaker score discards."""
    if entry.asd_score is None:
        return DiscardReason.MISSING_SCORES
    if entry.asd_score < config.asd_threshold:
        return DiscardReason.NO_ACTIVE_SPEAKER
    return None


def split_scenes(
    entry: VideoEntry, config: CurationConfig = CurationConfig()
) -> tuple[list[ClipRef], list[DiscardedClip]]:
    """One clip per scene span; spans shorter than min_clip_s are dropped."""
    kept, dropped = [], []
    for start, end in entry.scene_spans:
        clip = ClipRef(entry.video_id, start, end)
        if clip.duration_s < config.min_clip_s:
            dropped.append(DiscardedClip(clip, DiscardReason.BAD_FORMAT))
        else:
            kept.append(clip)
    return kept, dropped


def curate(
    manifest: CurationManifest, config: CurationConfig = CurationConfig()
) -> CurationReport:
    """Run all gates in order and split survivors into scene clips.

    Gates run as format check, quality, active speaker, scene split; a
    failing entry's clips are all discarded with the first failing
    gate's reason. Entries are processed in video_id order so the
    report is deterministic.
    """
    entries = sorted(manifest.entries, key=lambda e: e.video_id)
    if config.quality_cmd or config.asd_cmd:
        entries = _resolve_scores(entries, config)
    kept: list[ClipRef] = []
    discarded: list[DiscardedClip] = []
    for entry in entries:
        reason = None
        if normalize_spec_check(entry, config):
            reason = DiscardReason.BAD_FORMAT
        if reason is None:
            reason = quality_gate(entry, config)
        if reason is None:
            reason = speaker_gate(entry, config)
        if reason is not None:
            for start, end in entry.scene_spans:
                discarded.append(DiscardedClip(ClipRef(entry.video_id, start, end), reason))
            continue
        clips, dropped = split_scenes(entry, config)
        kept.extend(clips)
        discarded.extend(dropped)
    return CurationReport(
        dataset_name=manifest.dataset_name, kept=tuple(kept), discarded=tuple(discarded)
    )


def _resolve_scores(
    entries: list[VideoEntry], config: CurationConfig
) -> list[VideoEntry]:
    """Fill missing scores by invoking the configured scorer commands.

    The command receives the video id and path as trailing arguments and
    must print a JSON object with ``quality_scores`` or ``asd_score``.
    Any failure (nonzero exit, bad JSON, timeout) leaves the score
    missing, which the gates report as MissingScores.
    """
    def resolve(entry: VideoEntry) -> VideoEntry:
        if entry.quality_scores is None and config.quality_cmd:
            scores = _run_scorer(config.quality_cmd, entry, config)
            if isinstance(scores, dict) and "quality_scores" in scores:
                try:
                    entry = replace(entry, quality_scores=tuple(scores["quality_scores"]))
                except (TypeError, ValueError):
                    pass
        if entry.asd_score is None and config.asd_cmd:
            scores = _run_scorer(config.asd_cmd, entry, config)
            if isinstance(scores, dict) and "asd_score" in scores:
                try:
                    entry = replace(entry, asd_score=float(scores["asd_score"]))
                except (TypeError, ValueError):
                    pass
        return entry

    workers = max(1, config.plugin_workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(resolve, entries))


def _run_scorer(cmd: str, entry: VideoEntry, config: CurationConfig):
    argv = shlex.split(cmd) + [entry.video_id, entry.path or ""]
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=config.plugin_timeout_s
        )
    except (OSError, subprocess.TimeoutExpired):
        return None
    if proc.returncode != 0:
        return None
    try:
        return json.loads(proc.stdout)
    except json.JSONDecodeError:
        return None


def load_manifest(path: str | Path) -> CurationManifest:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        entries = tuple(
            VideoEntry(
                video_id=str(e["video_id"]),
                fps=float(e["fps"]),
                audio_hz=int(e["audio_hz"]),
                audio_channels=int(e["audio_channels"]),
                duration_s=float(e["duration_s"]),
                scene_spans=tuple((float(a), float(b)) for a, b in e["scene_spans"]),
                quality_scores=(
                    tuple(float(s) for s in e["quality_scores"])
                    if e.get("quality_scores") is not None
                    else None
                ),
                asd_score=(
                    float(e["asd_score"]) if e.get("asd_score") is not None else None
                ),
                path=e.get("path"),
            )
            for e in obj["entries"]
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: bad manifest: {exc}") from exc
    return CurationManifest(dataset_name=str(obj.get("dataset_name", "dataset")), entries=entries)


def save_manifest(manifest: CurationManifest, path: str | Path) -> None:
    payload = {
        "dataset_name": manifest.dataset_name,
        "entries": [
            {
                "video_id": e.video_id,
                "fps": e.fps,
                "audio_hz": e.audio_hz,
                "audio_channels": e.audio_channels,
                "duration_s": e.duration_s,
                "scene_spans": [list(span) for span in e.scene_spans],
                "quality_scores": list(e.quality_scores) if e.quality_scores else None,
                "asd_score": e.asd_score,
                "path": e.path,
            }
            for e in manifest.entries
        ],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def report_to_json(report: CurationReport) -> str:
    counts = report.reason_counts()
    payload = {
        "dataset_name": report.dataset_name,
        "kept": [
            {"video_id": c.video_id, "start_s": c.start_s, "end_s": c.end_s}
            for c in report.kept
        ],
        "discarded": [
            {
                "video_id": d.clip.video_id,
                "start_s": d.clip.start_s,
                "end_s": d.clip.end_s,
                "reason": d.reason.value,
            }
            for d in report.discarded
        ],
        "stats": {
            "kept_clips": len(report.kept),
            "discarded_clips": len(report.discarded),
            "kept_hours": report.kept_hours,
            "reasons": counts,
        },
    }
    return json.dumps(payload, indent=2)


def report_summary(report: CurationReport) -> str:
    """Human-readable summary table of the curation outcome."""
    counts = report.reason_counts()
    total = len(report.kept) + len(report.discarded)
    lines = [
        f"dataset: {report.dataset_name}",
        f"{'clips total':<24}{total:>8}",
        f"{'kept':<24}{len(report.kept):>8}",
        f"{'kept hours':<24}{report.kept_hours:>8.3f}",
    ]
    for reason in DiscardReason:
        lines.append(f"{'discarded ' + reason.value:<24}{counts[reason.value]:>8}")
    return "\n".join(lines)
