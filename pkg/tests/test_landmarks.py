from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipsynckit.landmarks import (
    DegenerateLandmarksError,
    FaceBox,
    LandmarkFrame,
    LandmarkTrack,
    face_bounding_box,
    is_mouth_open,
    load_track,
    mouth_aspect_ratio,
    save_track,
)

IMG = 1000


def make_frame(points, frame_index=0, w=IMG, h=IMG):
    return LandmarkFrame(
        frame_index=frame_index, points=np.asarray(points, dtype=float),
        image_width=w, image_height=h,
    )


def frame_with_mouth(vertical_gap, corner_gap, center=(500.0, 500.0)):
    """A frame whose MAR-relevant points are set explicitly."""
    pts = np.tile(np.array(center), (68, 1))
    pts += np.linspace(0, 40, 68)[:, None] * np.array([1.0, 0.5])  # non-degenerate box
    cx, cy = center
    pts[62] = (cx, cy - vertical_gap / 2.0)
    pts[66] = (cx, cy + vertical_gap / 2.0)
    pts[48] = (cx - corner_gap / 2.0, cy)
    pts[54] = (cx + corner_gap / 2.0, cy)
    return make_frame(pts)


class TestLandmarkFrame:
    def test_requires_68_points(self):
        with pytest.raises(ValueError, match="68"):
            make_frame(np.zeros((5, 2)))

    def test_rejects_out_of_bounds(self):
        pts = np.full((68, 2), 10.0)
        pts[0] = (-1.0, 5.0)
        with pytest.raises(ValueError, match="x coordinates"):
            make_frame(pts)

    def test_rejects_nonfinite(self):
        pts = np.full((68, 2), 10.0)
        pts[3, 1] = np.nan
        with pytest.raises(ValueError, match="finite"):
            make_frame(pts)

    def test_points_immutable(self):
        frame = frame_with_mouth(10, 40)
        with pytest.raises(ValueError):
            frame.points[0, 0] = 1.0


class TestLandmarkTrack:
    def test_frame_index_strictly_increasing(self):
        f0 = frame_with_mouth(10, 40)
        with pytest.raises(ValueError, match="strictly increasing"):
            LandmarkTrack(video_id="v", frames=(f0, f0))

    def test_dimensions_must_agree(self):
        pts = np.full((68, 2), 10.0)
        f0 = make_frame(pts, frame_index=0, w=100, h=100)
        f1 = make_frame(pts, frame_index=1, w=200, h=100)
        with pytest.raises(ValueError, match="dimensions"):
            LandmarkTrack(video_id="v", frames=(f0, f1))

    def test_positive_fps(self):
        with pytest.raises(ValueError, match="fps"):
            LandmarkTrack(video_id="v", frames=(), fps=0.0)


class TestMouthAspectRatio:
    def test_quarter_ratio(self):
        assert mouth_aspect_ratio(frame_with_mouth(10, 40)) == 0.25

    def test_closed_mouth(self):
        assert mouth_aspect_ratio(frame_with_mouth(0, 40)) == 0.0

    def test_collapsed_mouth_is_zero(self):
        frame = frame_with_mouth(0, 0)
        assert mouth_aspect_ratio(frame) == 0.0

    def test_degenerate_corners_raise(self):
        with pytest.raises(DegenerateLandmarksError):
            mouth_aspect_ratio(frame_with_mouth(10, 0))

    def test_matches_bruteforce_on_sine_fixture(self, sine_track):
        for frame in sine_track.frames:
            p = frame.points
            vertical = math.hypot(p[62, 0] - p[66, 0], p[62, 1] - p[66, 1])
            horizontal = math.hypot(p[48, 0] - p[54, 0], p[48, 1] - p[54, 1])
            expected = vertical / horizontal
            assert mouth_aspect_ratio(frame) == pytest.approx(expected, abs=1e-9)

    @given(
        corner=st.floats(10.0, 200.0),
        ratio=st.floats(0.0, 2.0),
        scale=st.floats(0.01, 4.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_scale_invariance(self, corner, ratio, scale):
        base = frame_with_mouth(ratio * corner, corner)
        scaled = make_frame(base.points * scale, w=10 * IMG, h=10 * IMG)
        assert mouth_aspect_ratio(scaled) == pytest.approx(
            mouth_aspect_ratio(base), abs=1e-12
        )

    @given(
        angle=st.floats(-math.pi, math.pi),
        dx=st.floats(-50.0, 50.0),
        dy=st.floats(-50.0, 50.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_rigid_transform_invariance(self, angle, dx, dy):
        base = frame_with_mouth(24.0, 80.0)
        rot = np.array(
            [[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]
        )
        center = np.array([500.0, 500.0])
        moved = (base.points - center) @ rot.T + center + np.array([dx, dy])
        frame = make_frame(moved)
        assert mouth_aspect_ratio(frame) == pytest.approx(
            mouth_aspect_ratio(base), abs=1e-9
        )


class TestFaceBoundingBox:
    def test_attained_extremes(self, rng):
        pts = rng.uniform([100, 150], [200, 300], size=(68, 2))
        pts[0] = (100, 150)
        pts[1] = (200, 300)
        box = face_bounding_box(make_frame(pts))
        assert (box.left, box.top, box.right, box.bottom) == (100, 150, 200, 300)

    def test_repeated_point_rejected(self):
        pts = np.full((68, 2), 42.0)
        with pytest.raises(ValueError, match="degenerate"):
            face_bounding_box(make_frame(pts))

    def test_matches_scan_oracle(self, rng):
        for _ in range(20):
            pts = rng.uniform(0, IMG, size=(68, 2))
            box = face_bounding_box(make_frame(pts))
            left = min(p[0] for p in pts)
            top = min(p[1] for p in pts)
            right = max(p[0] for p in pts)
            bottom = max(p[1] for p in pts)
            assert (box.left, box.top, box.right, box.bottom) == (left, top, right, bottom)

    def test_contains_every_landmark(self, sine_track):
        for frame in sine_track.frames:
            box = face_bounding_box(frame)
            assert (frame.points[:, 0] >= box.left).all()
            assert (frame.points[:, 0] <= box.right).all()
            assert (frame.points[:, 1] >= box.top).all()
            assert (frame.points[:, 1] <= box.bottom).all()

    def test_facebox_invariant(self):
        with pytest.raises(ValueError):
            FaceBox(left=10, top=0, right=10, bottom=5)


class TestIsMouthOpen:
    def test_above_threshold(self):
        assert is_mouth_open(frame_with_mouth(10.4, 40), 0.25) is True

    def test_exactly_at_threshold_is_closed(self):
        assert is_mouth_open(frame_with_mouth(10, 40), 0.25) is False

    def test_below_threshold(self):
        assert is_mouth_open(frame_with_mouth(4, 40), 0.25) is False

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError):
            is_mouth_open(frame_with_mouth(10, 40), 0.0)


class TestTrackIO:
    def test_roundtrip(self, sine_track, tmp_path):
        path = save_track(sine_track, tmp_path)
        assert path.name == "sinusoidal.landmarks.jsonl"
        loaded = load_track(path)
        assert loaded.video_id == sine_track.video_id
        assert len(loaded) == len(sine_track)
        for a, b in zip(loaded.frames, sine_track.frames):
            assert a.frame_index == b.frame_index
            np.testing.assert_allclose(a.points, b.points)

    def test_bad_line_reports_location(self, tmp_path):
        path = tmp_path / "v.landmarks.jsonl"
        path.write_text('{"frame": 0, "w": 10}\n', encoding="utf-8")
        with pytest.raises(ValueError, match="v.landmarks.jsonl:1"):
            load_track(path)
