"""File helpers shared across the toolkit: binary PGM and atomic writes.

All output files are written via a temp-file-then-rename so partially
written files are never observed at their final path.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np


def atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_pgm(path: str | Path, pixels: np.ndarray) -> None:
    """Write a binary (P5) PGM with maxval 255.

    ``pixels`` is a [height, width] array of intensities in [0, 255];
    values are rounded to the nearest integer.
    """
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"PGM payload must be 2-D, got ndim={arr.ndim}")
    if arr.min() < 0 or arr.max() > 255:
        raise ValueError("PGM intensities must lie in [0, 255]")
    h, w = arr.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    body = np.rint(arr).astype(np.uint8).tobytes()
    atomic_write_bytes(path, header + body)


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary (P5) PGM into a [height, width] uint8 array."""
    data = Path(path).read_bytes()
    # Header: magic, width, height, maxval as whitespace-separated tokens,
    # possibly interleaved with '#' comment lines.
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace byte after maxval per the P5 format
    magic, w_tok, h_tok, maxval_tok = tokens
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    w, h, maxval = int(w_tok), int(h_tok), int(maxval_tok)
    if maxval != 255:
        raise ValueError(f"{path}: expected maxval 255, got {maxval}")
    body = data[pos : pos + w * h]
    if len(body) != w * h:
        raise ValueError(f"{path}: expected {w * h} pixels, found {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w).copy()


def frame_pgm_name(frame_index: int) -> str:
    return f"{frame_index:06d}.pgm"
