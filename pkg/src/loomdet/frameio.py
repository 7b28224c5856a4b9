"""Frame-sequence ingestion, area resizing, and report emission.

Input frames are 8-bit grayscale rasters (binary P5 graymaps or anything
Pillow can read); RGB inputs are collapsed with the standard luma weights
0.299/0.587/0.114. Reports are plain CSV, one row per frame.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import FrameReport
from .errors import EmptyDirectory, InvalidFactor, MixedDimensions, UnreadableFrame

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def _load_one(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            arr = np.asarray(img, dtype=np.float64)
    except (UnidentifiedImageError, OSError) as exc:
        raise UnreadableFrame(f"cannot read frame {path}: {exc}") from exc
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
        return LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b
    raise UnreadableFrame(f"unsupported channel layout in {path}: shape {arr.shape}")


def load_sequence(directory: str | Path) -> list[np.ndarray]:
    """Load all frames from a directory in filename (index) order.

    Needs at least two frames (one luminance difference); mixed frame sizes
    are rejected.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise EmptyDirectory(f"{directory} is not a directory")
    paths = sorted(p for p in directory.iterdir() if p.is_file())
    if len(paths) < 2:
        raise EmptyDirectory(f"{directory} holds {len(paths)} frame(s); need >= 2")
    frames = [_load_one(p) for p in paths]
    first = frames[0].shape
    for path, frame in zip(paths, frames):
        if frame.shape != first:
            raise MixedDimensions(
                f"{path} has size {frame.shape}, expected {first}"
            )
    return frames


def write_pgm(frame: np.ndarray, path: str | Path) -> None:
    """Write a frame as a binary (P5) 8-bit graymap."""
    data = np.clip(np.rint(frame), 0, 255).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def write_sequence(frames: Sequence[np.ndarray], directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for idx, frame in enumerate(frames):
        path = directory / f"{idx:04d}.pgm"
        write_pgm(frame, path)
        paths.append(path)
    return paths


def _area_weights(n_in: int, n_out: int) -> np.ndarray:
    """Row-stochastic (n_out, n_in) matrix averaging input cells over the
    exact fractional box each output cell covers."""
    weights = np.zeros((n_out, n_in))
    scale = n_in / n_out
    for j in range(n_out):
        lo, hi = j * scale, (j + 1) * scale
        i0, i1 = int(np.floor(lo)), int(np.ceil(hi))
        for i in range(i0, min(i1, n_in)):
            overlap = min(hi, i + 1) - max(lo, i)
            if overlap > 0:
                weights[j, i] = overlap
    weights /= weights.sum(axis=1, keepdims=True)
    return weights


def resize_to(frame: np.ndarray, width: int, height: int) -> np.ndarray:
    """Exact box/area-average resampling to the given output size."""
    h, w = frame.shape
    if width == w and height == h:
        return frame
    wy = _area_weights(h, height)
    wx = _area_weights(w, width)
    return wy @ frame @ wx.T


def resize_area(frame: np.ndarray, factor: float) -> np.ndarray:
    """Area-average downsampling by a uniform factor in (0, 1]."""
    if not (0.0 < factor <= 1.0):
        raise InvalidFactor(f"resize factor must be in (0, 1], got {factor}")
    if factor == 1.0:
        return frame
    h, w = frame.shape
    out_w = max(1, round(w * factor))
    out_h = max(1, round(h * factor))
    return resize_to(frame, out_w, out_h)


REPORT_COLUMNS = [
    "frame_index",
    "ffi",
    "t_de",
    "k_raw",
    "k_norm",
    "attenuation_db",
    "spike",
    "alarm",
]


def write_report_csv(reports: Sequence[FrameReport], path: str | Path) -> None:
    """One CSV row per frame; absent attenuation becomes an empty field."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for r in reports:
            att = "" if r.attenuation_db is None else repr(r.attenuation_db)
            writer.writerow(
                [
                    r.frame_index,
                    repr(r.ffi),
                    repr(r.t_de),
                    repr(r.k_raw),
                    repr(r.k_norm),
                    att,
                    int(r.spike),
                    int(r.alarm),
                ]
            )


def write_layer_dump(layers, directory: str | Path, frame_index: int) -> None:
    """Raw-grid dumps of the P/S/G layers for one frame (opt-in, heavy I/O)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in ("p", "s", "g"):
        np.savetxt(directory / f"{frame_index:04d}_{name}.txt", getattr(layers, name), fmt="%.9g")
