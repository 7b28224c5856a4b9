"""Deterministic synthetic scenes: looming, receding and translating objects.

Rendering is binary (object luminance vs background, no anti-aliasing) so
that hand-checked expectations are exact. Looming geometry follows a pinhole
projection: on-image half-extent = focal * half_size / distance, which grows
at an accelerating rate as the object approaches, the signature the detector
is tuned to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContactBeforeEnd, ObjectOutOfView


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    frames: int
    kind: str = "looming"  # looming | receding | translating
    shape: str = "square"  # square | disc
    object_luminance: float = 0.0
    background_luminance: float = 255.0
    # looming / receding geometry (world units are arbitrary, e.g. meters)
    half_size: float = 0.5
    speed: float = 0.1  # world units per frame
    start_distance: float = 10.0
    focal: float = 100.0  # pixels
    # translating geometry
    pixel_speed: float = 1.0  # pixels per frame
    vertical_position: int | None = None
    object_pixel_size: int = 4

    def __post_init__(self):
        if self.frames < 2:
            raise ValueError("need at least 2 frames")
        if self.kind not in ("looming", "receding", "translating"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.shape not in ("square", "disc"):
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.kind in ("looming", "receding"):
            if self.start_distance <= 0 or self.speed <= 0:
                raise ValueError("start_distance and speed must be > 0")


def looming_half_extent(spec: SceneSpec, t: int) -> float:
    """Continuous on-image half-extent (pixels) at frame t, pre-clamping."""
    distance = spec.start_distance - spec.speed * t
    if distance <= 0:
        raise ContactBeforeEnd(
            f"object reaches contact at frame {t} (of {spec.frames})"
        )
    return spec.focal * spec.half_size / distance


def _render_centered(spec: SceneSpec, half_extent: float) -> np.ndarray:
    frame = np.full((spec.height, spec.width), spec.background_luminance)
    cy = (spec.height - 1) / 2.0
    cx = (spec.width - 1) / 2.0
    half_extent = min(half_extent, max(spec.width, spec.height) / 2.0)
    ys = np.arange(spec.height)[:, None] - cy
    xs = np.arange(spec.width)[None, :] - cx
    if spec.shape == "square":
        mask = (np.abs(ys) <= half_extent) & (np.abs(xs) <= half_extent)
    else:
        mask = ys**2 + xs**2 <= half_extent**2
    frame[mask] = spec.object_luminance
    return frame


def _render_looming(spec: SceneSpec) -> list[np.ndarray]:
    frames = []
    for t in range(spec.frames):
        extent = looming_half_extent(spec, t)
        if extent < 0.5:
            raise ObjectOutOfView(
                f"object smaller than one pixel at frame {t} "
                f"(half-extent {extent:.3f} px); increase focal or half_size"
            )
        frames.append(_render_centered(spec, extent))
    return frames


def _render_translating(spec: SceneSpec) -> list[np.ndarray]:
    size = spec.object_pixel_size
    top = spec.vertical_position
    if top is None:
        top = (spec.height - size) // 2
    if top < 0 or top + size > spec.height:
        raise ObjectOutOfView(f"vertical position {top} puts object off-frame")
    if size > spec.width:
        raise ObjectOutOfView("object wider than the frame")
    frames = []
    xs = np.arange(spec.width)[None, :]
    for t in range(spec.frames):
        frame = np.full((spec.height, spec.width), spec.background_luminance)
        left = spec.pixel_speed * t
        mask = (xs >= left) & (xs < left + size)
        frame[top : top + size, mask[0]] = spec.object_luminance
        frames.append(frame)
    return frames


def render_sequence(spec: SceneSpec) -> list[np.ndarray]:
    """Render the full frame sequence for a scene. Deterministic."""
    if spec.kind == "looming":
        return _render_looming(spec)
    if spec.kind == "receding":
        forward = _render_looming(
            SceneSpec(**{**spec.__dict__, "kind": "looming"})
        )
        return list(reversed(forward))
    return _render_translating(spec)


def speed_sweep(base: SceneSpec, speeds: list[float]) -> list[list[np.ndarray]]:
    """One translating sequence per pixel speed, identical otherwise."""
    if not speeds:
        raise ValueError("speeds must be non-empty")
    if any(sp < 1 for sp in speeds):
        raise ValueError("translating speeds must be >= 1 px/frame")
    out = []
    for sp in speeds:
        spec = SceneSpec(**{**base.__dict__, "kind": "translating", "pixel_speed": sp})
        out.append(render_sequence(spec))
    return out
