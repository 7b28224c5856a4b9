"""Domain types: frames, tunable parameters with presets, detector state.

Frames are plain 2-D float64 numpy arrays (rows = y, columns = x) of
non-negative luminance values. 8-bit inputs are promoted to float on
ingestion and kept on their native 0..255 scale; the downstream metrics
are ratios, so the absolute scale is irrelevant.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch, InvalidWindow, NonPositiveRadius, NonPositiveSigma


def as_frame(data) -> np.ndarray:
    """Coerce input to a 2-D float64 frame, checking non-negativity."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"frame must be 2-D, got shape {arr.shape}")
    if np.any(arr < 0):
        raise ValueError("frame contains negative luminance values")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"frame shapes differ: {a.shape} vs {b.shape}")


class TruncationWarning(UserWarning):
    """Kernel radius is too small to cover the Gaussian support well."""


@dataclass(frozen=True)
class ParameterSet:
    """All detector tunables.

    sigma_e / sigma_i: spatial std-dev (pixels) of the excitatory and
    inhibitory Gaussian spreads. a: inhibition strength. alpha, beta, lam:
    constants of the radial inhibition latency (frames domain). r: kernel
    calculating radius in pixels. k: grouping amplification. t0: decay
    threshold baseline. m: feed-forward-inhibition threshold coefficient.
    t_mp: spiking threshold on the normalized membrane potential.
    n_sp: consecutive spikes required to confirm a collision.
    omega: side length of the square grouping window.
    interpolate_latency: split fractional latencies between the two
    neighbouring integer frame delays instead of rounding (off by default).
    """

    sigma_e: float = 1.0
    sigma_i: float = 5.0
    a: float = 1.5
    alpha: float = -0.1
    beta: float = 0.5
    lam: float = 0.7
    r: int = 4
    k: float = 1.0
    t0: float = 0.5
    m: float = 0.4
    t_mp: float = 0.4
    n_sp: int = 2
    omega: int = 4
    interpolate_latency: bool = False

    def with_overrides(self, **kwargs) -> "ParameterSet":
        return replace(self, **kwargs)


def validate(params: ParameterSet) -> ParameterSet:
    """Check invariants; returns the set unchanged if valid.

    A radius too small to cover the spatial Gaussians (r < ceil(2*max sigma))
    emits a TruncationWarning rather than an error: truncated kernels are a
    legitimate speed/quality trade-off.
    """
    if params.sigma_e <= 0:
        raise NonPositiveSigma(f"sigma_e must be > 0, got {params.sigma_e}")
    if params.sigma_i <= 0:
        raise NonPositiveSigma(f"sigma_i must be > 0, got {params.sigma_i}")
    if params.r < 1:
        raise NonPositiveRadius(f"r must be >= 1, got {params.r}")
    if params.a < 0:
        raise ValueError(f"a must be >= 0, got {params.a}")
    if params.n_sp < 1:
        raise InvalidWindow(f"n_sp must be >= 1, got {params.n_sp}")
    if params.omega < 1:
        raise InvalidWindow(f"omega must be >= 1, got {params.omega}")
    needed = math.ceil(2.0 * max(params.sigma_e, params.sigma_i))
    if params.r < needed:
        warnings.warn(
            f"radius r={params.r} truncates the spatial kernels "
            f"(recommend r >= {needed} for sigma up to "
            f"{max(params.sigma_e, params.sigma_i)})",
            TruncationWarning,
            stacklevel=2,
        )
    return params


# Shared constants (grouping gain, thresholds, alarm length) merged with the
# nine comparative tunings of the temporal/spatial distributions. Sets 1-3
# disable the radial latency (constant one-frame inhibition delay); 4-6 enable
# it; 7-9 widen the spatial spreads and vary the calculating radius.
_SETS: dict[str, dict] = {
    "set1": dict(alpha=0.0, beta=0.0, lam=0.0, sigma_e=0.35, sigma_i=1.0, a=1.5, t0=0.5, r=4),
    "set2": dict(alpha=0.0, beta=0.0, lam=0.0, sigma_e=0.35, sigma_i=1.8, a=1.5, t0=0.5, r=4),
    "set3": dict(alpha=0.0, beta=0.0, lam=0.0, sigma_e=0.35, sigma_i=2.5, a=1.5, t0=0.5, r=4),
    "set4": dict(alpha=-0.1, beta=0.5, lam=0.7, sigma_e=0.35, sigma_i=1.0, a=1.5, t0=0.5, r=4),
    "set5": dict(alpha=-0.1, beta=0.5, lam=0.7, sigma_e=0.35, sigma_i=1.8, a=1.5, t0=0.5, r=4),
    "set6": dict(alpha=-0.1, beta=0.5, lam=0.7, sigma_e=0.35, sigma_i=2.5, a=1.5, t0=0.5, r=4),
    "set7": dict(alpha=-0.1, beta=0.5, lam=0.7, sigma_e=1.0, sigma_i=5.0, a=1.5, t0=0.5, r=4),
    "set8": dict(alpha=-0.1, beta=0.5, lam=0.7, sigma_e=1.0, sigma_i=5.0, a=1.5, t0=0.5, r=6),
    "set9": dict(alpha=-0.1, beta=0.5, lam=0.7, sigma_e=1.5, sigma_i=5.0, a=1.5, t0=0.5, r=6),
}

# Constants common to every preset.
TABLE_CONSTANTS = dict(k=1.0, t0=0.5, m=0.4, t_mp=0.4, n_sp=2)

PRESET_NAMES = tuple(sorted(_SETS))


def preset(name: str) -> ParameterSet:
    """Named parameter preset: "set1" .. "set9", or "table1" for just the
    shared constants with default spatial/temporal tunings."""
    if name == "table1":
        return ParameterSet(**TABLE_CONSTANTS)
    try:
        overrides = _SETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: table1, {', '.join(PRESET_NAMES)}")
    merged = {**TABLE_CONSTANTS, **overrides}
    return ParameterSet(**merged)


@dataclass
class FrameReport:
    """Per-frame detector outputs."""

    frame_index: int
    ffi: float
    t_de: float
    k_raw: float
    k_norm: float
    attenuation_db: float | None
    spike: bool
    alarm: bool


class DetectorState:
    """Mutable per-detector state: ring buffer of past luminance-change
    frames (most recent first), recent spike flags, and a frame counter.

    Single-owner mutable; never share one instance across threads.
    """

    def __init__(self, depth: int, n_sp: int):
        if depth < 1:
            raise ValueError("history depth must be >= 1")
        self.depth = depth
        self.p_history: deque[np.ndarray] = deque(maxlen=depth)
        self.spike_history: deque[bool] = deque(maxlen=max(n_sp, 1))
        self.frame_index = 0
        self.peak = 0.0  # running maximum of k_raw, for online normalization

    def push_p(self, p: np.ndarray) -> None:
        self.p_history.appendleft(p)

    def push_spike(self, flag: bool) -> None:
        self.spike_history.append(flag)
