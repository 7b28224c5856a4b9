"""Spatial kernels and the delay-sliced inhibition kernel bank.

The excitatory spread is a truncated 2-D Gaussian. The inhibitory spread is
the same Gaussian shape, but each spatial offset acts after a radial,
distance-dependent latency; quantizing that latency to whole frame delays
partitions the Gaussian into per-delay slices. No renormalization is applied
after truncation, so the excitation/inhibition balance set by the strength
coefficient is independent of the radius apart from genuine tail loss.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLatency, NonPositiveRadius, NonPositiveSigma


@dataclass(frozen=True)
class SpatialKernel:
    radius: int
    weights: np.ndarray  # (2r+1, 2r+1), non-negative

    def __post_init__(self):
        side = 2 * self.radius + 1
        assert self.weights.shape == (side, side)


@dataclass(frozen=True)
class InhibitionKernelBank:
    """Spatial weight slices indexed by integer frame delay >= 1.

    The element-wise sum of all slices reproduces the full (truncated)
    spatial Gaussian.
    """

    radius: int
    slices: dict[int, np.ndarray]
    d_max: int

    def total_weights(self) -> np.ndarray:
        side = 2 * self.radius + 1
        out = np.zeros((side, side))
        for w in self.slices.values():
            out += w
        return out


def gaussian_kernel(sigma: float, radius: int) -> SpatialKernel:
    """Truncated 2-D Gaussian with the analytic normalizer 1/(2*pi*sigma^2)."""
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")
    if radius < 1:
        raise NonPositiveRadius(f"radius must be >= 1, got {radius}")
    ax = np.arange(-radius, radius + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax)
    weights = np.exp(-(xx**2 + yy**2) / (2.0 * sigma**2)) / (2.0 * math.pi * sigma**2)
    return SpatialKernel(radius=radius, weights=weights)


def latency_at(x: float, y: float, alpha: float, beta: float, lam: float) -> float:
    """Inhibition latency (frames) at spatial offset (x, y).

    Grows with distance from the origin: alpha + 1/(beta + exp(-lam^2 * d^2)).
    """
    denom = beta + math.exp(-(lam**2) * (x * x + y * y))
    if denom <= sys.float_info.epsilon:
        raise DegenerateLatency(f"latency denominator {denom} at offset ({x}, {y})")
    return alpha + 1.0 / denom


def latency_map(alpha: float, beta: float, lam: float, radius: int) -> np.ndarray:
    """Latency evaluated on the (2r+1)^2 offset grid."""
    side = 2 * radius + 1
    out = np.empty((side, side))
    for iy, y in enumerate(range(-radius, radius + 1)):
        for ix, x in enumerate(range(-radius, radius + 1)):
            out[iy, ix] = latency_at(x, y, alpha, beta, lam)
    return out


def inhibition_bank(
    sigma_i: float,
    alpha: float,
    beta: float,
    lam: float,
    radius: int,
    interpolate: bool = False,
) -> InhibitionKernelBank:
    """Build the delay-sliced inhibition bank.

    Default: each offset's Gaussian weight goes to the slice at delay
    round-half-up(latency), floored at 1, so the slices partition the
    spatial Gaussian exactly. With interpolate=True, fractional latencies
    split the weight linearly between the two neighbouring integer delays
    (still summing to the full Gaussian).
    """
    gauss = gaussian_kernel(sigma_i, radius).weights
    lat = latency_map(alpha, beta, lam, radius)
    slices: dict[int, np.ndarray] = {}
    side = 2 * radius + 1

    def slot(d: int) -> np.ndarray:
        if d not in slices:
            slices[d] = np.zeros((side, side))
        return slices[d]

    for iy in range(side):
        for ix in range(side):
            tau = max(lat[iy, ix], 1.0)
            w = gauss[iy, ix]
            if interpolate:
                lo = math.floor(tau)
                frac = tau - lo
                slot(lo)[iy, ix] += (1.0 - frac) * w
                if frac > 0.0:
                    slot(lo + 1)[iy, ix] += frac * w
            else:
                d = int(math.floor(tau + 0.5))  # round half up
                slot(d)[iy, ix] += w

    # drop all-zero slices possibly created by interpolation bookkeeping
    slices = {d: w for d, w in slices.items() if np.any(w != 0.0)}
    return InhibitionKernelBank(radius=radius, slices=slices, d_max=max(slices))


def dump_kernel(kernel: SpatialKernel) -> str:
    """Human-readable grid dump (inspection aid, not a stable format)."""
    lines = [f"spatial kernel r={kernel.radius}"]
    for row in kernel.weights:
        lines.append(" ".join(f"{w:.6g}" for w in row))
    return "\n".join(lines)


def dump_bank(bank: InhibitionKernelBank) -> str:
    lines = [f"inhibition bank r={bank.radius} d_max={bank.d_max}"]
    for d in sorted(bank.slices):
        lines.append(f"delay {d}:")
        for row in bank.slices[d]:
            lines.append(" ".join(f"{w:.6g}" for w in row))
    return "\n".join(lines)
