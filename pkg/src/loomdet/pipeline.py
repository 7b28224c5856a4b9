"""The layered looming-detection computation.

Per frame: luminance change (P) -> distributed excitation (E) and delayed
distributed inhibition (I) -> rectified presynaptic sum (S) -> neighbourhood
grouping with a whole-field-change-mediated decay threshold (G) -> scalar
membrane potential -> spike and collision alarm.

All convolutions use zero padding; border pixels receive symmetrically less
excitation and inhibition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DetectorState, FrameReport, ParameterSet, check_same_shape, validate
from .errors import (
    DimensionMismatch,
    EmptyHistory,
    KernelTooLarge,
    NonPositiveDenominator,
)
from .kernels import InhibitionKernelBank, SpatialKernel, gaussian_kernel, inhibition_bank


@dataclass
class LayerOutputs:
    p: np.ndarray
    e: np.ndarray
    i: np.ndarray
    s: np.ndarray
    g: np.ndarray
    g_thresholded: np.ndarray


def photoreceptor(current: np.ndarray, previous: np.ndarray) -> np.ndarray:
    """Absolute per-pixel luminance change between consecutive frames."""
    check_same_shape(current, previous)
    return np.abs(current - previous)


def _correlate(frame: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Zero-padded 2-D correlation as a sum of weighted shifts.

    Skips zero weights, so a delay slice of the inhibition bank costs only
    its own nonzero offsets and the work across all slices totals one full
    kernel pass. Cost scales with the kernel area, nothing else.
    """
    r = weights.shape[0] // 2
    h, w = frame.shape
    out = np.zeros_like(frame)
    for iy in range(weights.shape[0]):
        for ix in range(weights.shape[1]):
            wgt = weights[iy, ix]
            if wgt == 0.0:
                continue
            dy, dx = iy - r, ix - r
            y0, y1 = max(0, -dy), min(h, h - dy)
            x0, x1 = max(0, -dx), min(w, w - dx)
            out[y0:y1, x0:x1] += wgt * frame[y0 + dy : y1 + dy, x0 + dx : x1 + dx]
    return out


def excitation(p: np.ndarray, w_e: SpatialKernel) -> np.ndarray:
    """Spatially distributed excitation: correlation of P with the
    excitatory kernel, zero-padded at the border."""
    if w_e.radius > min(p.shape):
        raise KernelTooLarge(f"kernel radius {w_e.radius} exceeds frame {p.shape}")
    return _correlate(p, w_e.weights)


def inhibition(p_history: Sequence[np.ndarray], bank: InhibitionKernelBank) -> np.ndarray:
    """Delayed distributed inhibition.

    p_history is most-recent-first: p_history[0] is the change frame one
    step back, p_history[1] two steps back, etc. Delay slices that reach
    past the available history contribute zero (warm-up).
    """
    if len(p_history) == 0:
        raise EmptyHistory("inhibition needs at least one past P frame")
    out = np.zeros_like(p_history[0])
    for d, weights in bank.slices.items():
        if d <= len(p_history):
            out += _correlate(p_history[d - 1], weights)
    return out


def presynaptic_sum(e: np.ndarray, i: np.ndarray, a: float) -> np.ndarray:
    """Rectified excitation minus scaled inhibition: max(0, E - a*I)."""
    check_same_shape(e, i)
    return np.maximum(e - a * i, 0.0)


def _window_offsets(omega: int) -> tuple[int, int]:
    # Even windows cannot be centered; bias toward positive offsets,
    # e.g. omega=4 covers offsets {-1, 0, 1, 2}.
    lo = -((omega - 1) // 2)
    hi = omega - 1 + lo
    return lo, hi


def grouping(s: np.ndarray, k: float, omega: int = 4) -> np.ndarray:
    """Neighbourhood amplification: G = S * Ce with Ce the k-scaled sum of S
    over the omega x omega window around each pixel (zero padded)."""
    lo, hi = _window_offsets(omega)
    h, w = s.shape
    padded = np.pad(s, ((-lo, hi), (-lo, hi)))
    ce = np.zeros_like(s)
    for dy in range(lo, hi + 1):
        for dx in range(lo, hi + 1):
            ce += padded[-lo + dy : -lo + dy + h, -lo + dx : -lo + dx + w]
    return s * (k * ce)


def ffi_level(p_history: Sequence[np.ndarray]) -> float:
    """Whole-field feed-forward inhibition: sum of the previous change frame."""
    if len(p_history) == 0:
        raise EmptyHistory("ffi needs at least one past P frame")
    return float(np.abs(p_history[0]).sum())


def decay_threshold(ffi: float, t0: float, m: float, n_cell: int) -> float:
    if n_cell <= 0 or m <= 0:
        raise NonPositiveDenominator(f"n_cell={n_cell}, m={m}")
    return ffi / (n_cell * m) * t0


def apply_threshold(g: np.ndarray, t_de: float) -> np.ndarray:
    return np.where(g >= t_de, g, 0.0)


def membrane_potential(g_thresholded: np.ndarray) -> float:
    return float(np.abs(g_thresholded).sum())


def spike(k_norm: float, t_mp: float) -> bool:
    return k_norm >= t_mp


def confirm_collision(spike_history: Sequence[bool], n_sp: int) -> bool:
    """Alarm iff the most recent n_sp flags are all spikes."""
    if n_sp < 1:
        raise ValueError("n_sp must be >= 1")
    if len(spike_history) < n_sp:
        return False
    return all(spike_history[-n_sp:])


def normalize_offline(k_raw: Sequence[float]) -> np.ndarray:
    """Whole-sequence peak normalization; all zeros stay all zeros."""
    arr = np.asarray(k_raw, dtype=np.float64)
    peak = arr.max() if arr.size else 0.0
    if peak <= 0.0:
        return np.zeros_like(arr)
    return arr / peak


def normalize_online(k_raw: float, peak_so_far: float, eps: float = 1.0) -> float:
    """Running-peak normalization; never exceeds 1."""
    return k_raw / max(peak_so_far, k_raw, eps)


class Detector:
    """Stateful frame-by-frame looming detector.

    Online use: call step() per frame; spike/alarm use running-peak
    normalization. For offline (two-pass, whole-sequence) normalization see
    analysis.run_sequence.
    """

    def __init__(self, params: ParameterSet, width: int, height: int):
        self.params = validate(params)
        self.width = width
        self.height = height
        self.w_e = gaussian_kernel(params.sigma_e, params.r)
        self.bank = inhibition_bank(
            params.sigma_i, params.alpha, params.beta, params.lam, params.r,
            interpolate=params.interpolate_latency,
        )
        self.state = DetectorState(depth=self.bank.d_max + 1, n_sp=params.n_sp)
        self._prev_luminance: np.ndarray | None = None

    @property
    def d_max(self) -> int:
        return self.bank.d_max

    def step(self, frame: np.ndarray) -> tuple[FrameReport, LayerOutputs]:
        if frame.shape != (self.height, self.width):
            raise DimensionMismatch(
                f"expected {(self.height, self.width)}, got {frame.shape}"
            )
        params = self.params
        state = self.state

        if self._prev_luminance is None:
            p = np.zeros_like(frame, dtype=np.float64)
        else:
            p = photoreceptor(frame, self._prev_luminance)
        self._prev_luminance = np.array(frame, dtype=np.float64)

        e = excitation(p, self.w_e)
        history = list(state.p_history)
        if history:
            i = inhibition(history, self.bank)
            ffi = ffi_level(history)
        else:
            i = np.zeros_like(p)
            ffi = 0.0
        s = presynaptic_sum(e, i, params.a)

        t_de = decay_threshold(ffi, params.t0, params.m, self.width * self.height)
        g = grouping(s, params.k, params.omega)
        g_t = apply_threshold(g, t_de)
        k_raw = membrane_potential(g_t)

        state.push_p(p)
        state.frame_index += 1

        state.peak = max(state.peak, k_raw)
        k_norm = normalize_online(k_raw, state.peak)

        warmed_up = state.frame_index >= self.d_max + 1
        spiked = spike(k_norm, params.t_mp) if warmed_up else False
        state.push_spike(spiked)
        alarm = confirm_collision(list(state.spike_history), params.n_sp)

        report = FrameReport(
            frame_index=state.frame_index,
            ffi=ffi,
            t_de=t_de,
            k_raw=k_raw,
            k_norm=k_norm,
            attenuation_db=None,  # filled in by analysis.run_sequence
            spike=spiked,
            alarm=alarm,
        )
        layers = LayerOutputs(p=p, e=e, i=i, s=s, g=g, g_thresholded=g_t)
        return report, layers


def dpc_oracle(
    history: Sequence[np.ndarray],
    sigma_e: float,
    sigma_i: float,
    alpha: float,
    beta: float,
    lam: float,
    a: float,
    radius: int,
) -> np.ndarray:
    """Brute-force reference for the presynaptic filter output S.

    history[0] is the current change frame, history[d] the frame d steps
    back. Everything is computed by literal nested sums with inline kernel
    evaluation, independently of the optimized path. Small frames only.
    """
    h, w = history[0].shape
    norm_e = 1.0 / (2.0 * math.pi * sigma_e**2)
    norm_i = 1.0 / (2.0 * math.pi * sigma_i**2)
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            e_acc = 0.0
            i_acc = 0.0
            for v in range(-radius, radius + 1):
                for u in range(-radius, radius + 1):
                    yy, xx = y + v, x + u
                    dist2 = u * u + v * v
                    if 0 <= yy < h and 0 <= xx < w:
                        e_acc += history[0][yy, xx] * math.exp(-dist2 / (2 * sigma_e**2)) * norm_e
                    tau = alpha + 1.0 / (beta + math.exp(-(lam**2) * dist2))
                    d = int(math.floor(max(tau, 1.0) + 0.5))
                    if d < len(history) and 0 <= yy < h and 0 <= xx < w:
                        i_acc += history[d][yy, xx] * math.exp(-dist2 / (2 * sigma_i**2)) * norm_i
            out[y, x] = max(0.0, e_acc - a * i_acc)
    return out


def dpc_oracle_with_bank(
    history: Sequence[np.ndarray],
    w_e: SpatialKernel,
    bank: InhibitionKernelBank,
    a: float,
) -> np.ndarray:
    """Brute-force S for an explicit kernel bank (arbitrary delay slices)."""
    h, w = history[0].shape
    radius = w_e.radius
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            e_acc = 0.0
            i_acc = 0.0
            for v in range(-radius, radius + 1):
                for u in range(-radius, radius + 1):
                    yy, xx = y + v, x + u
                    if not (0 <= yy < h and 0 <= xx < w):
                        continue
                    e_acc += history[0][yy, xx] * w_e.weights[v + radius, u + radius]
                    for d, weights in bank.slices.items():
                        if d < len(history):
                            i_acc += history[d][yy, xx] * weights[v + radius, u + radius]
            out[y, x] = max(0.0, e_acc - a * i_acc)
    return out


def dpc_fast(
    history: Sequence[np.ndarray],
    w_e: SpatialKernel,
    bank: InhibitionKernelBank,
    a: float,
) -> np.ndarray:
    """Optimized S from an explicit history (counterpart of the oracles)."""
    e = excitation(history[0], w_e)
    if len(history) > 1:
        i = inhibition(list(history[1:]), bank)
    else:
        i = np.zeros_like(e)
    return presynaptic_sum(e, i, a)
