"""Run driver and quantitative metrics over detector traces.

attenuation: how strongly the presynaptic filter suppresses a stimulus,
10*log10(sum S / sum P) in dB. distinguishability (DA): mean membrane
potential near the looming peak over mean at a false-positive point; values
whose denominator window is silent are reported as the ABOVE_CAP sentinel
(infinity) rather than a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import FrameReport, ParameterSet
from .errors import WindowOutOfRange
from .pipeline import Detector, confirm_collision, normalize_offline, spike
from .stimulus import SceneSpec, render_sequence

ABOVE_CAP = math.inf  # sentinel for ratios whose denominator is silent
DA_COMPETENT = 10.0  # ratio above which looming is readily separable


@dataclass
class RunTrace:
    """Per-frame reports plus the layer sums needed by the attenuation metric."""

    reports: list[FrameReport]
    p_sums: list[float]
    s_sums: list[float]
    params: ParameterSet
    label: str = ""
    d_max: int = 1

    def __len__(self) -> int:
        return len(self.reports)

    @property
    def k_raw(self) -> np.ndarray:
        return np.array([r.k_raw for r in self.reports])

    @property
    def k_norm(self) -> np.ndarray:
        return np.array([r.k_norm for r in self.reports])


def attenuation(p_sum: float, s_sum: float) -> float | None:
    """Filter attenuation in dB; None when undefined (either sum is zero)."""
    if p_sum < 0 or s_sum < 0:
        raise ValueError("layer sums must be non-negative")
    if p_sum == 0.0 or s_sum == 0.0:
        return None
    return 10.0 * math.log10(s_sum / p_sum)


def run_sequence(
    frames: Sequence[np.ndarray],
    params: ParameterSet,
    norm_mode: str = "offline",
    label: str = "",
) -> RunTrace:
    """Run the full detector over a frame sequence.

    norm_mode "offline" (default): normalize the membrane potential by the
    whole-sequence peak in a second pass and re-derive spikes/alarms from
    the normalized values. "online": keep the running-peak normalization
    produced during the streaming pass.
    """
    if norm_mode not in ("offline", "online"):
        raise ValueError(f"unknown norm_mode {norm_mode!r}")
    height, width = frames[0].shape
    det = Detector(params, width=width, height=height)
    reports: list[FrameReport] = []
    p_sums: list[float] = []
    s_sums: list[float] = []
    for frame in frames:
        report, layers = det.step(frame)
        p_sums.append(float(layers.p.sum()))
        s_sums.append(float(layers.s.sum()))
        report.attenuation_db = attenuation(p_sums[-1], s_sums[-1])
        reports.append(report)

    if norm_mode == "offline":
        k_norms = normalize_offline([r.k_raw for r in reports])
        history: list[bool] = []
        for idx, (report, k_norm) in enumerate(zip(reports, k_norms)):
            report.k_norm = float(k_norm)
            warmed_up = idx + 1 >= det.d_max + 1
            report.spike = spike(report.k_norm, params.t_mp) if warmed_up else False
            history.append(report.spike)
            report.alarm = confirm_collision(history, params.n_sp)

    return RunTrace(
        reports=reports,
        p_sums=p_sums,
        s_sums=s_sums,
        params=params,
        label=label,
        d_max=det.d_max,
    )


def _check_window(trace_len: int, center: int, half_window: int) -> range:
    lo, hi = center - half_window, center + half_window
    if lo < 0 or hi >= trace_len:
        raise WindowOutOfRange(
            f"window [{lo}, {hi}] outside trace of length {trace_len}"
        )
    return range(lo, hi + 1)


def distinguishability(
    trace: RunTrace, peak_frame: int, fp_frame: int, half_window: int = 5
) -> float:
    """Mean raw MP around the peak divided by mean around the false-positive
    point. Returns ABOVE_CAP when the false-positive window is silent."""
    k = trace.k_raw
    peak_win = _check_window(len(trace), peak_frame, half_window)
    fp_win = _check_window(len(trace), fp_frame, half_window)
    peak_mean = float(k[list(peak_win)].mean())
    fp_mean = float(k[list(fp_win)].mean())
    if fp_mean == 0.0:
        return ABOVE_CAP
    return peak_mean / fp_mean


def sharpness(trace: RunTrace, looming_window: tuple[int, int]) -> float:
    """Peak normalized MP over the mean normalized MP outside the looming
    window; higher means a sharper response. ABOVE_CAP if silent outside."""
    lo, hi = looming_window
    if lo < 0 or hi >= len(trace) or lo > hi:
        raise WindowOutOfRange(f"window {looming_window} outside trace")
    k = trace.k_norm
    outside = np.concatenate([k[:lo], k[hi + 1 :]])
    if outside.size == 0:
        raise WindowOutOfRange("looming window covers the whole trace")
    peak = float(k.max())
    outside_mean = float(outside.mean())
    if outside_mean == 0.0:
        return ABOVE_CAP if peak > 0.0 else 1.0
    return peak / outside_mean


def steady_state_attenuations(trace: RunTrace) -> list[float]:
    """Defined attenuation values with warm-up (first d_max+2 frames) and the
    last 2 frames dropped."""
    head = trace.d_max + 2
    vals = []
    for report in trace.reports[head : len(trace) - 2]:
        if report.attenuation_db is not None:
            vals.append(report.attenuation_db)
    return vals


def mean_steady_attenuation(trace: RunTrace) -> float | None:
    """Mean steady-state attenuation; -inf when the filter output is fully
    suppressed on every steady frame with input present; None when the input
    itself is silent."""
    head = trace.d_max + 2
    window = trace.reports[head : len(trace) - 2]
    active = [r for r in window if trace.p_sums[r.frame_index - 1] > 0.0]
    if not active:
        return None
    vals = [r.attenuation_db for r in active]
    if all(v is None for v in vals):
        return -math.inf
    return float(np.mean([v for v in vals if v is not None]))


def attenuation_sweep(
    speeds: Sequence[float],
    sigma_e_grid: Sequence[float],
    sigma_i_grid: Sequence[float],
    base_params: ParameterSet,
    scene: SceneSpec,
) -> list[dict]:
    """Mean steady-state attenuation of translating scenes over a grid of
    (speed, sigma_e, sigma_i). Returns one record per grid cell."""
    if not speeds or not sigma_e_grid or not sigma_i_grid:
        raise ValueError("grids must be non-empty")
    records = []
    for se in sigma_e_grid:
        for si in sigma_i_grid:
            params = base_params.with_overrides(sigma_e=se, sigma_i=si)
            for sp in speeds:
                spec = SceneSpec(
                    **{**scene.__dict__, "kind": "translating", "pixel_speed": sp}
                )
                trace = run_sequence(render_sequence(spec), params)
                records.append(
                    dict(
                        speed=sp,
                        sigma_e=se,
                        sigma_i=si,
                        mean_attenuation_db=mean_steady_attenuation(trace),
                    )
                )
    return records
