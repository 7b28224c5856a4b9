"""Looming detection via distributed presynaptic excitation/inhibition.

A spatial-temporal filter over per-pixel luminance changes that prefers the
accelerating image expansion of objects on a collision course, plus synthetic
stimuli, analysis metrics, and a benchmark harness.
"""

from .core import DetectorState, FrameReport, ParameterSet, preset, validate
from .kernels import InhibitionKernelBank, SpatialKernel, gaussian_kernel, inhibition_bank, latency_at
from .pipeline import Detector, LayerOutputs, dpc_oracle
from .stimulus import SceneSpec, render_sequence, speed_sweep
from .analysis import RunTrace, attenuation, distinguishability, run_sequence, sharpness

__all__ = [
    "Detector",
    "DetectorState",
    "FrameReport",
    "InhibitionKernelBank",
    "LayerOutputs",
    "ParameterSet",
    "RunTrace",
    "SceneSpec",
    "SpatialKernel",
    "attenuation",
    "distinguishability",
    "dpc_oracle",
    "gaussian_kernel",
    "inhibition_bank",
    "latency_at",
    "preset",
    "render_sequence",
    "run_sequence",
    "sharpness",
    "speed_sweep",
    "validate",
]
