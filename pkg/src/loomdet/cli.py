"""Command-line surface: run, synth, sweep, bench, validate-config.

Configuration is a flat text file with one ``key = value`` per line
(``#`` starts a comment). CLI flags override file values; unknown keys are
rejected so parameter typos fail loudly.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import analysis, frameio, pipeline, stimulus
from .core import ParameterSet, preset, validate
from .errors import ConfigError, InvalidFactor, LoomdetError
from .kernels import gaussian_kernel, inhibition_bank

_PARAM_KEYS = {f.name for f in fields(ParameterSet)}
_SCENE_KEYS = {
    "scene", "width", "height", "frames", "shape",
    "object_luminance", "background_luminance",
    "half_size", "speed", "start_distance", "focal",
    "pixel_speed", "vertical_position", "object_pixel_size",
}
_RUN_KEYS = {"input_dir", "preset", "resize", "norm", "report", "dump_dir"}
_BENCH_KEYS = {"bench_reps", "bench_radii", "bench_resizes", "bench_width", "bench_height"}
KNOWN_KEYS = _PARAM_KEYS | _SCENE_KEYS | _RUN_KEYS | _BENCH_KEYS

_INT_KEYS = {
    "r", "n_sp", "omega", "width", "height", "frames", "vertical_position",
    "object_pixel_size", "bench_reps", "bench_width", "bench_height",
}
_BOOL_KEYS = {"interpolate_latency"}
_STR_KEYS = {"input_dir", "preset", "norm", "report", "dump_dir", "scene", "shape"}
_LIST_KEYS = {"bench_radii", "bench_resizes"}


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines into typed values."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def _coerce(key: str, value: str):
    try:
        if key in _STR_KEYS:
            return value
        if key in _BOOL_KEYS:
            if value.lower() in ("1", "true", "yes", "on"):
                return True
            if value.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if key in _LIST_KEYS:
            return [float(v) if key == "bench_resizes" else int(v) for v in value.split(",")]
        if key in _INT_KEYS:
            return int(value)
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def build_params(cfg: dict) -> ParameterSet:
    params = preset(cfg["preset"]) if cfg.get("preset") else ParameterSet()
    overrides = {k: v for k, v in cfg.items() if k in _PARAM_KEYS}
    return validate(params.with_overrides(**overrides))


def build_scene(cfg: dict) -> stimulus.SceneSpec:
    kwargs = {"kind": cfg["scene"]}
    for key in _SCENE_KEYS - {"scene"}:
        if key in cfg:
            kwargs[key] = cfg[key]
    return stimulus.SceneSpec(**kwargs)


@dataclass
class RunConfig:
    cfg: dict

    def __post_init__(self):
        has_dir = "input_dir" in self.cfg
        has_scene = "scene" in self.cfg
        if has_dir == has_scene:
            raise ConfigError("exactly one input source required: input_dir or scene")
        resize = self.cfg.get("resize", 1.0)
        if not (0.0 < resize <= 1.0):
            raise InvalidFactor(f"resize factor must be in (0, 1], got {resize}")

    def load_frames(self) -> list[np.ndarray]:
        if "input_dir" in self.cfg:
            frames = frameio.load_sequence(self.cfg["input_dir"])
        else:
            frames = stimulus.render_sequence(build_scene(self.cfg))
        factor = self.cfg.get("resize", 1.0)
        if factor != 1.0:
            frames = [frameio.resize_area(f, factor) for f in frames]
        return frames


def cmd_run(cfg: dict) -> int:
    run_cfg = RunConfig(cfg)
    frames = run_cfg.load_frames()
    params = build_params(cfg)
    norm = cfg.get("norm", "offline")
    dump_dir = cfg.get("dump_dir")
    if dump_dir:
        height, width = frames[0].shape
        det = pipeline.Detector(params, width=width, height=height)
        reports = []
        p_sums, s_sums = [], []
        for frame in frames:
            report, layers = det.step(frame)
            p_sums.append(float(layers.p.sum()))
            s_sums.append(float(layers.s.sum()))
            report.attenuation_db = analysis.attenuation(p_sums[-1], s_sums[-1])
            reports.append(report)
            frameio.write_layer_dump(layers, dump_dir, report.frame_index)
        if norm == "offline":
            trace = analysis.run_sequence(frames, params, norm_mode="offline")
            reports = trace.reports
    else:
        trace = analysis.run_sequence(frames, params, norm_mode=norm)
        reports = trace.reports
    report_path = cfg.get("report", "report.csv")
    frameio.write_report_csv(reports, report_path)
    print(f"wrote {len(reports)} rows to {report_path}")
    return 0


def cmd_synth(cfg: dict, out_dir: str) -> int:
    frames = stimulus.render_sequence(build_scene(cfg))
    paths = frameio.write_sequence(frames, out_dir)
    print(f"wrote {len(paths)} frames to {out_dir}")
    return 0


def cmd_sweep(cfg: dict, speeds: list[float], sigma_e_grid: list[float],
              sigma_i_grid: list[float], out_path: str) -> int:
    params = build_params(cfg)
    scene = build_scene(cfg) if "scene" in cfg else stimulus.SceneSpec(
        width=64, height=48, frames=40, kind="translating", object_pixel_size=8
    )
    records = analysis.attenuation_sweep(speeds, sigma_e_grid, sigma_i_grid, params, scene)
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["speed", "sigma_e", "sigma_i", "mean_attenuation_db"])
        writer.writeheader()
        for rec in records:
            val = rec["mean_attenuation_db"]
            rec = {**rec, "mean_attenuation_db": "" if val is None else repr(val)}
            writer.writerow(rec)
    print(f"wrote {len(records)} sweep cells to {out_path}")
    return 0


def time_dpc_stage(
    width: int, height: int, params: ParameterSet, repetitions: int, rng=None
) -> float:
    """Median wall time (seconds) of one presynaptic-filter evaluation."""
    if repetitions < 3:
        raise ConfigError("bench repetitions must be >= 3")
    rng = rng or np.random.default_rng(0)
    w_e = gaussian_kernel(params.sigma_e, params.r)
    bank = inhibition_bank(params.sigma_i, params.alpha, params.beta, params.lam, params.r)
    history = [rng.random((height, width)) for _ in range(bank.d_max + 1)]
    pipeline.dpc_fast(history, w_e, bank, params.a)  # warm cache/JIT paths
    times = []
    for _ in range(repetitions):
        start = time.perf_counter()
        pipeline.dpc_fast(history, w_e, bank, params.a)
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def run_bench(cfg: dict) -> list[dict]:
    reps = cfg.get("bench_reps", 5)
    radii = cfg.get("bench_radii", [2, 4])
    resizes = cfg.get("bench_resizes", [1.0, 0.5])
    width = cfg.get("bench_width", 320)
    height = cfg.get("bench_height", 240)
    params = build_params(cfg)
    rows = []
    for r in radii:
        for factor in resizes:
            w = max(1, round(width * factor))
            h = max(1, round(height * factor))
            median_s = time_dpc_stage(w, h, params.with_overrides(r=int(r)), reps)
            rows.append(
                dict(r=int(r), width=w, height=h,
                     median_ms=median_s * 1e3, fps=1.0 / median_s)
            )
    return rows


def cmd_bench(cfg: dict, out_path: str) -> int:
    rows = run_bench(cfg)
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["r", "width", "height", "median_ms", "fps"])
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "median_ms": f"{row['median_ms']:.4f}", "fps": f"{row['fps']:.2f}"})
    print(f"wrote {len(rows)} bench cells to {out_path}")
    return 0


def _load_cfg(args) -> dict:
    cfg: dict = {}
    if args.config:
        cfg.update(parse_config_text(Path(args.config).read_text()))
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        cfg[key] = _coerce(key, value)
    return cfg


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loomdet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config value (repeatable)")

    p_run = sub.add_parser("run", help="run the detector and write a per-frame CSV report")
    common(p_run)

    p_synth = sub.add_parser("synth", help="render a synthetic scene to P5 graymap frames")
    common(p_synth)
    p_synth.add_argument("--out", required=True, help="output directory")

    p_sweep = sub.add_parser("sweep", help="attenuation grid over speeds and kernel widths")
    common(p_sweep)
    p_sweep.add_argument("--speeds", default="1,2,3,4")
    p_sweep.add_argument("--sigma-e", default="0.35,1.0")
    p_sweep.add_argument("--sigma-i", default="1.0,1.8,2.5")
    p_sweep.add_argument("--out", required=True)

    p_bench = sub.add_parser("bench", help="time the presynaptic filter stage")
    common(p_bench)
    p_bench.add_argument("--out", required=True)

    p_val = sub.add_parser("validate-config", help="parse and validate a config file")
    common(p_val)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load_cfg(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "synth":
            return cmd_synth(cfg, args.out)
        if args.command == "sweep":
            speeds = [float(v) for v in args.speeds.split(",")]
            se = [float(v) for v in args.sigma_e.split(",")]
            si = [float(v) for v in args.sigma_i.split(",")]
            return cmd_sweep(cfg, speeds, se, si, args.out)
        if args.command == "bench":
            return cmd_bench(cfg, args.out)
        if args.command == "validate-config":
            build_params(cfg)
            if "scene" in cfg or "input_dir" in cfg:
                RunConfig(cfg)
            print("config ok")
            return 0
        raise AssertionError(f"unhandled command {args.command}")
    except LoomdetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
