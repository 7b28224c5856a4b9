import csv

import numpy as np
import pytest

from loomdet.cli import (
    RunConfig,
    build_params,
    build_scene,
    main,
    parse_config_text,
    run_bench,
    time_dpc_stage,
)
from loomdet.core import preset
from loomdet.errors import ConfigError
from loomdet.frameio import write_pgm


def test_parse_config_basics():
    cfg = parse_config_text(
        """
        # comment
        preset = set7
        resize = 0.5
        n_sp = 3
        interpolate_latency = true
        bench_radii = 2,4,6
        """
    )
    assert cfg["preset"] == "set7"
    assert cfg["resize"] == 0.5
    assert cfg["n_sp"] == 3
    assert cfg["interpolate_latency"] is True
    assert cfg["bench_radii"] == [2, 4, 6]


def test_parse_config_unknown_key():
    with pytest.raises(ConfigError) as excinfo:
        parse_config_text("sigma_x = 1.0")
    assert "sigma_x" in str(excinfo.value)


def test_parse_config_bad_line():
    with pytest.raises(ConfigError):
        parse_config_text("just some words")


def test_build_params_preset_with_override():
    params = build_params({"preset": "set7", "sigma_e": 2.0})
    assert params.sigma_e == 2.0
    assert params.sigma_i == preset("set7").sigma_i


def test_run_config_requires_one_source(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig({})
    with pytest.raises(ConfigError):
        RunConfig({"input_dir": str(tmp_path), "scene": "looming"})


def test_run_static_scene_writes_silent_csv(tmp_path, monkeypatch):
    # two identical frames on disk: the report must be all-zero, no spikes
    indir = tmp_path / "frames"
    indir.mkdir()
    for i in (1, 2, 3):
        write_pgm(np.full((16, 16), 99.0), indir / f"{i:04d}.pgm")
    out = tmp_path / "report.csv"
    rc = main(["run", "--set", f"input_dir={indir}", "--set", f"report={out}",
               "--set", "preset=set1"])
    assert rc == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3
    assert all(float(r["k_raw"]) == 0.0 for r in rows)
    assert all(r["spike"] == "0" and r["alarm"] == "0" for r in rows)
    assert all(r["attenuation_db"] == "" for r in rows)


def test_run_synthetic_scene(tmp_path):
    out = tmp_path / "loom.csv"
    rc = main([
        "run",
        "--set", "scene=looming", "--set", "width=33", "--set", "height=33",
        "--set", "frames=12", "--set", "speed=0.4", "--set", "start_distance=10",
        "--set", "focal=50", "--set", "preset=set1", "--set", f"report={out}",
    ])
    assert rc == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 12


def test_run_malformed_frame_exits_2(tmp_path, capsys):
    indir = tmp_path / "frames"
    indir.mkdir()
    write_pgm(np.zeros((8, 8)), indir / "0001.pgm")
    (indir / "0002.pgm").write_bytes(b"garbage")
    rc = main(["run", "--set", f"input_dir={indir}", "--set",
               f"report={tmp_path / 'r.csv'}"])
    assert rc == 2
    assert "0002.pgm" in capsys.readouterr().err


def test_synth_writes_frames(tmp_path):
    out_dir = tmp_path / "seq"
    rc = main([
        "synth", "--out", str(out_dir),
        "--set", "scene=translating", "--set", "width=24", "--set", "height=12",
        "--set", "frames=5", "--set", "object_pixel_size=4",
    ])
    assert rc == 0
    assert len(sorted(out_dir.glob("*.pgm"))) == 5


def test_validate_config_command(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("preset = set4\nscene = looming\nwidth = 32\nheight = 32\nframes = 10\n")
    assert main(["validate-config", "--config", str(cfg)]) == 0
    assert "config ok" in capsys.readouterr().out
    bad = tmp_path / "bad.cfg"
    bad.write_text("presett = set4\n")
    assert main(["validate-config", "--config", str(bad)]) == 2


def test_sweep_command(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main([
        "sweep", "--speeds", "1,2", "--sigma-e", "0.35", "--sigma-i", "1.0",
        "--out", str(out),
        "--set", "scene=translating", "--set", "width=48", "--set", "height=16",
        "--set", "frames=10", "--set", "object_pixel_size=4",
        "--set", "preset=set1",
    ])
    assert rc == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2
    assert {r["speed"] for r in rows} == {"1.0", "2.0"}


def test_bench_rejects_too_few_reps():
    with pytest.raises(ConfigError):
        time_dpc_stage(32, 32, preset("set1"), repetitions=1)


def test_bench_rows(tmp_path):
    rows = run_bench({
        "preset": "set1", "bench_reps": 3,
        "bench_radii": [2], "bench_resizes": [1.0, 0.5],
        "bench_width": 64, "bench_height": 48,
    })
    assert len(rows) == 2
    assert rows[0]["r"] == 2
    assert rows[1]["width"] == 32 and rows[1]["height"] == 24
    assert all(row["median_ms"] > 0 for row in rows)


def test_bench_command_csv(tmp_path):
    out = tmp_path / "bench.csv"
    rc = main([
        "bench", "--out", str(out),
        "--set", "preset=set1", "--set", "bench_reps=3",
        "--set", "bench_radii=2", "--set", "bench_resizes=1.0",
        "--set", "bench_width=48", "--set", "bench_height=32",
    ])
    assert rc == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1
    assert set(rows[0]) == {"r", "width", "height", "median_ms", "fps"}
