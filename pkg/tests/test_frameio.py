import numpy as np
import pytest
from PIL import Image

from loomdet.core import FrameReport
from loomdet.errors import EmptyDirectory, InvalidFactor, MixedDimensions, UnreadableFrame
from loomdet.frameio import (
    load_sequence,
    resize_area,
    resize_to,
    write_pgm,
    write_report_csv,
    write_sequence,
)


def test_pgm_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    frame = np.floor(rng.random((6, 9)) * 256)
    path = tmp_path / "frame.pgm"
    write_pgm(frame, path)
    loaded = np.asarray(Image.open(path), dtype=np.float64)
    np.testing.assert_array_equal(loaded, frame)


def test_load_sequence_in_index_order(tmp_path):
    for idx, value in [(2, 20.0), (1, 10.0), (3, 30.0)]:
        write_pgm(np.full((4, 4), value), tmp_path / f"{idx:04d}.pgm")
    frames = load_sequence(tmp_path)
    assert [f[0, 0] for f in frames] == [10.0, 20.0, 30.0]


def test_load_sequence_needs_two_frames(tmp_path):
    with pytest.raises(EmptyDirectory):
        load_sequence(tmp_path)
    write_pgm(np.zeros((4, 4)), tmp_path / "0001.pgm")
    with pytest.raises(EmptyDirectory):
        load_sequence(tmp_path)


def test_load_sequence_mixed_sizes_rejected(tmp_path):
    write_pgm(np.zeros((4, 4)), tmp_path / "0001.pgm")
    write_pgm(np.zeros((5, 4)), tmp_path / "0002.pgm")
    with pytest.raises(MixedDimensions):
        load_sequence(tmp_path)


def test_load_sequence_unreadable_names_file(tmp_path):
    write_pgm(np.zeros((4, 4)), tmp_path / "0001.pgm")
    bad = tmp_path / "0002.pgm"
    bad.write_bytes(b"not an image")
    with pytest.raises(UnreadableFrame) as excinfo:
        load_sequence(tmp_path)
    assert "0002.pgm" in str(excinfo.value)


def test_rgb_collapsed_with_luma_weights(tmp_path):
    gray = np.full((4, 4, 3), 77, dtype=np.uint8)
    Image.fromarray(gray, mode="RGB").save(tmp_path / "0001.png")
    Image.fromarray(gray, mode="RGB").save(tmp_path / "0002.png")
    frames = load_sequence(tmp_path)
    # pure-gray RGB maps to the same value: weights sum to 1
    assert frames[0][0, 0] == pytest.approx(77.0)


def test_write_sequence_round_trip(tmp_path):
    frames = [np.full((3, 5), float(v)) for v in (1, 2, 3)]
    write_sequence(frames, tmp_path / "seq")
    loaded = load_sequence(tmp_path / "seq")
    for a, b in zip(frames, loaded):
        np.testing.assert_array_equal(a, b)


def test_resize_identity():
    frame = np.arange(12.0).reshape(3, 4)
    assert resize_area(frame, 1.0) is frame


def test_resize_box_average():
    frame = np.array([[10.0, 20.0], [30.0, 40.0]])
    out = resize_area(frame, 0.5)
    assert out.shape == (1, 1)
    assert out[0, 0] == pytest.approx(25.0)


def test_resize_output_dims_match_rounding():
    frame = np.zeros((1080, 1920))
    out = resize_area(frame, 0.02)
    assert out.shape == (22, 38)


def test_resize_preserves_mean():
    rng = np.random.default_rng(1)
    frame = rng.random((30, 45))
    out = resize_to(frame, 17, 11)
    assert out.shape == (11, 17)
    assert out.mean() == pytest.approx(frame.mean(), rel=1e-12)


def test_resize_invalid_factor():
    with pytest.raises(InvalidFactor):
        resize_area(np.zeros((4, 4)), 0.0)
    with pytest.raises(InvalidFactor):
        resize_area(np.zeros((4, 4)), 1.5)


def test_report_csv_format(tmp_path):
    reports = [
        FrameReport(1, 0.0, 0.0, 0.0, 0.0, None, False, False),
        FrameReport(2, 3.5, 0.1, 12.0, 1.0, -4.25, True, False),
    ]
    path = tmp_path / "report.csv"
    write_report_csv(reports, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "frame_index,ffi,t_de,k_raw,k_norm,attenuation_db,spike,alarm"
    assert lines[1].split(",")[5] == ""  # absent attenuation is empty
    assert lines[2].split(",")[6:] == ["1", "0"]
