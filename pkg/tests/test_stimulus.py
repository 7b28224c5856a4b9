import numpy as np
import pytest

from loomdet.errors import ContactBeforeEnd, ObjectOutOfView
from loomdet.stimulus import SceneSpec, looming_half_extent, render_sequence, speed_sweep


def looming_spec(**kw):
    base = dict(width=64, height=64, frames=20, kind="looming",
                half_size=0.5, speed=0.1, start_distance=10.0, focal=100.0)
    base.update(kw)
    return SceneSpec(**base)


def test_determinism():
    spec = looming_spec()
    a = render_sequence(spec)
    b = render_sequence(spec)
    for fa, fb in zip(a, b):
        assert np.array_equal(fa, fb)


def test_looming_extent_values():
    spec = looming_spec()
    assert looming_half_extent(spec, 0) == pytest.approx(5.0)
    assert looming_half_extent(spec, 1) == pytest.approx(100 * 0.5 / 9.9)  # ~5.0505
    assert looming_half_extent(spec, 2) == pytest.approx(100 * 0.5 / 9.8)  # ~5.1020


def test_looming_growth_accelerates():
    spec = looming_spec(frames=40, speed=0.2)
    ext = [looming_half_extent(spec, t) for t in range(40)]
    diffs = np.diff(ext)
    assert np.all(diffs > 0)
    assert np.all(np.diff(diffs) > 0)  # second difference strictly positive


def test_looming_rendered_extent_nondecreasing():
    frames = render_sequence(looming_spec(frames=30, speed=0.25))
    areas = [(f == 0.0).sum() for f in frames]
    assert all(b >= a for a, b in zip(areas, areas[1:]))
    assert all(a >= 1 for a in areas)


def test_contact_before_end():
    with pytest.raises(ContactBeforeEnd):
        render_sequence(looming_spec(frames=120, speed=0.1))  # D hits 0 at t=100


def test_receding_is_time_reversed_looming():
    loom = render_sequence(looming_spec())
    spec = looming_spec()
    recede = render_sequence(SceneSpec(**{**spec.__dict__, "kind": "receding"}))
    for i, frame in enumerate(recede):
        assert np.array_equal(frame, loom[len(loom) - 1 - i])


def test_disc_shape_round():
    frames = render_sequence(looming_spec(shape="disc", width=65, height=65))
    mask = frames[0] == 0.0
    # corners of the bounding box are outside a disc
    ys, xs = np.where(mask)
    assert not mask[ys.min(), xs.min()]


def test_translating_advances_one_pixel_per_frame():
    spec = SceneSpec(width=32, height=16, frames=10, kind="translating",
                     pixel_speed=1, object_pixel_size=4)
    frames = render_sequence(spec)
    for t, frame in enumerate(frames):
        cols = np.where((frame == 0.0).any(axis=0))[0]
        assert cols.min() == t
        assert cols.max() == t + 3


def test_translating_off_frame_vertical():
    with pytest.raises(ObjectOutOfView):
        render_sequence(
            SceneSpec(width=32, height=8, frames=4, kind="translating",
                      object_pixel_size=4, vertical_position=6)
        )


def test_speed_sweep():
    base = SceneSpec(width=48, height=16, frames=8, kind="translating",
                     object_pixel_size=4)
    seqs = speed_sweep(base, [1, 2, 3, 4])
    assert len(seqs) == 4
    shapes = {f.shape for seq in seqs for f in seq}
    assert shapes == {(16, 48)}
    assert all(len(seq) == 8 for seq in seqs)
    with pytest.raises(ValueError):
        speed_sweep(base, [])
    with pytest.raises(ValueError):
        speed_sweep(base, [0])


def test_spec_validation():
    with pytest.raises(ValueError):
        SceneSpec(width=8, height=8, frames=1)
    with pytest.raises(ValueError):
        SceneSpec(width=8, height=8, frames=4, kind="spinning")
    with pytest.raises(ValueError):
        SceneSpec(width=8, height=8, frames=4, start_distance=-1.0)
