"""Frame containers and Bayer plane packing."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rawnoise import (
    BayerPattern,
    DomainError,
    FrameSet,
    InsufficientDataError,
    RawFrame,
    pack_bayer,
    unpack_bayer,
)

from conftest import constant_frame


def test_pack_2x2_rggb():
    data = np.array([[1.0, 2.0], [3.0, 4.0]])
    planes = pack_bayer(data, BayerPattern.RGGB)
    assert planes.shape == (4, 1, 1)
    np.testing.assert_array_equal(planes[:, 0, 0], [1.0, 2.0, 3.0, 4.0])


def test_pack_4x4_plane_means():
    rng = np.random.default_rng(0)
    data = rng.random((4, 4))
    planes = pack_bayer(data, BayerPattern.BGGR)
    assert planes.shape == (4, 2, 2)
    # brute-force index check: plane p collects pixels at (i, j) with
    # (i % 2, j % 2) equal to that plane's mosaic offset
    offsets = [(0, 0), (0, 1), (1, 0), (1, 1)]
    for p, (dy, dx) in enumerate(offsets):
        picked = [
            data[i, j]
            for i in range(4)
            for j in range(4)
            if i % 2 == dy and j % 2 == dx
        ]
        assert planes[p].mean() == pytest.approx(np.mean(picked), rel=1e-15)


def test_unpack_inverts_pack_bit_exact():
    data = np.arange(36, dtype=np.uint16).reshape(6, 6)
    packed = pack_bayer(data, BayerPattern.GRBG)
    back = unpack_bayer(packed, BayerPattern.GRBG)
    assert back.dtype == data.dtype
    np.testing.assert_array_equal(back, data)


@given(
    arrays(
        np.float64,
        st.tuples(
            st.integers(min_value=1, max_value=8).map(lambda n: 2 * n),
            st.integers(min_value=1, max_value=8).map(lambda n: 2 * n),
        ),
        elements=st.floats(allow_nan=False, allow_infinity=False, width=32),
    ),
    st.sampled_from(list(BayerPattern)),
)
def test_pack_unpack_round_trip(data, pattern):
    np.testing.assert_array_equal(unpack_bayer(pack_bayer(data, pattern), pattern), data)


def test_pack_rejects_odd_dimensions():
    with pytest.raises(DomainError):
        pack_bayer(np.zeros((3, 4)), BayerPattern.RGGB)
    with pytest.raises(DomainError):
        pack_bayer(np.zeros((4,)), BayerPattern.RGGB)


def test_unpack_rejects_bad_shape():
    with pytest.raises(DomainError):
        unpack_bayer(np.zeros((3, 2, 2)), BayerPattern.RGGB)


def test_pattern_validated():
    with pytest.raises(ValueError):
        pack_bayer(np.zeros((2, 2)), "RGGX")


def test_raw_frame_properties():
    f = constant_frame(10.0, shape=(6, 8), black_level=512, white_level=16383)
    assert f.height == 6
    assert f.width == 8
    assert f.saturation_dn == 16383 - 512


def test_raw_frame_copy_with():
    f = constant_frame(1.0, iso=1600, exposure_time_s=0.25)
    g = f.copy_with(f.data * 2)
    assert g.iso == 1600
    assert g.exposure_time_s == 0.25
    assert g.camera_id == f.camera_id
    np.testing.assert_array_equal(g.data, 2 * f.data)


def test_raw_frame_rejects_odd_dims():
    with pytest.raises(DomainError):
        constant_frame(0.0, shape=(5, 4))


def test_raw_frame_rejects_non_2d():
    with pytest.raises(DomainError):
        constant_frame(0.0, shape=(4, 4, 4))


def test_raw_frame_rejects_level_inversion():
    with pytest.raises(DomainError):
        constant_frame(0.0, black_level=1000, white_level=1000)


def test_raw_frame_rejects_bad_iso():
    with pytest.raises(DomainError):
        constant_frame(0.0, iso=0)


def test_raw_frame_rejects_empty_camera_id():
    with pytest.raises(DomainError):
        constant_frame(0.0, camera_id="")


def test_frame_set_levels_default_to_zero():
    s = FrameSet([constant_frame(0.0)], "bias")
    assert s.illumination_level == [0.0]
    assert len(s) == 1


def test_frame_set_by_level_groups_and_sorts():
    frames = [constant_frame(v) for v in (1.0, 2.0, 3.0, 4.0)]
    s = FrameSet(frames, "flat_field", [0.3, 0.1, 0.3, 0.1])
    groups = s.by_level()
    assert list(groups) == [0.1, 0.3]
    assert [f.data[0, 0] for f in groups[0.1]] == [2.0, 4.0]
    assert [f.data[0, 0] for f in groups[0.3]] == [1.0, 3.0]


def test_frame_set_rejects_unknown_kind():
    with pytest.raises(DomainError):
        FrameSet([constant_frame(0.0)], "dark")


def test_frame_set_rejects_empty():
    with pytest.raises(InsufficientDataError):
        FrameSet([], "bias")


def test_flat_set_needs_two_frames():
    with pytest.raises(InsufficientDataError):
        FrameSet([constant_frame(0.0)], "flat_field")


def test_frame_set_rejects_mixed_shapes():
    with pytest.raises(DomainError):
        FrameSet([constant_frame(0.0, shape=(4, 4)), constant_frame(0.0, shape=(6, 6))], "bias")


def test_frame_set_rejects_mixed_cameras():
    with pytest.raises(DomainError):
        FrameSet(
            [constant_frame(0.0), constant_frame(0.0, camera_id="other")],
            "bias",
        )


def test_frame_set_rejects_mixed_iso():
    with pytest.raises(DomainError):
        FrameSet([constant_frame(0.0, iso=100), constant_frame(0.0, iso=200)], "bias")


def test_frame_set_rejects_level_length_mismatch():
    with pytest.raises(DomainError):
        FrameSet([constant_frame(0.0)], "bias", [0.1, 0.2])
