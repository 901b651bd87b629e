"""Frame raster + sidecar and profile document round-trips."""

import json

import numpy as np
import pytest

from rawnoise import (
    CameraProfile,
    FitLine,
    FormatError,
    JointParamModel,
    NoiseParams,
    read_frame,
    read_frame_meta,
    read_profile,
    write_frame,
    write_profile,
    write_report,
)
from rawnoise.calibration import CalibrationReport, IsoParams

from conftest import constant_frame


def sample_profile():
    per_iso = {
        800: IsoParams(2.0, 0.1, 4.0, 1.5),
        1600: IsoParams(4.0, -0.2, 7.9, 2.8),
        3200: IsoParams(8.0, 0.0, 16.1, 5.6),
    }
    joint = JointParamModel(
        log_k_min=1.0,
        log_k_max=3.0,
        tl_line=FitLine(0.99, 1.01, 0.02, 3),
        row_line=FitLine(0.95, -0.4, 0.03, 3),
        lambda_pool=(0.1, -0.2, 0.0),
    )
    return CameraProfile(camera_id="cam", per_iso=per_iso, joint=joint)


def test_frame_round_trip_bit_exact(tmp_path):
    gen = np.random.default_rng(0)
    frame = constant_frame(0.0, shape=(32, 48), iso=1600, exposure_time_s=0.5)
    frame = frame.copy_with(np.floor(gen.uniform(0, 65535, (32, 48))))
    p = tmp_path / "f.pgm"
    write_frame(frame, p, kind="clean")
    back = read_frame(p)
    np.testing.assert_array_equal(back.data, frame.data)
    assert back.bayer_pattern == frame.bayer_pattern
    assert back.black_level == frame.black_level
    assert back.white_level == frame.white_level
    assert back.iso == 1600
    assert back.camera_id == frame.camera_id
    assert back.exposure_time_s == 0.5
    # writing what was read reproduces the raster byte for byte
    q = tmp_path / "g.pgm"
    write_frame(back, q, kind="clean")
    assert q.read_bytes() == p.read_bytes()


def test_frame_black_level_offsets_storage(tmp_path):
    frame = constant_frame(100.0, shape=(4, 4), black_level=512, white_level=16383)
    p = tmp_path / "f.pgm"
    write_frame(frame, p)
    raster = p.read_bytes()
    stored = np.frombuffer(raster.split(b"65535\n", 1)[1], dtype=">u2")
    assert set(stored.tolist()) == {612}
    np.testing.assert_array_equal(read_frame(p).data, np.full((4, 4), 100.0))


def test_sub_black_raster_clamps_to_zero(tmp_path):
    # storage is pre-subtraction DN: a stored 400 under black level 512
    # reads back as 0 after the subtraction clamp
    frame = constant_frame(0.0, shape=(4, 4), black_level=512, white_level=16383)
    p = tmp_path / "f.pgm"
    write_frame(frame, p)
    raw = bytearray(p.read_bytes())
    body = raw[-32:]
    body[:] = np.full(16, 400, dtype=">u2").tobytes()
    raw[-32:] = body
    p.write_bytes(bytes(raw))
    np.testing.assert_array_equal(read_frame(p).data, np.zeros((4, 4)))


def test_sidecar_optional_fields_round_trip(tmp_path):
    frame = constant_frame(7.0, shape=(4, 4))
    params = NoiseParams(k=2.0, lam=0.1, sigma_tl=1.0, sigma_r=0.5, q=1.0,
                         enabled={"read", "shot"})
    p = tmp_path / "n.pgm"
    write_frame(frame, p, kind="noisy", low_light_factor=150.0, noise_params=params, seed=7)
    _, doc = read_frame_meta(p)
    assert doc["kind"] == "noisy"
    assert doc["low_light_factor"] == 150.0
    assert doc["seed"] == 7
    assert doc["noise_params"]["k"] == 2.0
    assert doc["noise_params"]["enabled"] == ["read", "shot"]


def test_write_rejects_bad_kind_and_wide_levels(tmp_path):
    frame = constant_frame(0.0, shape=(4, 4))
    with pytest.raises(FormatError):
        write_frame(frame, tmp_path / "x.pgm", kind="dark")
    wide = constant_frame(0.0, shape=(4, 4), white_level=70000)
    with pytest.raises(FormatError):
        write_frame(wide, tmp_path / "y.pgm")


def test_missing_sidecar_is_format_error(tmp_path):
    frame = constant_frame(1.0, shape=(4, 4))
    p = tmp_path / "f.pgm"
    write_frame(frame, p)
    (tmp_path / "f.json").unlink()
    with pytest.raises(FormatError) as err:
        read_frame(p)
    assert "f.json" in str(err.value)


def test_truncated_raster_is_format_error(tmp_path):
    frame = constant_frame(1.0, shape=(8, 8))
    p = tmp_path / "f.pgm"
    write_frame(frame, p)
    p.write_bytes(p.read_bytes()[:-16])
    with pytest.raises(FormatError) as err:
        read_frame(p)
    assert "f.pgm" in str(err.value)


def test_dimension_mismatch_is_format_error(tmp_path):
    frame = constant_frame(1.0, shape=(8, 8))
    p = tmp_path / "f.pgm"
    write_frame(frame, p)
    doc = json.loads((tmp_path / "f.json").read_text())
    doc["width"] = 16
    (tmp_path / "f.json").write_text(json.dumps(doc))
    with pytest.raises(FormatError):
        read_frame(p)


def test_over_white_level_is_format_error(tmp_path):
    frame = constant_frame(900.0, shape=(4, 4), black_level=0, white_level=1023)
    p = tmp_path / "f.pgm"
    write_frame(frame, p)
    doc = json.loads((tmp_path / "f.json").read_text())
    doc["white_level"] = 512
    doc["black_level"] = 0
    (tmp_path / "f.json").write_text(json.dumps(doc))
    with pytest.raises(FormatError):
        read_frame(p)


def test_bad_magic_is_format_error(tmp_path):
    frame = constant_frame(1.0, shape=(4, 4))
    p = tmp_path / "f.pgm"
    write_frame(frame, p)
    p.write_bytes(b"P6" + p.read_bytes()[2:])
    with pytest.raises(FormatError):
        read_frame(p)


def test_bad_sidecar_field_is_format_error(tmp_path):
    frame = constant_frame(1.0, shape=(4, 4))
    p = tmp_path / "f.pgm"
    write_frame(frame, p)
    doc = json.loads((tmp_path / "f.json").read_text())
    del doc["bayer_pattern"]
    (tmp_path / "f.json").write_text(json.dumps(doc))
    with pytest.raises(FormatError):
        read_frame(p)


def test_profile_round_trip(tmp_path):
    profile = sample_profile()
    p = tmp_path / "profile.json"
    write_profile(profile, p)
    back = read_profile(p)
    assert back.camera_id == profile.camera_id
    assert back.per_iso == profile.per_iso
    assert back.joint == profile.joint
    # serialize(parse(serialize(p))) is byte-stable
    q = tmp_path / "again.json"
    write_profile(back, q)
    assert q.read_bytes() == p.read_bytes()


def test_profile_document_shape(tmp_path):
    p = tmp_path / "profile.json"
    write_profile(sample_profile(), p)
    doc = json.loads(p.read_text())
    assert doc["format_version"] == 1
    assert doc["camera_id"] == "cam"
    assert set(doc["per_iso"]) == {"800", "1600", "3200"}
    assert set(doc["joint"]["tl_line"]) == {"a", "b", "sigma", "n"}
    assert doc["joint"]["lambda_pool"] == [0.1, -0.2, 0.0]


def test_profile_missing_field_is_format_error(tmp_path):
    p = tmp_path / "profile.json"
    write_profile(sample_profile(), p)
    doc = json.loads(p.read_text())
    del doc["joint"]["row_line"]
    p.write_text(json.dumps(doc))
    with pytest.raises(FormatError):
        read_profile(p)


def test_profile_malformed_json_is_format_error(tmp_path):
    p = tmp_path / "profile.json"
    p.write_text("{not json")
    with pytest.raises(FormatError):
        read_profile(p)


def test_report_document(tmp_path):
    rep = CalibrationReport(
        iso=800, k_hat=2.0, lambda_hat=0.1, sigma_tl_hat=4.0, sigma_r_hat=1.5,
        shapiro_w=0.98, shapiro_p=0.2, r2_gauss=0.97, r2_tl=0.99,
        banding_ratio=3.0, ppcc_curve=((-0.1, 0.98), (0.1, 0.99)),
    )
    p = tmp_path / "report.json"
    write_report({800: rep}, "cam", p)
    doc = json.loads(p.read_text())
    assert doc["camera_id"] == "cam"
    entry = doc["per_iso"]["800"]
    assert entry["k_hat"] == 2.0
    assert entry["ppcc_curve"] == [[-0.1, 0.98], [0.1, 0.99]]


def test_atomic_write_leaves_no_temp_files(tmp_path):
    frame = constant_frame(1.0, shape=(4, 4))
    write_frame(frame, tmp_path / "f.pgm")
    names = {q.name for q in tmp_path.iterdir()}
    assert names == {"f.pgm", "f.json"}
