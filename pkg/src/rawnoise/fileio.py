"""Portable persistence for frames, camera profiles, and reports.

A frame on disk is a 16-bit binary grayscale raster (big-endian, maxval
65535) plus a JSON sidecar with the same basename and a ``.json`` suffix.
The raster stores pre-subtraction DN (black level still included), so
files match what a camera would deliver; reading subtracts the black
level and clamps at zero.  Camera profiles and calibration reports are
JSON documents.  All writes go through a temp-file-and-rename so readers
never observe partial files, and serialization is byte-deterministic
(sorted keys, shortest round-trip float formatting).
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .calibration import CameraProfile, IsoParams
from .errors import FormatError
from .frames import BayerPattern, RawFrame
from .model import FitLine, JointParamModel, NoiseParams

__all__ = [
    "FORMAT_VERSION",
    "read_frame",
    "read_frame_meta",
    "write_frame",
    "read_profile",
    "write_profile",
    "write_report",
]

FORMAT_VERSION = 1


def _atomic_write_bytes(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _json_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=1) + "\n").encode("utf-8")


def _load_json(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise FormatError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return doc


def _require(doc: dict, field: str, path: Path):
    if field not in doc:
        raise FormatError(f"{path}: missing sidecar field '{field}'")
    return doc[field]


def _sidecar_path(raster_path: Path) -> Path:
    return raster_path.with_suffix(".json")


# --------------------------------------------------------------------------
# frames


def write_frame(
    frame: RawFrame,
    path,
    kind: str = "clean",
    low_light_factor: float | None = None,
    noise_params: NoiseParams | None = None,
    seed: int | None = None,
) -> None:
    """Write raster plus sidecar; values are rounded to the DN grid."""
    path = Path(path)
    if kind not in ("clean", "noisy", "bias", "flat"):
        raise FormatError(f"{path}: unknown frame kind {kind!r}")
    if frame.white_level > 65535:
        raise FormatError(f"{path}: white_level {frame.white_level} exceeds 16-bit raster range")
    stored = np.rint(np.clip(frame.data, 0, frame.saturation_dn)) + frame.black_level
    raster = stored.astype(">u2")
    header = f"P5\n{frame.width} {frame.height}\n65535\n".encode("ascii")
    _atomic_write_bytes(path, header + raster.tobytes())

    doc = {
        "format_version": FORMAT_VERSION,
        "camera_id": frame.camera_id,
        "iso": frame.iso,
        "bayer_pattern": frame.bayer_pattern.value,
        "black_level": frame.black_level,
        "white_level": frame.white_level,
        "width": frame.width,
        "height": frame.height,
        "kind": kind,
    }
    if frame.exposure_time_s is not None:
        doc["exposure_time_s"] = frame.exposure_time_s
    if low_light_factor is not None:
        doc["low_light_factor"] = float(low_light_factor)
    if noise_params is not None:
        doc["noise_params"] = {
            "k": noise_params.k,
            "lam": noise_params.lam,
            "sigma_tl": noise_params.sigma_tl,
            "sigma_r": noise_params.sigma_r,
            "q": noise_params.q,
            "enabled": sorted(noise_params.enabled),
        }
    if seed is not None:
        doc["seed"] = int(seed)
    _atomic_write_bytes(_sidecar_path(path), _json_bytes(doc))


def _read_raster(path: Path) -> np.ndarray:
    try:
        blob = path.read_bytes()
    except FileNotFoundError:
        raise FormatError(f"{path}: file not found") from None
    # header: magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments allowed between them
    tokens: list[bytes] = []
    i = 0
    while len(tokens) < 4 and i < len(blob):
        c = blob[i : i + 1]
        if c == b"#":
            i = blob.find(b"\n", i)
            if i < 0:
                break
            i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(blob) and not blob[j : j + 1].isspace() and blob[j : j + 1] != b"#":
                j += 1
            tokens.append(blob[i:j])
            i = j
    if len(tokens) < 4 or tokens[0] != b"P5":
        raise FormatError(f"{path}: not a binary 16-bit grayscale raster")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError:
        raise FormatError(f"{path}: malformed raster header") from None
    if maxval != 65535:
        raise FormatError(f"{path}: raster maxval must be 65535, got {maxval}")
    if i >= len(blob) or not blob[i : i + 1].isspace():
        raise FormatError(f"{path}: malformed raster header")
    data = blob[i + 1 :]
    expected = width * height * 2
    if len(data) < expected:
        raise FormatError(f"{path}: truncated raster ({len(data)} of {expected} data bytes)")
    return np.frombuffer(data[:expected], dtype=">u2").reshape(height, width)


def read_frame_meta(path) -> tuple[RawFrame, dict]:
    """Read raster and sidecar; returns the frame and the raw sidecar document.

    The in-memory frame is black-level-subtracted; stored values below the
    black level clamp to 0.
    """
    path = Path(path)
    stored = _read_raster(path)
    sidecar = _sidecar_path(path)
    doc = _load_json(sidecar)

    width = int(_require(doc, "width", sidecar))
    height = int(_require(doc, "height", sidecar))
    if (height, width) != stored.shape:
        raise FormatError(
            f"{sidecar}: dimensions {width}x{height} do not match raster "
            f"{stored.shape[1]}x{stored.shape[0]}"
        )
    white_level = int(_require(doc, "white_level", sidecar))
    if int(stored.max()) > white_level:
        raise FormatError(
            f"{path}: sample value {int(stored.max())} exceeds white_level {white_level}"
        )
    try:
        pattern = BayerPattern(_require(doc, "bayer_pattern", sidecar))
    except ValueError:
        raise FormatError(f"{sidecar}: invalid field 'bayer_pattern'") from None
    black_level = int(_require(doc, "black_level", sidecar))
    data = np.maximum(stored.astype(np.float64) - black_level, 0.0)
    exposure = doc.get("exposure_time_s")
    frame = RawFrame(
        data=data,
        bayer_pattern=pattern,
        black_level=black_level,
        white_level=white_level,
        iso=int(_require(doc, "iso", sidecar)),
        camera_id=str(_require(doc, "camera_id", sidecar)),
        exposure_time_s=None if exposure is None else float(exposure),
    )
    return frame, doc


def read_frame(path) -> RawFrame:
    """Read a frame, discarding sidecar extras (kind, provenance)."""
    return read_frame_meta(path)[0]


# --------------------------------------------------------------------------
# profiles and reports


def _line_doc(line: FitLine) -> dict:
    return {"a": line.slope, "b": line.intercept, "sigma": line.resid_std, "n": line.n_points}


def _line_from_doc(doc: dict, path: Path) -> FitLine:
    try:
        return FitLine(
            slope=float(doc["a"]),
            intercept=float(doc["b"]),
            resid_std=float(doc["sigma"]),
            n_points=int(doc["n"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed fit line ({exc})") from None


def write_profile(profile: CameraProfile, path) -> None:
    path = Path(path)
    doc = {
        "format_version": FORMAT_VERSION,
        "camera_id": profile.camera_id,
        "per_iso": {
            str(iso): {
                "k_hat": p.k_hat,
                "lambda_hat": p.lambda_hat,
                "sigma_tl_hat": p.sigma_tl_hat,
                "sigma_r_hat": p.sigma_r_hat,
            }
            for iso, p in sorted(profile.per_iso.items())
        },
        "joint": {
            "log_k_min": profile.joint.log_k_min,
            "log_k_max": profile.joint.log_k_max,
            "tl_line": _line_doc(profile.joint.tl_line),
            "row_line": _line_doc(profile.joint.row_line),
            "lambda_pool": list(profile.joint.lambda_pool),
        },
    }
    _atomic_write_bytes(path, _json_bytes(doc))


def read_profile(path) -> CameraProfile:
    path = Path(path)
    doc = _load_json(path)
    for field in ("camera_id", "per_iso", "joint"):
        if field not in doc:
            raise FormatError(f"{path}: missing profile field '{field}'")
    joint_doc = doc["joint"]
    try:
        joint = JointParamModel(
            log_k_min=float(joint_doc["log_k_min"]),
            log_k_max=float(joint_doc["log_k_max"]),
            tl_line=_line_from_doc(joint_doc["tl_line"], path),
            row_line=_line_from_doc(joint_doc["row_line"], path),
            lambda_pool=tuple(float(v) for v in joint_doc["lambda_pool"]),
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{path}: malformed joint model ({exc})") from None
    per_iso = {}
    try:
        for iso, p in doc["per_iso"].items():
            per_iso[int(iso)] = IsoParams(
                k_hat=float(p["k_hat"]),
                lambda_hat=float(p["lambda_hat"]),
                sigma_tl_hat=float(p["sigma_tl_hat"]),
                sigma_r_hat=float(p["sigma_r_hat"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed per-ISO table ({exc})") from None
    return CameraProfile(camera_id=str(doc["camera_id"]), per_iso=per_iso, joint=joint)


def write_report(reports, camera_id: str, path) -> None:
    """Plot-ready per-ISO diagnostics (PPCC curves, goodness of fit)."""
    path = Path(path)
    doc = {
        "format_version": FORMAT_VERSION,
        "camera_id": camera_id,
        "per_iso": {
            str(iso): {
                "iso": rep.iso,
                "k_hat": rep.k_hat,
                "lambda_hat": rep.lambda_hat,
                "sigma_tl_hat": rep.sigma_tl_hat,
                "sigma_r_hat": rep.sigma_r_hat,
                "shapiro_w": rep.shapiro_w,
                "shapiro_p": rep.shapiro_p,
                "r2_gauss": rep.r2_gauss,
                "r2_tl": rep.r2_tl,
                "banding_ratio": rep.banding_ratio,
                "ppcc_curve": [[lam, r] for lam, r in rep.ppcc_curve],
            }
            for iso, rep in sorted(dict(reports).items())
        },
    }
    _atomic_write_bytes(path, _json_bytes(doc))
