"""Calibration dataset generation through the CLI itself.

The round-trip acceptance check calibrates frames that the ``synth``
subcommand produced, so the whole external interface is exercised: a
degenerate profile (zero-width joint distribution) pins the sampled
parameters to chosen true values, constant clean frames set the
illumination levels, and a pedestal scene with shot noise disabled
yields bias frames whose noise never touches the zero clamp.
"""

from __future__ import annotations

import math
import shutil
from pathlib import Path

import numpy as np

import rawnoise as rn
from rawnoise.cli import main as cli_main

FLAT_FRACS = (0.05, 0.10, 0.18, 0.30, 0.45, 0.58)
BIAS_PEDESTAL = 2048.0


def write_degenerate_profile(path: Path, k, lam, sigma_tl, sigma_r, camera_id="fixture") -> None:
    """Profile whose joint model always samples exactly (k, lam, sigma_tl, sigma_r)."""
    log2 = math.log2
    joint = rn.JointParamModel(
        log_k_min=log2(k),
        log_k_max=log2(k),
        tl_line=rn.FitLine(0.0, log2(sigma_tl), 0.0, 3),
        row_line=rn.FitLine(0.0, log2(sigma_r), 0.0, 3),
        lambda_pool=(lam,),
    )
    profile = rn.CameraProfile(
        camera_id=camera_id,
        per_iso={800: rn.IsoParams(k, lam, sigma_tl, sigma_r)},
        joint=joint,
    )
    rn.write_profile(profile, path)


def _run(argv: list[str]) -> None:
    rc = cli_main(argv)
    if rc != 0:
        raise RuntimeError(f"CLI failed ({rc}): {' '.join(argv)}")


def _collect_noisy(src: Path, dest: Path, prefix: str) -> None:
    dest.mkdir(parents=True, exist_ok=True)
    for raster in sorted(src.glob("noisy_*.pgm")):
        index = raster.stem.split("_")[1]
        shutil.move(raster, dest / f"{prefix}_{index}.pgm")
        shutil.move(raster.with_suffix(".json"), dest / f"{prefix}_{index}.json")


def generate_iso_dataset(
    scratch: Path,
    flats_dir: Path,
    biases_dir: Path,
    iso: int,
    k: float,
    lam: float,
    sigma_tl: float,
    sigma_r: float,
    seed: int,
    camera_id: str = "fixture",
    flat_shape=(1024, 1024),
    bias_shape=(2048, 4096),
    frames_per_level: int = 4,
    n_biases: int = 4,
) -> None:
    """Synthesize one ISO's flats and biases entirely via the synth CLI."""
    scratch = Path(scratch)
    scratch.mkdir(parents=True, exist_ok=True)
    profile_path = scratch / "degenerate.json"
    write_degenerate_profile(profile_path, k, lam, sigma_tl, sigma_r, camera_id)

    meta = dict(
        bayer_pattern="RGGB", black_level=0, white_level=65535, iso=iso, camera_id=camera_id
    )
    clean_flats = scratch / "clean_flats"
    for li, frac in enumerate(FLAT_FRACS):
        frame = rn.RawFrame(
            data=np.full(flat_shape, frac * 65535.0), exposure_time_s=frac, **meta
        )
        rn.write_frame(frame, clean_flats / f"clean{li}.pgm", kind="clean")
    out_flats = scratch / "out_flats"
    _run(
        [
            "synth",
            "--clean", str(clean_flats),
            "--profile", str(profile_path),
            "--out", str(out_flats),
            "--count", str(len(FLAT_FRACS) * frames_per_level),
            "--f-min", "1", "--f-max", "1",
            "--seed", str(seed),
        ]
    )
    _collect_noisy(out_flats, flats_dir, f"iso{iso}_flat")

    clean_bias = scratch / "clean_bias"
    frame = rn.RawFrame(data=np.full(bias_shape, BIAS_PEDESTAL), **meta)
    rn.write_frame(frame, clean_bias / "clean0.pgm", kind="clean")
    out_bias = scratch / "out_bias"
    _run(
        [
            "synth",
            "--clean", str(clean_bias),
            "--profile", str(profile_path),
            "--out", str(out_bias),
            "--count", str(n_biases),
            "--f-min", "1", "--f-max", "1",
            "--seed", str(seed + 1),
            "--disable", "shot",
        ]
    )
    _collect_noisy(out_bias, biases_dir, f"iso{iso}_bias")
    shutil.rmtree(scratch)
