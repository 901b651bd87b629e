"""Shared helpers for the test suite: synthetic frame-set builders.

Calibration tests need frame sets whose true parameters are known; these
helpers produce them through the package's own synthesis, which earlier
oracle tests validate against analytic moments and distribution tests.
"""

from __future__ import annotations

import numpy as np

import rawnoise as rn

CAMERA = dict(bayer_pattern="RGGB", black_level=0, white_level=65535, camera_id="fixture")
FLAT_FRACS = (0.05, 0.10, 0.18, 0.30, 0.45, 0.58)
BIAS_PEDESTAL = 2048.0


def constant_frame(value: float, shape=(64, 64), iso: int = 800, **overrides) -> rn.RawFrame:
    meta = {**CAMERA, "iso": iso, **overrides}
    return rn.RawFrame(data=np.full(shape, float(value)), **meta)


def make_flat_set(
    params: rn.NoiseParams,
    stream: rn.RngStream,
    shape=(1024, 1024),
    fracs=FLAT_FRACS,
    frames_per_level: int = 4,
    iso: int = 800,
    quantize: bool = True,
) -> rn.FrameSet:
    """Flat fields at several illumination levels with known parameters."""
    frames, levels = [], []
    for li, frac in enumerate(fracs):
        dn = frac * 65535.0
        for j in range(frames_per_level):
            clean = constant_frame(dn / params.k, shape, iso, exposure_time_s=frac)
            noisy = rn.synthesize_noise(clean, params, stream.child(f"flat{li}.{j}"))
            if quantize:
                noisy = noisy.copy_with(np.rint(noisy.data))
            frames.append(noisy)
            levels.append(frac)
    return rn.FrameSet(frames, "flat_field", levels)


def make_bias_set(
    params: rn.NoiseParams,
    stream: rn.RngStream,
    shape=(2048, 4096),
    n_frames: int = 4,
    iso: int = 800,
    quantize: bool = True,
) -> rn.FrameSet:
    """Bias frames: constant pedestal scene with shot noise disabled.

    The pedestal keeps additive noise away from the zero clamp so the file
    format cannot censor the negative tail.
    """
    bias_params = params.with_enabled(params.enabled - {"shot"})
    frames = []
    for j in range(n_frames):
        clean = constant_frame(BIAS_PEDESTAL / params.k, shape, iso)
        noisy = rn.synthesize_noise(clean, bias_params, stream.child(f"bias{j}"))
        if quantize:
            noisy = noisy.copy_with(np.rint(noisy.data))
        frames.append(noisy)
    return rn.FrameSet(frames, "bias")
