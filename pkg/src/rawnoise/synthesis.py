"""Composite noise synthesis and the low-light darken/restore protocol.

The observed raw value at a pixel with clean signal I photoelectrons is

    D = K * Poisson(I) + N_read + N_row + N_quant

with read noise Tukey-lambda distributed, one shared Gaussian offset per
image row, and quantization uniform over one ADC step.  Extreme low-light
pairs are produced by dividing a well-exposed clean frame by a factor f,
synthesizing noise at the darkened level, and multiplying back by f.

Every sampler draws from a named child of the frame's RngStream, so a
component's draws do not depend on which other components are enabled.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .frames import RawFrame
from .model import JointParamModel, NoiseParams, SynthesisConfig, sample_noise_params
from .rng import RngStream
from .sampling import sample_tukey_lambda

__all__ = ["synthesize_noise", "darken", "restore", "synthesize_pair"]


def synthesize_noise(
    clean_electrons: RawFrame,
    params: NoiseParams,
    rng: RngStream,
    clip: bool = True,
) -> RawFrame:
    """Apply the four-component noise model to a clean frame in electrons.

    Input data is the per-pixel expected photoelectron count I >= 0; output
    is in DN.  Disabled components contribute their noiseless value (shot
    disabled leaves K * I exactly; the others contribute zero).  With
    ``clip`` the result is clamped to [0, white_level - black_level].
    """
    electrons = np.asarray(clean_electrons.data, dtype=np.float64)
    if np.any(electrons < 0) or not np.all(np.isfinite(electrons)):
        raise DomainError("clean frame must hold finite, nonnegative electron counts")
    h, w = electrons.shape

    if "shot" in params.enabled:
        gen = rng.child("shot").generator()
        signal = params.k * gen.poisson(electrons).astype(np.float64)
    else:
        signal = params.k * electrons

    out = signal
    if "read" in params.enabled and params.sigma_tl > 0:
        read = sample_tukey_lambda(h * w, params.lam, params.sigma_tl, rng.child("read"))
        out = out + read.reshape(h, w)
    if "row" in params.enabled and params.sigma_r > 0:
        offsets = rng.child("row").generator().normal(0.0, params.sigma_r, h)
        out = out + offsets[:, np.newaxis]
    if "quant" in params.enabled and params.q > 0:
        gen = rng.child("quant").generator()
        out = out + gen.uniform(-0.5 * params.q, 0.5 * params.q, (h, w))

    if clip:
        out = np.clip(out, 0.0, clean_electrons.saturation_dn)
    return clean_electrons.copy_with(out)


def darken(clean: RawFrame, f: float) -> RawFrame:
    """Divide a clean DN frame by low-light factor f >= 1."""
    _check_factor(f)
    return clean.copy_with(np.asarray(clean.data, dtype=np.float64) / f)


def restore(noisy: RawFrame, f: float, clip: bool = True) -> RawFrame:
    """Multiply a darkened frame back by f, clamping to the sensor range."""
    _check_factor(f)
    data = np.asarray(noisy.data, dtype=np.float64) * f
    if clip:
        data = np.clip(data, 0.0, noisy.saturation_dn)
    return noisy.copy_with(data)


def synthesize_pair(
    clean: RawFrame,
    model: JointParamModel,
    config: SynthesisConfig,
    rng: RngStream,
) -> tuple[RawFrame, RawFrame, NoiseParams, float]:
    """Produce one (noisy, clean) training pair with full provenance.

    Draws f ~ Uniform(f_min, f_max) and a parameter set from the joint
    model, darkens the clean frame, synthesizes noise in electron units,
    and restores brightness.  Returns (noisy, clean, params, f).
    """
    data = np.asarray(clean.data, dtype=np.float64)
    if np.any(data < 0) or np.any(data > clean.saturation_dn):
        raise DomainError("clean frame must lie in [0, white_level - black_level]")

    f = float(rng.child("factor").generator().uniform(config.f_min, config.f_max))
    params = sample_noise_params(model, rng.child("params"), enabled=config.components)

    dark = darken(clean, f)
    electrons = dark.copy_with(dark.data / params.k)
    noisy = synthesize_noise(electrons, params, rng.child("noise"), clip=config.clip)
    noisy = restore(noisy, f, clip=config.clip)
    if config.quantize_output:
        noisy = noisy.copy_with(np.rint(noisy.data))
    return noisy, clean, params, f


def _check_factor(f: float) -> None:
    if not (f >= 1.0 and np.isfinite(f)):
        raise DomainError(f"low-light factor must be finite and >= 1, got {f}")
