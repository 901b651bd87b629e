"""Noise model parameters and the cross-ISO joint parameter distribution.

A single capture is described by :class:`NoiseParams`: system gain K
(DN per photoelectron), read-noise shape ``lam`` and scale ``sigma_tl``
(Tukey lambda, DN), row-noise sigma ``sigma_r`` (DN), and quantization
step ``q`` (DN).  Across a camera's ISO range the parameters co-vary:
log-scale read and row noise each track log K linearly with Gaussian
scatter, and the shape is drawn from the empirically observed pool.
:class:`JointParamModel` captures that structure so plausible parameter
sets can be sampled for cameras between calibrated ISOs.

All logarithms in the joint model (field values, line fits, sampling)
are base 2; :func:`log_scale` and :func:`exp_scale` are the only
conversion points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError
from .rng import RngStream

__all__ = [
    "NOISE_COMPONENTS",
    "NoiseParams",
    "FitLine",
    "JointParamModel",
    "SynthesisConfig",
    "log_scale",
    "exp_scale",
    "sample_noise_params",
]

NOISE_COMPONENTS = frozenset({"shot", "read", "row", "quant"})


def log_scale(x) -> float | np.ndarray:
    """Joint-model logarithm (base 2) of a positive gain or sigma."""
    return np.log2(x)


def exp_scale(x) -> float | np.ndarray:
    """Inverse of :func:`log_scale`."""
    return np.asarray(2.0) ** x if isinstance(x, np.ndarray) else 2.0 ** float(x)


def _check_components(enabled) -> frozenset:
    enabled = frozenset(enabled)
    unknown = enabled - NOISE_COMPONENTS
    if unknown:
        raise DomainError(f"unknown noise components: {sorted(unknown)}")
    return enabled


@dataclass(frozen=True)
class NoiseParams:
    """Physical noise parameters of one capture."""

    k: float
    lam: float
    sigma_tl: float
    sigma_r: float
    q: float = 1.0
    enabled: frozenset = NOISE_COMPONENTS

    def __post_init__(self) -> None:
        if not (self.k > 0 and math.isfinite(self.k)):
            raise DomainError(f"gain k must be finite and > 0, got {self.k}")
        if not (-1.0 <= self.lam <= 1.0):
            raise DomainError(f"lam must lie in [-1, 1], got {self.lam}")
        for name in ("sigma_tl", "sigma_r", "q"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
        object.__setattr__(self, "enabled", _check_components(self.enabled))

    def with_enabled(self, enabled) -> "NoiseParams":
        """Same physics, different active component set."""
        return NoiseParams(self.k, self.lam, self.sigma_tl, self.sigma_r, self.q, enabled)


@dataclass(frozen=True)
class FitLine:
    """Least-squares line y = slope * x + intercept with residual scatter.

    ``resid_std`` is sqrt(RSS / (n - 2)), the unbiased scale of the
    Gaussian scatter about the line.
    """

    slope: float
    intercept: float
    resid_std: float
    n_points: int

    def __post_init__(self) -> None:
        if self.resid_std < 0:
            raise DomainError(f"resid_std must be >= 0, got {self.resid_std}")
        if self.n_points < 2:
            raise DomainError(f"n_points must be >= 2, got {self.n_points}")

    def predict(self, x: float) -> float:
        return self.slope * float(x) + self.intercept


@dataclass(frozen=True)
class JointParamModel:
    """Joint distribution of noise parameters across a camera's ISO range.

    log K is uniform on [log_k_min, log_k_max]; log sigma_tl and log
    sigma_r are conditionally Gaussian around lines in log K; the shape
    is drawn uniformly from the calibrated pool.
    """

    log_k_min: float
    log_k_max: float
    tl_line: FitLine
    row_line: FitLine
    lambda_pool: tuple

    def __post_init__(self) -> None:
        if not (self.log_k_min <= self.log_k_max):
            raise DomainError(
                f"log_k_min ({self.log_k_min}) must not exceed log_k_max ({self.log_k_max})"
            )
        pool = tuple(float(v) for v in self.lambda_pool)
        if not pool:
            raise ConfigurationError("lambda_pool must be non-empty")
        for lam in pool:
            if not (-1.0 <= lam <= 1.0):
                raise DomainError(f"lambda_pool entries must lie in [-1, 1], got {lam}")
        object.__setattr__(self, "lambda_pool", pool)


@dataclass(frozen=True)
class SynthesisConfig:
    """Controls for clean-to-noisy pair synthesis.

    The darkening factor f is drawn uniformly from [f_min, f_max];
    ``clip`` bounds noisy output to the sensor range and
    ``quantize_output`` rounds restored frames to whole DN.
    """

    f_min: float = 100.0
    f_max: float = 300.0
    clip: bool = True
    quantize_output: bool = True
    components: frozenset = NOISE_COMPONENTS

    def __post_init__(self) -> None:
        if not (1.0 <= self.f_min <= self.f_max):
            raise DomainError(
                f"need 1 <= f_min <= f_max, got f_min={self.f_min}, f_max={self.f_max}"
            )
        object.__setattr__(self, "components", _check_components(self.components))


def sample_noise_params(
    model: JointParamModel,
    rng: RngStream,
    enabled: frozenset = NOISE_COMPONENTS,
    q: float = 1.0,
) -> NoiseParams:
    """Draw one plausible parameter set from the joint model.

    Pure function of ``rng``: the same stream always yields the same
    parameters.  Logs are base 2 throughout (see module docstring).
    """
    gen = rng.generator()
    log_k = gen.uniform(model.log_k_min, model.log_k_max)
    log_tl = gen.normal(model.tl_line.predict(log_k), model.tl_line.resid_std)
    log_row = gen.normal(model.row_line.predict(log_k), model.row_line.resid_std)
    lam = model.lambda_pool[int(gen.integers(len(model.lambda_pool)))]
    return NoiseParams(
        k=exp_scale(log_k),
        lam=lam,
        sigma_tl=exp_scale(log_tl),
        sigma_r=exp_scale(log_row),
        q=q,
        enabled=enabled,
    )
