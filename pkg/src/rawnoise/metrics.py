"""Raw-domain evaluation metrics on packed Bayer planes.

Brightness alignment finds the single scalar c minimizing ||c*x - y||^2
before comparison, compensating the global exposure mismatch synthesis or
denoising can introduce.  PSNR and SSIM follow their standard definitions
computed per packed color plane and averaged; SSIM uses the Gaussian
11-tap window (sigma 1.5) with the usual K1=0.01, K2=0.03 constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from skimage.metrics import structural_similarity

from .errors import DegenerateDataError, DomainError
from .frames import BayerPattern, pack_bayer

__all__ = ["EvalResult", "brightness_align", "psnr", "ssim", "evaluate_pair"]


@dataclass(frozen=True)
class EvalResult:
    """Metrics for one reconstructed/reference frame pair."""

    psnr: float
    ssim: float
    align_scalar: float


def _check_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DomainError(f"frame shapes differ: {x.shape} vs {y.shape}")
    if x.ndim != 2:
        raise DomainError(f"metrics need 2D frames, got {x.ndim}D")
    return x, y


def brightness_align(x, y) -> float:
    """Scalar c minimizing ||c*x - y||^2, applied to x before metrics."""
    x, y = _check_pair(x, y)
    sxx = float(np.einsum("ij,ij->", x, x))
    if sxx == 0.0:
        raise DegenerateDataError("cannot align an all-zero frame")
    return float(np.einsum("ij,ij->", x, y)) / sxx


def psnr(x, y, peak: float) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical frames.

    The mean squared error over the full mosaic equals the mean of the four
    per-plane MSEs (the planes partition the pixels), so no packing step is
    needed.
    """
    x, y = _check_pair(x, y)
    if peak <= 0:
        raise DomainError(f"peak must be positive, got {peak}")
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def ssim(x, y, peak: float, pattern: BayerPattern = BayerPattern.RGGB) -> float:
    """Mean structural similarity over the four packed color planes."""
    x, y = _check_pair(x, y)
    if peak <= 0:
        raise DomainError(f"peak must be positive, got {peak}")
    planes_x = pack_bayer(x, pattern)
    planes_y = pack_bayer(y, pattern)
    values = [
        structural_similarity(
            px, py, data_range=peak, gaussian_weights=True, sigma=1.5, use_sample_covariance=False
        )
        for px, py in zip(planes_x, planes_y)
    ]
    return float(np.mean(values))


def evaluate_pair(pred, ref, peak: float, align: bool = False) -> EvalResult:
    """PSNR/SSIM of pred against ref, optionally brightness-aligned first."""
    pred, ref = _check_pair(pred, ref)
    c = brightness_align(pred, ref) if align else 1.0
    adjusted = c * pred
    return EvalResult(
        psnr=psnr(adjusted, ref, peak),
        ssim=ssim(adjusted, ref, peak),
        align_scalar=c,
    )
