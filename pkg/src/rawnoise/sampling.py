"""Sampling primitives for the four-component sensor noise model.

Shot noise is Poisson in collected photoelectrons, read noise follows a
zero-location Tukey-lambda distribution (heavy-tailed for shape values below
the Gaussian-like 0.14), row noise is zero-mean Gaussian, and quantization
error is uniform over one ADC step.  All samplers are pure functions of
their parameters and an :class:`~rawnoise.rng.RngStream`.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .rng import RngStream

__all__ = [
    "tukey_lambda_quantile",
    "tukey_lambda_variance",
    "sample_tukey_lambda",
    "sample_poisson",
    "sample_gaussian",
    "sample_uniform",
]

# Smallest uniform draw fed to the quantile function.  numpy's random() can
# return exactly 0.0, which the quantile rejects; one draw in 2^53 is clamped
# to the adjacent representable probability instead.
_U_FLOOR = 2.0 ** -54


def tukey_lambda_quantile(p, lam: float):
    """Quantile function of the unit-scale, zero-location Tukey lambda family.

    Q(p) = (p^lam - (1-p)^lam) / lam for lam != 0, with the logistic limit
    log(p / (1-p)) at lam = 0.  Antisymmetric about p = 0.5.  Accepts scalar
    or array ``p``; values must lie strictly inside (0, 1).
    """
    p_arr = np.asarray(p, dtype=np.float64)
    if p_arr.size and not np.all((p_arr > 0.0) & (p_arr < 1.0)):
        raise DomainError("quantile probabilities must lie strictly in (0, 1)")
    lam = float(lam)
    log_p = np.log(p_arr)
    log_q = np.log1p(-p_arr)
    # below ~1e-300 the product lam*log(p) goes subnormal and loses the
    # precision the expm1 form needs, so take the exact limit instead
    if abs(lam) < 1e-300:
        out = log_p - log_q
    else:
        # expm1 keeps the lam -> 0 limit continuous to machine precision.
        out = (np.expm1(lam * log_p) - np.expm1(lam * log_q)) / lam
    return out if isinstance(out, np.ndarray) and out.ndim else float(out)


def tukey_lambda_variance(lam: float) -> float:
    """Analytic variance of the unit-scale Tukey lambda distribution.

    Finite only for lam > -0.5; returns inf at and below that boundary.
    The closed form cancels catastrophically as lam -> 0, so shapes within
    1e-6 of zero use the exact logistic value pi^2/3.
    """
    lam = float(lam)
    if lam <= -0.5:
        return math.inf
    if abs(lam) < 1e-6:
        return math.pi ** 2 / 3.0
    g1 = math.gamma(lam + 1.0)
    g2 = math.gamma(2.0 * lam + 2.0)
    return (2.0 / lam ** 2) * (1.0 / (1.0 + 2.0 * lam) - g1 * g1 / g2)


def sample_tukey_lambda(n: int, lam: float, sigma: float, rng: RngStream) -> np.ndarray:
    """n independent draws of sigma * Q(U; lam), U uniform on (0, 1).

    Inverse-transform sampling through the closed-form quantile; location is
    fixed at zero.  sigma = 0 returns exact zeros.
    """
    n = _check_count(n)
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        return np.zeros(n)
    u = np.maximum(rng.generator().random(n), _U_FLOOR)
    return sigma * tukey_lambda_quantile(u, lam)


def sample_poisson(mean, rng: RngStream, n: int | None = None):
    """Exact Poisson draws with the given mean (photoelectrons).

    ``mean`` may be a scalar or an array of per-pixel means.  With ``n``
    omitted and scalar mean, returns a single integer; otherwise an int64
    array of shape ``n`` or ``mean.shape``.  The generator is exact in every
    mean regime (no Gaussian approximation at large means).
    """
    mean_arr = np.asarray(mean, dtype=np.float64)
    if mean_arr.size and (np.any(~np.isfinite(mean_arr)) or np.any(mean_arr < 0.0)):
        raise DomainError("Poisson mean must be finite and >= 0")
    gen = rng.generator()
    if n is None and mean_arr.ndim == 0:
        return int(gen.poisson(float(mean_arr)))
    if n is not None:
        _check_count(n)
        return gen.poisson(mean_arr, size=n).astype(np.int64, copy=False)
    return gen.poisson(mean_arr).astype(np.int64, copy=False)


def sample_gaussian(n: int, sigma: float, rng: RngStream) -> np.ndarray:
    """n zero-mean Gaussian draws with standard deviation sigma."""
    n = _check_count(n)
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        return np.zeros(n)
    return rng.generator().normal(0.0, sigma, n)


def sample_uniform(n: int, half_width: float, rng: RngStream) -> np.ndarray:
    """n draws uniform on [-half_width, +half_width]."""
    n = _check_count(n)
    if half_width < 0:
        raise DomainError(f"half_width must be >= 0, got {half_width}")
    if half_width == 0.0:
        return np.zeros(n)
    return rng.generator().uniform(-half_width, half_width, n)


def _check_count(n) -> int:
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"count must be a nonnegative integer, got {n!r}")
    return int(n)
