"""Per-ISO noise parameter estimation from flat-field and bias frames.

The calibration chain recovers the four model parameters:

* gain K from the photon-transfer relation between flat-field signal mean
  and temporal variance (pair differencing cancels fixed-pattern noise);
* row-noise sigma_r from the spread of bias-frame row means, shrunk by the
  averaged-pixel-noise term sigma_pix^2 / width;
* shape lambda from a Tukey-lambda PPCC scan over the row-mean-subtracted
  bias residuals;
* scale sigma_tl from the slope of the probability plot at the chosen shape.

Heavy-tailed shapes (lambda <= -0.25) have infinite fourth moment, so raw
sample variances and extreme order statistics are unusable as estimators.
Three defenses keep the chain stable across the supported parameter box:
the gain fit Winsorizes difference frames at a fixed absolute threshold
chosen on a robust first pass (censoring then shifts only the intercept,
not the slope); the shape fit runs on a fixed-size skeleton of pool
quantiles, whose sampling noise stays finite for every shape; and the
probability-plot model quantiles are convolved with the exact quantizer
kernel (re-dither makes rounding error triangular and independent) plus
the Gaussian row-mean-subtraction term, so quantized integer files fit
without bias even at sigma_tl near 1 DN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _scipy_stats

from .errors import CalibrationError, DegenerateDataError, DomainError, InsufficientDataError
from .frames import FrameSet, RawFrame
from .model import FitLine, JointParamModel, log_scale
from .rng import RngStream
from .sampling import tukey_lambda_quantile

__all__ = [
    "CalibrationConfig",
    "CalibrationReport",
    "IsoParams",
    "CameraProfile",
    "filliben_positions",
    "estimate_gain",
    "banding_spectrum",
    "estimate_row_noise",
    "shapiro_wilk",
    "probability_plot",
    "ppcc_fit",
    "calibrate_iso",
    "fit_joint_model",
]

# Fixed seeds for the deterministic internal draws (Shapiro subsampling and
# residual re-dithering); calibration takes no RngStream of its own.
_SHAPIRO_SEED = 0x5357_1A5A
_DITHER_SEED = 0xD17E_0001


@dataclass(frozen=True)
class CalibrationConfig:
    """Tuning knobs for the estimation chain; defaults suit >= 1 Mpixel frames."""

    crop_fraction: float = 0.5       # central crop used for flat statistics
    block_size: int = 32             # first-pass robust variance block edge
    winsor_mult: float = 8.0         # Winsorizing threshold in difference-frame sigmas
    max_level_frac: float = 0.6      # drop flat levels above this fraction of full scale
    skeleton_points: int = 4001      # pool quantiles used by the shape fit
    lambda_step: float = 0.01        # PPCC grid resolution
    refine_window: float = 0.12      # half-width of the kernel-aware coarse scan
    refine_iterations: int = 3
    shapiro_max_n: int = 5000
    seed: int = 0                    # salts the internal subsample/dither draws


_DEFAULT_CONFIG = CalibrationConfig()


@dataclass(frozen=True)
class CalibrationReport:
    """Everything estimated at one ISO, plus goodness-of-fit diagnostics."""

    iso: int
    k_hat: float
    lambda_hat: float
    sigma_tl_hat: float
    sigma_r_hat: float
    shapiro_w: float
    shapiro_p: float
    r2_gauss: float
    r2_tl: float
    banding_ratio: float
    ppcc_curve: tuple = ()

    def __post_init__(self) -> None:
        if not (0.0 <= self.shapiro_p <= 1.0):
            raise DomainError(f"shapiro_p must lie in [0, 1], got {self.shapiro_p}")
        for name in ("r2_gauss", "r2_tl"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        curve = tuple((float(l), float(r)) for l, r in self.ppcc_curve)
        for _, r in curve:
            if not (-1.0 <= r <= 1.0 + 1e-12):
                raise DomainError(f"ppcc correlation out of [-1, 1]: {r}")
        object.__setattr__(self, "ppcc_curve", curve)


@dataclass(frozen=True)
class IsoParams:
    """The four calibrated parameters at one ISO."""

    k_hat: float
    lambda_hat: float
    sigma_tl_hat: float
    sigma_r_hat: float


@dataclass
class CameraProfile:
    """Calibrated per-ISO parameters plus the fitted joint model."""

    camera_id: str
    per_iso: dict
    joint: JointParamModel

    def __post_init__(self) -> None:
        if not self.camera_id:
            raise DomainError("camera_id must be non-empty")
        if not self.per_iso:
            raise DomainError("per_iso must be non-empty")
        self.per_iso = {
            int(iso): IsoParams(p.k_hat, p.lambda_hat, p.sigma_tl_hat, p.sigma_r_hat)
            for iso, p in self.per_iso.items()
        }

    @classmethod
    def from_reports(cls, camera_id: str, reports) -> "CameraProfile":
        """Assemble a profile from per-ISO calibration reports."""
        per_iso = {int(iso): rep for iso, rep in dict(reports).items()}
        return cls(camera_id=camera_id, per_iso=per_iso, joint=fit_joint_model(per_iso))


# --------------------------------------------------------------------------
# photon-transfer gain


def _central_crop(data: np.ndarray, frac: float) -> np.ndarray:
    h, w = data.shape
    ch, cw = max(2, int(h * frac)), max(2, int(w * frac))
    y0, x0 = (h - ch) // 2, (w - cw) // 2
    return data[y0 : y0 + ch, x0 : x0 + cw]


def _median_block_var(d: np.ndarray, block: int) -> float:
    """Median of per-block sample variances, debiased to the chi-square median.

    Robust to heavy-tailed read noise: no single extreme draw can move the
    median of variances the way it moves the pooled variance.
    """
    h, w = d.shape
    if h < block or w < block or (h // block) * (w // block) < 8:
        return float(np.var(d, ddof=1))
    hb, wb = h // block, w // block
    blocks = (
        d[: hb * block, : wb * block]
        .reshape(hb, block, wb, block)
        .transpose(0, 2, 1, 3)
        .reshape(hb * wb, block * block)
    )
    v = np.var(blocks, axis=1, ddof=1)
    k = block * block - 1
    # median of chi2_k / k is (1 - 2/(9k))^3 (Wilson-Hilferty)
    return float(np.median(v) / (1.0 - 2.0 / (9.0 * k)) ** 3)


def _affine_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    coef, *_ = np.linalg.lstsq(np.column_stack([x, np.ones_like(x)]), y, rcond=None)
    return float(coef[0]), float(coef[1])


def estimate_gain(flats: FrameSet, config: CalibrationConfig = _DEFAULT_CONFIG) -> float:
    """System gain K (DN per photoelectron) by the photon-transfer method.

    Per illumination level, the signal is the central-crop mean and the
    temporal variance is half the variance of a same-level frame difference.
    The variance-vs-mean line is fitted twice: a median-of-blocks first pass
    sets a fixed Winsorizing threshold, and a plain second pass on the
    clipped differences gives the final slope.  The fixed absolute threshold
    makes the censored tail mass the same at every level, so censoring moves
    the intercept but leaves the slope (the gain) unbiased.
    """
    if flats.kind != "flat_field":
        raise DomainError(f"estimate_gain needs flat_field frames, got {flats.kind!r}")
    levels = flats.by_level()
    if len(levels) < 2:
        raise InsufficientDataError(
            f"photon transfer needs >= 2 illumination levels, got {len(levels)}"
        )
    sat = flats.frames[0].saturation_dn

    means, diffs = [], []
    for level, frames in levels.items():
        if len(frames) < 2:
            raise InsufficientDataError(
                f"photon transfer needs >= 2 frames per level, got {len(frames)} at {level}"
            )
        crops = [_central_crop(np.asarray(f.data, dtype=np.float64), config.crop_fraction) for f in frames]
        m = float(np.mean([c.mean() for c in crops]))
        if m >= config.max_level_frac * sat:
            continue
        pair_diffs = [crops[i] - crops[i + 1] for i in range(0, len(crops) - 1, 2)]
        means.append(m)
        diffs.append(pair_diffs)
    if len(means) < 2:
        raise InsufficientDataError(
            "fewer than 2 illumination levels below the clipping-safe range"
        )

    means_arr = np.asarray(means)
    v1 = np.asarray(
        [np.mean([_median_block_var(d, config.block_size) for d in dl]) / 2.0 for dl in diffs]
    )
    # threshold in difference-frame units, from the noisiest kept level
    t = config.winsor_mult * math.sqrt(2.0 * float(np.max(v1)))
    if t <= 0:
        raise CalibrationError("flat-field frames carry no variance")
    v2 = np.asarray(
        [np.mean([np.var(np.clip(d, -t, t), ddof=1) for d in dl]) / 2.0 for dl in diffs]
    )
    slope, _ = _affine_fit(means_arr, v2)
    if not math.isfinite(slope) or slope <= 0:
        raise CalibrationError(f"photon-transfer fit produced non-positive gain {slope}")
    return slope


# --------------------------------------------------------------------------
# row noise and banding


def banding_spectrum(bias: RawFrame, axis: str = "vertical") -> tuple[np.ndarray, float]:
    """Centered 2D Fourier magnitude spectrum and its banded-energy ratio.

    The ratio is the mean magnitude on the central line of the chosen axis
    (zero horizontal frequency for 'vertical', the row-noise signature),
    excluding the DC bin, divided by the mean magnitude everywhere else.
    White noise gives a ratio near 1; per-row offsets concentrate energy on
    the central vertical line and push it far above 1.
    """
    if axis not in ("vertical", "horizontal"):
        raise DomainError(f"axis must be 'vertical' or 'horizontal', got {axis!r}")
    data = np.asarray(bias.data, dtype=np.float64)
    mag = np.abs(np.fft.fftshift(np.fft.fft2(data)))
    h, w = mag.shape
    cy, cx = h // 2, w // 2

    on_line = np.zeros((h, w), dtype=bool)
    if axis == "vertical":
        on_line[:, cx] = True
    else:
        on_line[cy, :] = True
    line = mag[on_line]
    line_sum = float(line.sum() - mag[cy, cx])
    line_n = line.size - 1
    rest_sum = float(mag.sum() - line.sum())
    rest_n = h * w - line.size
    if rest_n == 0 or rest_sum == 0.0:
        # a perfectly row/column-constant frame has no off-line energy
        return mag, math.inf
    return mag, (line_sum / line_n) / (rest_sum / rest_n)


def _row_mean_residuals(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a frame into per-row means and the residual with zero row means."""
    row_means = data.mean(axis=1)
    return row_means, data - row_means[:, np.newaxis]


def estimate_row_noise(biases: FrameSet) -> float:
    """Row-noise sigma_r (DN) from the spread of bias-frame row means.

    Row means carry the row offset plus averaged pixel noise; the estimator
    is RMS^2(centered row means) - sigma_pix^2 / width, floored at zero.
    Both terms are computed from the same pixels with matching 1/width
    coefficients, so the sampling fluctuation of an extreme pixel draw
    cancels between them; that keeps the estimate stable even when the read
    noise is too heavy-tailed for its own variance to converge.
    """
    if biases.kind != "bias":
        raise DomainError(f"estimate_row_noise needs bias frames, got {biases.kind!r}")
    total_rows = sum(f.height for f in biases.frames)
    if total_rows < 16:
        raise InsufficientDataError(f"row-noise estimation needs >= 16 rows, got {total_rows}")

    width = biases.frames[0].width
    rm_sq = 0.0
    rm_dof = 0
    resid_sq = 0.0
    resid_n = 0
    for frame in biases.frames:
        data = np.asarray(frame.data, dtype=np.float64)
        row_means, resid = _row_mean_residuals(data)
        centered = row_means - row_means.mean()  # per-frame DC offset is not row noise
        rm_sq += float(np.dot(centered, centered))
        rm_dof += frame.height - 1
        resid_sq += float(np.einsum("ij,ij->", resid, resid))
        resid_n += resid.size - resid.shape[0]
    rms2 = rm_sq / rm_dof
    pixvar = resid_sq / resid_n
    return math.sqrt(max(0.0, rms2 - pixvar / width))


# --------------------------------------------------------------------------
# distribution fitting


def filliben_positions(n: int) -> np.ndarray:
    """Filliben median plotting positions for an ordered sample of size n."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    m = (np.arange(1, n + 1) - 0.3175) / (n + 0.365)
    m[-1] = 0.5 ** (1.0 / n)
    m[0] = 1.0 - m[-1]
    return m


def shapiro_wilk(samples, max_n: int = 5000, seed: int = 0) -> tuple[float, float]:
    """Shapiro-Wilk normality test (W statistic and p-value).

    The polynomial approximation behind the test is valid for n <= 5000;
    larger inputs are subsampled without replacement, deterministically for
    a given sample size and seed.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 3:
        raise InsufficientDataError(f"Shapiro-Wilk needs n >= 3, got {x.size}")
    if x.size > max_n:
        key = [(_SHAPIRO_SEED ^ seed) & (2**64 - 1), x.size]
        gen = np.random.Generator(np.random.Philox(key=key))
        x = x[gen.choice(x.size, size=max_n, replace=False)]
    w, p = _scipy_stats.shapiro(x)
    return float(w), float(p)


def probability_plot(samples, quantile_fn) -> tuple[float, float, float]:
    """Least-squares line of order statistics against theoretical quantiles.

    Returns (scale, offset, r2): the slope estimates the distribution scale,
    and r2 is the squared correlation of the plot (coefficient of
    determination of the linear fit).
    """
    y = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if y.size < 3:
        raise InsufficientDataError(f"probability plot needs n >= 3, got {y.size}")
    if y[0] == y[-1]:
        raise DegenerateDataError("probability plot is undefined for zero-variance samples")
    x = np.asarray(quantile_fn(filliben_positions(y.size)), dtype=np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.dot(xc, xc))
    if sxx == 0.0:
        raise DegenerateDataError("theoretical quantiles are constant")
    slope = float(np.dot(xc, yc)) / sxx
    offset = float(y.mean() - slope * x.mean())
    r2 = float(np.dot(xc, yc)) ** 2 / (sxx * float(np.dot(yc, yc)))
    return slope, offset, min(r2, 1.0)


def _ppcc_grid(step: float) -> np.ndarray:
    n_steps = int(round(2.0 / step))
    return np.linspace(-1.0, 1.0, n_steps + 1)


def ppcc_fit(samples, lambda_grid=None) -> tuple[float, list]:
    """Tukey-lambda PPCC scan: best-correlating shape and the full curve.

    Ties within numerical precision break toward the shape closest to 0.14,
    the member that most resembles a Gaussian.
    """
    y = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if y.size < 10:
        raise InsufficientDataError(f"PPCC needs n >= 10, got {y.size}")
    if y[0] == y[-1]:
        raise DegenerateDataError("PPCC is undefined for zero-variance samples")
    grid = _ppcc_grid(0.01) if lambda_grid is None else np.asarray(lambda_grid, dtype=np.float64)
    pos = filliben_positions(y.size)
    yc = y - y.mean()
    syy = math.sqrt(float(np.dot(yc, yc)))

    curve = []
    for lam in grid:
        x = tukey_lambda_quantile(pos, float(lam))
        xc = x - x.mean()
        sxx = math.sqrt(float(np.dot(xc, xc)))
        r = float(np.dot(xc, yc)) / (sxx * syy) if sxx > 0 else 0.0
        curve.append((float(lam), r))
    best_r = max(r for _, r in curve)
    ties = [lam for lam, r in curve if best_r - r <= 1e-12]
    lam_star = min(ties, key=lambda lam: (abs(lam - 0.14), lam))
    return lam_star, curve


# --------------------------------------------------------------------------
# quantizer-aware shape refinement

_GH_X, _GH_W = np.polynomial.hermite_e.hermegauss(21)
_GH_W = _GH_W / _GH_W.sum()


def _kernel_quantiles(
    lam: float, sigma: float, probs: np.ndarray, n_uniform: int, sigma_g: float
) -> np.ndarray:
    """Quantiles of sigma*TL(lam) convolved with the measurement kernel.

    The kernel is n_uniform unit-width uniforms (model quantization plus
    file rounding plus re-dither) and a N(0, sigma_g) term from row-mean
    subtraction.  Returned divided by sigma, so a probability-plot slope
    against these quantiles estimates sigma directly.
    """
    z = np.linspace(-19.0, 19.0, 8001)
    p = 1.0 / (1.0 + np.exp(-z))
    y = sigma * tukey_lambda_quantile(p, lam)
    # extend past the (possibly bounded) TL support so the convolution
    # stays inside the grid
    pad = 0.75 * n_uniform + 6.0 * sigma_g + 1e-3
    y = np.concatenate([y[0] - np.linspace(pad, 1e-6, 400), y, y[-1] + np.linspace(1e-6, pad, 400)])
    cdf = np.concatenate([np.zeros(400), p, np.ones(400)])

    for _ in range(n_uniform):
        integ = np.concatenate([[0.0], np.cumsum(0.5 * (cdf[1:] + cdf[:-1]) * np.diff(y))])

        def _integral(t: np.ndarray) -> np.ndarray:
            out = np.interp(t, y, integ)
            above = t > y[-1]
            if np.any(above):
                out[above] = integ[-1] + (t[above] - y[-1])
            return out

        cdf = np.clip(_integral(y + 0.5) - _integral(y - 0.5), 0.0, 1.0)
        cdf = np.maximum.accumulate(cdf)
    if sigma_g > 1e-9:
        smeared = np.zeros_like(cdf)
        for node, weight in zip(_GH_X, _GH_W):
            smeared += weight * np.interp(y - sigma_g * node, y, cdf, left=0.0, right=1.0)
        cdf = np.maximum.accumulate(np.clip(smeared, 0.0, 1.0))
    return np.interp(probs, cdf, y) / sigma


def _kernel_corr(skeleton: np.ndarray, pos: np.ndarray, lam, sigma, n_uniform, sigma_g):
    x = _kernel_quantiles(lam, sigma, pos, n_uniform, sigma_g)
    xc = x - x.mean()
    yc = skeleton - skeleton.mean()
    sxx = float(np.dot(xc, xc))
    if sxx <= 0:
        return -1.0, 0.0
    sxy = float(np.dot(xc, yc))
    r = sxy / math.sqrt(sxx * float(np.dot(yc, yc)))
    return r, sxy / sxx


def _scan_lambda(skeleton, pos, grid, sigma, n_uniform, sigma_g):
    best = (-2.0, 0.0, 0.0)  # (r, lam, slope)
    for lam in grid:
        r, slope = _kernel_corr(skeleton, pos, float(lam), sigma, n_uniform, sigma_g)
        if r > best[0]:
            best = (r, float(lam), slope)
    return best


def _refine_shape(
    skeleton: np.ndarray,
    pos: np.ndarray,
    lam0: float,
    sigma0: float,
    sigma_g: float,
    config: CalibrationConfig,
    n_uniform: int = 3,
) -> tuple[float, float]:
    """Iterate kernel-aware PPCC scans to a (lambda, sigma_tl) estimate.

    Each iteration scans a coarse grid around the current shape (recentering
    up to 4 times if the optimum lands on the window edge), polishes on a
    ten-times-finer grid, and re-reads sigma from the plot slope; the kernel
    is then rebuilt at the updated sigma for the next pass.
    """
    lam, sigma = float(lam0), max(abs(float(sigma0)), 1e-6)
    step = config.lambda_step
    half = config.refine_window
    for _ in range(config.refine_iterations):
        lo, hi = lam - half, lam + half
        for _expand in range(4):
            grid = np.round(np.arange(lo, hi + 1e-9, step), 10)
            grid = grid[np.abs(grid) <= 1.0]
            _, lam_c, _ = _scan_lambda(skeleton, pos, grid, sigma, n_uniform, sigma_g)
            interior = grid[0] + 1e-9 < lam_c < grid[-1] - 1e-9
            full_span = grid[0] <= -1.0 + 1e-9 and grid[-1] >= 1.0 - 1e-9
            if interior or full_span:
                break
            lo, hi = lam_c - half, lam_c + half
        fine = np.round(
            np.arange(lam_c - 0.9 * step, lam_c + 0.9 * step + 1e-9, 0.1 * step), 10
        )
        fine = fine[np.abs(fine) <= 1.0]
        _, lam, slope = _scan_lambda(skeleton, pos, fine, sigma, n_uniform, sigma_g)
        if slope != 0.0:
            sigma = abs(slope)  # kernel quantiles are sigma-normalized
    return lam, sigma


# --------------------------------------------------------------------------
# per-ISO chain and joint model


def _pool_residuals(biases: FrameSet) -> tuple[np.ndarray, float, int]:
    """Row-mean-subtracted bias residuals, their pixel variance, and width.

    The variance denominator drops one degree of freedom per subtracted row
    mean.
    """
    pools = []
    sq = 0.0
    dof = 0
    for frame in biases.frames:
        _, resid = _row_mean_residuals(np.asarray(frame.data, dtype=np.float64))
        pools.append(resid.ravel())
        sq += float(np.einsum("ij,ij->", resid, resid))
        dof += resid.size - resid.shape[0]
    pool = np.concatenate(pools)
    return pool, sq / dof, biases.frames[0].width


def _skeleton(pool: np.ndarray, n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Pool quantiles at Filliben positions, as a fixed-size pseudo-sample.

    Order statistics of the full pool have unbounded variance for heavy
    tails; pool quantiles at fixed probabilities always concentrate, so the
    skeleton behaves like an ideal ordered sample of size n_points.
    """
    pos = filliben_positions(n_points)
    srt = np.sort(pool)
    idx = np.minimum((pos * srt.size).astype(np.int64), srt.size - 1)
    return srt[idx], pos


def calibrate_iso(
    flats: FrameSet, biases: FrameSet, config: CalibrationConfig = _DEFAULT_CONFIG
) -> CalibrationReport:
    """Full single-ISO estimation chain; see the module docstring."""
    iso = flats.frames[0].iso
    k_hat = estimate_gain(flats, config)
    ratios = [banding_spectrum(f)[1] for f in biases.frames]
    banding_ratio = float(np.mean(ratios))
    sigma_r_hat = estimate_row_noise(biases)

    pool, pixvar, width = _pool_residuals(biases)
    if pool.size < 10:
        raise InsufficientDataError(f"need >= 10 bias residuals, got {pool.size}")
    if np.min(pool) == np.max(pool):
        raise DegenerateDataError("bias residuals have zero variance")
    shapiro_w, shapiro_p = shapiro_wilk(pool, config.shapiro_max_n, config.seed)

    # full-width re-dither makes file rounding plus dither an exact
    # triangular kernel, independent of the underlying noise
    key = [(_DITHER_SEED ^ config.seed) & (2**64 - 1), pool.size]
    gen = np.random.Generator(np.random.Philox(key=key))
    dithered = pool + gen.uniform(-0.5, 0.5, pool.size)
    skeleton, pos = _skeleton(dithered, config.skeleton_points)

    lam0, curve = ppcc_fit(skeleton, _ppcc_grid(config.lambda_step))
    scale0, _, _ = probability_plot(skeleton, lambda p: tukey_lambda_quantile(p, lam0))
    sigma_g = math.sqrt(max(pixvar, 0.0) / width)
    lambda_hat, sigma_tl_hat = _refine_shape(skeleton, pos, lam0, scale0, sigma_g, config)

    _, _, r2_tl = probability_plot(skeleton, lambda p: tukey_lambda_quantile(p, lambda_hat))
    _, _, r2_gauss = probability_plot(skeleton, _scipy_stats.norm.ppf)

    return CalibrationReport(
        iso=iso,
        k_hat=k_hat,
        lambda_hat=lambda_hat,
        sigma_tl_hat=sigma_tl_hat,
        sigma_r_hat=sigma_r_hat,
        shapiro_w=shapiro_w,
        shapiro_p=shapiro_p,
        r2_gauss=r2_gauss,
        r2_tl=r2_tl,
        banding_ratio=banding_ratio,
        ppcc_curve=tuple(curve),
    )


def fit_joint_model(per_iso) -> JointParamModel:
    """Fit the cross-ISO joint parameter model from per-ISO estimates.

    Regresses log2 sigma_tl and log2 sigma_r on log2 K by least squares;
    residual std uses the unbiased n-2 denominator.  Accepts any mapping
    from ISO to an object with k_hat / lambda_hat / sigma_tl_hat /
    sigma_r_hat attributes (IsoParams or CalibrationReport).
    """
    items = sorted(dict(per_iso).items())
    if len(items) < 3:
        raise InsufficientDataError(
            f"joint model needs >= 3 calibrated ISOs, got {len(items)}"
        )
    log_k = np.array([log_scale(p.k_hat) for _, p in items])
    log_tl = np.array([log_scale(p.sigma_tl_hat) for _, p in items])
    log_row = np.array([log_scale(p.sigma_r_hat) for _, p in items])
    lambdas = tuple(float(p.lambda_hat) for _, p in items)

    def line(x: np.ndarray, y: np.ndarray) -> FitLine:
        slope, intercept = _affine_fit(x, y)
        resid = y - (slope * x + intercept)
        resid_std = math.sqrt(float(np.dot(resid, resid)) / (len(x) - 2))
        return FitLine(slope=slope, intercept=intercept, resid_std=resid_std, n_points=len(x))

    return JointParamModel(
        log_k_min=float(np.min(log_k)),
        log_k_max=float(np.max(log_k)),
        tl_line=line(log_k, log_tl),
        row_line=line(log_k, log_row),
        lambda_pool=lambdas,
    )
