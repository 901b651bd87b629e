"""Physics-based sensor noise modeling for extreme low-light raw imaging.

The package has two halves.  Synthesis turns well-exposed clean raw
frames into realistic extreme-low-light captures by darkening them and
applying a four-component noise model: Poisson shot noise, heavy-tailed
Tukey-lambda read noise, per-row Gaussian banding, and uniform
quantization error.  Calibration runs the other direction, estimating
those parameters for a real camera from ordinary flat-field and bias
frames and fitting the joint distribution that ties them together across
the ISO range, so parameters for unseen ISO settings can be sampled.
"""

from .calibration import (
    CalibrationConfig,
    CalibrationReport,
    CameraProfile,
    IsoParams,
    banding_spectrum,
    calibrate_iso,
    estimate_gain,
    estimate_row_noise,
    filliben_positions,
    fit_joint_model,
    ppcc_fit,
    probability_plot,
    shapiro_wilk,
)
from .errors import (
    CalibrationError,
    ConfigurationError,
    DegenerateDataError,
    DomainError,
    FormatError,
    InsufficientDataError,
    RawNoiseError,
)
from .estimators import CameraCalibrator, NoiseSynthesizer
from .fileio import (
    FORMAT_VERSION,
    read_frame,
    read_frame_meta,
    read_profile,
    write_frame,
    write_profile,
    write_report,
)
from .frames import BayerPattern, FrameSet, RawFrame, pack_bayer, unpack_bayer
from .metrics import EvalResult, brightness_align, evaluate_pair, psnr, ssim
from .model import (
    NOISE_COMPONENTS,
    FitLine,
    JointParamModel,
    NoiseParams,
    SynthesisConfig,
    sample_noise_params,
)
from .rng import RngStream
from .sampling import (
    sample_gaussian,
    sample_poisson,
    sample_tukey_lambda,
    sample_uniform,
    tukey_lambda_quantile,
    tukey_lambda_variance,
)
from .synthesis import darken, restore, synthesize_noise, synthesize_pair

__version__ = "0.1.0"

__all__ = [
    "BayerPattern",
    "CalibrationConfig",
    "CalibrationError",
    "CalibrationReport",
    "CameraCalibrator",
    "CameraProfile",
    "ConfigurationError",
    "DegenerateDataError",
    "DomainError",
    "EvalResult",
    "FORMAT_VERSION",
    "FitLine",
    "FormatError",
    "FrameSet",
    "InsufficientDataError",
    "IsoParams",
    "JointParamModel",
    "NOISE_COMPONENTS",
    "NoiseParams",
    "NoiseSynthesizer",
    "RawFrame",
    "RawNoiseError",
    "RngStream",
    "SynthesisConfig",
    "banding_spectrum",
    "brightness_align",
    "calibrate_iso",
    "darken",
    "estimate_gain",
    "estimate_row_noise",
    "evaluate_pair",
    "filliben_positions",
    "fit_joint_model",
    "pack_bayer",
    "ppcc_fit",
    "probability_plot",
    "psnr",
    "read_frame",
    "read_frame_meta",
    "read_profile",
    "restore",
    "sample_gaussian",
    "sample_noise_params",
    "sample_poisson",
    "sample_tukey_lambda",
    "sample_uniform",
    "shapiro_wilk",
    "ssim",
    "synthesize_noise",
    "synthesize_pair",
    "tukey_lambda_quantile",
    "tukey_lambda_variance",
    "unpack_bayer",
    "write_frame",
    "write_profile",
    "write_report",
    "__version__",
]
