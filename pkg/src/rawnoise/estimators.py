"""Estimator-style facade: calibration as fit, synthesis as transform.

:class:`CameraCalibrator` consumes per-ISO frame sets and exposes the
fitted :class:`~rawnoise.calibration.CameraProfile`;
:class:`NoiseSynthesizer` turns clean frames into noisy/clean training
pairs drawn from a fitted or loaded profile.  Both follow the scikit-learn
parameter conventions (constructor args are plain attributes, fitted state
carries a trailing underscore, ``get_params`` / ``set_params`` work).
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .calibration import CalibrationConfig, CameraProfile, calibrate_iso
from .errors import InsufficientDataError
from .frames import RawFrame
from .model import NOISE_COMPONENTS, NoiseParams, SynthesisConfig
from .rng import RngStream
from .synthesis import synthesize_pair
from .validation import ensure_frame_set, ensure_joint_model, ensure_raw_frame

__all__ = ["CameraCalibrator", "NoiseSynthesizer"]


class CameraCalibrator(BaseEstimator):
    """Fits a camera noise profile from per-ISO flat and bias frame sets.

    ``fit`` takes an iterable of (flats, biases) FrameSet pairs, one pair
    per ISO, and leaves ``reports_`` (ISO to CalibrationReport) and
    ``profile_`` (with the fitted joint model) on the estimator.
    """

    def __init__(
        self,
        camera_id: str = "camera",
        crop_fraction: float = 0.5,
        block_size: int = 32,
        winsor_mult: float = 8.0,
        max_level_frac: float = 0.6,
        skeleton_points: int = 4001,
        lambda_step: float = 0.01,
        refine_window: float = 0.12,
        refine_iterations: int = 3,
        shapiro_max_n: int = 5000,
        seed: int = 0,
    ) -> None:
        self.camera_id = camera_id
        self.crop_fraction = crop_fraction
        self.block_size = block_size
        self.winsor_mult = winsor_mult
        self.max_level_frac = max_level_frac
        self.skeleton_points = skeleton_points
        self.lambda_step = lambda_step
        self.refine_window = refine_window
        self.refine_iterations = refine_iterations
        self.shapiro_max_n = shapiro_max_n
        self.seed = seed

    def _config(self) -> CalibrationConfig:
        return CalibrationConfig(
            crop_fraction=self.crop_fraction,
            block_size=self.block_size,
            winsor_mult=self.winsor_mult,
            max_level_frac=self.max_level_frac,
            skeleton_points=self.skeleton_points,
            lambda_step=self.lambda_step,
            refine_window=self.refine_window,
            refine_iterations=self.refine_iterations,
            shapiro_max_n=self.shapiro_max_n,
            seed=self.seed,
        )

    def fit(self, X, y=None) -> "CameraCalibrator":
        config = self._config()
        reports = {}
        for flats, biases in X:
            flats = ensure_frame_set(flats, "flat_field")
            biases = ensure_frame_set(biases, "bias")
            report = calibrate_iso(flats, biases, config)
            reports[report.iso] = report
        if not reports:
            raise InsufficientDataError("fit needs at least one (flats, biases) pair")
        self.reports_ = reports
        self.profile_ = CameraProfile.from_reports(self.camera_id, reports)
        return self

    def get_profile(self) -> CameraProfile:
        check_is_fitted(self, "profile_")
        return self.profile_


class NoiseSynthesizer(TransformerMixin, BaseEstimator):
    """Transforms clean frames into noisy frames under a camera profile.

    ``transform`` maps a sequence of clean RawFrames to noisy RawFrames;
    frame i always uses the seed-i child stream, so outputs do not depend
    on batching.  ``transform_pairs`` additionally returns the sampled
    parameters and low-light factor per frame.
    """

    def __init__(
        self,
        profile=None,
        f_min: float = 100.0,
        f_max: float = 300.0,
        clip: bool = True,
        quantize_output: bool = True,
        components: tuple = tuple(sorted(NOISE_COMPONENTS)),
        seed: int = 0,
    ) -> None:
        self.profile = profile
        self.f_min = f_min
        self.f_max = f_max
        self.clip = clip
        self.quantize_output = quantize_output
        self.components = components
        self.seed = seed

    def _synthesis_config(self) -> SynthesisConfig:
        return SynthesisConfig(
            f_min=self.f_min,
            f_max=self.f_max,
            clip=self.clip,
            quantize_output=self.quantize_output,
            components=frozenset(self.components),
        )

    def fit(self, X=None, y=None) -> "NoiseSynthesizer":
        self.model_ = ensure_joint_model(self.profile)
        self.config_ = self._synthesis_config()
        return self

    def transform_pairs(
        self, X
    ) -> list[tuple[RawFrame, RawFrame, NoiseParams, float]]:
        check_is_fitted(self, "model_")
        root = RngStream(self.seed).child("synth")
        out = []
        for i, frame in enumerate(X):
            frame = ensure_raw_frame(frame)
            out.append(synthesize_pair(frame, self.model_, self.config_, root.child(i)))
        return out

    def transform(self, X) -> list[RawFrame]:
        return [noisy for noisy, _, _, _ in self.transform_pairs(X)]
