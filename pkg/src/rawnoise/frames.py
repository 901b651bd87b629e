"""Raw Bayer frame containers and color-plane packing.

A :class:`RawFrame` stores black-level-subtracted sensor data in digital
numbers (DN) as a 2D row-major array, together with the metadata needed to
interpret it: Bayer color-filter layout, black and white levels, ISO, and
camera identity.  :class:`FrameSet` groups frames of a single kind (flat
fields at tagged illumination levels, or bias frames) for calibration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, InsufficientDataError

__all__ = ["BayerPattern", "RawFrame", "FrameSet", "pack_bayer", "unpack_bayer"]


class BayerPattern(str, Enum):
    """2x2 color-filter mosaic layout, read row-major from the top-left pixel."""

    RGGB = "RGGB"
    BGGR = "BGGR"
    GRBG = "GRBG"
    GBRG = "GBRG"


# Row-major (dy, dx) offset of each mosaic position, in pattern-string order.
_QUAD_OFFSETS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass
class RawFrame:
    """One raw capture, black-subtracted, in DN.

    ``data`` values lie in [0, white_level - black_level] for clipped
    synthetic output; calibration intermediates may exceed that range.
    """

    data: np.ndarray
    bayer_pattern: BayerPattern
    black_level: int
    white_level: int
    iso: int
    camera_id: str
    exposure_time_s: float | None = None

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data)
        if self.data.ndim != 2:
            raise DomainError(f"frame data must be 2D, got {self.data.ndim}D")
        h, w = self.data.shape
        if h % 2 or w % 2 or h == 0 or w == 0:
            raise DomainError(f"frame dimensions must be positive and even, got {w}x{h}")
        self.bayer_pattern = BayerPattern(self.bayer_pattern)
        if not self.black_level < self.white_level:
            raise DomainError(
                f"black_level ({self.black_level}) must be below white_level ({self.white_level})"
            )
        if self.iso <= 0:
            raise DomainError(f"iso must be positive, got {self.iso}")
        if not self.camera_id:
            raise DomainError("camera_id must be non-empty")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def saturation_dn(self) -> int:
        """Full-scale value after black subtraction."""
        return self.white_level - self.black_level

    def copy_with(self, data: np.ndarray) -> "RawFrame":
        """Same metadata, new pixel data."""
        return RawFrame(
            data=data,
            bayer_pattern=self.bayer_pattern,
            black_level=self.black_level,
            white_level=self.white_level,
            iso=self.iso,
            camera_id=self.camera_id,
            exposure_time_s=self.exposure_time_s,
        )


@dataclass
class FrameSet:
    """Homogeneous calibration frames: kind is 'flat_field' or 'bias'.

    ``illumination_level`` tags parallel ``frames`` and group flats captured
    at the same light level; bias sets leave them all at 0.0.
    """

    frames: list[RawFrame]
    kind: str
    illumination_level: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.kind not in ("flat_field", "bias"):
            raise DomainError(f"kind must be 'flat_field' or 'bias', got {self.kind!r}")
        if not self.frames:
            raise InsufficientDataError("FrameSet requires at least one frame")
        if self.kind == "flat_field" and len(self.frames) < 2:
            raise InsufficientDataError("flat_field sets need at least two frames for pair differencing")
        if not self.illumination_level:
            self.illumination_level = [0.0] * len(self.frames)
        if len(self.illumination_level) != len(self.frames):
            raise DomainError(
                "illumination_level must have one entry per frame "
                f"({len(self.illumination_level)} vs {len(self.frames)})"
            )
        first = self.frames[0]
        for f in self.frames[1:]:
            if f.data.shape != first.data.shape:
                raise DomainError("all frames in a set must share one shape")
            if f.camera_id != first.camera_id:
                raise DomainError("all frames in a set must come from one camera")
            if f.iso != first.iso:
                raise DomainError("all frames in a set must share one ISO")

    def __len__(self) -> int:
        return len(self.frames)

    def by_level(self) -> dict[float, list[RawFrame]]:
        """Frames grouped by illumination tag, keys ascending."""
        groups: dict[float, list[RawFrame]] = {}
        for level, frame in zip(self.illumination_level, self.frames):
            groups.setdefault(float(level), []).append(frame)
        return dict(sorted(groups.items()))


def pack_bayer(data: np.ndarray, pattern: BayerPattern) -> np.ndarray:
    """Split a mosaiced H x W array into 4 half-resolution color planes.

    Output shape (4, H/2, W/2), planes ordered by position in the pattern
    string (e.g. R, G, G, B for RGGB).
    """
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[0] % 2 or data.shape[1] % 2:
        raise DomainError("pack_bayer needs a 2D array with even dimensions")
    BayerPattern(pattern)
    return np.stack([data[dy::2, dx::2] for dy, dx in _QUAD_OFFSETS])


def unpack_bayer(planes: np.ndarray, pattern: BayerPattern) -> np.ndarray:
    """Inverse of :func:`pack_bayer`: re-mosaic (4, H/2, W/2) planes."""
    planes = np.asarray(planes)
    if planes.ndim != 3 or planes.shape[0] != 4:
        raise DomainError("unpack_bayer needs an array of shape (4, H/2, W/2)")
    BayerPattern(pattern)
    h2, w2 = planes.shape[1:]
    out = np.empty((2 * h2, 2 * w2), dtype=planes.dtype)
    for plane, (dy, dx) in zip(planes, _QUAD_OFFSETS):
        out[dy::2, dx::2] = plane
    return out
