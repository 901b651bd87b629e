"""Input validation helpers for the estimator facade."""

from __future__ import annotations

from .errors import DomainError
from .frames import FrameSet, RawFrame
from .model import JointParamModel

__all__ = ["ensure_raw_frame", "ensure_frame_set", "ensure_joint_model"]


def ensure_raw_frame(obj) -> RawFrame:
    if not isinstance(obj, RawFrame):
        raise DomainError(f"expected a RawFrame, got {type(obj).__name__}")
    return obj


def ensure_frame_set(obj, kind: str) -> FrameSet:
    if not isinstance(obj, FrameSet):
        raise DomainError(f"expected a FrameSet, got {type(obj).__name__}")
    if obj.kind != kind:
        raise DomainError(f"expected a {kind!r} FrameSet, got {obj.kind!r}")
    return obj


def ensure_joint_model(obj) -> JointParamModel:
    """Accept a JointParamModel directly or anything carrying one as .joint."""
    if isinstance(obj, JointParamModel):
        return obj
    joint = getattr(obj, "joint", None)
    if isinstance(joint, JointParamModel):
        return joint
    raise DomainError(
        f"expected a JointParamModel or CameraProfile, got {type(obj).__name__}"
    )
