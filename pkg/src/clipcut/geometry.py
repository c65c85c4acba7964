"""Rotation representations and the hybrid-relative bimanual action codec.

Translations are deltas expressed in the camera frame, rotations are deltas
expressed in the current end-effector frame (encoded as the first two columns
of the delta rotation matrix), and jaw commands are absolute targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ORTHO_TOL = 1e-6       # orthonormality tolerance for incoming rotation matrices
DEGENERATE_TOL = 1e-8  # post-projection norm below this is not decodable
ACTION_DIM = 20


class InvalidRotationError(ValueError):
    """Matrix is not orthonormal with determinant +1 within tolerance."""


class DegenerateSixDError(ValueError):
    """6D rotation whose column vectors are near-zero or near-parallel."""


def _as_f64(x, shape, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {a.shape}")
    return a


def check_rotation(R: np.ndarray, tol: float = ORTHO_TOL) -> np.ndarray:
    R = _as_f64(R, (3, 3), "rotation matrix")
    if np.max(np.abs(R.T @ R - np.eye(3))) > tol or abs(np.linalg.det(R) - 1.0) > tol:
        raise InvalidRotationError("matrix is not a proper rotation")
    return R


@dataclass
class Pose:
    """One arm's end-effector state in the world frame.

    position is in mm, orientation maps world to tool coordinates, jaw is the
    opening fraction in [0, 1].
    """

    position: np.ndarray
    orientation: np.ndarray
    jaw: float

    def __post_init__(self):
        self.position = _as_f64(self.position, (3,), "position")
        self.orientation = check_rotation(self.orientation)
        self.jaw = float(self.jaw)
        if not 0.0 <= self.jaw <= 1.0:
            raise ValueError(f"jaw must be in [0, 1], got {self.jaw}")

    def copy(self) -> "Pose":
        return Pose(self.position.copy(), self.orientation.copy(), self.jaw)


@dataclass
class CameraFrame:
    """Reference frame of the endoscope tip. orientation maps world to camera."""

    origin: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        self.origin = _as_f64(self.origin, (3,), "origin")
        self.orientation = check_rotation(self.orientation)


@dataclass
class ArmDelta:
    """Per-arm action: camera-frame translation delta (mm), 6D rotation delta
    in the current end-effector frame, and an absolute jaw target."""

    dt: np.ndarray
    drot6: np.ndarray
    jaw_target: float

    def __post_init__(self):
        self.dt = _as_f64(self.dt, (3,), "dt")
        self.drot6 = _as_f64(self.drot6, (6,), "drot6")
        self.jaw_target = float(self.jaw_target)


@dataclass
class ActionVector:
    left: ArmDelta
    right: ArmDelta

    @staticmethod
    def identity(jaw_left: float = 0.0, jaw_right: float = 0.0) -> "ActionVector":
        eye6 = np.array([1.0, 0, 0, 0, 1.0, 0])
        return ActionVector(
            ArmDelta(np.zeros(3), eye6.copy(), jaw_left),
            ArmDelta(np.zeros(3), eye6.copy(), jaw_right),
        )


def rot_to_6d(R: np.ndarray) -> np.ndarray:
    """First two columns of R, concatenated column-major: [R00,R10,R20,R01,R11,R21]."""
    R = check_rotation(R)
    return np.concatenate([R[:, 0], R[:, 1]])


def sixd_to_rot(v: np.ndarray) -> np.ndarray:
    """Decode a 6D rotation by Gram-Schmidt on the two column vectors."""
    v = _as_f64(v, (6,), "6d rotation")
    a, b = v[:3], v[3:]
    na = np.linalg.norm(a)
    if na < DEGENERATE_TOL:
        raise DegenerateSixDError("first column is near zero")
    c1 = a / na
    b_perp = b - (c1 @ b) * c1
    nb = np.linalg.norm(b_perp)
    if nb < DEGENERATE_TOL:
        raise DegenerateSixDError("second column is parallel to the first")
    c2 = b_perp / nb
    c3 = np.cross(c1, c2)
    return np.stack([c1, c2, c3], axis=1)


def encode_action(
    current: tuple[Pose, Pose], target: tuple[Pose, Pose], cam: CameraFrame
) -> ActionVector:
    """Relative action taking each arm from its current pose to the target pose.

    dt = cam.orientation @ (target.position - current.position), drot6 encodes
    current.orientation^T @ target.orientation, jaw_target = target.jaw.
    """
    deltas = []
    for cur, tgt in zip(current, target):
        dt = cam.orientation @ (tgt.position - cur.position)
        drot = cur.orientation.T @ tgt.orientation
        deltas.append(ArmDelta(dt, rot_to_6d(drot), tgt.jaw))
    return ActionVector(*deltas)


def apply_action(
    current: tuple[Pose, Pose], a: ActionVector, cam: CameraFrame
) -> tuple[Pose, Pose]:
    """Exact inverse of encode_action; jaw targets are clamped into [0, 1]."""
    out = []
    for cur, d in zip(current, (a.left, a.right)):
        position = cur.position + cam.orientation.T @ d.dt
        orientation = cur.orientation @ sixd_to_rot(d.drot6)
        jaw = min(1.0, max(0.0, d.jaw_target))
        out.append(Pose(position, orientation, jaw))
    return out[0], out[1]


def pack(a: ActionVector) -> np.ndarray:
    """Flatten to 20 numbers: [left.dt, left.drot6, left.jaw, right.dt, right.drot6, right.jaw]."""
    return np.concatenate(
        [a.left.dt, a.left.drot6, [a.left.jaw_target],
         a.right.dt, a.right.drot6, [a.right.jaw_target]]
    )


def unpack(x: np.ndarray) -> ActionVector:
    x = _as_f64(x, (ACTION_DIM,), "packed action")
    return ActionVector(
        ArmDelta(x[0:3], x[3:9], x[9]),
        ArmDelta(x[10:13], x[13:19], x[19]),
    )


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish random rotation via QR with positive-diagonal sign fix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 2] = -q[:, 2]
    return q
