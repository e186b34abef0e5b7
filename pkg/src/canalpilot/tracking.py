"""Orientation-weighted pose tracking against a free-flying end effector.

The per-disk orientation spread drives an exponential weight: tight
demonstrations pull the end effector's orientation hard toward the disk
mean, loose ones barely constrain it. Position is authoritative (its
weight dominates), so the resolver snaps position and Slerps
orientation by a fraction proportional to the weight.
"""

from dataclasses import dataclass

import numpy as np

from . import quat
from .canal import CanalModel


@dataclass(frozen=True)
class WeightParams:
    """Constants of the orientation weight schedule and position cost."""

    alpha: float = 9.0
    beta: float = 0.3
    cap: float = 15.0
    w_p: float = 100.0

    def __post_init__(self):
        if self.cap <= 0:
            raise ValueError("cap must be positive")
        if self.w_p <= 0:
            raise ValueError("w_p must be positive")


@dataclass(frozen=True)
class Pose:
    """End-effector pose: position (m) and unit quaternion."""

    p: np.ndarray
    q: np.ndarray

    @staticmethod
    def of(p, q) -> "Pose":
        return Pose(p=np.asarray(p, dtype=float), q=quat.normalize(np.asarray(q, dtype=float)))


def orientation_weight(sigma: float, params: WeightParams) -> float:
    """w_o = exp(-alpha * (sigma - beta)), clamped to [0, cap]."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    return min(params.cap, float(np.exp(-params.alpha * (sigma - params.beta))))


def pose_cost(pose: Pose, target_p: np.ndarray, target_q: np.ndarray, s: int,
              params: WeightParams, canal: CanalModel) -> float:
    """Weighted tracking cost: w_p * |dp|^2 + w_o(s) * angle(dq)^2."""
    j_p = float(np.sum((pose.p - np.asarray(target_p, dtype=float)) ** 2))
    j_o = quat.geodesic_angle(pose.q, target_q) ** 2
    w_o = orientation_weight(float(canal.sigma_q[s - 1]), params)
    return params.w_p * j_p + w_o * j_o


def resolve_pose(current: Pose, target_p: np.ndarray, target_q: np.ndarray, s: int,
                 params: WeightParams, canal: CanalModel, dt: float) -> Pose:
    """One tracking update toward the target pose.

    Position snaps to the target. Orientation Slerps toward the target
    by g = min(1, w_o(s) / cap): full weight tracks exactly, zero
    weight leaves orientation untouched. The orientation error never
    increases, so the pose cost is non-increasing relative to standing
    still.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    w_o = orientation_weight(float(canal.sigma_q[s - 1]), params)
    g = min(1.0, w_o / params.cap)
    q = quat.slerp(current.q, np.asarray(target_q, dtype=float), g, shortest=True)
    return Pose(p=np.asarray(target_p, dtype=float).copy(), q=q / np.linalg.norm(q))
