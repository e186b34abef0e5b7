"""Small 3-vector helpers used by the framing and navigation code."""

import numpy as np

ZERO_TOL = 1e-12


def unit(v: np.ndarray) -> np.ndarray:
    """Return v normalized to unit length.

    Raises ValueError for a (near-)zero vector; callers that expect
    degenerate input must check the norm themselves.
    """
    n = np.linalg.norm(v)
    if n < ZERO_TOL:
        raise ValueError("cannot normalize near-zero vector")
    return np.asarray(v, dtype=float) / n


def rodrigues(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotate v about a unit axis by angle (radians)."""
    c = np.cos(angle)
    s = np.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1.0 - c)


def any_perpendicular(u: np.ndarray) -> np.ndarray:
    """Deterministic unit vector perpendicular to unit vector u.

    Crosses u with the global axis it is least aligned with, so the
    result is well-conditioned for every input direction.
    """
    axes = np.eye(3)
    pick = int(np.argmin(np.abs(u)))
    return unit(np.cross(u, axes[pick]))


def transport(v: np.ndarray, t_from: np.ndarray, t_to: np.ndarray) -> np.ndarray:
    """Apply to v the minimal rotation taking unit vector t_from to t_to.

    This is the discrete parallel-transport step: the rotation axis is
    t_from x t_to, so no twist about the tangent is ever introduced.
    A reversal (t_to == -t_from) has no unique minimal rotation; we pick
    a half-turn about a deterministic perpendicular of t_from.
    """
    axis = np.cross(t_from, t_to)
    s = np.linalg.norm(axis)
    c = float(np.dot(t_from, t_to))
    if s < ZERO_TOL:
        if c > 0.0:
            return np.asarray(v, dtype=float).copy()
        return rodrigues(v, any_perpendicular(t_from), np.pi)
    return rodrigues(v, axis / s, np.arctan2(s, c))


def clamp(x: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return min(hi, max(lo, x))
