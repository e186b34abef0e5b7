"""Frames along the directrix: tangents, a twist-free Bishop baseline,
and the correction frames used to map 2D operator input onto disks.

The correction x-axis blends the projection of a fixed global x-axis
with the previous disk's x-axis via Slerp on the disk plane, weighted
by how much global information the disk actually carries. The y-axis
is the cross product, sign-stabilized against the mean of a sliding
window of previous y-axes so that tangent flips (e.g. the bottom of a
pick dip) do not invert the operator's perceived up/down.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurve, NonOrthonormalFrame
from .geom import any_perpendicular, clamp, transport, unit

_PROJ_TOL = 1e-9

ORTHO_TOL = 1e-9


def _vec3(x, y, z) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


@dataclass(frozen=True)
class FrameParams:
    """Tuning constants for correction-frame construction."""

    epsilon: float = 1e-10          # Slerp degenerate threshold
    window: int = 10                # y-axis history length
    x_g: np.ndarray = field(default_factory=lambda: _vec3(1, 0, 0))
    z_g: np.ndarray = field(default_factory=lambda: _vec3(0, 0, 1))

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.window < 1:
            raise ValueError("window must be >= 1")


@dataclass(frozen=True)
class CorrectionFrame:
    """Orthonormal triad attached to one disk.

    The triad may be left-handed: the y-inversion rule flips y alone to
    preserve the operator's sense of direction, and the frame is a
    control frame, not a rotation.
    """

    e_t: np.ndarray
    x_axis: np.ndarray
    y_axis: np.ndarray

    @property
    def handedness(self) -> float:
        """+1 for right-handed, -1 for left-handed."""
        return float(np.sign(np.dot(np.cross(self.e_t, self.x_axis), self.y_axis)))

    def as_matrix(self) -> np.ndarray:
        """Column matrix [e_t | x | y]."""
        return np.column_stack([self.e_t, self.x_axis, self.y_axis])

    def validate(self, tol: float = 1e-6) -> None:
        m = self.as_matrix()
        if not np.allclose(m.T @ m, np.eye(3), atol=tol):
            raise NonOrthonormalFrame("frame axes are not orthonormal")


def compute_tangents(directrix: np.ndarray) -> np.ndarray:
    """Unit tangents: central differences interior, one-sided at the ends.

    Duplicate directrix points produce zero-length differences; those
    indices inherit the previous tangent. A curve whose points all
    coincide has no tangent direction at all.
    """
    pts = np.asarray(directrix, dtype=float)
    n = len(pts)
    if n < 2:
        raise DegenerateCurve("need at least 2 directrix points")
    diffs = np.empty_like(pts)
    diffs[0] = pts[1] - pts[0]
    diffs[-1] = pts[-1] - pts[-2]
    if n > 2:
        diffs[1:-1] = pts[2:] - pts[:-2]
    norms = np.linalg.norm(diffs, axis=1)
    if np.all(norms < 1e-12):
        raise DegenerateCurve("all directrix points coincide")
    first_valid = int(np.argmax(norms >= 1e-12))
    tangents = np.empty_like(pts)
    prev = diffs[first_valid] / norms[first_valid]
    for i in range(n):
        if norms[i] >= 1e-12:
            prev = diffs[i] / norms[i]
        tangents[i] = prev
    return tangents


def initial_normal(e_t: np.ndarray, params: FrameParams) -> np.ndarray:
    """First in-plane axis: projection of global x, falling back to
    global y, then to any perpendicular."""
    for candidate in (params.x_g, _vec3(0, 1, 0)):
        proj = project_onto_disk(candidate, e_t)
        if np.linalg.norm(proj) >= _PROJ_TOL:
            return unit(proj)
    return any_perpendicular(e_t)


def bishop_frames(directrix: np.ndarray, params: FrameParams | None = None) -> list[CorrectionFrame]:
    """Twist-free frames: each normal is parallel-transported along the
    curve by the minimal rotation between consecutive tangents."""
    params = params or FrameParams()
    tangents = compute_tangents(directrix)
    frames = []
    normal = initial_normal(tangents[0], params)
    for i, t in enumerate(tangents):
        if i > 0:
            normal = transport(normal, tangents[i - 1], t)
            # re-orthogonalize against float drift
            normal = unit(normal - np.dot(normal, t) * t)
        binormal = np.cross(t, normal)
        frames.append(CorrectionFrame(e_t=t.copy(), x_axis=normal.copy(), y_axis=binormal))
    return frames


def project_onto_disk(v: np.ndarray, e_t: np.ndarray) -> np.ndarray:
    """Component of v in the plane orthogonal to the unit tangent e_t."""
    v = np.asarray(v, dtype=float)
    return v - np.dot(v, e_t) * e_t


def _correction_x_detail(prev_x: np.ndarray, e_t: np.ndarray,
                         params: FrameParams) -> tuple[np.ndarray, str]:
    """Next correction x-axis plus which branch produced it.

    Branches: "slerp" (the main blend), "hold" (sin(theta) <= epsilon,
    keep prev_x), "continuity" / "global" / "arbitrary" (degenerate
    projection fallbacks).
    """
    a = project_onto_disk(params.x_g, e_t)
    b = project_onto_disk(prev_x, e_t)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na < _PROJ_TOL or nb < _PROJ_TOL:
        if nb >= _PROJ_TOL:
            return b / nb, "continuity"
        if na >= _PROJ_TOL:
            return a / na, "global"
        return any_perpendicular(e_t), "arbitrary"
    a_hat = a / na
    b_hat = b / nb
    theta = np.arccos(clamp(float(np.dot(a_hat, b_hat))))
    theta_x = np.arccos(clamp(float(np.dot(a_hat, params.x_g))))
    t = theta_x / (np.pi / 2.0)
    if np.sin(theta) > params.epsilon:
        x = (np.sin((1.0 - t) * theta) * a_hat + np.sin(t * theta) * b_hat) / np.sin(theta)
        return unit(x), "slerp"
    return np.asarray(prev_x, dtype=float).copy(), "hold"


def correction_x(prev_x: np.ndarray, e_t: np.ndarray, params: FrameParams) -> np.ndarray:
    """Blend the disk projections of the global x-axis and the previous
    x-axis: Slerp from the global projection toward the previous one
    with parameter t = theta_X / (pi/2), so well-aligned disks snap to
    global x and poorly aligned disks keep continuity."""
    x, _ = _correction_x_detail(prev_x, e_t, params)
    return x


def _stabilized_y(e_t: np.ndarray, x_axis: np.ndarray, y_history: list[np.ndarray],
                  window: int) -> np.ndarray:
    """Cross-product y, inverted if it breaks with the windowed trend."""
    y_raw = np.cross(e_t, x_axis)
    if y_history:
        y_mu = np.mean(y_history[-window:], axis=0)
        y_mu_proj = project_onto_disk(y_mu, e_t)
        if np.linalg.norm(y_mu_proj) >= _PROJ_TOL and np.dot(y_mu_proj, y_raw) < 0.0:
            return -y_raw
    return y_raw


def correction_frames(directrix: np.ndarray, tangents: np.ndarray,
                      params: FrameParams | None = None) -> list[CorrectionFrame]:
    """Correction frames for every disk along the directrix."""
    params = params or FrameParams()
    frames: list[CorrectionFrame] = []
    y_history: list[np.ndarray] = []
    x_prev = None
    for e_t in np.asarray(tangents, dtype=float):
        e_t = unit(e_t)
        if x_prev is None:
            x = initial_normal(e_t, params)
        else:
            x, _ = _correction_x_detail(x_prev, e_t, params)
            x = x - np.dot(x, e_t) * e_t  # "hold" branch may be slightly off-plane
            x = unit(x)
        y = _stabilized_y(e_t, x, y_history, params.window)
        frames.append(CorrectionFrame(e_t=e_t, x_axis=x, y_axis=y))
        y_history.append(y)
        x_prev = x
    return frames


def frame_rows(frames: list[CorrectionFrame],
               bishop: list[CorrectionFrame]) -> list[dict]:
    """Flat per-disk rows of correction and Bishop axes for CSV dumps."""
    rows = []
    for s, (f, bf) in enumerate(zip(frames, bishop), start=1):
        row = {"s": s}
        for name, v in (("eT", f.e_t), ("x", f.x_axis), ("y", f.y_axis),
                        ("bishop_n", bf.x_axis), ("bishop_b", bf.y_axis)):
            row[f"{name}_x"], row[f"{name}_y"], row[f"{name}_z"] = (float(c) for c in v)
        rows.append(row)
    return rows
