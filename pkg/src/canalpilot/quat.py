"""Quaternion utilities: normalization, hemisphere alignment, Slerp,
Catmull-Rom interpolation, and the eigenvalue-based mean.

Quaternions are numpy arrays [w, i, j, k]. Nothing here assumes a
canonical sign; hemisphere alignment is always an explicit step.
"""

import numpy as np

from .errors import DegenerateQuaternion

_DEGENERATE_NORM = 1e-9


def normalize(q: np.ndarray) -> np.ndarray:
    """Normalize to unit length; reject near-zero quaternions."""
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n < _DEGENERATE_NORM:
        raise DegenerateQuaternion(f"quaternion norm {n:.3e} below {_DEGENERATE_NORM:.0e}")
    return q / n


def hemisphere_align(quats: np.ndarray) -> np.ndarray:
    """Flip signs so every consecutive pair has non-negative dot product."""
    out = np.array(quats, dtype=float, copy=True)
    for i in range(1, len(out)):
        if np.dot(out[i - 1], out[i]) < 0.0:
            out[i] = -out[i]
    return out


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a * b."""
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def conj(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def log_map(q: np.ndarray) -> np.ndarray:
    """Rotation vector (angle * axis) of a unit quaternion."""
    w = float(np.clip(q[0], -1.0, 1.0))
    v = np.asarray(q[1:], dtype=float)
    vn = np.linalg.norm(v)
    if vn < 1e-15:
        return np.zeros(3)
    angle = 2.0 * np.arctan2(vn, w)
    return (angle / vn) * v


def exp_map(rv: np.ndarray) -> np.ndarray:
    """Unit quaternion for a rotation vector (angle * axis)."""
    angle = np.linalg.norm(rv)
    if angle < 1e-15:
        # first-order expansion keeps exp/log round trips smooth near zero
        return normalize(np.array([1.0, 0.5 * rv[0], 0.5 * rv[1], 0.5 * rv[2]]))
    axis = np.asarray(rv, dtype=float) / angle
    half = 0.5 * angle
    s = np.sin(half)
    return np.array([np.cos(half), s * axis[0], s * axis[1], s * axis[2]])


def geodesic_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Rotation angle between two unit quaternions: 2*arccos(|a.b|), in [0, pi]."""
    d = abs(float(np.dot(a, b)))
    return 2.0 * np.arccos(min(1.0, d))


def slerp(a: np.ndarray, b: np.ndarray, u: float, shortest: bool = False) -> np.ndarray:
    """Spherical linear interpolation from a to b at parameter u.

    With shortest=True, b is sign-flipped onto a's hemisphere first.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = float(np.dot(a, b))
    if shortest and d < 0.0:
        b = -b
        d = -d
    d = float(np.clip(d, -1.0, 1.0))
    theta = np.arccos(d)
    st = np.sin(theta)
    if st < 1e-12:
        out = (1.0 - u) * a + u * b
        return out / np.linalg.norm(out)
    return (np.sin((1.0 - u) * theta) * a + np.sin(u * theta) * b) / st


def mean_chordal(quats: np.ndarray) -> np.ndarray:
    """Arithmetic mean after hemisphere alignment, renormalized.

    Intended for merging a handful of nearly identical samples (DTW
    warp collapse); use mean_eigen for spread-out sets.
    """
    aligned = hemisphere_align(np.atleast_2d(quats))
    m = aligned.mean(axis=0)
    return normalize(m)


def mean_eigen(quats: np.ndarray) -> np.ndarray:
    """Mean as the principal eigenvector of the 4x4 accumulation matrix.

    Sign-blind by construction (q and -q contribute identically); the
    returned sign is chosen so dot(mean, quats[0]) >= 0.
    """
    qs = np.atleast_2d(np.asarray(quats, dtype=float))
    acc = qs.T @ qs
    _, vecs = np.linalg.eigh(acc)
    mean = vecs[:, -1]
    if np.dot(mean, qs[0]) < 0.0:
        mean = -mean
    return mean / np.linalg.norm(mean)


def _knot_velocities(ts: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """Per-knot angular velocity (rotation vector per unit parameter).

    Interior knots use the Catmull-Rom finite difference in the local
    tangent space; endpoints use the one-sided difference.
    """
    n = len(qs)
    vel = np.zeros((n, 3))
    rel = [log_map(mul(conj(qs[i]), qs[i + 1])) for i in range(n - 1)]
    for i in range(n):
        if i == 0:
            vel[i] = rel[0] / (ts[1] - ts[0])
        elif i == n - 1:
            vel[i] = rel[-1] / (ts[-1] - ts[-2])
        else:
            vel[i] = (rel[i - 1] + rel[i]) / (ts[i + 1] - ts[i - 1])
    return vel


def catmull_rom(knot_ts: np.ndarray, knot_qs: np.ndarray, query_ts: np.ndarray) -> np.ndarray:
    """Catmull-Rom quaternion interpolation through the given knots.

    Each segment is a cubic Bezier on the rotation group evaluated by
    De Casteljau with Slerp; inner control points come from the
    Catmull-Rom tangents, so the curve is C1 and interpolates every
    knot exactly. Knots must be hemisphere-aligned unit quaternions at
    strictly increasing parameters.
    """
    knot_ts = np.asarray(knot_ts, dtype=float)
    knot_qs = np.asarray(knot_qs, dtype=float)
    if len(knot_qs) == 1:
        return np.tile(knot_qs[0], (len(query_ts), 1))
    vel = _knot_velocities(knot_ts, knot_qs)

    out = np.empty((len(query_ts), 4))
    seg = np.clip(np.searchsorted(knot_ts, query_ts, side="right") - 1, 0, len(knot_ts) - 2)
    for k, t in enumerate(query_ts):
        i = int(seg[k])
        dt = knot_ts[i + 1] - knot_ts[i]
        u = (t - knot_ts[i]) / dt
        b0 = knot_qs[i]
        b3 = knot_qs[i + 1]
        b1 = mul(b0, exp_map(vel[i] * dt / 3.0))
        b2 = mul(b3, exp_map(-vel[i + 1] * dt / 3.0))
        q01 = slerp(b0, b1, u)
        q12 = slerp(b1, b2, u)
        q23 = slerp(b2, b3, u)
        q = slerp(slerp(q01, q12, u), slerp(q12, q23, u), u)
        out[k] = q / np.linalg.norm(q)
    return out
