"""Canal navigation: ratio-rule point transfer between disks, ratio
strategies, 2D correction application, disk-sequence reversal for
backtracking, and the [-1, 1] canal parametrization.

Disk indices s are 1-based ([1, N_f]) to match the wire protocol and
the canal parameter endpoints; canal arrays are indexed with s-1.
"""

from dataclasses import dataclass, replace

import numpy as np

from .canal import CanalModel
from .errors import EndOfCanal, OutOfRange
from .framing import CorrectionFrame

_ZERO_OFFSET = 1e-12


@dataclass(frozen=True)
class RatioStrategy:
    """Schedule for the disk ratio eta along a leg.

    kind "fixed" holds eta_0; "decay" relaxes exponentially from eta_0
    toward eta_f with rate lam, converging to the directrix when
    eta_f = 0.
    """

    kind: str = "fixed"            # "fixed" | "decay"
    eta_0: float = 0.0
    eta_f: float = 0.0
    lam: float = 5e-4

    def __post_init__(self):
        if self.kind not in ("fixed", "decay"):
            raise ValueError(f"unknown ratio strategy kind {self.kind!r}")
        if not (0.0 <= self.eta_0 <= 1.0 and 0.0 <= self.eta_f <= 1.0):
            raise ValueError("eta_0 and eta_f must lie in [0, 1]")
        if self.lam < 0.0:
            raise ValueError("lam must be >= 0")


@dataclass(frozen=True)
class ReproState:
    """Navigation state: disk index, in-plane offset from the disk
    center, current ratio, travel direction, canal parameter, and the
    step count within the current leg (the ratio-schedule clock)."""

    s: int
    offset: np.ndarray
    eta: float
    direction: str = "forward"     # "forward" | "backward"
    d: float = -1.0
    leg_step: int = 1


@dataclass(frozen=True)
class CorrectionInput:
    """Normalized 2D operator input with sensitivity divisor delta."""

    k_x: float
    k_y: float
    delta: float = 150.0

    def __post_init__(self):
        if not (abs(self.k_x) <= 1.0 and abs(self.k_y) <= 1.0):
            raise ValueError("correction magnitudes must lie in [-1, 1]")
        if self.delta <= 0.0:
            raise ValueError("delta must be positive")


def ratio_schedule(strategy: RatioStrategy, k: int) -> float:
    """Ratio at step k (k >= 1) of a leg under the given strategy."""
    if k < 1:
        raise ValueError("step count starts at 1")
    if strategy.kind == "fixed":
        return strategy.eta_0
    return (strategy.eta_0 - strategy.eta_f) * np.exp(-strategy.lam * (k - 1)) + strategy.eta_f


def disk_rotation(frame_prev: CorrectionFrame, frame_next: CorrectionFrame) -> np.ndarray:
    """Linear map sending the previous frame's axes onto the next's.

    Implemented as F_next @ F_prev.T with F = [e_t | x | y], which is
    exactly frame-coordinate transfer: an offset with coefficients
    (a, b) on (x, y)_prev re-emerges with the same coefficients on
    (x, y)_next, so user-perceived direction survives left-handed
    frames too.
    """
    frame_prev.validate()
    frame_next.validate()
    return frame_next.as_matrix() @ frame_prev.as_matrix().T


def param_to_index(d: float, n_f: int) -> int:
    """Canal parameter d in [-1, 1] to 1-based disk index."""
    if not -1.0 <= d <= 1.0:
        raise OutOfRange(f"canal parameter {d} outside [-1, 1]")
    return int(np.floor(1.0 + (d + 1.0) / 2.0 * (n_f - 1) + 0.5))


def index_to_param(s: int, n_f: int) -> float:
    """1-based disk index to canal parameter in [-1, 1]."""
    if not 1 <= s <= n_f:
        raise OutOfRange(f"disk index {s} outside [1, {n_f}]")
    if n_f == 1:
        return 0.0
    return 2.0 * (s - 1) / (n_f - 1) - 1.0


def initial_state(canal: CanalModel, s: int = 1, offset: np.ndarray | None = None,
                  direction: str = "forward") -> ReproState:
    """State at disk s with the given in-plane offset (default: on the
    directrix)."""
    if not 1 <= s <= canal.n_f:
        raise OutOfRange(f"disk index {s} outside [1, {canal.n_f}]")
    if offset is None:
        offset = np.zeros(3)
    offset = np.asarray(offset, dtype=float)
    eta = float(np.linalg.norm(offset) / canal.radii[s - 1])
    return ReproState(s=s, offset=offset, eta=eta, direction=direction,
                      d=index_to_param(s, canal.n_f), leg_step=1)


def step(state: ReproState, canal: CanalModel, strategy: RatioStrategy) -> ReproState:
    """Advance one disk in the travel direction under the ratio rule.

    The offset direction is transferred between disk frames and its
    magnitude rescaled to eta_next * r(s'); a point on the directrix
    stays on the directrix. Raises EndOfCanal at the last disk so the
    caller can decide the phase transition.
    """
    s_next = state.s + 1 if state.direction == "forward" else state.s - 1
    if not 1 <= s_next <= canal.n_f:
        raise EndOfCanal(f"no disk {s_next} in direction {state.direction}")
    k_next = state.leg_step + 1
    eta_next = ratio_schedule(strategy, k_next)
    norm = float(np.linalg.norm(state.offset))
    in_plane = _ZERO_OFFSET
    if norm >= _ZERO_OFFSET:
        rot = disk_rotation(canal.frames[state.s - 1], canal.frames[s_next - 1])
        direction_vec = rot @ (state.offset / norm)
        e_t = canal.frames[s_next - 1].e_t
        direction_vec = direction_vec - np.dot(direction_vec, e_t) * e_t
        in_plane = float(np.linalg.norm(direction_vec))
    if norm < _ZERO_OFFSET or in_plane < _ZERO_OFFSET:
        # on the directrix, or an off-plane offset with no in-plane part
        offset_next = np.zeros(3)
        eta_actual = 0.0
    else:
        offset_next = eta_next * canal.radii[s_next - 1] * (direction_vec / in_plane)
        eta_actual = eta_next
    return ReproState(
        s=s_next,
        offset=offset_next,
        eta=eta_actual,
        direction=state.direction,
        d=index_to_param(s_next, canal.n_f),
        leg_step=k_next,
    )


def apply_correction(state: ReproState, cin: CorrectionInput, canal: CanalModel) -> ReproState:
    """Displace the offset along the disk's correction axes.

    Motion stays on the current disk: s and d are unchanged, and the
    result is radially clamped to the disk boundary.
    """
    frame = canal.frames[state.s - 1]
    offset = state.offset + (cin.k_x / cin.delta) * frame.x_axis \
                          + (cin.k_y / cin.delta) * frame.y_axis
    r = float(canal.radii[state.s - 1])
    norm = float(np.linalg.norm(offset))
    if norm > r:
        offset = offset * (r / norm)
        norm = r
    return replace(state, offset=offset, eta=norm / r)


def reverse(canal: CanalModel) -> CanalModel:
    """Index-reverse the disk sequence, keeping every correction frame
    exactly as stored so corrections map identically in both directions."""
    return CanalModel(
        directrix=canal.directrix[::-1].copy(),
        radii=canal.radii[::-1].copy(),
        mean_q=canal.mean_q[::-1].copy(),
        sigma_q=canal.sigma_q[::-1].copy(),
        frames=list(reversed(canal.frames)),
        r_min=canal.r_min,
        source_ids=list(canal.source_ids),
    )
