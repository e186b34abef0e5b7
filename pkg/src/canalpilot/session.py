"""The shared-autonomy session: a home-pick-home-place cycle navigated
autonomously at a fixed tick rate, with operator corrections freezing
the current disk, backtracking reversing travel, and pose emission
through the orientation-weighted resolver.

Legs heading home install a convergent (decaying) ratio strategy so
corrections wash out on the way back; legs toward pick or place hold
the ratio fixed. Whenever a correction interval ends, the strategy is
re-seeded from the corrected offset, so the new trajectory continues
from where the operator left the point.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum

from . import repro, tracking
from .canal import CanalModel
from .errors import OutOfRange
from .repro import CorrectionInput, RatioStrategy, ReproState
from .tracking import Pose, WeightParams

logger = logging.getLogger(__name__)

DEFAULT_TICK_HZ = 20.0
DEFAULT_DELTA = 150.0
DEFAULT_LAMBDA = 5e-4


class Phase(Enum):
    TO_PICK = "to_pick"
    AT_PICK = "at_pick"
    TO_HOME_FROM_PICK = "to_home_from_pick"
    AT_HOME = "at_home"
    TO_PLACE = "to_place"
    AT_PLACE = "at_place"
    TO_HOME_FROM_PLACE = "to_home_from_place"


#: phase cycle; AT_HOME appears twice, the pointer disambiguates
_CYCLE = (
    Phase.TO_PICK, Phase.AT_PICK,
    Phase.TO_HOME_FROM_PICK, Phase.AT_HOME,
    Phase.TO_PLACE, Phase.AT_PLACE,
    Phase.TO_HOME_FROM_PLACE, Phase.AT_HOME,
)

#: pointer swap used by backtracking: each leg and its reverse
_BACKTRACK_PARTNER = {0: 2, 2: 0, 4: 6, 6: 4}

_DWELL_POINTERS = frozenset({1, 3, 5, 7})


@dataclass(frozen=True)
class Command:
    """One operator command delivered at a tick boundary."""

    type: str                      # correction | correction_end | backtrack |
    #                                pause | resume | set_speed | grip
    k_x: float = 0.0
    k_y: float = 0.0
    v: int = 1

    def to_dict(self) -> dict:
        if self.type == "correction":
            return {"type": "correction", "kx": self.k_x, "ky": self.k_y}
        if self.type == "set_speed":
            return {"type": "set_speed", "v": self.v}
        return {"type": self.type}


@dataclass
class SessionState:
    """Mutable state owned by exactly one ticking agent."""

    canal: CanalModel
    repro: ReproState
    pose: Pose
    pointer: int = 0
    correcting: bool = False
    strategy_now: RatioStrategy = RatioStrategy("fixed", 0.0)
    tick_hz: float = DEFAULT_TICK_HZ
    paused: bool = False
    speed: int = 1
    tick_count: int = 0
    pick_s: int = 1
    place_s: int = 1
    home_s: int = 1
    delta: float = DEFAULT_DELTA
    lam: float = DEFAULT_LAMBDA
    weights: WeightParams = field(default_factory=WeightParams)
    require_resume: bool = False
    dwell_hold: bool = False
    events: list[dict] = field(default_factory=list)

    @property
    def phase(self) -> Phase:
        return _CYCLE[self.pointer]


def _leg_target(state: SessionState, pointer: int) -> int:
    phase = _CYCLE[pointer]
    if phase is Phase.TO_PICK:
        return state.pick_s
    if phase is Phase.TO_PLACE:
        return state.place_s
    return state.home_s


def _install_leg(state: SessionState, pointer: int) -> None:
    """Point the repro state at a leg, seeding the ratio schedule from
    the current offset."""
    state.pointer = pointer
    target = _leg_target(state, pointer)
    direction = "forward" if target >= state.repro.s else "backward"
    heads_home = _CYCLE[pointer] in (Phase.TO_HOME_FROM_PICK, Phase.TO_HOME_FROM_PLACE)
    kind = "decay" if heads_home else "fixed"
    state.strategy_now = RatioStrategy(kind=kind, eta_0=min(1.0, state.repro.eta),
                                       eta_f=0.0, lam=state.lam)
    state.repro = replace(state.repro, direction=direction, leg_step=1)


def _advance_phase(state: SessionState) -> None:
    nxt = (state.pointer + 1) % len(_CYCLE)
    if nxt in _DWELL_POINTERS:
        state.pointer = nxt
        state.dwell_hold = state.require_resume
    else:
        _install_leg(state, nxt)


def _reseed_after_correction(state: SessionState) -> None:
    state.strategy_now = replace(state.strategy_now, eta_0=min(1.0, state.repro.eta))
    state.repro = replace(state.repro, leg_step=1)


def _apply_command(state: SessionState, cmd: Command) -> bool:
    """Apply one command; returns False for commands dropped as illegal
    in the current phase."""
    if cmd.type == "pause":
        state.paused = True
        return True
    if cmd.type == "resume":
        state.paused = False
        state.dwell_hold = False
        return True
    if cmd.type == "grip":
        state.dwell_hold = False  # the operator grasped/released; proceed
        return True
    if cmd.type == "set_speed":
        state.speed = max(1, int(cmd.v))
        return True
    if state.paused:
        logger.info("dropped %s while paused", cmd.type)
        return False
    if cmd.type == "correction":
        state.correcting = True
        cin = CorrectionInput(k_x=max(-1.0, min(1.0, cmd.k_x)),
                              k_y=max(-1.0, min(1.0, cmd.k_y)),
                              delta=state.delta)
        state.repro = repro.apply_correction(state.repro, cin, state.canal)
        return True
    if cmd.type == "correction_end":
        if state.correcting:
            state.correcting = False
            _reseed_after_correction(state)
        return True
    if cmd.type == "backtrack":
        if state.correcting or state.pointer not in _BACKTRACK_PARTNER:
            logger.info("dropped backtrack in phase %s (correcting=%s)",
                        state.phase.value, state.correcting)
            return False
        _install_leg(state, _BACKTRACK_PARTNER[state.pointer])
        return True
    logger.info("dropped unknown command %r", cmd.type)
    return False


def seed_session(canal: CanalModel, pick_index: int | None = None,
                 place_index: int | None = None, home_index: int | None = None,
                 tick_hz: float = DEFAULT_TICK_HZ, delta: float = DEFAULT_DELTA,
                 lam: float = DEFAULT_LAMBDA, weights: WeightParams | None = None,
                 require_resume: bool = False) -> SessionState:
    """Session at the home disk, heading to pick, offset on the directrix."""
    n_f = canal.n_f
    pick_s = 1 if pick_index is None else pick_index
    place_s = n_f if place_index is None else place_index
    home_s = repro.param_to_index(0.0, n_f) if home_index is None else home_index
    for name, s in (("pick", pick_s), ("place", place_s), ("home", home_s)):
        if not 1 <= s <= n_f:
            raise OutOfRange(f"{name} index {s} outside [1, {n_f}]")
    if not pick_s < home_s < place_s:
        raise OutOfRange("need pick < home < place disk indices")
    state = SessionState(
        canal=canal,
        repro=repro.initial_state(canal, home_s),
        pose=Pose(p=canal.directrix[home_s - 1].copy(), q=canal.mean_q[home_s - 1].copy()),
        pick_s=pick_s,
        place_s=place_s,
        home_s=home_s,
        tick_hz=tick_hz,
        delta=delta,
        lam=lam,
        weights=weights or WeightParams(),
        require_resume=require_resume,
    )
    _install_leg(state, 0)
    return state


def tick(state: SessionState, pending: list[Command]) -> tuple[SessionState, Pose]:
    """Advance the session one control tick.

    Commands apply in arrival order; while a correction is active the
    disk index is frozen and only the offset moves. Otherwise the
    session steps toward the current leg target, dwelling one tick at
    each endpoint (longer if a resume is required).
    """
    applied = []
    for cmd in pending:
        if _apply_command(state, cmd):
            applied.append(cmd)
    if not state.paused and not state.correcting:
        if state.pointer in _DWELL_POINTERS:
            if not state.dwell_hold:
                _advance_phase(state)
        if state.pointer not in _DWELL_POINTERS:
            for _ in range(state.speed):
                if state.repro.s == _leg_target(state, state.pointer):
                    break
                state.repro = repro.step(state.repro, state.canal, state.strategy_now)
            if state.repro.s == _leg_target(state, state.pointer):
                _advance_phase(state)
    s = state.repro.s
    target_p = state.canal.directrix[s - 1] + state.repro.offset
    state.pose = tracking.resolve_pose(state.pose, target_p, state.canal.mean_q[s - 1],
                                       s, state.weights, state.canal, 1.0 / state.tick_hz)
    record = {
        "tick": state.tick_count,
        "phase": state.phase.value,
        "s": s,
        "d": state.repro.d,
        "eta": state.repro.eta,
        "pose": {"p": [float(v) for v in state.pose.p],
                 "q": [float(v) for v in state.pose.q]},
        "commands_applied": [c.to_dict() for c in applied],
    }
    state.events.append(record)
    state.tick_count += 1
    return state, state.pose
