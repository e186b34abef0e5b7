"""Pipeline configuration: every tunable constant with its default, a
JSON file mirror, and adapters to the per-module parameter types."""

import json
from dataclasses import dataclass, field
from pathlib import Path

from .canal import SupportPlane
from .framing import FrameParams
from .tracking import WeightParams


@dataclass
class Config:
    n_f: int = 200                 # resampled demo length
    r_min: float = 1e-4            # disk radius floor (m)
    epsilon: float = 1e-10         # Slerp degenerate threshold
    lam: float = 5e-4              # ratio decay constant
    w_p: float = 100.0             # position cost weight
    alpha: float = 9.0             # orientation weight steepness
    beta: float = 0.3              # orientation weight midpoint (rad)
    cap: float = 15.0              # orientation weight ceiling
    delta: float = 150.0           # correction sensitivity divisor
    window: int = 10               # y-axis stabilization history
    tick_hz: float = 20.0          # session control rate
    support_planes: list[SupportPlane] = field(default_factory=list)

    def frame_params(self) -> FrameParams:
        return FrameParams(epsilon=self.epsilon, window=self.window)

    def weight_params(self) -> WeightParams:
        return WeightParams(alpha=self.alpha, beta=self.beta, cap=self.cap, w_p=self.w_p)

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "Config":
        planes = [
            SupportPlane(
                z_floor=float(p["z_floor"]),
                index_range=tuple(p["index_range"]) if p.get("index_range") else None,
            )
            for p in doc.get("support_planes", [])
        ]
        return cls(
            n_f=int(doc.get("N_f", cls.n_f)),
            r_min=float(doc.get("r_min", cls.r_min)),
            epsilon=float(doc.get("epsilon", cls.epsilon)),
            lam=float(doc.get("lambda", cls.lam)),
            w_p=float(doc.get("w_p", cls.w_p)),
            alpha=float(doc.get("alpha", cls.alpha)),
            beta=float(doc.get("beta", cls.beta)),
            cap=float(doc.get("b", cls.cap)),
            delta=float(doc.get("delta", cls.delta)),
            window=int(doc.get("window", cls.window)),
            tick_hz=float(doc.get("tick_hz", cls.tick_hz)),
            support_planes=planes,
        )
