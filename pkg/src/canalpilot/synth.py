"""Synthetic demonstration generators: arcs, helices, U-shaped
pick-lift-place curves, and straight lines, with per-demo lateral
spread and optional noise so canal construction has nontrivial radii
and orientation statistics without any recorded data."""

import numpy as np

from . import quat
from .trajio import Demonstration, RawSample

KINDS = ("line", "arc", "helix", "ucurve")

SAMPLE_HZ = 20.0


def _base_curve(kind: str, n: int, radius: float = 1.0, span: float = np.pi / 2,
                turns: float = 3.0, pitch: float = 0.3, width: float = 0.8,
                depth: float = 0.25) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    if kind == "line":
        return np.column_stack([np.zeros(n), np.zeros(n), radius * t])
    if kind == "arc":
        a = span * t
        return np.column_stack([radius * np.cos(a), radius * np.sin(a), np.zeros(n)])
    if kind == "helix":
        a = 2.0 * np.pi * turns * t
        return np.column_stack([radius * np.cos(a), radius * np.sin(a), pitch * turns * t])
    if kind == "ucurve":
        # depth > 0 lifts over a hump; depth < 0 dips (pick at the bottom)
        return np.column_stack([width * t, np.zeros(n), depth * np.sin(np.pi * t)])
    raise ValueError(f"unknown curve kind {kind!r}")


def _base_quats(n: int, twist: float = np.pi / 3) -> np.ndarray:
    """Orientation rotating about z from identity to the twist angle."""
    angles = np.linspace(0.0, twist, n)
    return np.column_stack([np.cos(angles / 2), np.zeros(n), np.zeros(n), np.sin(angles / 2)])


def make_demo(kind: str, n: int, lateral: float = 0.0, tilt: float = 0.0,
              noise: float = 0.0, seed: int = 0, demo_id: str = "synth",
              **curve_kw) -> Demonstration:
    """One demo: the base curve displaced laterally by a sine envelope
    (demos converge at both ends), with an orientation tilt envelope
    about x and optional Gaussian position jitter."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n)
    envelope = np.sin(np.pi * t)
    positions = _base_curve(kind, n, **curve_kw)
    positions = positions + lateral * envelope[:, None] * np.array([0.0, 1.0, 0.0])
    if noise > 0.0:
        positions = positions + rng.normal(0.0, noise, positions.shape)
    quats = _base_quats(n)
    if tilt != 0.0:
        half = 0.5 * tilt * envelope
        tilt_q = np.column_stack([np.cos(half), np.sin(half), np.zeros(n), np.zeros(n)])
        quats = np.array([quat.mul(tq, q) for tq, q in zip(tilt_q, quats)])
    times = np.arange(n) / SAMPLE_HZ
    samples = [RawSample(float(times[i]), positions[i], quat.normalize(quats[i]))
               for i in range(n)]
    return Demonstration(samples=samples, id=demo_id)


def demo_set(kind: str = "arc", n_demos: int = 2, n_base: int = 120,
             spread: float = 0.05, tilt: float = 0.0, noise: float = 0.0,
             seed: int = 0, **curve_kw) -> list[Demonstration]:
    """A family of demos straddling the base curve with varying lengths."""
    if n_demos < 1:
        raise ValueError("need at least one demo")
    demos = []
    for m in range(n_demos):
        side = 1.0 if n_demos == 1 else 2.0 * m / (n_demos - 1) - 1.0
        demos.append(make_demo(
            kind,
            n=n_base + 23 * m,
            lateral=spread * side,
            tilt=tilt * side,
            noise=noise,
            seed=seed + m,
            demo_id=f"{kind}-{m}",
            **curve_kw,
        ))
    return demos
