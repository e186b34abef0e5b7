import numpy as np
import pytest

from canalpilot import framing, synth, trajio
from canalpilot.canal import CanalModel, build_canal
from canalpilot.framing import FrameParams, correction_frames, compute_tangents


def make_canal(points: np.ndarray, radii, quats=None, sigma=None) -> CanalModel:
    """Canal directly from a parametric curve, for controlled navigation tests."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    radii = np.full(n, float(radii)) if np.isscalar(radii) else np.asarray(radii, dtype=float)
    if quats is None:
        quats = np.tile([1.0, 0.0, 0.0, 0.0], (n, 1))
    sigma_q = np.full(n, 0.3 if sigma is None else float(sigma))
    tangents = compute_tangents(points)
    frames = correction_frames(points, tangents, FrameParams())
    return CanalModel(directrix=points, radii=radii, mean_q=np.asarray(quats, dtype=float),
                      sigma_q=sigma_q, frames=frames)


def built_canal(kind: str, n_f: int = 41, spread: float = 0.25, tilt: float = 0.2,
                seed: int = 0, **curve_kw) -> CanalModel:
    """Canal through the full demo pipeline."""
    demos = synth.demo_set(kind, n_demos=2, n_base=80, spread=spread, tilt=tilt,
                           seed=seed, **curve_kw)
    dataset = trajio.preprocess(demos, n_f=n_f)
    return build_canal(dataset)


@pytest.fixture(scope="session")
def arc_canal():
    return built_canal("arc")


@pytest.fixture(scope="session")
def line_canal():
    return built_canal("line")


@pytest.fixture(scope="session")
def ucurve_canal():
    return built_canal("ucurve", depth=0.3)


@pytest.fixture(scope="session")
def helix_directrix():
    return synth._base_curve("helix", 400, radius=1.0, turns=3.0, pitch=0.3)
