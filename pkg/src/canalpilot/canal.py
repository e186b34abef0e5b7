"""Canal-surface model construction from an aligned dataset.

A canal is a directrix (per-index mean of the demos), a radius per disk
(max demo distance, floored), per-disk orientation statistics (eigen
mean quaternion and mean geodesic spread), and a correction frame per
disk. Disks near a declared horizontal support plane can be snapped so
their planes never dip below the surface.
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import framing, quat
from .framing import CorrectionFrame, FrameParams
from .trajio import AlignedDataset

#: radius floor keeping the ratio rule well-conditioned where demos converge
DEFAULT_R_MIN = 1e-4

#: fraction of indices at each end refined by default
DEFAULT_REFINE_FRACTION = 0.10


@dataclass(frozen=True)
class SupportPlane:
    """Horizontal surface z = z_floor that disks must not dip below.

    index_range is a half-open (lo, hi) of 0-based disk indices to
    consider; None means the first and last 10% of the canal.
    """

    z_floor: float
    index_range: tuple[int, int] | None = None


@dataclass(frozen=True)
class CanalModel:
    """Immutable canal-surface task model."""

    directrix: np.ndarray          # (N_f, 3)
    radii: np.ndarray              # (N_f,)
    mean_q: np.ndarray             # (N_f, 4)
    sigma_q: np.ndarray            # (N_f,)
    frames: list[CorrectionFrame]
    r_min: float = DEFAULT_R_MIN
    source_ids: list[str] = field(default_factory=list)

    @property
    def n_f(self) -> int:
        return len(self.radii)

    def to_json_dict(self) -> dict:
        return {
            "N_f": self.n_f,
            "directrix": self.directrix.tolist(),
            "radii": self.radii.tolist(),
            "mean_q": self.mean_q.tolist(),
            "sigma_q": self.sigma_q.tolist(),
            "frames": [
                {"t": f.e_t.tolist(), "x": f.x_axis.tolist(), "y": f.y_axis.tolist()}
                for f in self.frames
            ],
            "meta": {
                "N_f": self.n_f,
                "r_min": self.r_min,
                "source_demo_ids": list(self.source_ids),
            },
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CanalModel":
        frames = [
            CorrectionFrame(
                e_t=np.array(f["t"], dtype=float),
                x_axis=np.array(f["x"], dtype=float),
                y_axis=np.array(f["y"], dtype=float),
            )
            for f in doc["frames"]
        ]
        meta = doc.get("meta", {})
        return cls(
            directrix=np.array(doc["directrix"], dtype=float),
            radii=np.array(doc["radii"], dtype=float),
            mean_q=np.array(doc["mean_q"], dtype=float),
            sigma_q=np.array(doc["sigma_q"], dtype=float),
            frames=frames,
            r_min=float(meta.get("r_min", DEFAULT_R_MIN)),
            source_ids=list(meta.get("source_demo_ids", [])),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CanalModel":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def compute_directrix(dataset: AlignedDataset) -> np.ndarray:
    """Per-index arithmetic mean of demo positions."""
    return dataset.positions().mean(axis=0)


def compute_radii(dataset: AlignedDataset, directrix: np.ndarray,
                  r_min: float = DEFAULT_R_MIN) -> np.ndarray:
    """Largest demo distance from the directrix at each index, floored.

    The max guarantees every demo point lies inside its disk; the floor
    keeps the ratio rule well-conditioned where all demos converge.
    """
    dists = np.linalg.norm(dataset.positions() - directrix[None, :, :], axis=2)
    return np.maximum(dists.max(axis=0), r_min)


def orientation_stats(dataset: AlignedDataset) -> tuple[np.ndarray, np.ndarray]:
    """Eigen mean quaternion and mean geodesic spread (radians) per disk."""
    qs = dataset.quaternions()
    n, n_f, _ = qs.shape
    mean_q = np.empty((n_f, 4))
    sigma_q = np.empty(n_f)
    for s in range(n_f):
        mean = quat.mean_eigen(qs[:, s, :])
        mean_q[s] = mean
        sigma_q[s] = np.mean([quat.geodesic_angle(qs[m, s], mean) for m in range(n)])
    return mean_q, sigma_q


def _default_ranges(n_f: int) -> list[tuple[int, int]]:
    k = max(1, int(round(DEFAULT_REFINE_FRACTION * n_f)))
    return [(0, k), (n_f - k, n_f)]


def _disk_hits_plane(center: np.ndarray, e_t: np.ndarray, radius: float,
                     z_floor: float) -> bool:
    """Whether the disk of given center/normal/radius crosses z = z_floor.

    The disk's z-extent is center_z +- radius * sqrt(1 - e_t_z^2).
    """
    reach = radius * np.sqrt(max(0.0, 1.0 - float(e_t[2]) ** 2))
    return abs(float(center[2]) - z_floor) <= reach


def refine_cross_sections(canal: CanalModel, support_planes: list[SupportPlane],
                          params: FrameParams | None = None) -> CanalModel:
    """Snap the tangent of support-plane-crossing disks to +-z.

    Affected disks get e_t = z_g (or -z_g, whichever is the smaller
    rotation); their x-axis is the old one re-projected onto the new
    disk plane and y is re-derived with the usual window stabilization,
    so the triad stays orthonormal.
    """
    if not support_planes:
        return canal
    params = params or FrameParams()
    frames = list(canal.frames)
    for plane in support_planes:
        ranges = [plane.index_range] if plane.index_range is not None else _default_ranges(canal.n_f)
        for lo, hi in ranges:
            for s in range(max(0, lo), min(canal.n_f, hi)):
                f = frames[s]
                if not _disk_hits_plane(canal.directrix[s], f.e_t, canal.radii[s], plane.z_floor):
                    continue
                z_g = params.z_g
                e_t = z_g.copy() if np.dot(f.e_t, z_g) >= 0.0 else -z_g
                x_proj = framing.project_onto_disk(f.x_axis, e_t)
                if np.linalg.norm(x_proj) < 1e-9:
                    x_axis = framing.initial_normal(e_t, params)
                else:
                    x_axis = x_proj / np.linalg.norm(x_proj)
                y_prev = [frames[j].y_axis for j in range(max(0, s - params.window), s)]
                y_axis = framing._stabilized_y(e_t, x_axis, y_prev, params.window)
                frames[s] = CorrectionFrame(e_t=e_t, x_axis=x_axis, y_axis=y_axis)
    return replace(canal, frames=frames)


def build_canal(dataset: AlignedDataset, r_min: float = DEFAULT_R_MIN,
                params: FrameParams | None = None,
                support_planes: list[SupportPlane] | None = None) -> CanalModel:
    """Assemble the full model from an aligned dataset."""
    params = params or FrameParams()
    directrix = compute_directrix(dataset)
    radii = compute_radii(dataset, directrix, r_min)
    mean_q, sigma_q = orientation_stats(dataset)
    tangents = framing.compute_tangents(directrix)
    frames = framing.correction_frames(directrix, tangents, params)
    canal = CanalModel(
        directrix=directrix,
        radii=radii,
        mean_q=mean_q,
        sigma_q=sigma_q,
        frames=frames,
        r_min=r_min,
        source_ids=list(dataset.source_ids),
    )
    if support_planes:
        canal = refine_cross_sections(canal, support_planes, params)
    return canal
