"""Demonstration loading and the two-step preprocessing pipeline.

Raw recordings of arbitrary length are temporally aligned with dynamic
time warping against a reference demo, then smoothed through a step
filter: a cubic spline (positions) and a Catmull-Rom quaternion spline
(orientations) are fitted over every h-th sample and resampled to a
fixed length N_f.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import quat
from .errors import EmptyInput, MalformedRow, TooShort

CSV_HEADER = ["t", "x", "y", "z", "qw", "qx", "qy", "qz"]

#: knot step as a fraction of trajectory length
STEP_FRACTION = 0.10

#: default resampled length
DEFAULT_N_F = 200


@dataclass(frozen=True)
class RawSample:
    """One recorded end-effector sample: time (s), position (m), unit quaternion."""

    t: float
    p: np.ndarray
    q: np.ndarray


@dataclass
class Demonstration:
    """Ordered samples of a single recorded trajectory."""

    samples: list[RawSample]
    id: str = ""

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def positions(self) -> np.ndarray:
        return np.array([s.p for s in self.samples])

    @property
    def quaternions(self) -> np.ndarray:
        return np.array([s.q for s in self.samples])

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])


@dataclass
class AlignedDataset:
    """n demonstrations resampled to a common length N_f."""

    demos: list[Demonstration]
    n_f: int
    source_ids: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.demos)

    def positions(self) -> np.ndarray:
        """Stacked positions, shape (n, N_f, 3)."""
        return np.stack([d.positions for d in self.demos])

    def quaternions(self) -> np.ndarray:
        """Stacked quaternions, shape (n, N_f, 4)."""
        return np.stack([d.quaternions for d in self.demos])


def _demo_from_arrays(ts, ps, qs, demo_id: str) -> Demonstration:
    samples = [RawSample(float(t), np.asarray(p, dtype=float), np.asarray(q, dtype=float))
               for t, p, q in zip(ts, ps, qs)]
    return Demonstration(samples=samples, id=demo_id)


def load_demonstrations(paths: Sequence[str | Path]) -> list[Demonstration]:
    """Load demo CSVs (header t,x,y,z,qw,qx,qy,qz; one sample per line).

    Quaternions are normalized at load time; zero-norm quaternions,
    malformed rows, non-increasing timestamps, and demos shorter than
    2 samples are rejected.
    """
    demos = []
    for path in paths:
        path = Path(path)
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            try:
                header = next(reader)
            except StopIteration:
                raise TooShort(f"{path}: empty file") from None
            if [c.strip() for c in header] != CSV_HEADER:
                raise MalformedRow(f"{path}: expected header {','.join(CSV_HEADER)}")
            samples = []
            prev_t = None
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 8:
                    raise MalformedRow(f"{path}:{lineno}: expected 8 columns, got {len(row)}")
                try:
                    vals = [float(c) for c in row]
                except ValueError as exc:
                    raise MalformedRow(f"{path}:{lineno}: {exc}") from None
                t = vals[0]
                if prev_t is not None and t <= prev_t:
                    raise MalformedRow(f"{path}:{lineno}: timestamps must be strictly increasing")
                prev_t = t
                q = quat.normalize(np.array(vals[4:8]))
                samples.append(RawSample(t, np.array(vals[1:4]), q))
        if len(samples) < 2:
            raise TooShort(f"{path}: need at least 2 samples, got {len(samples)}")
        demos.append(Demonstration(samples=samples, id=path.stem))
    return demos


def _dtw_path(ref_p: np.ndarray, other_p: np.ndarray) -> list[tuple[int, int]]:
    """Classic O(N*M) DTW warp path on Euclidean position distance."""
    n, m = len(ref_p), len(other_p)
    dist = np.linalg.norm(ref_p[:, None, :] - other_p[None, :, :], axis=2)
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            acc[i, j] = dist[i - 1, j - 1] + min(acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
    path = []
    i, j = n, m
    while i > 1 or j > 1:
        path.append((i - 1, j - 1))
        moves = (acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
        best = int(np.argmin(moves))
        if best == 0:
            i, j = i - 1, j - 1
        elif best == 1:
            i -= 1
        else:
            j -= 1
    path.append((0, 0))
    path.reverse()
    return path


def dtw_align(demos: Sequence[Demonstration], reference: int) -> list[Demonstration]:
    """Warp every demo onto the reference demo's timeline.

    Output demos all have the reference's length. Where the warp maps
    one reference index to several input samples their positional mean
    and hemisphere-aligned quaternion mean is taken; the reference demo
    itself is returned unchanged.
    """
    if len(demos) == 0:
        raise EmptyInput("dtw_align needs at least one demonstration")
    if not 0 <= reference < len(demos):
        raise IndexError(f"reference index {reference} out of range")
    ref = demos[reference]
    ref_p = ref.positions
    ref_t = ref.times
    out = []
    for k, demo in enumerate(demos):
        if k == reference:
            out.append(demo)
            continue
        path = _dtw_path(ref_p, demo.positions)
        matched: list[list[int]] = [[] for _ in range(len(ref))]
        for i, j in path:
            matched[i].append(j)
        ps = demo.positions
        qs = quat.hemisphere_align(demo.quaternions)
        new_p = np.empty((len(ref), 3))
        new_q = np.empty((len(ref), 4))
        for i, js in enumerate(matched):
            new_p[i] = ps[js].mean(axis=0)
            new_q[i] = qs[js[0]] if len(js) == 1 else quat.mean_chordal(qs[js])
        out.append(_demo_from_arrays(ref_t, new_p, new_q, demo.id))
    return out


def _step_filter_knots(n_m: int) -> np.ndarray:
    """Knot indices for the step filter: every h-th sample plus both endpoints."""
    h = max(1, int(np.floor(STEP_FRACTION * n_m + 0.5)))
    knots = list(range(0, n_m, h))
    if knots[-1] != n_m - 1:
        knots.append(n_m - 1)
    return np.array(knots)


def _padded_knots(idx: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Repeat endpoint values at out-of-range parameters until >= 4 knots.

    A cubic spline needs 4 knots; the padding leaves values on the
    evaluated interval unchanged at the knots themselves.
    """
    ts = [float(i) for i in idx]
    vs = [values[i] for i in idx]
    while len(ts) < 4:
        if len(ts) % 2 == 0:
            ts.insert(0, ts[0] - 1.0)
            vs.insert(0, vs[0])
        else:
            ts.append(ts[-1] + 1.0)
            vs.append(vs[-1])
    return np.array(ts), np.array(vs)


def smooth_resample_positions(demo: Demonstration, n_f: int = DEFAULT_N_F) -> np.ndarray:
    """Step-filtered cubic-spline resampling of positions to n_f points.

    Knots are every h-th sample (h = 10% of the demo length, endpoints
    always included), so overshoot spikes falling between knots are
    dropped before the spline is fitted.
    """
    n_m = len(demo)
    idx = _step_filter_knots(n_m)
    ts, vs = _padded_knots(idx, demo.positions)
    spline = CubicSpline(ts, vs, axis=0)
    query = np.linspace(0.0, float(n_m - 1), n_f)
    out = spline(query)
    # endpoints are knots; pin them against spline evaluation noise
    out[0] = demo.samples[0].p
    out[-1] = demo.samples[-1].p
    return out


def resample_orientations(demo: Demonstration, n_f: int = DEFAULT_N_F) -> np.ndarray:
    """Catmull-Rom quaternion resampling at the same step-filter knots."""
    n_m = len(demo)
    idx = _step_filter_knots(n_m)
    aligned = quat.hemisphere_align(demo.quaternions)
    ts, vs = _padded_knots(idx, aligned)
    query = np.linspace(0.0, float(n_m - 1), n_f)
    out = quat.catmull_rom(ts, vs, query)
    return quat.hemisphere_align(out)


def preprocess(demos: Sequence[Demonstration], n_f: int = DEFAULT_N_F) -> AlignedDataset:
    """Full two-step pipeline: DTW alignment, then spline smoothing.

    The longest demo is the DTW reference (maximum retained temporal
    resolution); every output demo has exactly n_f samples.
    """
    if len(demos) == 0:
        raise EmptyInput("preprocess needs at least one demonstration")
    reference = int(np.argmax([len(d) for d in demos]))
    aligned = dtw_align(demos, reference)
    ref_t = aligned[reference].times
    out_t = np.linspace(float(ref_t[0]), float(ref_t[-1]), n_f) if len(ref_t) else np.arange(n_f)
    out = []
    for demo in aligned:
        ps = smooth_resample_positions(demo, n_f)
        qs = resample_orientations(demo, n_f)
        out.append(_demo_from_arrays(out_t, ps, qs, demo.id))
    return AlignedDataset(demos=out, n_f=n_f, source_ids=[d.id for d in demos])


def save_demonstration(demo: Demonstration, path: str | Path) -> None:
    """Write a demo in the interchange CSV format."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for s in demo.samples:
            writer.writerow([repr(float(v)) for v in (s.t, *s.p, *s.q)])
