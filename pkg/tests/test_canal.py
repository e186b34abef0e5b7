import numpy as np
import pytest

from canalpilot import canal as canalmod
from canalpilot import quat, synth, trajio
from canalpilot.canal import (CanalModel, SupportPlane, build_canal, compute_directrix,
                              compute_radii, orientation_stats, refine_cross_sections)
from canalpilot.trajio import AlignedDataset, Demonstration, RawSample


def rot_z(deg):
    h = np.deg2rad(deg) / 2
    return np.array([np.cos(h), 0, 0, np.sin(h)])


def dataset_from_arrays(pos_sets, quat_sets=None):
    demos = []
    for m, ps in enumerate(pos_sets):
        n = len(ps)
        qs = quat_sets[m] if quat_sets else np.tile([1.0, 0, 0, 0], (n, 1))
        samples = [RawSample(i * 0.05, np.asarray(ps[i], dtype=float),
                             np.asarray(qs[i], dtype=float)) for i in range(n)]
        demos.append(Demonstration(samples=samples, id=f"m{m}"))
    return AlignedDataset(demos=demos, n_f=len(pos_sets[0]),
                          source_ids=[d.id for d in demos])


class TestDirectrix:
    def test_mirrored_demos_mean_on_axis(self):
        z = np.linspace(0, 1, 20)
        a = np.column_stack([0.3 * np.ones(20), 0.1 * np.sin(z), z])
        b = -a.copy()
        b[:, 2] = z
        ds = dataset_from_arrays([a, b])
        c = compute_directrix(ds)
        np.testing.assert_allclose(c[:, :2], 0.0, atol=1e-9)

    def test_single_demo_is_identity(self):
        a = np.column_stack([np.linspace(0, 1, 15), np.zeros(15), np.zeros(15)])
        ds = dataset_from_arrays([a])
        np.testing.assert_allclose(compute_directrix(ds), a, atol=1e-12)

    def test_arithmetic_mean_example(self):
        a = np.zeros((5, 3))
        b = np.zeros((5, 3))
        b[:, 0] = 2.0
        ds = dataset_from_arrays([a, b])
        np.testing.assert_allclose(compute_directrix(ds)[0], [1, 0, 0], atol=1e-12)


class TestRadii:
    def test_symmetric_offsets(self):
        base = np.column_stack([np.zeros(10), np.zeros(10), np.linspace(0, 1, 10)])
        a = base + [1.0, 0, 0]
        b = base - [1.0, 0, 0]
        ds = dataset_from_arrays([a, b])
        c = compute_directrix(ds)
        r = compute_radii(ds, c)
        np.testing.assert_allclose(r, 1.0, atol=1e-12)

    def test_identical_demos_floor(self):
        a = np.column_stack([np.zeros(8), np.zeros(8), np.linspace(0, 1, 8)])
        ds = dataset_from_arrays([a, a.copy()])
        r = compute_radii(ds, compute_directrix(ds), r_min=1e-4)
        np.testing.assert_allclose(r, 1e-4)

    def test_matches_max_of_norms_oracle(self):
        rng = np.random.default_rng(8)
        demos = [rng.normal(0, 1, (12, 3)) for _ in range(3)]
        ds = dataset_from_arrays(demos)
        c = compute_directrix(ds)
        r = compute_radii(ds, c, r_min=0.0)
        for s in range(12):
            oracle = max(np.linalg.norm(d[s] - c[s]) for d in demos)
            assert r[s] == pytest.approx(oracle, abs=1e-12)


class TestOrientationStats:
    def test_shared_quaternion(self):
        q = rot_z(42)
        ds = dataset_from_arrays([np.zeros((6, 3)), np.zeros((6, 3))],
                                 [np.tile(q, (6, 1)), np.tile(q, (6, 1))])
        mean_q, sigma_q = orientation_stats(ds)
        for row in mean_q:
            assert quat.geodesic_angle(row, q) < 1e-6
        np.testing.assert_allclose(sigma_q, 0.0, atol=1e-6)

    def test_sign_flip_invariance(self):
        q = rot_z(30)
        ds1 = dataset_from_arrays([np.zeros((3, 3)), np.zeros((3, 3))],
                                  [np.tile(q, (3, 1)), np.tile(q, (3, 1))])
        ds2 = dataset_from_arrays([np.zeros((3, 3)), np.zeros((3, 3))],
                                  [np.tile(q, (3, 1)), np.tile(-q, (3, 1))])
        m1, s1 = orientation_stats(ds1)
        m2, s2 = orientation_stats(ds2)
        for a, b in zip(m1, m2):
            assert quat.geodesic_angle(a, b) < 1e-12
        np.testing.assert_allclose(s1, s2, atol=1e-9)

    def test_20_degree_pair(self):
        # geodesic midpoint of a single-axis pair is analytic: 10 degrees,
        # and each demo sits 10 degrees = 0.17453 rad from the mean
        ds = dataset_from_arrays([np.zeros((4, 3)), np.zeros((4, 3))],
                                 [np.tile(rot_z(0), (4, 1)), np.tile(rot_z(20), (4, 1))])
        mean_q, sigma_q = orientation_stats(ds)
        for row in mean_q:
            assert quat.geodesic_angle(row, rot_z(10)) < 1e-6
        np.testing.assert_allclose(sigma_q, np.deg2rad(10.0), atol=1e-6)
        assert sigma_q[0] == pytest.approx(0.17453, abs=1e-5)


class TestEnclosure:
    @pytest.mark.parametrize("kind,kw", [("arc", {}), ("line", {}),
                                         ("ucurve", {"depth": 0.3}),
                                         ("helix", {"turns": 1.5})])
    def test_every_demo_point_inside_disk(self, kind, kw):
        demos = synth.demo_set(kind, 3, 70, spread=0.2, tilt=0.15, noise=0.002,
                               seed=5, **kw)
        ds = trajio.preprocess(demos, n_f=60)
        c = build_canal(ds)
        pos = ds.positions()
        for m in range(ds.n):
            dist = np.linalg.norm(pos[m] - c.directrix, axis=1)
            assert np.all(dist <= c.radii + 1e-9)


class TestRefinement:
    def make_dip_canal(self):
        t = np.linspace(0.0, 1.0, 60)
        pts = np.column_stack([0.4 * t, np.zeros_like(t), 0.3 * np.sin(np.pi * t)])
        # demos straddle the base so radii are meaningful
        a = pts + np.array([0, 0.05, 0])
        b = pts - np.array([0, 0.05, 0])
        ds = dataset_from_arrays([a, b])
        return build_canal(ds)

    def test_disk_near_floor_snaps_up(self):
        c = self.make_dip_canal()
        refined = refine_cross_sections(c, [SupportPlane(z_floor=0.0)])
        # first disks touch z=0 and their tangents lean +z
        f = refined.frames[0]
        np.testing.assert_allclose(f.e_t, [0, 0, 1], atol=1e-12)
        m = f.as_matrix()
        np.testing.assert_allclose(m.T @ m, np.eye(3), atol=1e-9)

    def test_descending_end_snaps_down(self):
        c = self.make_dip_canal()
        refined = refine_cross_sections(c, [SupportPlane(z_floor=0.0)])
        f = refined.frames[-1]
        np.testing.assert_allclose(f.e_t, [0, 0, -1], atol=1e-12)
        m = f.as_matrix()
        np.testing.assert_allclose(m.T @ m, np.eye(3), atol=1e-9)
        # x stays the re-projected previous x, orthonormal to the new tangent
        assert abs(np.dot(f.x_axis, f.e_t)) < 1e-9
        assert abs(np.dot(f.y_axis, f.e_t)) < 1e-9
        assert abs(np.dot(f.x_axis, f.y_axis)) < 1e-9

    def test_disks_away_from_floor_unchanged(self):
        c = self.make_dip_canal()
        refined = refine_cross_sections(c, [SupportPlane(z_floor=0.0)])
        mid = c.n_f // 2  # apex disk, far above the floor
        np.testing.assert_allclose(refined.frames[mid].e_t, c.frames[mid].e_t)
        np.testing.assert_allclose(refined.frames[mid].x_axis, c.frames[mid].x_axis)

    def test_only_intersecting_disks_change(self):
        c = self.make_dip_canal()
        refined = refine_cross_sections(c, [SupportPlane(z_floor=0.0)])
        for s in range(c.n_f):
            changed = not np.allclose(refined.frames[s].e_t, c.frames[s].e_t)
            if changed:
                hit = canalmod._disk_hits_plane(c.directrix[s], c.frames[s].e_t,
                                                c.radii[s], 0.0)
                assert hit

    def test_explicit_index_range_limits_refinement(self):
        c = self.make_dip_canal()
        refined = refine_cross_sections(c, [SupportPlane(z_floor=0.0, index_range=(0, 3))])
        for s in range(3, c.n_f):
            np.testing.assert_allclose(refined.frames[s].e_t, c.frames[s].e_t)

    def test_enclosure_survives_refinement(self):
        demos = synth.demo_set("ucurve", 2, 70, spread=0.15, tilt=0.1, depth=0.3, seed=2)
        ds = trajio.preprocess(demos, n_f=50)
        c = build_canal(ds, support_planes=[SupportPlane(z_floor=0.0)])
        pos = ds.positions()
        for m in range(ds.n):
            dist = np.linalg.norm(pos[m] - c.directrix, axis=1)
            assert np.all(dist <= c.radii + 1e-9)


class TestSerialization:
    def test_json_round_trip(self, tmp_path, arc_canal):
        path = tmp_path / "canal.json"
        arc_canal.save(path)
        back = CanalModel.load(path)
        np.testing.assert_allclose(back.directrix, arc_canal.directrix)
        np.testing.assert_allclose(back.radii, arc_canal.radii)
        np.testing.assert_allclose(back.mean_q, arc_canal.mean_q)
        np.testing.assert_allclose(back.sigma_q, arc_canal.sigma_q)
        for f1, f2 in zip(back.frames, arc_canal.frames):
            np.testing.assert_allclose(f1.e_t, f2.e_t)
            np.testing.assert_allclose(f1.x_axis, f2.x_axis)
            np.testing.assert_allclose(f1.y_axis, f2.y_axis)
        assert back.r_min == arc_canal.r_min
        assert back.source_ids == arc_canal.source_ids

    def test_schema_fields(self, arc_canal):
        doc = arc_canal.to_json_dict()
        assert set(doc) == {"N_f", "directrix", "radii", "mean_q", "sigma_q",
                            "frames", "meta"}
        assert set(doc["frames"][0]) == {"t", "x", "y"}
        assert set(doc["meta"]) == {"N_f", "r_min", "source_demo_ids"}
