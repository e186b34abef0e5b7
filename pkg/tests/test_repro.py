import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canalpilot import repro
from canalpilot.errors import EndOfCanal, NonOrthonormalFrame, OutOfRange
from canalpilot.framing import CorrectionFrame
from canalpilot.repro import (CorrectionInput, RatioStrategy, ReproState, apply_correction,
                              disk_rotation, index_to_param, initial_state, param_to_index,
                              ratio_schedule, reverse, step)
from conftest import make_canal


def arc_points(n=50, radius=1.0, span=np.pi / 2):
    a = np.linspace(0, span, n)
    return np.column_stack([radius * np.cos(a), radius * np.sin(a), 0.2 * a])


class TestRatioSchedule:
    def test_first_step_is_eta0(self):
        s = RatioStrategy("decay", eta_0=0.7, eta_f=0.1, lam=0.3)
        assert ratio_schedule(s, 1) == pytest.approx(0.7, abs=1e-15)

    def test_fixed_everywhere(self):
        s = RatioStrategy("fixed", eta_0=0.42)
        for k in (1, 5, 1000):
            assert ratio_schedule(s, k) == 0.42

    def test_decay_value_at_100(self):
        # (1 - 0) * exp(-0.1 * 99) = exp(-9.9)
        s = RatioStrategy("decay", eta_0=1.0, eta_f=0.0, lam=0.1)
        want = np.exp(-9.9)
        assert want == pytest.approx(5.017e-5, abs=1e-8)
        assert ratio_schedule(s, 100) == pytest.approx(want, abs=1e-12)

    def test_invalid_strategy(self):
        with pytest.raises(ValueError):
            RatioStrategy("linear", eta_0=0.5)
        with pytest.raises(ValueError):
            RatioStrategy("fixed", eta_0=1.5)


class TestDiskRotation:
    def test_identity(self):
        f = CorrectionFrame(e_t=np.array([0, 0, 1.0]), x_axis=np.array([1.0, 0, 0]),
                            y_axis=np.array([0, 1.0, 0]))
        np.testing.assert_allclose(disk_rotation(f, f), np.eye(3), atol=1e-12)

    def test_frame_coordinates_preserved_under_in_plane_rotation(self):
        f1 = CorrectionFrame(e_t=np.array([0, 0, 1.0]), x_axis=np.array([1.0, 0, 0]),
                             y_axis=np.array([0, 1.0, 0]))
        # same disk, axes rotated 90 degrees about e_t
        f2 = CorrectionFrame(e_t=np.array([0, 0, 1.0]), x_axis=np.array([0, 1.0, 0]),
                             y_axis=np.array([-1.0, 0, 0]))
        rot = disk_rotation(f1, f2)
        offset = 0.3 * f1.x_axis + 0.4 * f1.y_axis
        moved = rot @ offset
        # coefficients on (x, y) are preserved
        assert np.dot(moved, f2.x_axis) == pytest.approx(0.3, abs=1e-12)
        assert np.dot(moved, f2.y_axis) == pytest.approx(0.4, abs=1e-12)

    def test_transfer_stays_in_new_disk_plane(self):
        c = np.cos(np.deg2rad(30))
        s = np.sin(np.deg2rad(30))
        f1 = CorrectionFrame(e_t=np.array([0, 0, 1.0]), x_axis=np.array([1.0, 0, 0]),
                             y_axis=np.array([0, 1.0, 0]))
        f2 = CorrectionFrame(e_t=np.array([s, 0, c]), x_axis=np.array([c, 0, -s]),
                             y_axis=np.array([0, 1.0, 0]))
        rot = disk_rotation(f1, f2)
        offset = 0.2 * f1.x_axis - 0.1 * f1.y_axis
        moved = rot @ offset
        assert abs(np.dot(moved, f2.e_t)) < 1e-9

    def test_left_handed_transfer_preserves_coefficients(self):
        f1 = CorrectionFrame(e_t=np.array([0, 0, 1.0]), x_axis=np.array([1.0, 0, 0]),
                             y_axis=np.array([0, 1.0, 0]))
        f2 = CorrectionFrame(e_t=np.array([0, 0, -1.0]), x_axis=np.array([1.0, 0, 0]),
                             y_axis=np.array([0, 1.0, 0]))  # left-handed triad
        rot = disk_rotation(f1, f2)
        offset = 0.25 * f1.x_axis + 0.5 * f1.y_axis
        moved = rot @ offset
        assert np.dot(moved, f2.x_axis) == pytest.approx(0.25, abs=1e-12)
        assert np.dot(moved, f2.y_axis) == pytest.approx(0.5, abs=1e-12)

    def test_non_orthonormal_rejected(self):
        good = CorrectionFrame(e_t=np.array([0, 0, 1.0]), x_axis=np.array([1.0, 0, 0]),
                               y_axis=np.array([0, 1.0, 0]))
        bad = CorrectionFrame(e_t=np.array([0, 0, 1.0]), x_axis=np.array([1.0, 0.5, 0]),
                              y_axis=np.array([0, 1.0, 0]))
        with pytest.raises(NonOrthonormalFrame):
            disk_rotation(good, bad)


class TestStep:
    def test_zero_offset_rides_directrix(self):
        canal = make_canal(arc_points(), 0.2)
        state = initial_state(canal, 1)
        strategy = RatioStrategy("fixed", eta_0=0.5)
        out = step(state, canal, strategy)
        np.testing.assert_allclose(out.offset, 0.0)
        assert out.eta == 0.0
        assert out.s == 2

    def test_constant_radius_carries_offset(self):
        pts = np.column_stack([np.zeros(20), np.zeros(20), np.linspace(0, 1, 20)])
        canal = make_canal(pts, 0.3)
        offset = 0.15 * canal.frames[0].x_axis
        state = initial_state(canal, 1, offset)
        strategy = RatioStrategy("fixed", eta_0=state.eta)
        out = step(state, canal, strategy)
        np.testing.assert_allclose(out.offset, offset, atol=1e-12)

    def test_ratio_rule_scales_with_radius(self):
        # r: 0.2 -> 0.1 with fixed eta = 0.5: offset norm 0.1 -> 0.05
        pts = np.column_stack([np.zeros(3), np.zeros(3), np.linspace(0, 0.2, 3)])
        canal = make_canal(pts, np.array([0.2, 0.1, 0.1]))
        offset = 0.1 * canal.frames[0].x_axis
        state = initial_state(canal, 1, offset)
        assert state.eta == pytest.approx(0.5)
        out = step(state, canal, RatioStrategy("fixed", eta_0=0.5))
        assert np.linalg.norm(out.offset) == pytest.approx(0.05, abs=1e-12)

    def test_end_of_canal(self):
        canal = make_canal(arc_points(10), 0.2)
        state = initial_state(canal, 10)
        with pytest.raises(EndOfCanal):
            step(state, canal, RatioStrategy("fixed", eta_0=0.0))
        state_b = initial_state(canal, 1, direction="backward")
        with pytest.raises(EndOfCanal):
            step(state_b, canal, RatioStrategy("fixed", eta_0=0.0))

    def test_decay_converges(self):
        canal = make_canal(arc_points(120), 0.2)
        offset = 0.2 * canal.frames[0].x_axis
        state = initial_state(canal, 1, offset)
        strategy = RatioStrategy("decay", eta_0=1.0, eta_f=0.0, lam=0.1)
        for _ in range(99):
            state = step(state, canal, strategy)
        assert state.eta == pytest.approx(np.exp(-9.9), abs=1e-12)
        assert state.eta <= 1.0 * np.exp(-0.1 * 99) + 1e-12


class TestApplyCorrection:
    def test_zero_input_no_change(self):
        canal = make_canal(arc_points(), 0.2)
        state = initial_state(canal, 5)
        out = apply_correction(state, CorrectionInput(0.0, 0.0), canal)
        np.testing.assert_allclose(out.offset, state.offset)
        assert out.s == state.s and out.d == state.d

    def test_unit_input_moves_one_delta(self):
        canal = make_canal(arc_points(), 0.2)
        state = initial_state(canal, 5)
        out = apply_correction(state, CorrectionInput(1.0, 0.0, delta=150.0), canal)
        frame = canal.frames[4]
        np.testing.assert_allclose(out.offset, frame.x_axis / 150.0, atol=1e-15)
        assert np.linalg.norm(out.offset) == pytest.approx(1 / 150.0, abs=1e-15)

    def test_boundary_clamp(self):
        canal = make_canal(arc_points(), 0.01)
        frame = canal.frames[4]
        state = initial_state(canal, 5, 0.01 * frame.x_axis)
        out = apply_correction(state, CorrectionInput(1.0, 0.0, delta=150.0), canal)
        assert np.linalg.norm(out.offset) == pytest.approx(0.01, abs=1e-12)
        assert out.eta == pytest.approx(1.0, abs=1e-12)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            CorrectionInput(1.5, 0.0)
        with pytest.raises(ValueError):
            CorrectionInput(0.0, 0.0, delta=0.0)


class TestReverse:
    def test_involution(self, arc_canal):
        back = reverse(reverse(arc_canal))
        np.testing.assert_array_equal(back.directrix, arc_canal.directrix)
        np.testing.assert_array_equal(back.radii, arc_canal.radii)
        np.testing.assert_array_equal(back.mean_q, arc_canal.mean_q)
        np.testing.assert_array_equal(back.sigma_q, arc_canal.sigma_q)
        for f1, f2 in zip(back.frames, arc_canal.frames):
            np.testing.assert_array_equal(f1.e_t, f2.e_t)
            np.testing.assert_array_equal(f1.x_axis, f2.x_axis)
            np.testing.assert_array_equal(f1.y_axis, f2.y_axis)

    def test_frames_kept_not_recomputed(self, arc_canal):
        rev = reverse(arc_canal)
        n = arc_canal.n_f
        for s in range(n):
            np.testing.assert_array_equal(rev.frames[s].e_t, arc_canal.frames[n - 1 - s].e_t)
            np.testing.assert_array_equal(rev.frames[s].x_axis,
                                          arc_canal.frames[n - 1 - s].x_axis)
            np.testing.assert_array_equal(rev.frames[s].y_axis,
                                          arc_canal.frames[n - 1 - s].y_axis)

    def test_round_trip_returns_to_start(self):
        a = np.linspace(0, np.pi / 2, 60)
        pts = np.column_stack([np.cos(a), np.sin(a), 0.3 * a])
        radii = 0.1 + 0.05 * np.sin(np.linspace(0, np.pi, 60))
        canal = make_canal(pts, radii)
        offset0 = 0.6 * radii[0] * canal.frames[0].x_axis
        state = initial_state(canal, 1, offset0)
        strategy = RatioStrategy("fixed", eta_0=state.eta)
        for _ in range(59):
            state = step(state, canal, strategy)
        p_end = canal.directrix[state.s - 1] + state.offset

        rev = reverse(canal)
        state_b = initial_state(rev, 1, state.offset)
        strategy_b = RatioStrategy("fixed", eta_0=state_b.eta)
        for _ in range(59):
            state_b = step(state_b, rev, strategy_b)
        p_back = rev.directrix[state_b.s - 1] + state_b.offset
        p_start = canal.directrix[0] + offset0
        assert np.linalg.norm(p_back - p_start) < 1e-6
        # sanity: the reversed canal really starts where the forward ended
        np.testing.assert_allclose(rev.directrix[0], canal.directrix[-1])
        del p_end


class TestParamMapping:
    def test_endpoints(self):
        assert param_to_index(-1.0, 200) == 1
        assert param_to_index(1.0, 200) == 200

    def test_midpoint(self):
        assert param_to_index(0.0, 201) == 101

    def test_round_trip_within_half_step(self):
        n_f = 101
        for d in np.linspace(-1, 1, 37):
            s = param_to_index(float(d), n_f)
            back = index_to_param(s, n_f)
            assert abs(back - d) <= 1.0 / (n_f - 1) + 1e-12

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            param_to_index(1.5, 100)
        with pytest.raises(OutOfRange):
            index_to_param(0, 100)
        with pytest.raises(OutOfRange):
            index_to_param(101, 100)


class TestInvariants:
    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 9999), eta0=st.floats(0.0, 1.0))
    def test_containment_and_planarity_random_walks(self, seed, eta0):
        rng = np.random.default_rng(seed)
        n = 30
        a = np.linspace(0, np.pi, n)
        pts = np.column_stack([np.cos(a), np.sin(a), rng.uniform(0.1, 0.5) * a])
        radii = rng.uniform(0.05, 0.4, n)
        canal = make_canal(pts, radii)
        direction = rng.normal(size=3)
        frame = canal.frames[0]
        in_plane = (np.dot(direction, frame.x_axis) * frame.x_axis
                    + np.dot(direction, frame.y_axis) * frame.y_axis)
        if np.linalg.norm(in_plane) > 1e-12:
            offset = eta0 * radii[0] * in_plane / np.linalg.norm(in_plane)
        else:
            offset = np.zeros(3)
        state = initial_state(canal, 1, offset)
        strategy = RatioStrategy("fixed", eta_0=min(1.0, state.eta))
        for i in range(n - 1):
            if i % 7 == 3:
                state = apply_correction(state, CorrectionInput(
                    k_x=float(rng.uniform(-1, 1)), k_y=float(rng.uniform(-1, 1))), canal)
                strategy = RatioStrategy("fixed", eta_0=min(1.0, state.eta))
            state = step(state, canal, strategy)
            r = canal.radii[state.s - 1]
            assert np.linalg.norm(state.offset) <= r + 1e-6
            assert abs(np.dot(state.offset, canal.frames[state.s - 1].e_t)) < 1e-6
            assert state.eta == pytest.approx(np.linalg.norm(state.offset) / r, abs=1e-6)

    def test_fixed_eta_invariant_full_traversal(self):
        a = np.linspace(0, np.pi, 80)
        pts = np.column_stack([np.cos(a), np.sin(a), 0.3 * a])
        radii = 0.1 + 0.08 * np.abs(np.sin(3 * a))
        canal = make_canal(pts, radii)
        offset = 0.37 * radii[0] * canal.frames[0].x_axis
        state = initial_state(canal, 1, offset)
        strategy = RatioStrategy("fixed", eta_0=state.eta)
        for _ in range(79):
            state = step(state, canal, strategy)
            assert state.eta == pytest.approx(strategy.eta_0, abs=1e-9)


def test_step_with_offset_parallel_to_tangent_collapses_to_directrix():
    # a hand-built state violating the in-plane invariant must not NaN
    pts = np.column_stack([np.zeros(5), np.zeros(5), np.linspace(0, 1, 5)])
    canal = make_canal(pts, 0.3)
    bad = ReproState(s=1, offset=np.array([0.0, 0.0, 0.05]), eta=0.05 / 0.3,
                     direction="forward", d=-1.0, leg_step=1)
    out = step(bad, canal, RatioStrategy("fixed", eta_0=0.5))
    assert np.all(np.isfinite(out.offset))
    np.testing.assert_allclose(out.offset, 0.0)
    assert out.eta == 0.0
