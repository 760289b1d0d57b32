import math

import pytest
from hypothesis import given, settings, strategies as st

from hapticlab.coriolis import (CoriolisScene, Goal, Kind, Outcome, PuckState,
                                coriolis_force, goal_check, inertial_circle,
                                step_ball, step_glider)
from hapticlab.kinematics import Vec3, ZERO

DT = 1e-3


def make_scene(omega=2.0, radius=10.0, drag=0.0, centrifugal=False, mass=0.5,
               goal_center=Vec3(9.0, 0.0, 0.0), goal_radius=0.5):
    return CoriolisScene(omega=omega, platform_radius=radius,
                         goal=Goal(goal_center, goal_radius),
                         puck_mass=mass, ground_drag=drag,
                         centrifugal_enabled=centrifugal)


class TestCoriolisForce:
    def test_static_frame_zero(self):
        assert coriolis_force(0.5, ZERO, Vec3(2.0, 0.0, 0.0)) == ZERO

    def test_hand_cross_product(self):
        # F = -2 * 0.5 * (z_hat x (2,0,0)) = -(0,2,0)
        f = coriolis_force(0.5, Vec3(0.0, 0.0, 1.0), Vec3(2.0, 0.0, 0.0))
        assert f == Vec3(0.0, -2.0, 0.0)
        assert f.norm() == pytest.approx(2.0)

    @given(st.floats(0.01, 10), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5),
           st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_perpendicular_to_velocity(self, m, wx, wy, wz, vx, vy, vz):
        v = Vec3(vx, vy, vz)
        f = coriolis_force(m, Vec3(wx, wy, wz), v)
        assert abs(f.dot(v)) < 1e-9 * max(1.0, f.norm() * v.norm())


class TestInertialCircle:
    def test_closed_form(self):
        r, t = inertial_circle(1.0, 2.0)
        assert r == 0.25 and t == math.pi / 2

    def test_degenerate_point(self):
        r, t = inertial_circle(0.0, 3.0)
        assert r == 0.0 and t == pytest.approx(math.pi / 3)

    def test_zero_omega_rejected(self):
        with pytest.raises(ValueError):
            inertial_circle(1.0, 0.0)


class TestBall:
    def test_inertial_circle_radius_and_period(self):
        sc = make_scene(omega=2.0)
        state = PuckState(Kind.BALL, ZERO, Vec3(1.0, 0.0, 0.0))
        r_oracle, t_oracle = inertial_circle(1.0, sc.omega)
        xs, ys = [], []
        heading_acc = 0.0
        prev = math.atan2(state.vel.y, state.vel.x)
        period_ticks = None
        for k in range(4000):
            state = step_ball(sc, state, ZERO, DT)
            xs.append(state.pos.x)
            ys.append(state.pos.y)
            h = math.atan2(state.vel.y, state.vel.x)
            d = h - prev
            while d > math.pi:
                d -= 2 * math.pi
            while d < -math.pi:
                d += 2 * math.pi
            heading_acc += d
            prev = h
            if period_ticks is None and abs(heading_acc) >= 2 * math.pi:
                period_ticks = k + 1
        radius = (max(xs) - min(xs)) / 2
        assert radius == pytest.approx(r_oracle, rel=0.01)
        assert period_ticks * DT == pytest.approx(t_oracle, rel=0.01)

    def test_kinetic_energy_constant(self):
        sc = make_scene(omega=2.0)
        state = PuckState(Kind.BALL, ZERO, Vec3(1.0, 0.0, 0.0))
        ke0 = state.vel.norm2()
        for _ in range(10000):
            state = step_ball(sc, state, ZERO, DT)
        assert abs(state.vel.norm2() - ke0) / ke0 < 1e-3

    def test_no_spin_straight_line(self):
        sc = make_scene(omega=0.0)
        state = PuckState(Kind.BALL, ZERO, Vec3(1.0, 0.0, 0.0))
        for _ in range(1000):
            state = step_ball(sc, state, ZERO, DT)
        assert state.pos.y == 0.0
        assert state.vel.norm() == pytest.approx(1.0)

    def test_corotating_rest_stays(self):
        sc = make_scene(omega=2.0, drag=0.8)
        state = PuckState(Kind.BALL, Vec3(1.0, 1.0, 0.0), ZERO)
        for _ in range(1000):
            state = step_ball(sc, state, ZERO, DT)
        assert state.pos == Vec3(1.0, 1.0, 0.0)
        assert state.vel == ZERO

    def test_reversing_omega_mirrors_trajectory(self):
        sc_pos = make_scene(omega=2.0)
        sc_neg = make_scene(omega=-2.0)
        a = PuckState(Kind.BALL, ZERO, Vec3(1.0, 0.0, 0.0))
        b = PuckState(Kind.BALL, ZERO, Vec3(1.0, 0.0, 0.0))
        for _ in range(500):
            a = step_ball(sc_pos, a, ZERO, DT)
            b = step_ball(sc_neg, b, ZERO, DT)
        assert a.pos.x == pytest.approx(b.pos.x, abs=1e-12)
        assert a.pos.y == pytest.approx(-b.pos.y, abs=1e-12)

    def test_rim_is_inelastic(self):
        sc = make_scene(omega=0.0, radius=0.5)
        state = PuckState(Kind.BALL, Vec3(0.45, 0.0, 0.0), Vec3(2.0, 0.0, 0.0))
        for _ in range(200):
            state = step_ball(sc, state, ZERO, DT)
        assert math.hypot(state.pos.x, state.pos.y) == pytest.approx(0.5, abs=1e-12)
        assert state.vel == ZERO

    def test_kind_guard(self):
        sc = make_scene()
        with pytest.raises(ValueError):
            step_ball(sc, PuckState(Kind.GLIDER, ZERO, ZERO), ZERO, DT)


class TestGlider:
    def test_straight_line_constant_speed(self):
        sc = make_scene(omega=2.0)
        state = PuckState(Kind.GLIDER, ZERO, Vec3(1.0, 0.0, 0.0))
        for _ in range(2000):
            state = step_glider(sc, state, ZERO, DT)
        assert abs(state.pos.y) < 1e-9  # zero lateral deviation
        assert state.vel.norm() == pytest.approx(1.0)

    def test_uniform_acceleration(self):
        sc = make_scene(mass=0.5)
        state = PuckState(Kind.GLIDER, ZERO, ZERO)
        for _ in range(1000):
            state = step_glider(sc, state, Vec3(0.1, 0.0, 0.0), DT)
        # a = F/m = 0.2 m/s^2 for 1 s
        assert state.vel.x == pytest.approx(0.2, rel=1e-3)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_deviation_perpendicular_to_launch(self, vx, vy):
        if math.hypot(vx, vy) < 0.1:
            return
        sc = make_scene(omega=3.0, radius=100.0)
        v0 = Vec3(vx, vy, 0.0)
        state = PuckState(Kind.GLIDER, ZERO, v0)
        u = v0.normalized()
        for _ in range(500):
            state = step_glider(sc, state, ZERO, DT)
            perp = state.pos - u * state.pos.dot(u)
            assert perp.norm() < 1e-9


class TestGoal:
    def test_at_center_scored(self):
        g = Goal(Vec3(0.4, 0.0, 0.0), 0.05)
        st_ = PuckState(Kind.BALL, Vec3(0.4, 0.0, 0.0), ZERO)
        assert goal_check(st_, g, 0.5) is Outcome.SCORED

    def test_rim_far_from_goal_missed(self):
        g = Goal(Vec3(0.4, 0.0, 0.0), 0.05)
        st_ = PuckState(Kind.BALL, Vec3(0.0, 0.5, 0.0), ZERO)  # 90 degrees away
        assert goal_check(st_, g, 0.5) is Outcome.MISSED

    def test_center_in_play(self):
        g = Goal(Vec3(0.4, 0.0, 0.0), 0.05)
        st_ = PuckState(Kind.BALL, ZERO, ZERO)
        assert goal_check(st_, g, 0.5) is Outcome.IN_PLAY


class TestCentrifugal:
    def test_outward_drift_when_enabled(self):
        sc = make_scene(omega=2.0, centrifugal=True, radius=100.0)
        state = PuckState(Kind.BALL, Vec3(1.0, 0.0, 0.0), ZERO)
        for _ in range(1000):
            state = step_ball(sc, state, ZERO, DT)
        assert math.hypot(state.pos.x, state.pos.y) > 1.0

    def test_default_off(self):
        sc = make_scene()
        assert sc.centrifugal_enabled is False
