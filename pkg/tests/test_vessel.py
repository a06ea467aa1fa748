import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from usvsim.errors import NonFiniteState, SpeedTooLow
from usvsim.vessel import (
    KNOT,
    ActuatorCommand,
    ActuatorGeometry,
    BodyWrench,
    Configuration,
    VesselState,
    actuator_forces,
    course_angle,
    default_nukhada_params,
    derivatives,
    kinetic_energy,
    sideslip_angle,
    step,
    wrap_angle,
)

P = default_nukhada_params()

finite = st.floats(-1e3, 1e3, allow_nan=False)
throttle = st.floats(-1.0, 1.0)
azimuth = st.floats(-math.pi, math.pi)


def test_published_defaults(params):
    assert (params.length, params.beam, params.mass) == (6.0, 3.5, 500.0)
    assert params.pod_max_shaft_power == 4300.0
    assert params.pod_max_rpm == 1350.0
    assert params.yaw_inertia == pytest.approx(500 * (36 + 12.25) / 12)
    assert params.yaw_inertia == pytest.approx(2011, abs=1)
    assert all(a.azimuth_range == math.pi for a in params.actuators)


def test_max_thrust(params):
    # eta * P / V_max with V_max = 8 kn
    assert params.max_thrust == pytest.approx(0.5 * 4300 / (8 * KNOT))
    assert params.max_thrust == pytest.approx(522.4, abs=0.1)


def test_top_speed_force_balance(params):
    v = params.design_max_speed
    assert params.surge_drag(v) == pytest.approx(2 * params.max_thrust)


def test_invalid_params_rejected(params):
    with pytest.raises(ValueError):
        replace(params, mass=0.0)
    with pytest.raises(ValueError):
        replace(params, propulsive_efficiency=1.2)
    with pytest.raises(ValueError):
        replace(params, Y_v=-1.0)
    with pytest.raises(ValueError):
        # symmetric pods must be mirrored about the centreline
        replace(params, actuators=(ActuatorGeometry(0.0, -1.5), ActuatorGeometry(0.0, 1.0)))
    with pytest.raises(ValueError):
        replace(params, configuration=Configuration.OUTBOARD_STERN)


def test_outboard_geometry(outboard, params):
    assert outboard.configuration == Configuration.OUTBOARD_STERN
    for a in outboard.actuators:
        assert a.longitudinal_offset == -params.length / 2
        assert a.azimuth_range == pytest.approx(math.radians(35))
    assert outboard.N_r == params.N_r


def test_forces_zero(params):
    assert actuator_forces(ActuatorCommand(), params) == (0.0, 0.0, 0.0)


def test_forces_full_ahead(params):
    w = actuator_forces(ActuatorCommand(1.0, 1.0), params)
    assert w.X == pytest.approx(2 * params.max_thrust)
    assert w.Y == 0.0
    assert w.N_moment == pytest.approx(0.0, abs=1e-12)


def test_forces_differential_sign(params):
    # left ahead, right astern: N = sum(x Fy - y Fx) with the left pod at y = -b
    b = params.actuators[1].lateral_offset
    w = actuator_forces(ActuatorCommand(1.0, -1.0), params)
    assert w.X == pytest.approx(0.0, abs=1e-12)
    assert w.N_moment == pytest.approx(2 * params.max_thrust * b)
    # and that moment turns the bow to starboard
    s = step(VesselState(), ActuatorCommand(1.0, -1.0), params, 0.05)
    assert s.yaw_rate > 0


def test_forces_quadratic_law(params):
    w = actuator_forces(ActuatorCommand(0.5, 0.5), params)
    assert w.X == pytest.approx(2 * params.max_thrust * 0.25)


def test_command_clamped(params, outboard):
    w = actuator_forces(ActuatorCommand(3.0, 3.0), params)
    assert w.X == pytest.approx(2 * params.max_thrust)
    c = ActuatorCommand(0.5, 0.5, 1.0, -1.0).clamped(outboard)
    assert c.azimuth_left == pytest.approx(math.radians(35))
    assert c.azimuth_right == pytest.approx(-math.radians(35))


@given(throttle, throttle)
def test_forces_odd_in_throttle(tl, tr):
    p = P
    a = actuator_forces(ActuatorCommand(tl, tr), p)
    b = actuator_forces(ActuatorCommand(-tl, -tr), p)
    for x, y in zip(a, b):
        assert x == pytest.approx(-y, abs=1e-9)


def test_derivatives_equilibrium(params):
    assert all(d == 0 for d in derivatives(VesselState(), BodyWrench(0, 0, 0), params))


def test_derivatives_quadratic_damping_only(params):
    p = replace(params, X_u=0.0, Y_v=0.0, N_r=0.0, Y_r=0.0, N_v=0.0)
    d = derivatives(VesselState(surge_vel=1.0), BodyWrench(0, 0, 0), p)
    assert d.surge_dot == pytest.approx(-p.X_uu / (p.mass + p.added_mass_surge))
    assert d.sway_dot == 0.0 and d.yaw_rate_dot == 0.0


def test_derivatives_rotation(params):
    d = derivatives(VesselState(heading=math.pi / 2, surge_vel=2.0), BodyWrench(0, 0, 0), params)
    assert d.north_dot == pytest.approx(0.0, abs=1e-12)
    assert d.east_dot == pytest.approx(2.0)


def test_step_rest_is_fixed_point(params):
    s = step(VesselState(time=3.0), ActuatorCommand(), params, 0.3)
    assert s == VesselState(time=3.3)


def test_step_rejects_bad_dt(params):
    for dt in (0.0, -0.1, 0.51):
        with pytest.raises(ValueError):
            step(VesselState(), ActuatorCommand(), params, dt)


def test_step_non_finite(params):
    with pytest.raises(NonFiniteState):
        step(VesselState(surge_vel=1e200), ActuatorCommand(), params, 0.05)


def test_azimuth_slew_limit(params):
    s = step(VesselState(), ActuatorCommand(0.0, 0.0, math.pi, -math.pi), params, 0.1)
    assert s.azimuth_left == pytest.approx(math.radians(6))
    assert s.azimuth_right == pytest.approx(-math.radians(6))


def test_full_throttle_top_speed(params):
    s = VesselState()
    for _ in range(int(120 / 0.05)):
        s = step(s, ActuatorCommand(1.0, 1.0), params, 0.05)
    assert s.surge_vel == pytest.approx(8 * KNOT, rel=0.05)
    assert s.surge_vel == pytest.approx(4.12, rel=0.05)


def test_rk4_order(params):
    cmd = ActuatorCommand(0.8, 0.4)

    def run(dt):
        s = VesselState(surge_vel=1.0)
        for _ in range(int(round(60.0 / dt))):
            s = step(s, cmd, params, dt)
        return s

    ref = run(0.001)
    errs = []
    for dt in (0.2, 0.1, 0.05):
        s = run(dt)
        errs.append(math.hypot(s.north - ref.north, s.east - ref.east))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 3.5


states = st.builds(VesselState, north=finite, east=finite, heading=azimuth,
                   surge_vel=st.floats(-4, 4), sway_vel=st.floats(-2, 2), yaw_rate=st.floats(-1, 1))


@settings(max_examples=40, deadline=None)
@given(states, st.lists(st.tuples(throttle, throttle), min_size=1, max_size=30))
def test_mirror_symmetry(state, throttles):
    p = P
    a, b = state, state.mirrored()
    for tl, tr in throttles:
        cmd = ActuatorCommand(tl, tr)
        a = step(a, cmd, p, 0.05)
        b = step(b, cmd.mirrored(), p, 0.05)
        m = a.mirrored()
        for name in ("north", "east", "surge_vel", "sway_vel", "yaw_rate"):
            assert getattr(b, name) == pytest.approx(getattr(m, name), rel=1e-9, abs=1e-9)
        assert wrap_angle(b.heading - m.heading) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(states)
def test_dissipative_under_zero_command(state):
    p = P
    e = kinetic_energy(state, p)
    for _ in range(100):
        state = step(state, ActuatorCommand(), p, 0.05)
        e_new = kinetic_energy(state, p)
        assert e_new <= e * (1 + 1e-12) + 1e-12
        e = e_new


@settings(max_examples=50, deadline=None)
@given(states, throttle, throttle)
def test_heading_wrapped(state, tl, tr):
    p = P
    for _ in range(20):
        state = step(state, ActuatorCommand(tl, tr), p, 0.5)
        assert -math.pi < state.heading <= math.pi


@given(st.floats(-50, 50))
def test_wrap_angle_range(a):
    w = wrap_angle(a)
    assert -math.pi < w <= math.pi
    assert math.cos(w) == pytest.approx(math.cos(a), abs=1e-9)


def test_wrap_angle_boundary():
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(math.pi) == math.pi


def test_course_and_sideslip():
    assert sideslip_angle(VesselState(surge_vel=1.0)) == 0.0
    assert sideslip_angle(VesselState(surge_vel=1.0, sway_vel=1.0)) == pytest.approx(math.pi / 4)
    assert course_angle(VesselState(heading=0.5, surge_vel=2.0)) == pytest.approx(0.5)
    with pytest.raises(SpeedTooLow):
        course_angle(VesselState())
    with pytest.raises(SpeedTooLow):
        sideslip_angle(VesselState(surge_vel=1e-7))
