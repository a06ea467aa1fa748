"""3-DoF maneuvering model of a twin-pod catamaran.

Sign conventions (used everywhere in the package):

* Earth frame is north-east-down. ``north``/``east`` in metres.
* Body frame: x forward, y to starboard, z down.
* Heading is measured clockwise from north and wrapped to (-pi, pi].
* Positive yaw rate turns the bow to starboard.
* Pod azimuth 0 pushes along +x; positive azimuth rotates the thrust
  vector towards +y (starboard).

The equations of motion are the usual rigid-body plus added-mass model
with linear and quadratic damping and a sway/yaw cross-coupling::

    (m + Xa) du/dt = X + (m + Ya) v r - X_u u - X_uu u|u|
    (m + Ya) dv/dt = Y - (m + Xa) u r - Y_v v - Y_vv v|v| - Y_r r
    (Iz + Na) dr/dt = N - (Ya - Xa) u v - N_v v - N_r r - N_rr r|r|

where ``Xa, Ya, Na`` are the (positive) added masses/inertia.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .errors import NonFiniteState, SpeedTooLow

KNOT = 1852.0 / 3600.0  # m/s


class Configuration(str, enum.Enum):
    SYMMETRIC_PODS = "SymmetricPods"
    OUTBOARD_STERN = "OutboardStern"


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


@dataclass(frozen=True)
class ActuatorGeometry:
    longitudinal_offset: float  # m, + forward
    lateral_offset: float  # m, + starboard
    steerable: bool = True
    azimuth_range: float = math.pi  # rad, symmetric limit +-range

    def __post_init__(self):
        if not 0.0 <= self.azimuth_range <= math.pi:
            raise ValueError("azimuth_range must lie in [0, pi]")


@dataclass(frozen=True)
class VesselParams:
    length: float
    beam: float
    mass: float
    yaw_inertia: float
    added_mass_surge: float
    added_mass_sway: float
    added_inertia_yaw: float
    # linear damping
    X_u: float
    Y_v: float
    N_r: float
    # quadratic damping
    X_uu: float
    Y_vv: float
    N_rr: float
    # sway/yaw cross coupling
    Y_r: float
    N_v: float
    actuators: tuple[ActuatorGeometry, ...]
    pod_max_shaft_power: float = 4300.0
    pod_max_rpm: float = 1350.0
    propulsive_efficiency: float = 0.5
    drive_efficiency: float = 0.9
    design_max_speed: float = 8.0 * KNOT
    azimuth_rate_limit: float = math.radians(60.0)
    configuration: Configuration = Configuration.SYMMETRIC_PODS

    def __post_init__(self):
        if self.mass <= 0 or self.yaw_inertia <= 0:
            raise ValueError("mass and yaw_inertia must be positive")
        for name in ("added_mass_surge", "added_mass_sway", "added_inertia_yaw",
                     "X_u", "Y_v", "N_r", "X_uu", "Y_vv", "N_rr"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0.0 < self.propulsive_efficiency <= 1.0:
            raise ValueError("propulsive_efficiency must lie in (0, 1]")
        if not 0.0 < self.drive_efficiency <= 1.0:
            raise ValueError("drive_efficiency must lie in (0, 1]")
        if len(self.actuators) != 2:
            raise ValueError("exactly two actuators (left, right) are modelled")
        left, right = self.actuators
        if self.configuration == Configuration.SYMMETRIC_PODS:
            if (left.longitudinal_offset != 0.0 or right.longitudinal_offset != 0.0
                    or left.lateral_offset != -right.lateral_offset
                    or left.azimuth_range != right.azimuth_range):
                raise ValueError("SymmetricPods requires mirror-symmetric pods amidships")
        else:
            stern = -self.length / 2.0
            if left.longitudinal_offset != stern or right.longitudinal_offset != stern:
                raise ValueError("OutboardStern requires actuators at x = -length/2")

    @property
    def max_thrust(self) -> float:
        """Per-pod bollard thrust at full throttle, N."""
        return self.propulsive_efficiency * self.pod_max_shaft_power / self.design_max_speed

    @property
    def surge_mass(self) -> float:
        return self.mass + self.added_mass_surge

    @property
    def sway_mass(self) -> float:
        return self.mass + self.added_mass_sway

    @property
    def yaw_mass(self) -> float:
        return self.yaw_inertia + self.added_inertia_yaw

    def surge_drag(self, u: float) -> float:
        return self.X_u * u + self.X_uu * u * abs(u)


def default_nukhada_params() -> VesselParams:
    """Full-scale catamaran defaults.

    Only length, beam, mass and pod power/rpm are published figures. The
    hydrodynamic coefficients are calibrated stand-ins chosen to reproduce
    the published 8 kn top speed, a small drift angle in turns and a stable
    straight-line motion; they are not measurements.
    """
    length, beam, mass = 6.0, 3.5, 500.0  # published hull size and dry weight
    v_max = 8.0 * KNOT  # published top speed
    eta = 0.5  # assumed propulsive efficiency
    p_max = 4300.0  # published shaft power per pod
    t_max = eta * p_max / v_max
    x_u = 100.0  # calibrated, sets low-speed drag
    x_uu = (2.0 * t_max - x_u * v_max) / v_max**2  # force balance at top speed
    pod_y = 1.5  # demi-hull centreline, assumed
    return VesselParams(
        length=length,
        beam=beam,
        mass=mass,
        yaw_inertia=mass * (length**2 + beam**2) / 12.0,  # uniform rectangle
        added_mass_surge=25.0,  # calibrated, ~5% of mass
        added_mass_sway=300.0,  # calibrated slender-hull estimate
        added_inertia_yaw=450.0,  # calibrated
        X_u=x_u,
        Y_v=1500.0,  # calibrated
        N_r=6000.0,  # calibrated, order of Y_v L^2 / 12
        X_uu=x_uu,
        Y_vv=400.0,  # calibrated
        N_rr=1500.0,  # calibrated
        Y_r=50.0,  # calibrated, small for a double-ended hull
        N_v=400.0,  # calibrated
        actuators=(
            ActuatorGeometry(0.0, -pod_y, True, math.pi),
            ActuatorGeometry(0.0, pod_y, True, math.pi),
        ),
        pod_max_shaft_power=p_max,
        pod_max_rpm=1350.0,  # published
        propulsive_efficiency=eta,
        drive_efficiency=0.9,  # assumed
        design_max_speed=v_max,
        azimuth_rate_limit=math.radians(60.0),  # assumed
        configuration=Configuration.SYMMETRIC_PODS,
    )


def outboard_variant(params: VesselParams, rudder_limit: float = math.radians(35.0)) -> VesselParams:
    """Same hull, but both thrusters moved to the transom and limited like rudders."""
    stern = -params.length / 2.0
    left, right = params.actuators
    return replace(
        params,
        actuators=(
            ActuatorGeometry(stern, left.lateral_offset, True, rudder_limit),
            ActuatorGeometry(stern, right.lateral_offset, True, rudder_limit),
        ),
        configuration=Configuration.OUTBOARD_STERN,
    )


@dataclass(frozen=True)
class VesselState:
    north: float = 0.0
    east: float = 0.0
    heading: float = 0.0
    surge_vel: float = 0.0
    sway_vel: float = 0.0
    yaw_rate: float = 0.0
    time: float = 0.0
    # actual (slewed) pod angles; the commanded ones live in ActuatorCommand
    azimuth_left: float = 0.0
    azimuth_right: float = 0.0

    def mirrored(self) -> "VesselState":
        """Reflect about the north axis (east -> -east, heading -> -heading)."""
        return VesselState(self.north, -self.east, wrap_angle(-self.heading), self.surge_vel,
                           -self.sway_vel, -self.yaw_rate, self.time,
                           -self.azimuth_right, -self.azimuth_left)


@dataclass(frozen=True)
class ActuatorCommand:
    throttle_left: float = 0.0
    throttle_right: float = 0.0
    azimuth_left: float = 0.0
    azimuth_right: float = 0.0

    def clamped(self, params: VesselParams) -> "ActuatorCommand":
        left, right = params.actuators
        return ActuatorCommand(
            _clamp(self.throttle_left, -1.0, 1.0),
            _clamp(self.throttle_right, -1.0, 1.0),
            _clamp(self.azimuth_left, -left.azimuth_range, left.azimuth_range) if left.steerable else 0.0,
            _clamp(self.azimuth_right, -right.azimuth_range, right.azimuth_range) if right.steerable else 0.0,
        )

    def mirrored(self) -> "ActuatorCommand":
        return ActuatorCommand(self.throttle_right, self.throttle_left,
                               -self.azimuth_right, -self.azimuth_left)


class BodyWrench(NamedTuple):
    X: float
    Y: float
    N_moment: float


class StateDerivative(NamedTuple):
    north_dot: float
    east_dot: float
    heading_dot: float
    surge_dot: float
    sway_dot: float
    yaw_rate_dot: float


def pod_thrust(throttle: float, t_max: float) -> float:
    return t_max * throttle * abs(throttle)


def actuator_forces(cmd: ActuatorCommand, params: VesselParams,
                    state: VesselState | None = None) -> BodyWrench:
    """Sum of pod forces and their moments about the body origin.

    Thrust directions use the actual pod angles carried by ``state``; when
    ``state`` is None the commanded azimuths are used directly.
    """
    cmd = cmd.clamped(params)
    if state is None:
        az = (cmd.azimuth_left, cmd.azimuth_right)
    else:
        az = (state.azimuth_left, state.azimuth_right)
    t_max = params.max_thrust
    X = Y = N = 0.0
    for geom, throttle, angle in zip(params.actuators, (cmd.throttle_left, cmd.throttle_right), az):
        thrust = pod_thrust(throttle, t_max)
        fx = thrust * math.cos(angle)
        fy = thrust * math.sin(angle)
        X += fx
        Y += fy
        N += geom.longitudinal_offset * fy - geom.lateral_offset * fx
    return BodyWrench(X, Y, N)


def _rhs(heading, u, v, r, X, Y, N, p: VesselParams):
    c, s = math.cos(heading), math.sin(heading)
    mx, my = p.surge_mass, p.sway_mass
    du = (X + my * v * r - p.X_u * u - p.X_uu * u * abs(u)) / mx
    dv = (Y - mx * u * r - p.Y_v * v - p.Y_vv * v * abs(v) - p.Y_r * r) / my
    dr = (N - (p.added_mass_sway - p.added_mass_surge) * u * v - p.N_v * v
          - p.N_r * r - p.N_rr * r * abs(r)) / p.yaw_mass
    return u * c - v * s, u * s + v * c, r, du, dv, dr


def derivatives(state: VesselState, wrench: BodyWrench, params: VesselParams) -> StateDerivative:
    return StateDerivative(*_rhs(state.heading, state.surge_vel, state.sway_vel, state.yaw_rate,
                                 wrench.X, wrench.Y, wrench.N_moment, params))


def _slew(actual: float, commanded: float, max_delta: float) -> float:
    return actual + _clamp(commanded - actual, -max_delta, max_delta)


def step(state: VesselState, cmd: ActuatorCommand, params: VesselParams, dt: float) -> VesselState:
    """Advance one fixed RK4 step; pods are slewed first, then held for the step."""
    if not 0.0 < dt <= 0.5:
        raise ValueError("dt must lie in (0, 0.5] s")
    cmd = cmd.clamped(params)
    max_delta = params.azimuth_rate_limit * dt
    az_l = _slew(state.azimuth_left, cmd.azimuth_left, max_delta)
    az_r = _slew(state.azimuth_right, cmd.azimuth_right, max_delta)
    X, Y, N = actuator_forces(cmd, params, replace(state, azimuth_left=az_l, azimuth_right=az_r))

    n0, e0, h0, u0, v0, r0 = (state.north, state.east, state.heading,
                              state.surge_vel, state.sway_vel, state.yaw_rate)
    half = 0.5 * dt
    k1 = _rhs(h0, u0, v0, r0, X, Y, N, params)
    k2 = _rhs(h0 + half * k1[2], u0 + half * k1[3], v0 + half * k1[4], r0 + half * k1[5], X, Y, N, params)
    k3 = _rhs(h0 + half * k2[2], u0 + half * k2[3], v0 + half * k2[4], r0 + half * k2[5], X, Y, N, params)
    k4 = _rhs(h0 + dt * k3[2], u0 + dt * k3[3], v0 + dt * k3[4], r0 + dt * k3[5], X, Y, N, params)
    sixth = dt / 6.0
    inc = [sixth * (a + 2.0 * b + 2.0 * c + d) for a, b, c, d in zip(k1, k2, k3, k4)]
    new = VesselState(
        north=n0 + inc[0],
        east=e0 + inc[1],
        heading=wrap_angle(h0 + inc[2]),
        surge_vel=u0 + inc[3],
        sway_vel=v0 + inc[4],
        yaw_rate=r0 + inc[5],
        time=state.time + dt,
        azimuth_left=az_l,
        azimuth_right=az_r,
    )
    if not all(math.isfinite(x) for x in (new.north, new.east, new.heading,
                                          new.surge_vel, new.sway_vel, new.yaw_rate)):
        raise NonFiniteState(f"non-finite state at t={new.time:.3f} s")
    return new


def earth_velocity(state: VesselState) -> tuple[float, float]:
    """(north, east) velocity over ground."""
    c, s = math.cos(state.heading), math.sin(state.heading)
    u, v = state.surge_vel, state.sway_vel
    return u * c - v * s, u * s + v * c


SPEED_EPS = 1e-6


def course_angle(state: VesselState) -> float:
    vn, ve = earth_velocity(state)
    if math.hypot(vn, ve) <= SPEED_EPS:
        raise SpeedTooLow("course undefined below 1e-6 m/s")
    return math.atan2(ve, vn)


def sideslip_angle(state: VesselState) -> float:
    if math.hypot(state.surge_vel, state.sway_vel) <= SPEED_EPS:
        raise SpeedTooLow("sideslip undefined below 1e-6 m/s")
    return math.atan2(state.sway_vel, state.surge_vel)


def kinetic_energy(state: VesselState, params: VesselParams) -> float:
    """Kinetic energy including added mass, J."""
    return 0.5 * (params.surge_mass * state.surge_vel**2 + params.sway_mass * state.sway_vel**2
                  + params.yaw_mass * state.yaw_rate**2)


def steady_surge_throttle(params: VesselParams, speed: float) -> float:
    """Equal throttle on both pods that holds ``speed`` in straight running."""
    fraction = params.surge_drag(speed) / (2.0 * params.max_thrust)
    return math.copysign(math.sqrt(abs(fraction)), fraction)
