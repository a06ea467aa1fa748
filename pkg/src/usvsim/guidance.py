"""Frontseat/backseat autonomy stack.

The backseat (mission executive + LOS guidance) produces a ``Setpoint``
(desired heading and speed). The frontseat turns setpoints into an
``ActuatorCommand`` using a PD heading loop and a PI speed loop. The two
layers only exchange ``Setpoint`` values so either side can be replaced.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import InvalidSetpoint
from .vessel import ActuatorCommand, Configuration, VesselParams, VesselState, wrap_angle


def _sat(x: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return lo if x < lo else hi if x > hi else x


@dataclass(frozen=True)
class Waypoint:
    north: float
    east: float
    speed: float
    capture_radius: float = 12.0  # 2 x full-scale length


@dataclass(frozen=True)
class MissionPlan:
    waypoints: tuple[Waypoint, ...]
    home: Waypoint
    loop: bool = False
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("mission needs at least one waypoint")
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if math.hypot(b.north - a.north, b.east - a.east) <= b.capture_radius:
                raise ValueError("consecutive waypoints closer than the capture radius")
        max_speed = self.metadata.get("max_speed")
        for wp in self.waypoints + (self.home,):
            if wp.speed <= 0 or (max_speed is not None and wp.speed > max_speed):
                raise ValueError("waypoint speed must lie in (0, V_max]")
            if wp.capture_radius <= 0:
                raise ValueError("capture_radius must be positive")


class Mode(str, enum.Enum):
    IDLE = "Idle"
    TRANSIT = "Transit"
    SURVEY = "Survey"
    RETURN_HOME = "ReturnHome"
    ABORT = "Abort"


@dataclass(frozen=True)
class ExecutiveState:
    mode: Mode = Mode.IDLE
    active_waypoint_index: int = 0


@dataclass(frozen=True)
class SafetyLimits:
    min_soc_return: float = 0.25
    min_soc_abort: float = 0.1
    geofence: tuple[tuple[float, float], ...] | None = None  # (north, east) vertices

    def __post_init__(self):
        if not self.min_soc_abort < self.min_soc_return:
            raise ValueError("min_soc_abort must be below min_soc_return")


@dataclass(frozen=True)
class Setpoint:
    """Backseat -> frontseat message."""
    heading: float
    speed: float


@dataclass(frozen=True)
class LosOutput:
    desired_heading: float
    crosstrack: float
    along_track: float
    segment_length: float


def los_guidance(state: VesselState, prev: Waypoint, nxt: Waypoint, lookahead: float = 12.0) -> LosOutput:
    """Lookahead line-of-sight steering onto the segment prev -> nxt.

    Crosstrack is positive to starboard of the path direction.
    """
    dn, de = nxt.north - prev.north, nxt.east - prev.east
    seg = math.hypot(dn, de)
    if seg == 0.0:
        raise ValueError("prev and next waypoints coincide")
    if lookahead <= 0:
        raise ValueError("lookahead must be positive")
    azimuth = math.atan2(de, dn)
    c, s = dn / seg, de / seg
    pn, pe = state.north - prev.north, state.east - prev.east
    along = pn * c + pe * s
    cross = -pn * s + pe * c
    return LosOutput(wrap_angle(azimuth - math.atan(cross / lookahead)), cross, along, seg)


@dataclass(frozen=True)
class HeadingGains:
    kp: float
    kd: float


@dataclass(frozen=True)
class SpeedGains:
    kp: float = 0.4
    ki: float = 0.08


def default_heading_gains(configuration: Configuration) -> HeadingGains:
    # tuned once on the default plant for a clean 90 deg step; see tests
    if configuration == Configuration.OUTBOARD_STERN:
        return HeadingGains(kp=6.0, kd=4.0)
    return HeadingGains(kp=4.0, kd=1.0)


def heading_controller(heading_error: float, yaw_rate: float, gains: HeadingGains) -> float:
    """PD law on the (already wrapped) heading error, saturated to [-1, 1]."""
    return _sat(gains.kp * heading_error - gains.kd * yaw_rate)


@dataclass
class SpeedController:
    """PI speed loop producing a common thrust demand in [0, 1].

    The integrator is frozen whenever the output saturates in the direction
    the error would push it (conditional anti-windup).
    """
    gains: SpeedGains = field(default_factory=SpeedGains)
    integral: float = 0.0

    def update(self, setpoint: float, measured: float, dt: float) -> float:
        if setpoint < 0:
            raise InvalidSetpoint("speed setpoint must be non-negative")
        return self.update_error(setpoint - measured, dt)

    def update_error(self, speed_error: float, dt: float) -> float:
        candidate = self.integral + self.gains.ki * speed_error * dt
        raw = self.gains.kp * speed_error + candidate
        out = _sat(raw, 0.0, 1.0)
        if raw == out or (raw > 1.0 and speed_error < 0) or (raw < 0.0 and speed_error > 0):
            self.integral = _sat(candidate, 0.0, 1.0)
        return out


def speed_controller(speed_error: float, controller: SpeedController, dt: float) -> float:
    return controller.update_error(speed_error, dt)


def _signed_sqrt(x: float) -> float:
    return math.copysign(math.sqrt(abs(x)), x)


@dataclass
class Frontseat:
    """Low-level control layer: setpoint in, actuator command out.

    Controllers act on thrust demand; the allocator takes the signed square
    root so that the pods' quadratic thrust law looks linear to the loops.
    """
    params: VesselParams
    heading_gains: HeadingGains | None = None
    speed: SpeedController = field(default_factory=SpeedController)

    def __post_init__(self):
        if self.heading_gains is None:
            self.heading_gains = default_heading_gains(self.params.configuration)

    def command(self, setpoint: Setpoint, state: VesselState, dt: float) -> ActuatorCommand:
        if setpoint.speed < 0:
            raise InvalidSetpoint("speed setpoint must be non-negative")
        error = wrap_angle(setpoint.heading - state.heading)
        turn = heading_controller(error, state.yaw_rate, self.heading_gains)
        common = self.speed.update(setpoint.speed, state.surge_vel, dt)
        if self.params.configuration == Configuration.OUTBOARD_STERN:
            # stern side force to port yaws the bow to starboard
            limit = self.params.actuators[0].azimuth_range
            thr = _signed_sqrt(common)
            return ActuatorCommand(thr, thr, -turn * limit, -turn * limit)
        left = _sat(common + turn)
        right = _sat(common - turn)
        return ActuatorCommand(_signed_sqrt(left), _signed_sqrt(right), 0.0, 0.0)


def point_in_polygon(north: float, east: float, polygon) -> bool:
    inside = False
    n = len(polygon)
    for i in range(n):
        n1, e1 = polygon[i]
        n2, e2 = polygon[(i + 1) % n]
        if (e1 > east) != (e2 > east):
            n_cross = n1 + (east - e1) * (n2 - n1) / (e2 - e1)
            if north < n_cross:
                inside = not inside
    return inside


def start_mission(plan: MissionPlan) -> ExecutiveState:
    return ExecutiveState(Mode.TRANSIT, 0)


def _reached(state: VesselState, wp: Waypoint) -> bool:
    return math.hypot(state.north - wp.north, state.east - wp.east) <= wp.capture_radius


def _passed(state: VesselState, prev: Waypoint, wp: Waypoint) -> bool:
    """True once the vessel is beyond the line through ``wp`` normal to the leg."""
    dn, de = wp.north - prev.north, wp.east - prev.east
    return (state.north - wp.north) * dn + (state.east - wp.east) * de >= 0.0


def executive_step(exec_state: ExecutiveState, plan: MissionPlan, state: VesselState,
                   plant, limits: SafetyLimits) -> ExecutiveState:
    """One tick of the backseat mission state machine.

    A waypoint counts as reached inside its capture radius, or (after the
    first) once the vessel has passed it along the leg, so an overshoot
    does not turn into circling.

    ``plant`` is a PowerPlant or a bare state of charge. Abort is absorbing;
    ReturnHome can only end in Idle (home reached) or Abort. A low battery
    sends every other mode home, except Idle already at home (which would
    otherwise bounce between Idle and ReturnHome).
    """
    soc = float(getattr(plant, "soc", plant))
    mode, idx = exec_state.mode, exec_state.active_waypoint_index
    if mode == Mode.ABORT:
        return exec_state
    if soc < limits.min_soc_abort:
        return ExecutiveState(Mode.ABORT, idx)
    if limits.geofence is not None and not point_in_polygon(state.north, state.east, limits.geofence):
        return ExecutiveState(Mode.ABORT, idx)
    if mode == Mode.RETURN_HOME:
        return ExecutiveState(Mode.IDLE, idx) if _reached(state, plan.home) else exec_state
    if soc < limits.min_soc_return:
        if mode == Mode.IDLE and _reached(state, plan.home):
            return exec_state
        return ExecutiveState(Mode.RETURN_HOME, idx)
    if mode == Mode.IDLE:
        return exec_state

    target = plan.waypoints[idx]
    if _reached(state, target) or (idx > 0 and _passed(state, plan.waypoints[idx - 1], target)):
        if idx + 1 < len(plan.waypoints):
            return ExecutiveState(Mode.SURVEY, idx + 1)
        if plan.loop and len(plan.waypoints) > 1:
            return ExecutiveState(Mode.SURVEY, 0)
        last = plan.waypoints[-1]
        if (plan.home.north, plan.home.east) != (last.north, last.east):
            return ExecutiveState(Mode.RETURN_HOME, idx)
        return ExecutiveState(Mode.IDLE, idx)
    return exec_state


@dataclass
class Backseat:
    """Mission layer: executive + LOS guidance, emits setpoints."""
    plan: MissionPlan
    limits: SafetyLimits = field(default_factory=SafetyLimits)
    lookahead: float = 12.0
    state: ExecutiveState = field(default_factory=ExecutiveState)
    _origin: tuple[float, float] | None = None

    def start(self, vessel: VesselState) -> None:
        self.state = start_mission(self.plan)
        self._origin = (vessel.north, vessel.east)

    def update(self, vessel: VesselState, soc: float) -> Setpoint | None:
        before = self.state.mode
        self.state = executive_step(self.state, self.plan, vessel, soc, self.limits)
        mode = self.state.mode
        if mode in (Mode.IDLE, Mode.ABORT):
            return None
        if mode == Mode.RETURN_HOME:
            if before != Mode.RETURN_HOME:
                self._origin = (vessel.north, vessel.east)
            target, prev = self.plan.home, self._prev_point(vessel)
        else:
            idx = self.state.active_waypoint_index
            target = self.plan.waypoints[idx]
            prev = self.plan.waypoints[idx - 1] if idx > 0 else self._prev_point(vessel)
        if math.hypot(target.north - prev.north, target.east - prev.east) < 1e-9:
            return Setpoint(math.atan2(target.east - vessel.east, target.north - vessel.north), target.speed)
        return Setpoint(los_guidance(vessel, prev, target, self.lookahead).desired_heading, target.speed)

    def _prev_point(self, vessel: VesselState) -> Waypoint:
        n, e = self._origin if self._origin is not None else (vessel.north, vessel.east)
        return Waypoint(n, e, 1.0, 1.0)
