"""Scripted trials: open-loop spiral and closed-loop fixed-radius turn."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .guidance import Frontseat, Setpoint, Waypoint, los_guidance
from .vessel import (
    SPEED_EPS,
    ActuatorCommand,
    VesselParams,
    VesselState,
    earth_velocity,
    step,
    wrap_angle,
)


@dataclass(frozen=True)
class SpiralSchedule:
    hold_duration: float = 10.0
    ramp_duration: float = 50.0
    throttle_high: float = 1.0
    throttle_low: float = -1.0
    tail_duration: float = 30.0
    ramp_side: str = "left"

    def __post_init__(self):
        if self.hold_duration <= 0 or self.ramp_duration <= 0 or self.tail_duration < 0:
            raise ValueError("durations must be positive")
        if not (-1 <= self.throttle_low <= 1 and -1 <= self.throttle_high <= 1):
            raise ValueError("throttles must lie in [-1, 1]")
        if self.ramp_side not in ("left", "right"):
            raise ValueError("ramp_side is 'left' or 'right'")

    @property
    def total_duration(self) -> float:
        return self.hold_duration + self.ramp_duration + self.tail_duration


def spiral_command(t: float, sched: SpiralSchedule = SpiralSchedule()) -> ActuatorCommand:
    """Open-loop spiral throttles: hold both at high, then ramp one side to low."""
    if t < 0:
        raise ValueError("t must be non-negative")
    hi, lo = sched.throttle_high, sched.throttle_low
    if t < sched.hold_duration:
        ramped = hi
    elif t < sched.hold_duration + sched.ramp_duration:
        ramped = hi + (lo - hi) * (t - sched.hold_duration) / sched.ramp_duration
    else:
        ramped = lo
    if sched.ramp_side == "left":
        return ActuatorCommand(ramped, hi, 0.0, 0.0)
    return ActuatorCommand(hi, ramped, 0.0, 0.0)


@dataclass
class ManeuverLog:
    """Per-step record. Row k holds the state at ``time[k]`` and the command
    applied over the following step."""
    dt: float
    states: list[VesselState] = field(default_factory=list)
    commands: list[ActuatorCommand] = field(default_factory=list)

    def append(self, state: VesselState, cmd: ActuatorCommand) -> None:
        self.states.append(state)
        self.commands.append(cmd)

    def __len__(self) -> int:
        return len(self.states)

    def column(self, name: str) -> np.ndarray:
        """A VesselState field as an array."""
        return np.array([getattr(s, name) for s in self.states])

    def command_column(self, name: str) -> np.ndarray:
        return np.array([getattr(c, name) for c in self.commands])

    @property
    def time(self) -> np.ndarray:
        return self.column("time")

    def course(self) -> np.ndarray:
        out = np.full(len(self), np.nan)
        for k, s in enumerate(self.states):
            vn, ve = earth_velocity(s)
            if math.hypot(vn, ve) > SPEED_EPS:
                out[k] = math.atan2(ve, vn)
        return out

    def sideslip(self) -> np.ndarray:
        u, v = self.column("surge_vel"), self.column("sway_vel")
        out = np.arctan2(v, u)
        out[np.hypot(u, v) <= SPEED_EPS] = np.nan
        return out

    def course_heading_gap(self) -> np.ndarray:
        """|course - heading| per step, radians (NaN at rest)."""
        gap = self.course() - self.column("heading")
        return np.abs(np.arctan2(np.sin(gap), np.cos(gap)))


def run_spiral(params: VesselParams, sched: SpiralSchedule = SpiralSchedule(), dt: float = 0.05,
               initial: VesselState | None = None) -> ManeuverLog:
    state = initial if initial is not None else VesselState()
    log = ManeuverLog(dt)
    n = int(round(sched.total_duration / dt))
    for k in range(n + 1):
        cmd = spiral_command(k * dt, sched)
        log.append(state, cmd)
        if k < n:
            state = step(state, cmd, params, dt)
    return log


def circle_waypoints(radius: float, speed: float, center=(0.0, 0.0), start_bearing: float = math.pi,
                     arc_step: float = math.radians(5.0), clockwise: bool = True) -> list[Waypoint]:
    """One revolution of a circle as chord waypoints. Bearing is measured
    from the centre, clockwise from north."""
    n = int(math.ceil(2 * math.pi / arc_step))
    sign = 1.0 if clockwise else -1.0
    pts = []
    for k in range(n):
        b = start_bearing + sign * 2 * math.pi * k / n
        pts.append(Waypoint(center[0] + radius * math.cos(b), center[1] + radius * math.sin(b), speed, 0.5))
    return pts


def run_fixed_radius_turn(params: VesselParams, radius: float = 20.0, speed: float = 1.0289,
                          revolutions: float = 2.0, dt: float = 0.05, lookahead: float | None = None,
                          frontseat: Frontseat | None = None) -> ManeuverLog:
    """Closed-loop tracking of a clockwise circle with LOS on 5 deg chords.

    The vessel starts on the circle, on course, at the requested speed. A
    segment is left once the along-track position passes its far end.
    """
    if radius <= params.length:
        raise ValueError("radius must exceed the vessel length")
    if not 0 < speed <= params.design_max_speed:
        raise ValueError("speed must lie in (0, V_max]")
    if lookahead is None:
        lookahead = params.length
    pts = circle_waypoints(radius, speed)
    fs = frontseat if frontseat is not None else Frontseat(params)
    start = pts[0]
    chord_heading = math.atan2(pts[1].east - start.east, pts[1].north - start.north)
    state = VesselState(north=start.north, east=start.east, heading=wrap_angle(chord_heading), surge_vel=speed)
    fs.speed.integral = params.surge_drag(speed) / (2 * params.max_thrust)
    n_seg = len(pts)
    seg = 0
    total_segments = int(round(revolutions * n_seg))
    log = ManeuverLog(dt)
    while True:
        prev, nxt = pts[seg % n_seg], pts[(seg + 1) % n_seg]
        los = los_guidance(state, prev, nxt, lookahead)
        while los.along_track >= los.segment_length:
            seg += 1
            prev, nxt = pts[seg % n_seg], pts[(seg + 1) % n_seg]
            los = los_guidance(state, prev, nxt, lookahead)
        if seg >= total_segments:
            log.append(state, ActuatorCommand())
            break
        cmd = fs.command(Setpoint(los.desired_heading, speed), state, dt)
        log.append(state, cmd)
        state = step(state, cmd, params, dt)
    return log


def turning_radius(log: ManeuverLog, window: float = 5.0) -> np.ndarray:
    """Ground speed / |yaw rate|, smoothed by a centred moving average.

    Samples with |r| <= 1e-3 rad/s are infinite; any window touching one
    stays infinite. At the ends the window is truncated.
    """
    n_win = int(round(window / log.dt))
    if n_win < 10:
        raise ValueError("window must cover at least 10 samples")
    u, v, r = log.column("surge_vel"), log.column("sway_vel"), log.column("yaw_rate")
    speed = np.hypot(u, v)
    raw = np.full(len(log), np.inf)
    turning = np.abs(r) > 1e-3
    raw[turning] = speed[turning] / np.abs(r[turning])
    half = n_win // 2
    out = np.empty_like(raw)
    # cumulative sums over finite values plus a count of infinite ones
    finite = np.where(np.isfinite(raw), raw, 0.0)
    csum = np.concatenate(([0.0], np.cumsum(finite)))
    cinf = np.concatenate(([0], np.cumsum(~np.isfinite(raw))))
    for k in range(len(raw)):
        a, b = max(0, k - half), min(len(raw), k + half + 1)
        out[k] = np.inf if cinf[b] - cinf[a] else (csum[b] - csum[a]) / (b - a)
    return out


def mean_radius(log: ManeuverLog, center=(0.0, 0.0), start_fraction: float = 0.5) -> float:
    n, e = log.column("north"), log.column("east")
    k0 = int(len(log) * start_fraction)
    return float(np.mean(np.hypot(n[k0:] - center[0], e[k0:] - center[1])))


def steady_course_heading_gap(log: ManeuverLog, start_fraction: float = 0.5) -> float:
    """Mean |course - heading| over the tail of the log, radians."""
    gap = log.course_heading_gap()
    return float(np.nanmean(gap[int(len(log) * start_fraction):]))
