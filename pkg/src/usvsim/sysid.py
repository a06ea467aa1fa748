"""Least-squares identification of hydrodynamic coefficients from logs.

Each logged sample contributes three rows (surge, sway, yaw). The equations
of motion are rearranged so that the unknown coefficients multiply known
signals and everything else moves to the target::

    X - m du + m v r = Xa du - Ya v r + X_u u + X_uu u|u|
    Y - m dv - m u r = Ya dv + Xa u r + Y_v v + Y_vv v|v| + Y_r r
    N - Iz dr        = Na dr + (Ya - Xa) u v + N_v v + N_r r + N_rr r|r|

Accelerations come from central differences of the logged velocities. The
actuator wrench paired with a central difference is the mean of the wrench
applied over the two adjacent steps, which matches what the difference
actually measures when commands change between steps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import RankDeficient
from .maneuvers import ManeuverLog
from .vessel import VesselParams, VesselState, actuator_forces, step

DAMPING_COEFFICIENTS = ("X_u", "X_uu", "Y_v", "Y_vv", "Y_r", "N_v", "N_r", "N_rr")
ADDED_MASS_COEFFICIENTS = ("added_mass_surge", "added_mass_sway", "added_inertia_yaw")
ALL_COEFFICIENTS = DAMPING_COEFFICIENTS + ADDED_MASS_COEFFICIENTS

DOF_NAMES = ("surge", "sway", "yaw")

SINGULAR_TOL = 1e-8


@dataclass(frozen=True)
class IdentConfig:
    """Which coefficients are free; the rest are taken from the known params."""
    free: tuple[str, ...] = DAMPING_COEFFICIENTS

    def __post_init__(self):
        unknown = set(self.free) - set(ALL_COEFFICIENTS)
        if unknown:
            raise ValueError(f"unknown coefficients: {sorted(unknown)}")
        if len(set(self.free)) != len(self.free):
            raise ValueError("duplicate coefficient in config")

    @classmethod
    def with_added_mass(cls) -> "IdentConfig":
        return cls(ALL_COEFFICIENTS)


@dataclass
class RegressorSet:
    matrix: np.ndarray  # (rows, columns)
    target: np.ndarray  # (rows,)
    columns: tuple[str, ...]
    dof: np.ndarray  # (rows,) 0 surge, 1 sway, 2 yaw

    def __post_init__(self):
        if not (np.all(np.isfinite(self.matrix)) and np.all(np.isfinite(self.target))):
            raise ValueError("regressor entries must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def take(self, rows) -> "RegressorSet":
        rows = np.asarray(rows)
        return RegressorSet(self.matrix[rows], self.target[rows], self.columns, self.dof[rows])

    def with_column(self, name: str, values: np.ndarray) -> "RegressorSet":
        return RegressorSet(np.column_stack([self.matrix, values]), self.target,
                            self.columns + (name,), self.dof)


def _signals(u, v, r, du, dv, dr):
    """Per-coefficient regressor signals as (surge, sway, yaw) triples."""
    z = np.zeros_like(u)
    return {
        "X_u": (u, z, z),
        "X_uu": (u * np.abs(u), z, z),
        "Y_v": (z, v, z),
        "Y_vv": (z, v * np.abs(v), z),
        "Y_r": (z, r, z),
        "N_v": (z, z, v),
        "N_r": (z, z, r),
        "N_rr": (z, z, r * np.abs(r)),
        "added_mass_surge": (du, u * r, -u * v),
        "added_mass_sway": (-v * r, dv, u * v),
        "added_inertia_yaw": (z, z, dr),
    }


@dataclass
class LogSignals:
    """Array view of a log: body velocities and the wrench held over each step."""
    dt: float
    u: np.ndarray
    v: np.ndarray
    r: np.ndarray
    wrench: np.ndarray  # (n-1, 3)

    @classmethod
    def from_log(cls, log: ManeuverLog, params: VesselParams) -> "LogSignals":
        steps = np.diff(log.time)
        if not np.allclose(steps, log.dt, rtol=1e-6, atol=1e-9):
            raise ValueError("log time step must be constant")
        return cls(log.dt, log.column("surge_vel"), log.column("sway_vel"), log.column("yaw_rate"),
                   applied_wrenches(log, params))

    def with_noise(self, rel_sigma: float, rng: np.random.Generator) -> "LogSignals":
        """Multiplicative Gaussian noise on u, v and r."""
        g = 1.0 + rel_sigma * rng.standard_normal((3, len(self.u)))
        return LogSignals(self.dt, self.u * g[0], self.v * g[1], self.r * g[2], self.wrench)


def applied_wrenches(log: ManeuverLog, params: VesselParams) -> np.ndarray:
    """Wrench held over each step k -> k+1, shape (n-1, 3).

    Pods are slewed at the start of a step, so the angles in effect are the
    ones stored with the state at k+1. Mirrors ``actuator_forces``.
    """
    left, right = params.actuators
    t_max = params.max_thrust
    X = np.zeros(len(log) - 1)
    Y = np.zeros_like(X)
    N = np.zeros_like(X)
    for geom, side in ((left, "left"), (right, "right")):
        thr = np.clip(log.command_column("throttle_" + side)[:-1], -1.0, 1.0)
        az = log.column("azimuth_" + side)[1:]
        thrust = t_max * thr * np.abs(thr)
        fx, fy = thrust * np.cos(az), thrust * np.sin(az)
        X += fx
        Y += fy
        N += geom.longitudinal_offset * fy - geom.lateral_offset * fx
    return np.column_stack([X, Y, N])


def build_regressor(logs, params_known: VesselParams, config: IdentConfig = IdentConfig(),
                    lag: int = 1) -> RegressorSet:
    """Stack surge/sway/yaw rows from one or more logs.

    ``logs`` may mix ManeuverLog and LogSignals. ``lag`` is the half-width
    (in samples) of the central difference; the first and last ``lag``
    samples of each log are dropped.
    """
    if isinstance(logs, (ManeuverLog, LogSignals)):
        logs = [logs]
    mats, targets, dofs = [], [], []
    p = params_known
    for log in logs:
        sig_log = log if isinstance(log, LogSignals) else LogSignals.from_log(log, p)
        u, v, r, w = sig_log.u, sig_log.v, sig_log.r, sig_log.wrench
        if len(u) < 2 * lag + 1:
            raise ValueError("log too short for the difference stencil")
        k = np.arange(lag, len(u) - lag)
        h = 2 * lag * sig_log.dt
        du = (u[k + lag] - u[k - lag]) / h
        dv = (v[k + lag] - v[k - lag]) / h
        dr = (r[k + lag] - r[k - lag]) / h
        # mean wrench over the 2*lag steps spanned by the stencil
        cw = np.vstack([np.zeros(3), np.cumsum(w, axis=0)])
        wm = (cw[k + lag] - cw[k - lag]) / (2 * lag)
        uk, vk, rk = u[k], v[k], r[k]
        sig = _signals(uk, vk, rk, du, dv, dr)
        y = [wm[:, 0] - p.mass * du + p.mass * vk * rk,
             wm[:, 1] - p.mass * dv - p.mass * uk * rk,
             wm[:, 2] - p.yaw_inertia * dr]
        for name in ALL_COEFFICIENTS:
            if name not in config.free:
                value = getattr(p, name)
                y = [y[i] - value * sig[name][i] for i in range(3)]
        mats.append(np.vstack([np.column_stack([sig[c][i] for c in config.free]) for i in range(3)]))
        targets.append(np.concatenate(y))
        dofs.append(np.repeat([0, 1, 2], len(k)))
    return RegressorSet(np.vstack(mats), np.concatenate(targets), tuple(config.free), np.concatenate(dofs))


@dataclass(frozen=True)
class FitResult:
    estimates: dict[str, float]
    residual_rms: dict[str, float]
    condition: float
    residuals: np.ndarray

    def apply_to(self, params: VesselParams) -> VesselParams:
        return replace(params, **self.estimates)


def fit_coefficients(reg: RegressorSet) -> FitResult:
    """Ordinary least squares with an explicit rank check."""
    n_rows, n_cols = reg.shape
    if n_rows < 10 * n_cols:
        raise ValueError(f"need at least {10 * n_cols} rows, got {n_rows}")
    sv = np.linalg.svd(reg.matrix, compute_uv=False)
    if sv[-1] < SINGULAR_TOL * sv[0]:
        weak = ", ".join(c for c, n in zip(reg.columns, np.linalg.norm(reg.matrix, axis=0)) if n == 0.0)
        raise RankDeficient("regressor is rank deficient (smallest/largest singular value "
                            f"{sv[-1] / sv[0]:.2e})" + (f"; unexcited: {weak}" if weak else ""))
    theta, *_ = np.linalg.lstsq(reg.matrix, reg.target, rcond=None)
    resid = reg.target - reg.matrix @ theta
    rms = {}
    for i, name in enumerate(DOF_NAMES):
        mask = reg.dof == i
        rms[name] = float(np.sqrt(np.mean(resid[mask] ** 2))) if mask.any() else 0.0
    return FitResult(dict(zip(reg.columns, map(float, theta))), rms, float(sv[0] / sv[-1]), resid)


def validate_fit(fit: FitResult, truth: VesselParams) -> list[tuple[str, float, float, float, str]]:
    """(name, estimate, truth, error, kind) per coefficient, in fit order.

    ``kind`` is "relative" unless the true value is ~0, then "absolute".
    """
    report = []
    for name, est in fit.estimates.items():
        true = getattr(truth, name)
        if abs(true) < 1e-9:
            report.append((name, est, true, abs(est - true), "absolute"))
        else:
            report.append((name, est, true, abs(est - true) / abs(true), "relative"))
    return report


def add_velocity_noise(log: ManeuverLog, rel_sigma: float, rng: np.random.Generator) -> ManeuverLog:
    """Copy of ``log`` with multiplicative Gaussian noise on u, v and r."""
    out = ManeuverLog(log.dt)
    for s, c in zip(log.states, log.commands):
        g = 1.0 + rel_sigma * rng.standard_normal(3)
        out.append(replace(s, surge_vel=s.surge_vel * g[0], sway_vel=s.sway_vel * g[1],
                           yaw_rate=s.yaw_rate * g[2]), c)
    return out


def resimulate(log: ManeuverLog, params: VesselParams) -> VesselState:
    """Replay the logged commands from the logged initial state."""
    state = log.states[0]
    for cmd in log.commands[:-1]:
        state = step(state, cmd, params, log.dt)
    return state

