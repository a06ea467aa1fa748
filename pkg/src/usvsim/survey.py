"""Simulated single-beam bathymetric survey and IDW gridding."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .guidance import Backseat, Frontseat, MissionPlan, Mode, SafetyLimits
from .power import GeneratorPolicy, PowerPlant, propulsion_power, update_energy
from .runlog import RunLog, run_log_columns
from .vessel import VesselParams, VesselState, step, wrap_angle


class SeabedKind(str, enum.Enum):
    CONSTANT = "Constant"
    PLANAR = "Planar"
    SMOOTH_FIELD = "SmoothField"


@dataclass(frozen=True)
class SeabedModel:
    """Analytic seabed depth (positive down, metres).

    SmoothField depth is ``base + sum(a * sin(kx*east + ky*north + phase))``
    over ``harmonics``; amplitudes are scaled at construction so the field
    can never leave ``bounds``.
    """
    kind: SeabedKind
    base: float
    gradient_east: float = 0.0
    gradient_north: float = 0.0
    harmonics: tuple[tuple[float, float, float, float], ...] = ()  # (amp, kx, ky, phase)
    bounds: tuple[float, float] = (0.0, math.inf)
    extent: tuple[float, float, float, float] | None = None  # east_min, north_min, east_max, north_max

    def __post_init__(self):
        if self.bounds[0] <= 0 and self.kind != SeabedKind.PLANAR:
            object.__setattr__(self, "bounds", (min(self.base, 1e-9), self.bounds[1]))

    @classmethod
    def constant(cls, depth: float) -> "SeabedModel":
        if depth <= 0:
            raise ValueError("depth must be positive")
        return cls(SeabedKind.CONSTANT, depth, bounds=(depth, depth))

    @classmethod
    def planar(cls, base: float, gradient_east: float = 0.0, gradient_north: float = 0.0,
               extent=None) -> "SeabedModel":
        if extent is None:
            bounds = (0.0, math.inf)
        else:
            corners = [base + gradient_east * e + gradient_north * n
                       for e in (extent[0], extent[2]) for n in (extent[1], extent[3])]
            bounds = (min(corners), max(corners))
            if bounds[0] <= 0:
                raise ValueError("planar seabed reaches the surface inside its extent")
        return cls(SeabedKind.PLANAR, base, gradient_east, gradient_north, (), bounds, extent)

    @classmethod
    def smooth_field(cls, bounds: tuple[float, float], n_harmonics: int = 4, seed: int = 0,
                     wavelengths: tuple[float, float] = (40.0, 250.0), margin: float = 0.15) -> "SeabedModel":
        lo, hi = bounds
        if not 0 < lo < hi:
            raise ValueError("need 0 < min depth < max depth")
        rng = np.random.default_rng(seed)
        base = 0.5 * (lo + hi)
        budget = 0.5 * (hi - lo) - margin
        raw = rng.uniform(0.3, 1.0, n_harmonics)
        amps = raw * budget / raw.sum()
        harmonics = []
        for a in amps:
            k = 2 * math.pi / rng.uniform(*wavelengths)
            theta = rng.uniform(0, 2 * math.pi)
            harmonics.append((float(a), k * math.cos(theta), k * math.sin(theta),
                              float(rng.uniform(0, 2 * math.pi))))
        return cls(SeabedKind.SMOOTH_FIELD, base, harmonics=tuple(harmonics), bounds=(lo, hi))

    @classmethod
    def creek(cls, seed: int = 0) -> "SeabedModel":
        """Default synthetic creek bed, 3.0 - 6.5 m deep."""
        return cls.smooth_field((3.0, 6.5), seed=seed)

    def depth(self, east, north):
        """Vectorised depth; accepts scalars or arrays."""
        if self.extent is not None:
            e0, n0, e1, n1 = self.extent
            ea, na = np.asarray(east), np.asarray(north)
            if np.any((ea < e0) | (ea > e1) | (na < n0) | (na > n1)):
                raise ValueError("point outside the seabed extent")
        d = self.base + self.gradient_east * east + self.gradient_north * north
        for a, kx, ky, ph in self.harmonics:
            d = d + a * np.sin(kx * east + ky * north + ph)
        return d


def sample_depth(seabed: SeabedModel, east: float, north: float) -> float:
    return float(seabed.depth(east, north))


@dataclass(frozen=True)
class Ping:
    time: float
    east: float
    north: float
    depth: float
    valid: bool = True


@dataclass
class SurveyResult:
    log: RunLog
    pings: list[Ping]
    truncated: bool
    final_mode: Mode
    plant: PowerPlant
    duration: float


def simulate_survey(plan: MissionPlan, seabed: SeabedModel | None, params: VesselParams, plant: PowerPlant,
                    ping_rate: float = 1.0, dt: float = 0.05, noise_sigma: float = 0.02, seed: int = 0,
                    limits: SafetyLimits = SafetyLimits(), policy: GeneratorPolicy | None = None,
                    lookahead: float | None = None, max_time: float | None = None,
                    initial_state: VesselState | None = None, frontseat: Frontseat | None = None,
                    log_every: int = 1) -> SurveyResult:
    """Closed-loop survey run: backseat -> frontseat -> vessel + energy, with pings.

    Runs until the executive goes Idle (complete) or Abort (truncated), or
    ``max_time`` elapses (also truncated). With ``seabed=None`` no pings
    are taken, which makes this a plain mission run.
    """
    if not 0 < ping_rate <= 1.0 / dt:
        raise ValueError("ping_rate must lie in (0, 1/dt]")
    rng = np.random.default_rng(seed)
    wps = plan.waypoints
    if initial_state is None:
        first = wps[0]
        nxt = wps[1] if len(wps) > 1 else plan.home
        heading = math.atan2(nxt.east - first.east, nxt.north - first.north) if nxt != first else 0.0
        initial_state = VesselState(first.north, first.east, wrap_angle(heading))
    if max_time is None:
        max_time = 3.0 * plan.metadata.get("predicted_duration_h", 1.0) * 3600.0 + 600.0
    backseat = Backseat(plan, limits, lookahead if lookahead is not None else 2.0 * params.length)
    frontseat = frontseat if frontseat is not None else Frontseat(params)
    state = initial_state
    backseat.start(state)
    log = RunLog(run_log_columns(), {"dt": dt, "seed": seed, "ping_rate": ping_rate,
                                     "noise_sigma": noise_sigma})
    pings: list[Ping] = []
    next_ping = 0
    k = 0
    n_max = int(math.ceil(max_time / dt))
    truncated = False
    while True:
        setpoint = backseat.update(state, plant.soc)
        mode = backseat.state.mode
        if setpoint is None:
            truncated = mode == Mode.ABORT
            break
        if k >= n_max:
            truncated = True
            break
        cmd = frontseat.command(setpoint, state, dt)
        power = propulsion_power(cmd, params)
        while seabed is not None and next_ping / ping_rate <= state.time - initial_state.time + 1e-9:
            d = sample_depth(seabed, state.east, state.north)
            if noise_sigma > 0:
                d += noise_sigma * rng.standard_normal()
            pings.append(Ping(state.time, state.east, state.north, d, d > 0))
            next_ping += 1
        if k % log_every == 0:
            log.append_step(state, cmd, mode.value, plant.soc, power)
        plant = update_energy(plant, power, policy, dt)
        state = step(state, cmd, params, dt)
        k += 1
    log.append_step(state, None, mode.value, plant.soc, 0.0)
    return SurveyResult(log, pings, truncated, mode, plant, state.time - initial_state.time)


@dataclass
class BathyGrid:
    origin: tuple[float, float]  # (east, north) of the south-west corner
    cell_size: float
    values: np.ndarray  # (nrows, ncols), row 0 is the southern row
    nodata: float = -9999.0

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def mask(self) -> np.ndarray:
        """True where a value exists."""
        return self.values != self.nodata

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        e = self.origin[0] + (np.arange(self.width) + 0.5) * self.cell_size
        n = self.origin[1] + (np.arange(self.height) + 0.5) * self.cell_size
        return np.meshgrid(e, n)

    def to_esri_ascii(self) -> str:
        lines = [
            f"ncols {self.width}",
            f"nrows {self.height}",
            f"xllcorner {self.origin[0]:.9g}",
            f"yllcorner {self.origin[1]:.9g}",
            f"cellsize {self.cell_size:.9g}",
            f"NODATA_value {self.nodata:.9g}",
        ]
        for row in self.values[::-1]:
            lines.append(" ".join(f"{v:.9g}" for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_esri_ascii(cls, text: str) -> "BathyGrid":
        lines = text.strip().splitlines()
        header = {}
        for line in lines[:6]:
            key, value = line.split()
            header[key.lower()] = float(value)
        rows = np.array([[float(x) for x in line.split()] for line in lines[6:]])
        rows = rows.reshape(int(header["nrows"]), int(header["ncols"]))
        return cls((header["xllcorner"], header["yllcorner"]), header["cellsize"], rows[::-1].copy(),
                   header["nodata_value"])


def grid_bathymetry(pings: list[Ping], cell_size: float, search_radius: float, power: float = 2.0,
                    origin: tuple[float, float] | None = None, shape: tuple[int, int] | None = None,
                    nodata: float = -9999.0) -> BathyGrid:
    """Inverse-distance-weighted grid of valid pings.

    Each cell takes the IDW mean of pings within ``search_radius`` of its
    centre; a ping closer than 1e-9 m to the centre wins outright. Cells
    with no ping in range are ``nodata``. By default the grid starts at the
    south-west ping and covers every ping.
    """
    valid = [p for p in pings if p.valid]
    if not valid:
        raise ValueError("need at least one valid ping")
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    if search_radius < cell_size:
        raise ValueError("search_radius must be at least cell_size")
    data = np.array([(p.east, p.north, p.depth) for p in valid])
    # canonical order makes the floating-point sums independent of input order
    data = data[np.lexsort((data[:, 2], data[:, 1], data[:, 0]))]
    xy, z = data[:, :2], data[:, 2]
    if origin is None:
        origin = (float(xy[:, 0].min()), float(xy[:, 1].min()))
    if shape is None:
        shape = (int(math.floor((xy[:, 1].max() - origin[1]) / cell_size)) + 1,
                 int(math.floor((xy[:, 0].max() - origin[0]) / cell_size)) + 1)
    grid = BathyGrid(origin, cell_size, np.full(shape, nodata, dtype=float), nodata)
    ce, cn = grid.cell_centers()
    centers = np.column_stack([ce.ravel(), cn.ravel()])
    tree = cKDTree(xy)
    hits = tree.query_ball_point(centers, search_radius)
    counts = np.fromiter((len(h) for h in hits), dtype=int, count=len(hits))
    out = np.full(len(centers), nodata)
    if counts.sum():
        cell_idx = np.repeat(np.arange(len(centers)), counts)
        ping_idx = np.concatenate([np.sort(np.asarray(h, dtype=int)) for h in hits if h])
        dist = np.hypot(*(xy[ping_idx] - centers[cell_idx]).T)
        exact = dist < 1e-9
        w = np.where(exact, 0.0, 1.0 / np.maximum(dist, 1e-9) ** power)
        num = np.bincount(cell_idx, w * z[ping_idx], len(centers))
        den = np.bincount(cell_idx, w, len(centers))
        ex_num = np.bincount(cell_idx, exact * z[ping_idx], len(centers))
        ex_den = np.bincount(cell_idx, exact.astype(float), len(centers))
        has = counts > 0
        val = np.where(ex_den > 0, ex_num / np.where(ex_den > 0, ex_den, 1.0),
                       num / np.where(den > 0, den, 1.0))
        # IDW is a convex combination; clip only removes last-ulp rounding
        val = np.clip(val, z.min(), z.max())
        out[has] = val[has]
    grid.values = out.reshape(shape)
    return grid


def pings_to_csv(pings: list[Ping]) -> str:
    lines = ["time,east,north,depth,valid"]
    for p in pings:
        lines.append(f"{p.time:.9g},{p.east:.9g},{p.north:.9g},{p.depth:.9g},{int(p.valid)}")
    return "\n".join(lines) + "\n"


def pings_from_csv(text: str) -> list[Ping]:
    rows = text.strip().splitlines()[1:]
    out = []
    for row in rows:
        t, e, n, d, v = row.split(",")
        out.append(Ping(float(t), float(e), float(n), float(d), v.strip() in ("1", "True", "true")))
    return out
