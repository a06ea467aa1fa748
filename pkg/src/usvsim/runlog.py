"""Time-indexed run record and its CSV form.

The CSV starts with ``# key: value`` header lines, then one column-name
row, then one row per step. Numbers use 9 significant digits so the bytes
are stable across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyLog
from .maneuvers import ManeuverLog
from .power import PowerPlant, propulsion_power, update_energy
from .vessel import ActuatorCommand, VesselParams, VesselState

FORMAT_VERSION = "1"

STATE_COLUMNS = ("time", "north", "east", "heading", "surge_vel", "sway_vel", "yaw_rate",
                 "azimuth_left", "azimuth_right")
COMMAND_COLUMNS = ("throttle_left", "throttle_right", "cmd_azimuth_left", "cmd_azimuth_right")
TELEMETRY_COLUMNS = ("mode", "soc", "power")


def run_log_columns() -> tuple[str, ...]:
    return STATE_COLUMNS + COMMAND_COLUMNS + TELEMETRY_COLUMNS


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{x:.9g}"


@dataclass
class RunLog:
    columns: tuple[str, ...]
    header: dict = field(default_factory=dict)
    rows: list[tuple] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def append_step(self, state: VesselState, cmd: ActuatorCommand | None, mode: str,
                    soc: float, power: float) -> None:
        """Row = state at t_k, command held over the next step (zeros on the final row)."""
        if cmd is None:
            cmd = ActuatorCommand(0.0, 0.0, state.azimuth_left, state.azimuth_right)
        self.rows.append((state.time, state.north, state.east, state.heading, state.surge_vel,
                          state.sway_vel, state.yaw_rate, state.azimuth_left, state.azimuth_right,
                          cmd.throttle_left, cmd.throttle_right, cmd.azimuth_left, cmd.azimuth_right,
                          mode, soc, power))

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        values = [row[i] for row in self.rows]
        return np.array(values) if name != "mode" else np.array(values, dtype=object)

    @property
    def dt(self) -> float:
        return float(self.header["dt"])

    def states(self) -> list[VesselState]:
        idx = [self.columns.index(c) for c in STATE_COLUMNS]
        fields = ("time", "north", "east", "heading", "surge_vel", "sway_vel", "yaw_rate",
                  "azimuth_left", "azimuth_right")
        return [VesselState(**{f: float(row[i]) for f, i in zip(fields, idx)}) for row in self.rows]

    def commands(self) -> list[ActuatorCommand]:
        idx = [self.columns.index(c) for c in COMMAND_COLUMNS]
        return [ActuatorCommand(*(float(row[i]) for i in idx)) for row in self.rows]

    def to_maneuver_log(self) -> ManeuverLog:
        if not self.rows:
            raise EmptyLog("run log has no rows")
        log = ManeuverLog(self.dt)
        for s, c in zip(self.states(), self.commands()):
            log.append(s, c)
        return log

    @classmethod
    def from_maneuver(cls, log: ManeuverLog, params: VesselParams, mode: str = "Maneuver",
                      plant: PowerPlant | None = None, header: dict | None = None) -> "RunLog":
        """Wrap a maneuver record, integrating battery-only SOC from pod power."""
        plant = plant if plant is not None else PowerPlant()
        out = cls(run_log_columns(), {"dt": log.dt, **(header or {})})
        last = len(log) - 1
        for k, (s, c) in enumerate(zip(log.states, log.commands)):
            power = propulsion_power(c, params) if k < last else 0.0
            out.append_step(s, c if k < last else None, mode, plant.soc, power)
            if k < last:
                plant = update_energy(plant, power, None, log.dt)
        return out

    def to_csv(self) -> str:
        lines = [f"# format_version: {FORMAT_VERSION}"]
        for key in sorted(self.header):
            lines.append(f"# {key}: {_fmt(self.header[key])}")
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_fmt(x) for x in row))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "RunLog":
        header: dict = {}
        lines = text.splitlines()
        i = 0
        while i < len(lines) and lines[i].startswith("#"):
            key, _, value = lines[i][1:].partition(":")
            header[key.strip()] = _parse_scalar(value.strip())
            i += 1
        if i >= len(lines):
            raise EmptyLog("no column row in log")
        columns = tuple(lines[i].split(","))
        rows = []
        for line in lines[i + 1:]:
            if line.strip():
                rows.append(tuple(_parse_scalar(x) for x in line.split(",")))
        header.pop("format_version", None)
        return cls(columns, header, rows)

    @classmethod
    def read(cls, path) -> "RunLog":
        with open(path, encoding="utf-8") as f:
            return cls.from_csv(f.read())


def _parse_scalar(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text
