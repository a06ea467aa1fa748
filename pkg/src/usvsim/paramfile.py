"""Human-editable parameter files.

One setting per line::

    # comment
    vessel.mass = 500 kg
    pod.left.lateral_offset = -1.5 m
    control.heading_kp = 4

The trailing token is the unit and must match the schema exactly
(dimensionless keys take no unit). Keys left out keep their defaults.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace

from .errors import ParameterFileError
from .guidance import HeadingGains, SafetyLimits, SpeedGains, default_heading_gains
from .power import GeneratorPolicy, PowerPlant
from .vessel import Configuration, VesselParams, default_nukhada_params

VESSEL_UNITS = {
    "length": "m",
    "beam": "m",
    "mass": "kg",
    "yaw_inertia": "kg*m^2",
    "added_mass_surge": "kg",
    "added_mass_sway": "kg",
    "added_inertia_yaw": "kg*m^2",
    "X_u": "N*s/m",
    "Y_v": "N*s/m",
    "N_r": "N*m*s/rad",
    "X_uu": "N*s^2/m^2",
    "Y_vv": "N*s^2/m^2",
    "N_rr": "N*m*s^2/rad^2",
    "Y_r": "N*s/rad",
    "N_v": "N*s",
    "pod_max_shaft_power": "W",
    "pod_max_rpm": "rpm",
    "propulsive_efficiency": "",
    "drive_efficiency": "",
    "design_max_speed": "m/s",
    "azimuth_rate_limit": "rad/s",
    "configuration": "",
}
POD_UNITS = {"longitudinal_offset": "m", "lateral_offset": "m", "steerable": "", "azimuth_range": "rad"}
PACK_UNITS = {"count": "", "cells_series": "", "cell_nominal_voltage": "V", "capacity": "Ah", "soc": ""}
PLANT_UNITS = {"generator_rated_power": "W", "solar_peak_power": "W", "solar_irradiance_fraction": "",
               "hotel_load": "W"}
GENERATOR_UNITS = {"enabled": "", "on_below_soc": "", "off_above_soc": ""}
CONTROL_UNITS = {"heading_kp": "", "heading_kd": "s", "speed_kp": "s/m", "speed_ki": "1/m",
                 "lookahead": "m"}
SAFETY_UNITS = {"min_soc_return": "", "min_soc_abort": ""}
SIM_UNITS = {"dt": "s", "seed": ""}


@dataclass(frozen=True)
class ExperimentConfig:
    params: VesselParams = field(default_factory=default_nukhada_params)
    plant: PowerPlant = field(default_factory=PowerPlant)
    policy: GeneratorPolicy | None = None
    heading_gains: HeadingGains | None = None  # None: per-configuration default
    speed_gains: SpeedGains = field(default_factory=SpeedGains)
    lookahead: float = 12.0
    limits: SafetyLimits = field(default_factory=SafetyLimits)
    dt: float = 0.05
    seed: int = 0

    def resolved_heading_gains(self) -> HeadingGains:
        if self.heading_gains is not None:
            return self.heading_gains
        return default_heading_gains(self.params.configuration)


def _value_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Configuration):
        return v.value
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _line(key: str, value, unit: str) -> str:
    text = f"{key} = {_value_text(value)}"
    return f"{text} {unit}" if unit else text


def dump_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; ``load_config(dump_config(c)) == c``."""
    p = cfg.params
    out = ["# usvsim parameter file"]
    out += [_line(f"vessel.{k}", getattr(p, k), u) for k, u in VESSEL_UNITS.items()]
    for side, geom in zip(("left", "right"), p.actuators):
        out += [_line(f"pod.{side}.{k}", getattr(geom, k), u) for k, u in POD_UNITS.items()]
    pack = cfg.plant.packs[0]
    out.append(_line("pack.count", len(cfg.plant.packs), ""))
    out += [_line(f"pack.{k}", getattr(pack, k), u) for k, u in PACK_UNITS.items() if k != "count"]
    out += [_line(f"plant.{k}", getattr(cfg.plant, k), u) for k, u in PLANT_UNITS.items()]
    policy = cfg.policy or GeneratorPolicy()
    out.append(_line("generator.enabled", cfg.policy is not None, ""))
    out += [_line(f"generator.{k}", getattr(policy, k), "") for k in ("on_below_soc", "off_above_soc")]
    if cfg.heading_gains is not None:
        out.append(_line("control.heading_kp", cfg.heading_gains.kp, ""))
        out.append(_line("control.heading_kd", cfg.heading_gains.kd, "s"))
    out.append(_line("control.speed_kp", cfg.speed_gains.kp, "s/m"))
    out.append(_line("control.speed_ki", cfg.speed_gains.ki, "1/m"))
    out.append(_line("control.lookahead", cfg.lookahead, "m"))
    out += [_line(f"safety.{k}", getattr(cfg.limits, k), u) for k, u in SAFETY_UNITS.items()]
    out.append(_line("sim.dt", cfg.dt, "s"))
    out.append(_line("sim.seed", cfg.seed, ""))
    return "\n".join(out) + "\n"


def config_hash(cfg: ExperimentConfig) -> str:
    """SHA-256 of the canonical dump (comments and key order do not matter)."""
    return hashlib.sha256(dump_config(cfg).encode("utf-8")).hexdigest()


def _schema() -> dict[str, str]:
    schema = {f"vessel.{k}": u for k, u in VESSEL_UNITS.items()}
    for side in ("left", "right"):
        schema.update({f"pod.{side}.{k}": u for k, u in POD_UNITS.items()})
    for prefix, units in (("pack", PACK_UNITS), ("plant", PLANT_UNITS), ("generator", GENERATOR_UNITS),
                          ("control", CONTROL_UNITS), ("safety", SAFETY_UNITS), ("sim", SIM_UNITS)):
        schema.update({f"{prefix}.{k}": u for k, u in units.items()})
    return schema


def parse_entries(text: str) -> dict[str, str]:
    """Raw ``key -> value text`` after unit checking."""
    schema = _schema()
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ParameterFileError(f"line {lineno}: expected 'key = value [unit]'")
        if key not in schema:
            raise ParameterFileError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ParameterFileError(f"line {lineno}: duplicate key {key!r}")
        tokens = rest.split()
        if not tokens or len(tokens) > 2:
            raise ParameterFileError(f"line {lineno}: expected a value and at most one unit")
        unit = tokens[1] if len(tokens) == 2 else ""
        if unit != schema[key]:
            want = schema[key] or "no unit"
            raise ParameterFileError(f"line {lineno}: {key} takes {want}, got {unit or 'no unit'!r}")
        entries[key] = tokens[0]
    return entries


def _number(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParameterFileError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParameterFileError(f"{key}: must be finite")
    return value


def _integer(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParameterFileError(f"{key}: not an integer: {text!r}") from None


def _boolean(key: str, text: str) -> bool:
    if text.lower() in ("true", "yes", "1"):
        return True
    if text.lower() in ("false", "no", "0"):
        return False
    raise ParameterFileError(f"{key}: not a boolean: {text!r}")


def load_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse parameter-file text on top of ``base`` (defaults if None)."""
    cfg = base if base is not None else ExperimentConfig()
    e = parse_entries(text)

    def section(prefix):
        return {k[len(prefix):]: v for k, v in e.items() if k.startswith(prefix)}

    try:
        vessel = {}
        for k, v in section("vessel.").items():
            if k == "configuration":
                try:
                    vessel[k] = Configuration(v)
                except ValueError:
                    raise ParameterFileError(f"vessel.configuration: unknown value {v!r}") from None
            else:
                vessel[k] = _number("vessel." + k, v)
        pods = list(cfg.params.actuators)
        for i, side in enumerate(("left", "right")):
            changes = {}
            for k, v in section(f"pod.{side}.").items():
                changes[k] = _boolean(k, v) if k == "steerable" else _number(f"pod.{side}.{k}", v)
            if changes:
                pods[i] = replace(pods[i], **changes)
        params = replace(cfg.params, actuators=tuple(pods), **vessel)

        pack_e = section("pack.")
        count = _integer("pack.count", pack_e.pop("count")) if "count" in pack_e else len(cfg.plant.packs)
        pack = cfg.plant.packs[0]
        if pack_e:
            pack = replace(pack, **{k: (_integer(k, v) if k == "cells_series" else _number(k, v))
                                    for k, v in pack_e.items()})
        plant = replace(cfg.plant, packs=tuple(pack for _ in range(count)),
                        **{k: _number("plant." + k, v) for k, v in section("plant.").items()})

        gen = section("generator.")
        enabled = _boolean("generator.enabled", gen.pop("enabled")) if "enabled" in gen \
            else cfg.policy is not None
        policy = replace(cfg.policy or GeneratorPolicy(), **{k: _number(k, v) for k, v in gen.items()})

        ctl = section("control.")
        heading_gains = cfg.heading_gains
        if "heading_kp" in ctl or "heading_kd" in ctl:
            base_gains = cfg.resolved_heading_gains()
            heading_gains = HeadingGains(_number("heading_kp", ctl.get("heading_kp", str(base_gains.kp))),
                                         _number("heading_kd", ctl.get("heading_kd", str(base_gains.kd))))
        speed_gains = SpeedGains(_number("speed_kp", ctl.get("speed_kp", repr(cfg.speed_gains.kp))),
                                 _number("speed_ki", ctl.get("speed_ki", repr(cfg.speed_gains.ki))))
        lookahead = _number("lookahead", ctl.get("lookahead", repr(cfg.lookahead)))
        if lookahead <= 0:
            raise ParameterFileError("control.lookahead must be positive")

        limits = replace(cfg.limits, **{k: _number(k, v) for k, v in section("safety.").items()})
        sim = section("sim.")
        dt = _number("sim.dt", sim["dt"]) if "dt" in sim else cfg.dt
        if not 0 < dt <= 0.5:
            raise ParameterFileError("sim.dt must lie in (0, 0.5]")
        seed = _integer("sim.seed", sim["seed"]) if "seed" in sim else cfg.seed
    except ValueError as exc:  # invariant violations from the dataclasses
        raise ParameterFileError(str(exc)) from None
    return ExperimentConfig(params, plant, policy if enabled else None, heading_gains, speed_gains,
                            lookahead, limits, dt, seed)


def read_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ParameterFileError(f"cannot read {path}: {exc.strerror}") from None
    return load_config(text)


def write_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dump_config(cfg))

