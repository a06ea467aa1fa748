"""``usvsim`` command line.

Exit codes: 0 success, 1 domain error (error class name printed), 2 usage.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from importlib import resources

from . import __version__
from .coverage import (
    geopolygon_from_geojson,
    plan_lawnmower,
    plan_to_geojson,
    plan_to_mission,
    polygon_area,
    project_to_local,
)
from .errors import ConfigMismatch, MissionAborted, ParameterFileError, UsvSimError
from .guidance import Frontseat, MissionPlan, SpeedController, Waypoint
from .maneuvers import (
    SpiralSchedule,
    mean_radius,
    run_fixed_radius_turn,
    run_spiral,
    steady_course_heading_gap,
    turning_radius,
)
from .paramfile import ExperimentConfig, config_hash, read_config
from .power import FAST_CHARGER_POWER, STANDARD_CHARGER_POWER, charge_time, estimate_range
from .runlog import RunLog
from .survey import SeabedModel, grid_bathymetry, pings_to_csv, simulate_survey
from .svg import emit_trajectory_svg
from .sysid import ALL_COEFFICIENTS, DAMPING_COEFFICIENTS, IdentConfig, build_regressor, fit_coefficients
from .vessel import KNOT, VesselState, outboard_variant, wrap_angle


def fixture_polygon_text() -> str:
    return (resources.files("usvsim") / "data" / "creek_fixture.geojson").read_text(encoding="utf-8")


def _load(args) -> tuple[ExperimentConfig, str]:
    cfg = read_config(args.params) if args.params else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg, config_hash(cfg)


def _frontseat(cfg: ExperimentConfig, params) -> Frontseat:
    gains = cfg.heading_gains  # None picks the per-configuration default
    return Frontseat(params, gains, SpeedController(cfg.speed_gains))


def _out(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _header(cfg: ExperimentConfig, digest: str, **extra) -> dict:
    return {"tool_version": __version__, "config_hash": digest, "seed": cfg.seed, **extra}


def _parse_seabed(spec: str) -> SeabedModel:
    kind, _, rest = spec.partition(":")
    values = [float(x) for x in rest.split(",")] if rest else []
    if kind == "creek":
        return SeabedModel.creek(int(values[0]) if values else 0)
    if kind == "constant" and len(values) == 1:
        return SeabedModel.constant(values[0])
    if kind == "planar" and len(values) == 3:
        return SeabedModel.planar(*values)
    raise ValueError(f"bad seabed spec {spec!r}; use creek[:seed], constant:D or planar:D,ge,gn")


def cmd_range(args) -> int:
    cfg, _ = _load(args)
    plant = cfg.plant if args.packs is None else cfg.plant.with_pack_count(args.packs)
    nm = estimate_range(cfg.params, plant, args.speed_kn * KNOT)
    print(f"{nm:.1f} nm")
    return 0


def cmd_charge(args) -> int:
    cfg, _ = _load(args)
    plant = cfg.plant.with_soc(args.soc)
    power = FAST_CHARGER_POWER if args.fast else STANDARD_CHARGER_POWER
    print(f"{charge_time(plant, power):.2f} h")
    return 0


def cmd_maneuver(args) -> int:
    cfg, digest = _load(args)
    params = cfg.params
    if args.outboard:
        params = outboard_variant(params)
    if args.kind == "spiral":
        sched = SpiralSchedule(ramp_side=args.ramp_side)
        log = run_spiral(params, sched, cfg.dt)
        radius = turning_radius(log)
        summary = f"terminal radius {radius[-1]:.2f} m"
    else:
        log = run_fixed_radius_turn(params, args.radius, args.speed_kn * KNOT, args.revolutions, cfg.dt,
                                    lookahead=args.lookahead, frontseat=_frontseat(cfg, params))
        summary = (f"mean radius {mean_radius(log):.2f} m, "
                   f"mean |course-heading| {math.degrees(steady_course_heading_gap(log)):.2f} deg")
    run = RunLog.from_maneuver(log, params, plant=cfg.plant,
                               header=_header(cfg, digest, maneuver=args.kind,
                                              configuration=params.configuration.value))
    run.write(_out(args, f"{args.kind}.csv"))
    emit_trajectory_svg(log, _out(args, f"{args.kind}.svg"), arrow_interval=5.0, title=args.kind)
    print(summary)
    return 0


def _mission_from_json(obj) -> MissionPlan:
    def wp(d):
        return Waypoint(float(d["north"]), float(d["east"]), float(d["speed"]),
                        float(d.get("capture_radius", 12.0)))

    try:
        wps = tuple(wp(d) for d in obj["waypoints"])
        home = wp(obj["home"]) if "home" in obj else wps[-1]
    except (KeyError, TypeError) as exc:
        raise ParameterFileError(f"mission file: missing field {exc}") from None
    return MissionPlan(wps, home, bool(obj.get("loop", False)))


def _start_from_json(obj) -> VesselState:
    start = obj.get("start", {})
    return VesselState(float(start.get("north", 0.0)), float(start.get("east", 0.0)),
                       wrap_angle(math.radians(float(start.get("heading_deg", 0.0)))))


def cmd_simulate(args) -> int:
    cfg, digest = _load(args)
    with open(args.mission, encoding="utf-8") as f:
        obj = json.load(f)
    plan = _mission_from_json(obj)
    result = simulate_survey(plan, None, cfg.params, cfg.plant, dt=cfg.dt, seed=cfg.seed, limits=cfg.limits,
                             policy=cfg.policy, lookahead=cfg.lookahead, max_time=args.max_time,
                             initial_state=_start_from_json(obj), frontseat=_frontseat(cfg, cfg.params))
    result.log.header.update(_header(cfg, digest))
    result.log.write(_out(args, "run.csv"))
    emit_trajectory_svg(result.log, _out(args, "run.svg"), arrow_interval=30.0, title="mission")
    print(f"duration {result.duration / 3600:.3f} h, final mode {result.final_mode.value}, "
          f"SOC {result.plant.soc:.3f}")
    if result.truncated:
        raise MissionAborted(f"mission ended in {result.final_mode.value}")
    return 0


def _plan(args, polygon_text: str):
    poly_geo = geopolygon_from_geojson(json.loads(polygon_text))
    local = project_to_local(poly_geo)
    heading = math.radians(args.heading_deg) if args.heading_deg is not None else None
    plan = plan_lawnmower(local, args.spacing, heading)
    return poly_geo, local, plan


def _polygon_text(path) -> str:
    if path is None:
        return fixture_polygon_text()
    with open(path, encoding="utf-8") as f:
        return f.read()


def cmd_plan(args) -> int:
    geo, local, plan = _plan(args, _polygon_text(args.polygon))
    mission = plan_to_mission(plan, args.speed, geo.reference)
    hours = mission.metadata["predicted_duration_h"]
    feature = plan_to_geojson(plan, geo.reference, {"predicted_duration_h": hours, "speed_mps": args.speed})
    with open(_out(args, "plan.geojson"), "w", encoding="utf-8") as f:
        json.dump(feature, f, indent=1, sort_keys=True)
        f.write("\n")
    print(f"area {polygon_area(local):.0f} m2, path {plan.path_length:.1f} m, "
          f"{plan.metadata['sweep_count']} sweeps, {hours:.2f} h at {args.speed:g} m/s")
    return 0


def cmd_survey(args) -> int:
    cfg, digest = _load(args)
    geo, _, plan = _plan(args, _polygon_text(args.polygon))
    mission = plan_to_mission(plan, args.speed, geo.reference, max_speed=cfg.params.design_max_speed)
    seabed = _parse_seabed(args.seabed)
    result = simulate_survey(mission, seabed, cfg.params, cfg.plant, args.ping_rate, cfg.dt, args.sigma,
                             cfg.seed, cfg.limits, cfg.policy, cfg.lookahead,
                             frontseat=_frontseat(cfg, cfg.params))
    result.log.header.update(_header(cfg, digest))
    result.log.write(_out(args, "survey.csv"))
    with open(_out(args, "pings.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write(pings_to_csv(result.pings))
    emit_trajectory_svg(result.log, _out(args, "survey.svg"), title="survey")
    msg = f"duration {result.duration / 3600:.3f} h, {len(result.pings)} pings"
    if any(p.valid for p in result.pings):
        grid = grid_bathymetry(result.pings, args.cell_size, args.search_radius)
        with open(_out(args, "bathy.asc"), "w", encoding="utf-8", newline="\n") as f:
            f.write(grid.to_esri_ascii())
        vals = grid.values[grid.mask]
        msg += f", grid depth {vals.min():.2f}-{vals.max():.2f} m"
    print(msg)
    if result.truncated:
        raise MissionAborted(f"survey ended in {result.final_mode.value}, pings so far were kept")
    return 0


def cmd_ident(args) -> int:
    cfg, _ = _load(args)
    logs = [RunLog.read(p).to_maneuver_log() for p in args.logs]
    config = IdentConfig(ALL_COEFFICIENTS if args.with_added_mass else DAMPING_COEFFICIENTS)
    fit = fit_coefficients(build_regressor(logs, cfg.params, config, args.lag))
    for name, value in fit.estimates.items():
        print(f"{name} {value:.6g}")
    print(f"condition {fit.condition:.3g}")
    return 0


def cmd_verify(args) -> int:
    cfg, digest = _load(args)
    for path in args.outputs:
        embedded = RunLog.read(path).header.get("config_hash")
        if embedded != digest:
            raise ConfigMismatch(f"{path}: embedded hash {embedded} does not match {digest}")
        print(f"{path}: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="parameter file (defaults built in)")
    common.add_argument("--seed", type=int, help="override sim.seed")
    common.add_argument("--out", default=".", help="output directory")

    parser = argparse.ArgumentParser(prog="usvsim", description="USV simulation experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("range", parents=[common], help="battery-only range estimate")
    p.add_argument("--speed-kn", type=float, default=4.0)
    p.add_argument("--packs", type=int)
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("charge", parents=[common], help="ideal charge time")
    p.add_argument("--fast", action="store_true")
    p.add_argument("--soc", type=float, default=0.0, help="starting state of charge")
    p.set_defaults(func=cmd_charge)

    p = sub.add_parser("maneuver", parents=[common], help="spiral or fixed-radius turn")
    p.add_argument("kind", choices=("spiral", "turn"))
    p.add_argument("--outboard", action="store_true", help="use the stern-thruster variant")
    p.add_argument("--ramp-side", choices=("left", "right"), default="left")
    p.add_argument("--radius", type=float, default=20.0)
    p.add_argument("--speed-kn", type=float, default=2.0)
    p.add_argument("--revolutions", type=float, default=2.0)
    p.add_argument("--lookahead", type=float)
    p.set_defaults(func=cmd_maneuver)

    p = sub.add_parser("simulate", parents=[common], help="run a waypoint mission from JSON")
    p.add_argument("mission")
    p.add_argument("--max-time", type=float)
    p.set_defaults(func=cmd_simulate)

    for name, func, helptext in (("plan-coverage", cmd_plan, "lawnmower plan for a GeoJSON polygon"),
                                 ("survey", cmd_survey, "simulated bathymetric survey")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("polygon", nargs="?", help="GeoJSON polygon (default: bundled fixture)")
        p.add_argument("--spacing", type=float, default=10.0)
        p.add_argument("--speed", type=float, default=0.61, help="m/s")
        p.add_argument("--heading-deg", type=float)
        p.set_defaults(func=func)
        if name == "survey":
            p.add_argument("--seabed", default="creek")
            p.add_argument("--ping-rate", type=float, default=1.0)
            p.add_argument("--sigma", type=float, default=0.02)
            p.add_argument("--cell-size", type=float, default=2.0)
            p.add_argument("--search-radius", type=float, default=10.0)

    p = sub.add_parser("ident", parents=[common], help="least-squares coefficient fit from run logs")
    p.add_argument("logs", nargs="+")
    p.add_argument("--with-added-mass", action="store_true")
    p.add_argument("--lag", type=int, default=1)
    p.set_defaults(func=cmd_ident)

    p = sub.add_parser("verify", parents=[common], help="check outputs against a parameter file")
    p.add_argument("outputs", nargs="+")
    p.set_defaults(func=cmd_verify)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsvSimError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
