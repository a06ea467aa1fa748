"""Hybrid battery / diesel generator / solar energy budget.

Batteries are ideal: flat voltage, no Peukert or temperature effects, and
all packs sit in parallel at one common state of charge.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .vessel import KNOT, ActuatorCommand, VesselParams, steady_surge_throttle

NAUTICAL_MILE = 1852.0  # m

# two standard packs (11 264 Wh) in 4 h and 1 h respectively
STANDARD_CHARGER_POWER = 2816.0  # W
FAST_CHARGER_POWER = 11264.0  # W


@dataclass(frozen=True)
class BatteryPack:
    cells_series: int = 16
    cell_nominal_voltage: float = 3.2  # V
    capacity: float = 110.0  # Ah
    soc: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.soc <= 1.0:
            raise ValueError("soc must lie in [0, 1]")

    @property
    def nominal_voltage(self) -> float:
        return self.cells_series * self.cell_nominal_voltage

    @property
    def energy_capacity(self) -> float:
        """Wh."""
        return self.nominal_voltage * self.capacity


@dataclass(frozen=True)
class GeneratorPolicy:
    on_below_soc: float = 0.3
    off_above_soc: float = 0.8

    def __post_init__(self):
        if not 0.0 <= self.on_below_soc < self.off_above_soc <= 1.0:
            raise ValueError("need 0 <= on_below_soc < off_above_soc <= 1")


# Closure parameter, not a measurement: with the default hull this makes
# estimate_range at 4 kn on two packs equal 20 nm (see closure_hotel_load).
DEFAULT_HOTEL_LOAD = 287.1  # W


@dataclass(frozen=True)
class PowerPlant:
    packs: tuple[BatteryPack, ...] = (BatteryPack(), BatteryPack())
    generator_rated_power: float = 2500.0  # W
    generator_on: bool = False
    solar_peak_power: float = 0.0  # W, 1100 with the optional panels
    solar_irradiance_fraction: float = 0.0
    hotel_load: float = DEFAULT_HOTEL_LOAD  # W
    depleted: bool = False
    generator_hours: float = 0.0
    # running bookkeeping, Wh
    energy_in: float = 0.0
    energy_out: float = 0.0
    curtailed: float = 0.0
    unmet: float = 0.0

    def __post_init__(self):
        if not 1 <= len(self.packs) <= 8:
            raise ValueError("pack count must lie in [1, 8]")
        if self.generator_rated_power < 0 or self.solar_peak_power < 0 or self.hotel_load < 0:
            raise ValueError("powers must be non-negative")
        if not 0.0 <= self.solar_irradiance_fraction <= 1.0:
            raise ValueError("irradiance fraction must lie in [0, 1]")

    @property
    def soc(self) -> float:
        return self.packs[0].soc

    @property
    def capacity(self) -> float:
        """Total nameplate energy, Wh."""
        return sum(p.energy_capacity for p in self.packs)

    @property
    def stored_energy(self) -> float:
        """Wh."""
        return sum(p.energy_capacity * p.soc for p in self.packs)

    def with_soc(self, soc: float) -> "PowerPlant":
        return replace(self, packs=tuple(replace(p, soc=soc) for p in self.packs))

    def with_pack_count(self, n: int) -> "PowerPlant":
        return replace(self, packs=tuple(replace(self.packs[0]) for _ in range(n)))


def propulsion_power(cmd: ActuatorCommand, params: VesselParams) -> float:
    """Electrical power drawn by both pods, W (shaft power ~ |throttle|^3)."""
    cmd = cmd.clamped(params)
    shaft = params.pod_max_shaft_power * (abs(cmd.throttle_left) ** 3 + abs(cmd.throttle_right) ** 3)
    return shaft / params.drive_efficiency


def update_energy(plant: PowerPlant, load: float, policy: GeneratorPolicy | None, dt: float) -> PowerPlant:
    """Integrate one step of the energy budget.

    ``load`` is the propulsion draw in W (hotel load is added here). With
    ``policy=None`` the generator stays off. Energy that cannot be stored
    (full battery) is counted as curtailed; demand that cannot be met (empty
    battery) as unmet, so that stored = in - out - curtailed + unmet.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    hours = dt / 3600.0
    gen = plant.generator_rated_power if (plant.generator_on and policy is not None) else 0.0
    sources = gen + plant.solar_peak_power * plant.solar_irradiance_fraction
    loads = load + plant.hotel_load
    capacity = plant.capacity
    stored = plant.stored_energy
    target = stored + (sources - loads) * hours
    curtailed = max(0.0, target - capacity)
    unmet = max(0.0, -target)
    new_stored = min(max(target, 0.0), capacity)
    soc = new_stored / capacity
    depleted = plant.depleted or (new_stored <= 0.0 and loads > sources)

    generator_on = plant.generator_on
    if policy is None:
        generator_on = False
    elif generator_on and soc >= policy.off_above_soc:
        generator_on = False
    elif not generator_on and soc < policy.on_below_soc:
        generator_on = True

    return replace(
        plant.with_soc(soc),
        generator_on=generator_on,
        depleted=depleted,
        generator_hours=plant.generator_hours + (hours if gen > 0 else 0.0),
        energy_in=plant.energy_in + sources * hours,
        energy_out=plant.energy_out + loads * hours,
        curtailed=plant.curtailed + curtailed,
        unmet=plant.unmet + unmet,
    )


def cruise_load(params: VesselParams, speed: float) -> float:
    """Propulsion power for straight running at ``speed``, W."""
    if not 0 < speed <= params.design_max_speed * (1 + 1e-9):
        raise ValueError("speed must lie in (0, V_max]")
    throttle = min(steady_surge_throttle(params, speed), 1.0)
    return propulsion_power(ActuatorCommand(throttle, throttle), params)


def estimate_range(params: VesselParams, plant: PowerPlant, speed: float) -> float:
    """Battery-only range in nautical miles at a constant straight-line speed."""
    load = cruise_load(params, speed) + plant.hotel_load
    hours = plant.stored_energy / load
    return hours * 3600.0 * speed / NAUTICAL_MILE


def closure_hotel_load(params: VesselParams, plant: PowerPlant, speed: float = 4.0 * KNOT,
                       target_nm: float = 20.0) -> float:
    """Hotel load that makes ``estimate_range(speed)`` equal ``target_nm``."""
    hours = target_nm * NAUTICAL_MILE / speed / 3600.0
    return plant.stored_energy / hours - cruise_load(params, speed)


def charge_time(plant: PowerPlant, charger_power: float) -> float:
    """Hours to fill the packs with an ideal charger."""
    if charger_power <= 0:
        raise ValueError("charger_power must be positive")
    return (plant.capacity - plant.stored_energy) / charger_power
