import json
import time

import pytest

from usvsim.cli import fixture_polygon_text
from usvsim.coverage import geopolygon_from_geojson, plan_lawnmower, plan_to_mission, project_to_local
from usvsim.maneuvers import run_fixed_radius_turn, run_spiral
from usvsim.power import PowerPlant
from usvsim.survey import SeabedModel, simulate_survey
from usvsim.sysid import LogSignals
from usvsim.vessel import default_nukhada_params, outboard_variant

IDENT_DT = 0.002

SUITE_BUDGET = 300.0  # s
ACCEPTANCE_LINES: list[str] = []
_started = time.perf_counter()


def _suite_elapsed():
    return time.perf_counter() - _started


def pytest_sessionfinish(session, exitstatus):
    # an over-budget run fails even when every test passed
    if ACCEPTANCE_LINES and _suite_elapsed() > SUITE_BUDGET and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
        elapsed = _suite_elapsed()
        verdict = "PASS" if elapsed <= SUITE_BUDGET else "FAIL"
        terminalreporter.write_line(f"criterion 9: {verdict}  suite runtime  ({elapsed:.1f} s of {SUITE_BUDGET:.0f} s)")


@pytest.fixture(scope="session")
def params():
    return default_nukhada_params()


@pytest.fixture(scope="session")
def outboard(params):
    return outboard_variant(params)


@pytest.fixture(scope="session")
def fixture_geo():
    return geopolygon_from_geojson(json.loads(fixture_polygon_text()))


@pytest.fixture(scope="session")
def fixture_local(fixture_geo):
    return project_to_local(fixture_geo)


@pytest.fixture(scope="session")
def fixture_plan(fixture_local):
    return plan_lawnmower(fixture_local, 10.0)


@pytest.fixture(scope="session")
def fixture_survey(fixture_plan, params):
    mission = plan_to_mission(fixture_plan, 0.61)
    result = simulate_survey(mission, SeabedModel.creek(), params, PowerPlant(), 1.0, seed=1)
    return mission, result


@pytest.fixture(scope="session")
def ident_logs(params):
    """Fine-step spiral and turn records used for identification."""
    return [run_spiral(params, dt=IDENT_DT), run_fixed_radius_turn(params, dt=IDENT_DT)]


@pytest.fixture(scope="session")
def ident_signals(ident_logs, params):
    return [LogSignals.from_log(log, params) for log in ident_logs]


@pytest.fixture(scope="session")
def turn_logs(params, outboard):
    return run_fixed_radius_turn(params), run_fixed_radius_turn(outboard)
