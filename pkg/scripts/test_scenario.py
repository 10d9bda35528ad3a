#!/usr/bin/env python3
"""
Test scenario parsing, validation and serialization
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

from wiperbench.harness import (
    AssertionSpec, ScenarioError, load_scenarios, parse_scenario, serialize_scenario,
)
from wiperbench.kernel import ms


SCENARIO_DIR = Path(__file__).parent.parent / "scenarios"

FULL = """\
# every kind of line
name = storm
crystal_hz = 12000000
horizon_ms = 2500.5
sensor.pot_light = 2.4
sensor.hysteresis = 0.05
servo.slew_deg_per_s = 450
schedule = 0 0.0 / 250 0.25
schedule = 1000.000001 0.9   # one nanosecond after 1 s
assert = sweep_start after_ms=250 within_ms=40
assert = level net=HEAVY at_ms=1500 expect=0
"""


def test_parse_all_keys():
    scenario = parse_scenario(FULL)
    assert scenario.name == "storm"
    assert scenario.horizon_ns == 2_500_500_000
    assert scenario.schedule == [(0, 0.0), (ms(250), 0.25), (ms(1000) + 1, 0.9)]
    assert scenario.sensor == {'pot_light': 2.4, 'hysteresis': 0.05}
    assert scenario.servo == {'slew_deg_per_s': 450.0}
    assert [a.kind for a in scenario.assertions] == ['sweep_start', 'level']
    assert scenario.assertions[1].params == {'net': 'HEAVY', 'at_ms': '1500', 'expect': '0'}
    assert scenario.assertions[1].line == 11


def test_serialize_reads_back():
    scenario = parse_scenario(FULL)
    text = serialize_scenario(scenario)
    assert parse_scenario(text) == scenario
    assert "schedule = 1000.000001 0.9" in text
    assert "assert = level at_ms=1500 expect=0 net=HEAVY" in text


def test_wetness_at():
    scenario = parse_scenario(FULL)
    assert scenario.wetness_at(0) == 0.0
    assert scenario.wetness_at(ms(250) - 1) == 0.0
    assert scenario.wetness_at(ms(250)) == 0.25
    assert scenario.wetness_at(ms(2000)) == 0.9


def test_default_name_and_servo_types():
    scenario = parse_scenario("horizon_ms = 10\nschedule = 0 0\nservo.min_pulse_ns = 900000\n",
                              default_name="from_file")
    assert scenario.name == "from_file"
    config = scenario.servo_config()
    assert config.min_pulse_ns == 900_000
    assert isinstance(config.min_pulse_ns, int)


def test_assertion_spec_helpers():
    spec = AssertionSpec('pulse_width', {'from_ms': '1.5', 'tol_ms': '0.02'})
    assert spec.ns('from_ms') == 1_500_000
    assert spec.ns('to_ms', 7) == 7
    assert spec.number('tol_ms') == 0.02
    assert spec.text() == "pulse_width from_ms=1.5 tol_ms=0.02"


@pytest.mark.parametrize("text, line, fragment", [
    ("name = x\nhorizon_ms = 10\nschedule = 0 0\ncolour = red\n", 4, "unknown key"),
    ("name = x\nname = y\n", 2, "given twice"),
    ("name = x\njust words\n", 2, "key = value"),
    ("name = two words\n", 1, "invalid scenario name"),
    ("name = x\nhorizon_ms = soon\n", 2, "Not a number"),
    ("name = x\nhorizon_ms = 0.0000001\n", 2, "finer than 1 ns"),
    ("name = x\ncrystal_hz = 12e6\n", 2, "positive integer"),
    ("name = x\nsensor.colour = 1\n", 2, "unknown key"),
    ("name = x\nsensor.pot_light = high\n", 2, "not a number"),
    ("name = x\nschedule = 5 0.1\n", 2, "start at time 0"),
    ("name = x\nschedule = 0 0.1 / 0 0.2\n", 2, "does not follow"),
    ("name = x\nschedule = 0 0.1\nschedule = 10 0.2 / 5 0.3\n", 3, "does not follow"),
    ("name = x\nschedule = 0 1.5\n", 2, "outside [0, 1]"),
    ("name = x\nschedule = 0\n", 2, "time_ms wetness"),
    ("name = x\nassert = rainbow\n", 2, "unknown assertion kind"),
    ("name = x\nassert = level net=DO at_ms=5\n", 2, "needs expect"),
    ("name = x\nassert = level net=DO at_ms=5 expect=1 colour=red\n", 2, "unknown parameter"),
    ("name = x\nassert = level net=DO at_ms=5 expect=1 expect=0\n", 2, "given twice"),
    ("name = x\nassert = park_angle after_ms\n", 2, "not key=value"),
    ("name = x\nassert = park_angle after_ms=later\n", 2, "Not a number"),
    ("name = x\nhorizon_ms = 5\nschedule = 0 0 / 10 1\n", 3, "horizon lies before"),
])
def test_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario(text)
    assert excinfo.value.line == line
    assert fragment in str(excinfo.value)


@pytest.mark.parametrize("text, fragment", [
    ("horizon_ms = 10\nschedule = 0 0\n", "missing 'name'"),
    ("name = x\nschedule = 0 0\n", "missing 'horizon_ms'"),
    ("name = x\nhorizon_ms = 10\n", "missing 'schedule'"),
    ("name = x\nhorizon_ms = 10\nschedule = 0 0\nsensor.pot_heavy = 4\n", "invalid sensor"),
    ("name = x\nhorizon_ms = 10\nschedule = 0 0\nservo.slew_deg_per_s = 0\n", "invalid sensor"),
])
def test_file_level_errors(text, fragment):
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario(text)
    assert fragment in str(excinfo.value)


def test_shipped_scenarios_parse():
    scenarios = load_scenarios(SCENARIO_DIR)
    names = [s.name for s in scenarios]
    assert names == sorted(names)
    assert {'dry', 'light_rain', 'heavy_rain', 'rain_starts_and_stops', 'pwm_timing'} <= set(names)
    for scenario in scenarios:
        assert scenario.assertions


def test_load_scenarios_names_the_bad_file(tmp_path):
    (tmp_path / "good.scn").write_text("horizon_ms = 10\nschedule = 0 0\n")
    (tmp_path / "bad.scn").write_text("horizon_ms = 10\nschedule = 0 2\n")
    with pytest.raises(ScenarioError) as excinfo:
        load_scenarios(tmp_path)
    assert "bad.scn" in str(excinfo.value)


def test_load_scenarios_rejects_duplicate_names(tmp_path):
    (tmp_path / "a.scn").write_text("name = same\nhorizon_ms = 10\nschedule = 0 0\n")
    (tmp_path / "b.scn").write_text("name = same\nhorizon_ms = 10\nschedule = 0 0\n")
    with pytest.raises(ValueError):
        load_scenarios(tmp_path)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
