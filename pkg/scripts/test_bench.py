#!/usr/bin/env python3
"""
Test the co-simulation bench with the shipped firmware and scenarios
"""
import json
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

from wiperbench.asm import assemble, emit_hex
from wiperbench.firmware import build_firmware
from wiperbench.harness import Bench, check, load_scenarios, parse_scenario, run_scenario
from wiperbench.kernel import Level, measure_pulses, ms
from wiperbench.peripherals import ANGLE_NET, DO_NET, HEAVY_NET, PWM_NET, WETNESS_NET


SCENARIO_DIR = Path(__file__).parent.parent / "scenarios"
SCENARIO_FILES = sorted(SCENARIO_DIR.glob("*.scn"))


@pytest.fixture(scope="module")
def firmware():
    return build_firmware().image


def steady(wetness: float, horizon_ms: int, name: str = "steady"):
    return parse_scenario(f"name = {name}\nhorizon_ms = {horizon_ms}\nschedule = 0 {wetness}\n")


def nominal_widths(step: int) -> set:
    """Pulse widths in us the firmware commands for a width step"""
    up = {min(1000 + step * k, 2000) for k in range(1000 // step + 2)}
    down = {max(2000 - step * k, 1000) for k in range(1000 // step + 2)}
    return up | down


@pytest.mark.parametrize("path", SCENARIO_FILES, ids=lambda p: p.stem)
def test_shipped_scenarios_pass(path, firmware):
    scenario = parse_scenario(path.read_text(encoding='utf-8'), default_name=path.stem)
    report = run_scenario(scenario, firmware)
    assert report.halt is None
    assert report.passed, report.summary()


def test_first_pulse_timing(firmware):
    traces = Bench(firmware, steady(0.0, 100)).run()
    points = traces[PWM_NET].points
    # Port latches reset high; the firmware pulls the pin low first
    assert points[:3] == [(0, Level.HIGH), (5_000, Level.LOW), (27_000, Level.HIGH)]
    assert measure_pulses(traces[PWM_NET])[0] == (27_000, 1_000_000)


def test_light_rain_widths_are_exact(firmware):
    traces = Bench(firmware, steady(0.3, 3000)).run()
    widths = [w for _, w in measure_pulses(traces[PWM_NET])]
    allowed = nominal_widths(18)
    assert all(w % 1000 == 0 and w // 1000 in allowed for w in widths)
    assert 2_000_000 in widths
    assert traces[DO_NET].points == [(0, Level.LOW)]
    assert traces[HEAVY_NET].points == [(0, Level.HIGH)]


def test_fifty_pulses_per_second(firmware):
    traces = Bench(firmware, steady(0.3, 3000)).run()
    assert abs(len(measure_pulses(traces[PWM_NET], (ms(1000), ms(2000)))) - 50) <= 1


def test_heavy_rain_widths_within_one_cycle(firmware):
    traces = Bench(firmware, steady(0.9, 2000)).run()
    widths = [w for _, w in measure_pulses(traces[PWM_NET])]
    allowed = nominal_widths(29)
    for w in widths:
        assert w % 1000 == 0
        assert w // 1000 in allowed or w // 1000 - 1 in allowed


def test_frame_period(firmware):
    traces = Bench(firmware, steady(0.0, 1000)).run()
    rises = [at for at, _ in measure_pulses(traces[PWM_NET])]
    periods = {b - a for a, b in zip(rises, rises[1:])}
    assert all(abs(p - ms(20)) <= 20_000 for p in periods)


def test_sweep_starts_one_frame_after_rain(firmware):
    scenario = parse_scenario(
        "name = step\nhorizon_ms = 1200\nschedule = 0 0 / 1000 0.3\n"
        "assert = sweep_start after_ms=1000 within_ms=40\n")
    report = run_scenario(scenario, firmware)
    latency = report.results[0].measured
    assert report.passed
    assert 0 < latency <= 40


def test_dry_bench_stays_parked(firmware):
    traces = Bench(firmware, steady(0.0, 1000)).run()
    assert traces[ANGLE_NET].points == [(0, 0.0)]
    assert traces[WETNESS_NET].points == [(0, 0.0)]


def test_angle_trace_respects_slew_limit(firmware):
    scenario = parse_scenario("name = slew\nhorizon_ms = 2500\nschedule = 0 0.9 / 1500 0.3\n")
    points = Bench(firmware, scenario).run()[ANGLE_NET].points
    assert len(points) > 100
    for i, (t1, a1) in enumerate(points):
        for t2, a2 in points[i + 1:]:
            assert abs(a2 - a1) <= 600.0 * (t2 - t1) / 1e9 + 1e-9


@pytest.mark.parametrize("stop_ms", [1402, 2000, 2300, 2650])
def test_blade_parks_within_a_sweep_after_rain_stops(firmware, stop_ms):
    # One heavy sweep is 70 frames of 20.011 ms; allow one more frame
    settle_ns = 71 * 20_011_000
    scenario = parse_scenario(
        f"name = stop\nhorizon_ms = {stop_ms + 1600}\nschedule = 0 0.9 / {stop_ms} 0.0\n")
    angle = Bench(firmware, scenario).run()[ANGLE_NET]

    parked_at = ms(stop_ms) + settle_ns
    assert angle.level_at(parked_at) == 0.0
    assert all(value == 0.0 for at, value in angle.points if at >= parked_at)


def test_fast_forward_does_not_change_traces(firmware):
    scenario = parse_scenario("name = ff\nhorizon_ms = 200\nschedule = 0 0 / 50 0.9 / 120 0.3\n")
    fast = Bench(firmware, scenario, fast_forward=True)
    slow = Bench(firmware, scenario, fast_forward=False)

    assert fast.run() == slow.run()
    assert fast.cpu.state.cycle_count == slow.cpu.state.cycle_count
    assert fast.stats()['fast_forwarded'] > 0
    assert slow.stats()['fast_forwarded'] == 0
    # Skipped spin iterations still count as retired instructions
    assert fast.stats()['instructions'] == slow.stats()['instructions']
    stepped = fast.stats()['instructions'] - fast.stats()['fast_forwarded']
    assert stepped < slow.stats()['instructions']


def test_expose_ports_traces_idle_pins(firmware):
    traces = Bench(firmware, steady(0.0, 50), expose_ports=True).run()
    assert "P3.7" in traces
    assert traces["P0.0"].points == [(0, Level.HIGH)]
    assert "P1.0" not in traces


def test_runs_are_deterministic(firmware, tmp_path):
    scenario = parse_scenario((SCENARIO_DIR / "rain_starts_and_stops.scn").read_text())
    outputs = []
    for fmt in ('csv', 'csv', 'vcd', 'vcd'):
        report = run_scenario(scenario, firmware, tmp_path, fmt)
        trace_text = Path(report.trace_files[0]).read_text()
        report_text = (tmp_path / f"{scenario.name}.report.json").read_text()
        outputs.append((trace_text, report_text))
    assert outputs[0] == outputs[1]
    assert outputs[2] == outputs[3]
    assert json.loads(outputs[0][1])['passed'] is True


def test_halting_firmware_is_reported(tmp_path):
    image = assemble("NOP\nMOV SBUF,#41h\n").image
    report = run_scenario(steady(0.0, 10, name="halts"), image, tmp_path)

    assert not report.passed
    assert report.halt['pc'] == 0x0001
    assert report.halt['cycle_count'] == 1
    assert "serial port" in report.halt['reason']
    assert "halted" in report.summary()
    assert (tmp_path / "halts.csv").is_file()
    assert json.loads((tmp_path / "halts.report.json").read_text())['halt']['pc'] == 1


def test_run_scenario_accepts_hex_text(firmware):
    report = run_scenario(steady(0.0, 50), emit_hex(firmware))
    assert report.halt is None
    assert report.stats['servo_pulses'] >= 2


def test_check_in_parallel_matches_serial(firmware):
    scenarios = [s for s in load_scenarios(SCENARIO_DIR) if s.horizon_ns <= ms(6000)]
    serial = check(scenarios, firmware, jobs=1)
    parallel = check(scenarios, firmware, jobs=2)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]
    assert [r.scenario for r in serial] == sorted(s.name for s in scenarios)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
