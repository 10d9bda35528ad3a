#!/usr/bin/env python3
"""
Test the rain sensor board and servo models
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest
from hypothesis import given, settings, strategies as st

from wiperbench.kernel import Level, NetKind, Simulator, ms
from wiperbench.peripherals import (
    ANGLE_NET, AO_NET, DO_NET, HEAVY_NET, PWM_NET, WETNESS_NET, Comparator,
    RainSensor, RainSensorState, SensorInputError, Servo, ServoConfig,
    analog_out, comparator, decode_pulse_width, sensor_resistance,
    servo_kinematics,
)


wetness = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


# ---------------------------------------------------------------------------
# Rain sensor


def test_resistance_endpoints_and_midpoint():
    assert sensor_resistance(0.0) == pytest.approx(1e6)
    assert sensor_resistance(1.0) == pytest.approx(1e3)
    assert sensor_resistance(0.5) == pytest.approx(1998.0, abs=0.1)


@pytest.mark.parametrize("w, ao, do, heavy", [
    (0.0, 4.9505, Level.HIGH, Level.HIGH),
    (0.3, 1.2478, Level.LOW, Level.HIGH),
    (0.9, 0.49995, Level.LOW, Level.LOW),
])
def test_analog_out_and_comparators(w, ao, do, heavy):
    state = RainSensorState(wetness=w)
    value = analog_out(state)
    assert value == pytest.approx(ao, abs=1e-4)
    assert comparator(value, state.pot_light) == do
    assert comparator(value, state.pot_heavy) == heavy


@settings(max_examples=1000)
@given(wetness, wetness)
def test_wetter_means_lower_resistance_and_voltage(a, b):
    low, high = sorted((a, b))
    if high - low < 1e-9:
        return
    assert sensor_resistance(low) > sensor_resistance(high)
    assert analog_out(RainSensorState(wetness=low)) > analog_out(RainSensorState(wetness=high))


@given(wetness)
def test_heavy_implies_detected(w):
    state = RainSensorState(wetness=w)
    ao = analog_out(state)
    if comparator(ao, state.pot_heavy) == Level.LOW:
        assert comparator(ao, state.pot_light) == Level.LOW


def test_comparator_tie_reads_dry():
    assert comparator(2.5, 2.5) == Level.HIGH
    assert comparator(2.4999, 2.5) == Level.LOW


def test_fully_wet_divider_voltage():
    assert analog_out(RainSensorState(wetness=1.0)) == pytest.approx(5.0 * 1000 / 11000)
    assert analog_out(RainSensorState(wetness=1.0)) == pytest.approx(0.4545, abs=1e-4)


def test_grid_equal_to_fixed_resistor_gives_half_supply():
    state = RainSensorState(wetness=0.0, r_fixed=1e6)
    assert sensor_resistance(0.0) == state.r_fixed
    assert analog_out(state) == 2.5
    # Exactly at the light threshold reads dry
    assert comparator(analog_out(state), state.pot_light) == Level.HIGH


board_states = st.builds(
    lambda w, heavy, gap: RainSensorState(wetness=w, pot_heavy=heavy, pot_light=heavy + gap),
    wetness,
    st.floats(min_value=0.05, max_value=2.4),
    st.floats(min_value=0.05, max_value=2.4),
)


@settings(max_examples=500)
@given(board_states)
def test_board_outputs_agree_with_comparators(state):
    ao = analog_out(state)
    sim = Simulator()
    sim.add_net(WETNESS_NET, NetKind.ANALOG, "stimulus", state.wetness)
    RainSensor(state).attach(sim)

    assert sim.level(AO_NET) == ao
    assert sim.level(DO_NET) == (Level.LOW if ao < state.pot_light else Level.HIGH)
    assert sim.level(HEAVY_NET) == (Level.LOW if ao < state.pot_heavy else Level.HIGH)
    assert Comparator(state.pot_light).update(ao) == comparator(ao, state.pot_light)


def test_comparator_hysteresis():
    channel = Comparator(2.5, hysteresis=0.2)
    assert channel.update(2.45) == Level.HIGH
    assert channel.update(2.39) == Level.LOW
    assert channel.update(2.55) == Level.LOW
    assert channel.update(2.6) == Level.HIGH


@pytest.mark.parametrize("kwargs", [
    {'wetness': 1.5},
    {'wetness': -0.1},
    {'r_wet': 2e6},
    {'r_fixed': 0},
    {'pot_heavy': 3.0},
    {'pot_light': 6.0},
    {'hysteresis': -0.1},
])
def test_invalid_board_parameters(kwargs):
    with pytest.raises(SensorInputError):
        RainSensorState(**kwargs)


def test_sensor_follows_wetness_net():
    sim = Simulator()
    sim.add_net(WETNESS_NET, NetKind.ANALOG, "stimulus", 0.0)
    RainSensor().attach(sim)
    sim.drive(WETNESS_NET, 0.3, at=ms(1))
    sim.drive(WETNESS_NET, 0.9, at=ms(2))
    sim.drive(WETNESS_NET, 0.0, at=ms(3))

    traces = sim.run_until(ms(4))

    assert traces[DO_NET].points == [(0, Level.HIGH), (ms(1), Level.LOW), (ms(3), Level.HIGH)]
    assert traces[HEAVY_NET].points == [(0, Level.HIGH), (ms(2), Level.LOW), (ms(3), Level.HIGH)]
    assert traces[AO_NET].level_at(ms(1)) == pytest.approx(1.2478, abs=1e-4)


def test_sensor_rejects_bad_wetness_event():
    sim = Simulator()
    sim.add_net(WETNESS_NET, NetKind.ANALOG, "stimulus", 0.0)
    RainSensor().attach(sim)
    sim.drive(WETNESS_NET, 1.2, at=ms(1))
    with pytest.raises(SensorInputError):
        sim.run_until(ms(2))


# ---------------------------------------------------------------------------
# Servo


@pytest.mark.parametrize("width_ns, angle", [
    (1_000_000, 0.0),
    (1_500_000, 90.0),
    (2_000_000, 180.0),
    (1_250_000, 45.0),
    (600_000, 0.0),
    (2_400_000, 180.0),
    (500_000, 0.0),
    (2_500_000, 180.0),
])
def test_decode_pulse_width(width_ns, angle):
    assert decode_pulse_width(width_ns) == pytest.approx(angle)


def test_decode_is_linear_between_calibration_points():
    for k in range(201):
        width = 1_000_000 + k * 5_000
        assert abs(decode_pulse_width(width) - 180.0 * k / 200) < 1e-9


@pytest.mark.parametrize("width_ns", [0, 499_999, 2_500_001, 10_000_000])
def test_decode_rejects_noise(width_ns):
    assert decode_pulse_width(width_ns) is None


def test_kinematics_is_slew_limited():
    assert servo_kinematics(0.0, 90.0, ms(100)) == pytest.approx(60.0)
    assert servo_kinematics(0.0, 90.0, ms(200)) == 90.0
    assert servo_kinematics(90.0, 0.0, ms(50)) == pytest.approx(60.0)
    assert servo_kinematics(45.0, 45.0, ms(10)) == 45.0


@given(st.floats(0, 180), st.floats(0, 180), st.integers(0, 10**9))
def test_kinematics_never_overshoots(angle, commanded, dt):
    moved = servo_kinematics(angle, commanded, dt)
    assert min(angle, commanded) <= moved <= max(angle, commanded)
    assert abs(moved - angle) <= 600.0 * dt / 1e9 + 1e-9


@pytest.mark.parametrize("kwargs", [
    {'min_pulse_ns': 2_000_000},
    {'reject_below_ns': 1_100_000},
    {'reject_above_ns': 1_900_000},
    {'slew_deg_per_s': 0},
    {'initial_angle': 200.0},
])
def test_invalid_servo_config(kwargs):
    with pytest.raises(ValueError):
        ServoConfig(**kwargs)


def make_servo_sim(config=None):
    sim = Simulator()
    sim.add_net(PWM_NET, NetKind.DIGITAL, "cpu", Level.LOW)
    servo = Servo(config)
    servo.attach(sim)
    return sim, servo


def test_servo_follows_pulses():
    sim, servo = make_servo_sim()
    sim.drive(PWM_NET, 1, at=ms(1))
    sim.drive(PWM_NET, 0, at=ms(1) + 1_500_000)

    sim.run_until(ms(100))
    assert servo.state.commanded == pytest.approx(90.0)
    assert servo.state.accepted == 1

    servo.sync(ms(100))
    assert servo.state.angle == pytest.approx(58.5)
    servo.sync(ms(300))
    assert servo.state.angle == pytest.approx(90.0)
    assert servo.holding(ms(20)) is True
    assert servo.holding(ms(300)) is False


def test_servo_ignores_noise_and_keeps_angle():
    sim, servo = make_servo_sim(ServoConfig(initial_angle=30.0))
    sim.drive(PWM_NET, 1, at=ms(1))
    sim.drive(PWM_NET, 0, at=ms(1) + 200_000)

    sim.run_until(ms(50))
    servo.sync()

    assert servo.state.rejected == 1
    assert servo.state.accepted == 0
    assert servo.state.angle == 30.0
    assert sim.level(ANGLE_NET) == 30.0


def test_servo_holds_angle_without_pulses():
    sim, servo = make_servo_sim()
    sim.drive(PWM_NET, 1, at=ms(1))
    sim.drive(PWM_NET, 0, at=ms(1) + 1_500_000)
    sim.run_until(ms(200))
    servo.sync()
    assert servo.state.angle == pytest.approx(90.0)

    traces = sim.run_until(ms(1200))
    servo.sync()

    assert servo.holding(ms(1200)) is False
    assert servo.state.angle == pytest.approx(90.0)
    assert traces[ANGLE_NET].level_at(ms(1200)) == pytest.approx(90.0)
    assert all(value == pytest.approx(90.0)
               for at, value in traces[ANGLE_NET].points if at >= ms(200))


def test_idle_servo_stays_at_initial_angle():
    sim, servo = make_servo_sim(ServoConfig(initial_angle=45.0))
    traces = sim.run_until(ms(1000))
    servo.sync()

    assert servo.state.angle == 45.0
    assert traces[ANGLE_NET].points == [(0, 45.0)]


def test_servo_angle_trace_moves_at_edges():
    sim, servo = make_servo_sim()
    for frame in range(5):
        start = ms(20 * frame)
        sim.drive(PWM_NET, 1, at=start + 1000)
        sim.drive(PWM_NET, 0, at=start + 1000 + 2_000_000)

    traces = sim.run_until(ms(100))
    angles = [value for _, value in traces[ANGLE_NET].points]

    assert angles[0] == 0.0
    assert angles == sorted(angles)
    # Last edge is the fall of the fifth pulse, 80 ms after the first command
    assert angles[-1] == pytest.approx(48.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
