"""
Hobby servo model

Decodes the width of each high pulse on the control net into a commanded
angle and slews the horn toward it at a bounded rate. With no pulses the
servo keeps its last commanded angle.
"""
import logging
from dataclasses import dataclass
from typing import Optional

from ..kernel.simulator import Level, Net, NetKind, NetValue, SimTime, Simulator


logger = logging.getLogger(__name__)

PWM_NET = "SERVO_PWM"
ANGLE_NET = "SERVO_ANGLE"

FULL_SCALE_DEG = 180.0


@dataclass(frozen=True)
class ServoConfig:
    """Pulse-to-angle calibration and dynamics"""
    min_pulse_ns: int = 1_000_000
    max_pulse_ns: int = 2_000_000
    reject_below_ns: int = 500_000
    reject_above_ns: int = 2_500_000
    hold_window_ns: int = 20_000_000
    slew_deg_per_s: float = 600.0
    initial_angle: float = 0.0

    def __post_init__(self):
        if not 0 < self.min_pulse_ns < self.max_pulse_ns:
            raise ValueError("Servo pulse range must satisfy 0 < min < max")
        if not self.reject_below_ns <= self.min_pulse_ns:
            raise ValueError("Noise floor must not exceed the minimum pulse")
        if not self.max_pulse_ns <= self.reject_above_ns:
            raise ValueError("Noise ceiling must not be below the maximum pulse")
        if self.slew_deg_per_s <= 0:
            raise ValueError("Slew limit must be positive")
        if not 0.0 <= self.initial_angle <= FULL_SCALE_DEG:
            raise ValueError("Initial angle must lie in [0, 180]")


@dataclass
class ServoState:
    """Horn position, target and pulse bookkeeping"""
    angle: float = 0.0
    commanded: float = 0.0
    last_pulse_at: Optional[SimTime] = None
    updated_at: SimTime = 0
    accepted: int = 0
    rejected: int = 0


def decode_pulse_width(width_ns: int, config: ServoConfig = ServoConfig()) -> Optional[float]:
    """
    Commanded angle for a pulse width

    Widths outside the noise window give None; widths inside it are
    clamped to the calibrated range and mapped linearly onto 0-180 degrees.
    """
    if width_ns < config.reject_below_ns or width_ns > config.reject_above_ns:
        return None
    width = min(max(width_ns, config.min_pulse_ns), config.max_pulse_ns)
    span = config.max_pulse_ns - config.min_pulse_ns
    return FULL_SCALE_DEG * (width - config.min_pulse_ns) / span


def servo_kinematics(angle: float, commanded: float, dt_ns: int,
                     slew_deg_per_s: float = 600.0) -> float:
    """Angle after moving toward commanded for dt_ns at the slew limit"""
    reach = slew_deg_per_s * dt_ns / 1e9
    delta = commanded - angle
    if abs(delta) <= reach:
        return commanded
    return angle + reach if delta > 0 else angle - reach


class Servo:
    """
    Servo bound to simulator nets

    Watches the PWM net and updates the analog SERVO_ANGLE net at every
    PWM edge and whenever sync() is called.
    """

    NAME = "servo"

    def __init__(self, config: Optional[ServoConfig] = None):
        self.config = config or ServoConfig()
        self.state = ServoState(angle=self.config.initial_angle,
                                commanded=self.config.initial_angle)
        self._rise_at: Optional[SimTime] = None
        self._sim: Optional[Simulator] = None

    def attach(self, sim: Simulator, pwm_net: str = PWM_NET):
        """Declare SERVO_ANGLE and watch the control net"""
        self._sim = sim
        sim.add_net(ANGLE_NET, NetKind.ANALOG, self.NAME, self.state.angle)
        sim.watch(pwm_net, self._on_edge)

    def sync(self, now: Optional[SimTime] = None):
        """Advance the horn to a time and publish the angle"""
        sim = self._sim
        if now is None:
            if sim is None:
                raise RuntimeError("Servo is not attached to a simulator")
            now = sim.clock
        state = self.state
        if now > state.updated_at:
            state.angle = servo_kinematics(state.angle, state.commanded,
                                           now - state.updated_at,
                                           self.config.slew_deg_per_s)
            state.updated_at = now
        if sim is not None and sim.level(ANGLE_NET) != state.angle:
            sim.drive(ANGLE_NET, state.angle)

    def holding(self, now: SimTime) -> bool:
        """True while the last accepted pulse is within the hold window"""
        last = self.state.last_pulse_at
        return last is not None and now - last <= self.config.hold_window_ns

    def _on_edge(self, sim: Simulator, net: Net, old: NetValue, new: NetValue):
        now = sim.clock
        self.sync(now)
        if new == Level.HIGH:
            self._rise_at = now
            return
        if self._rise_at is None:
            return

        width = now - self._rise_at
        self._rise_at = None
        angle = decode_pulse_width(width, self.config)
        if angle is None:
            self.state.rejected += 1
            logger.debug(f"Rejected servo pulse of {width} ns at {now} ns")
            return
        self.state.accepted += 1
        self.state.commanded = angle
        self.state.last_pulse_at = now
