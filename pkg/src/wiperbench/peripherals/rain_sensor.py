"""
Rain sensor board model

A nickel-track grid whose resistance falls as it gets wet, in series with a
fixed resistor across Vcc. The midpoint voltage (AO) feeds two comparators:
one with the detection threshold drives DO, one with the intensity
threshold drives HEAVY. Both outputs are active low.
"""
import logging
from dataclasses import dataclass
from typing import Optional

from ..kernel.simulator import Level, Net, NetKind, NetValue, Simulator


logger = logging.getLogger(__name__)

AO_NET = "AO"
DO_NET = "DO"
HEAVY_NET = "HEAVY"
WETNESS_NET = "WETNESS"


class SensorInputError(ValueError):
    """Raised for wetness or board parameters outside their valid range"""


@dataclass
class RainSensorState:
    """Board parameters and the current wetness"""
    wetness: float = 0.0
    r_dry: float = 1e6
    r_wet: float = 1e3
    r_fixed: float = 1e4
    vcc: float = 5.0
    pot_light: float = 2.5
    pot_heavy: float = 1.0
    hysteresis: float = 0.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Check the board invariants

        Raises:
            SensorInputError: on any violation
        """
        _check_wetness(self.wetness)
        if not 0 < self.r_wet < self.r_dry:
            raise SensorInputError(
                f"Need 0 < r_wet < r_dry (got r_wet={self.r_wet}, r_dry={self.r_dry})")
        if self.r_fixed <= 0:
            raise SensorInputError(f"r_fixed must be positive (got {self.r_fixed})")
        if not 0 < self.pot_heavy < self.pot_light < self.vcc:
            raise SensorInputError(
                f"Need 0 < pot_heavy < pot_light < vcc (got {self.pot_heavy}, "
                f"{self.pot_light}, {self.vcc})")
        if self.hysteresis < 0:
            raise SensorInputError(f"hysteresis must not be negative (got {self.hysteresis})")


def _check_wetness(wetness: float):
    if not 0.0 <= wetness <= 1.0:
        raise SensorInputError(f"Wetness {wetness} outside [0, 1]")


def sensor_resistance(wetness: float, r_dry: float = 1e6, r_wet: float = 1e3) -> float:
    """
    Grid resistance at a wetness level

    Interpolates the parallel combination between dry and fully wet:
    R(w) = Rd*Rw / (w*Rd + (1-w)*Rw).

    Raises:
        SensorInputError: if wetness is outside [0, 1]
    """
    _check_wetness(wetness)
    return r_dry * r_wet / (wetness * r_dry + (1.0 - wetness) * r_wet)


def analog_out(state: RainSensorState) -> float:
    """Divider midpoint voltage Vcc*R/(R+Rf)"""
    r = sensor_resistance(state.wetness, state.r_dry, state.r_wet)
    return state.vcc * r / (r + state.r_fixed)


def comparator(ao: float, threshold: float) -> Level:
    """Low iff ao < threshold; a tie reads dry"""
    return Level.LOW if ao < threshold else Level.HIGH


class Comparator:
    """
    Comparator channel with optional hysteresis

    With hysteresis h the output falls below threshold - h/2 and rises
    again at threshold + h/2.
    """

    def __init__(self, threshold: float, hysteresis: float = 0.0):
        self.threshold = threshold
        self.hysteresis = hysteresis
        self.output = Level.HIGH

    def update(self, ao: float) -> Level:
        if not self.hysteresis:
            self.output = comparator(ao, self.threshold)
        elif self.output == Level.HIGH:
            if ao < self.threshold - self.hysteresis / 2:
                self.output = Level.LOW
        elif ao >= self.threshold + self.hysteresis / 2:
            self.output = Level.HIGH
        return self.output


class RainSensor:
    """
    Rain sensor board bound to simulator nets

    Reads wetness from an analog net and drives AO, DO and HEAVY with
    zero-delay events.
    """

    NAME = "rain_sensor"

    def __init__(self, state: Optional[RainSensorState] = None):
        self.state = state or RainSensorState()
        self.light = Comparator(self.state.pot_light, self.state.hysteresis)
        self.heavy = Comparator(self.state.pot_heavy, self.state.hysteresis)

    def attach(self, sim: Simulator, wetness_net: str = WETNESS_NET):
        """Declare the output nets and watch the wetness net"""
        wetness = sim.level(wetness_net)
        _check_wetness(wetness)
        self.state.wetness = wetness
        ao = analog_out(self.state)

        sim.add_net(AO_NET, NetKind.ANALOG, self.NAME, ao)
        sim.add_net(DO_NET, NetKind.DIGITAL, self.NAME, self.light.update(ao))
        sim.add_net(HEAVY_NET, NetKind.DIGITAL, self.NAME, self.heavy.update(ao))
        sim.watch(wetness_net, self._on_wetness)
        logger.debug(f"Rain sensor attached: wetness={wetness}, AO={ao:.4f} V")

    def _on_wetness(self, sim: Simulator, net: Net, old: NetValue, new: NetValue):
        _check_wetness(new)
        self.state.wetness = new
        ao = analog_out(self.state)
        sim.drive(AO_NET, ao)
        sim.drive(DO_NET, self.light.update(ao))
        sim.drive(HEAVY_NET, self.heavy.update(ao))
        logger.debug(f"Wetness {old} -> {new} at {sim.clock} ns, AO={ao:.4f} V")
