"""
Reference wiper firmware and its timing parameters

The assembly source ships as package data (wiper.a51). FirmwareConfig
derives the per-frame width steps and the frame timer reload from the
sweep periods; check_consistency() compares them with the EQU constants
the source actually uses.
"""
import logging
import math
from dataclasses import dataclass
from importlib import resources
from typing import List, Optional

from ..asm import AssemblyResult, assemble
from ..mcs51.sfr import PORT_ADDRESSES, bit_address


logger = logging.getLogger(__name__)

SOURCE_NAME = "wiper.a51"


@dataclass(frozen=True)
class FirmwareConfig:
    """Timing targets and pin map of the wiper firmware"""
    crystal_hz: int = 12_000_000
    frame_period_us: int = 20_000
    min_pulse_us: int = 1000
    max_pulse_us: int = 2000
    light_sweep_ms: int = 2200
    heavy_sweep_ms: int = 1400
    do_pin: str = "P1.0"
    heavy_pin: str = "P1.1"
    servo_pin: str = "P2.0"
    step_tolerance: float = 0.03

    @property
    def cycles_per_us(self) -> float:
        return self.crystal_hz / 12e6

    @property
    def frame_reload(self) -> int:
        """Timer 0 mode 1 start value giving one frame per overflow"""
        cycles = round(self.frame_period_us * self.cycles_per_us)
        return 0x10000 - cycles

    def ideal_step_us(self, sweep_ms: int) -> float:
        """Width change per frame covering 2 x pulse range in one sweep"""
        frames = sweep_ms * 1000 / self.frame_period_us
        return 2 * (self.max_pulse_us - self.min_pulse_us) / frames

    @property
    def light_step_us(self) -> int:
        return round(self.ideal_step_us(self.light_sweep_ms))

    @property
    def heavy_step_us(self) -> int:
        return round(self.ideal_step_us(self.heavy_sweep_ms))

    def sweep_frames(self, step_us: int) -> int:
        """Frames in one 0 -> 180 -> 0 cycle with clamping at the ends"""
        return 2 * math.ceil((self.max_pulse_us - self.min_pulse_us) / step_us)

    def validate(self) -> List[str]:
        """Steps that miss their ideal by more than the tolerance"""
        problems = []
        for label, sweep_ms, step in (("light", self.light_sweep_ms, self.light_step_us),
                                      ("heavy", self.heavy_sweep_ms, self.heavy_step_us)):
            ideal = self.ideal_step_us(sweep_ms)
            if abs(step - ideal) > self.step_tolerance * ideal:
                problems.append(f"{label} step {step} us is more than "
                                f"{self.step_tolerance:.0%} off {ideal:.2f} us")
        return problems


def _pin_bit(pin: str) -> int:
    """Bit address of a 'Pp.b' pin name"""
    port, bit = pin[1:].split('.')
    return bit_address(PORT_ADDRESSES[int(port)], int(bit))


def firmware_source() -> str:
    """Text of the shipped firmware source"""
    return resources.files(__package__).joinpath(SOURCE_NAME).read_text(encoding='utf-8')


def build_firmware(source: Optional[str] = None) -> AssemblyResult:
    """Assemble the shipped firmware (or a replacement source)"""
    return assemble(firmware_source() if source is None else source)


def check_consistency(result: AssemblyResult,
                      config: FirmwareConfig = FirmwareConfig()) -> List[str]:
    """
    Compare the assembled constants with a FirmwareConfig

    Returns:
        Mismatch descriptions (empty when consistent)
    """
    expected = {
        'DO_PIN': _pin_bit(config.do_pin),
        'HEAVY_PIN': _pin_bit(config.heavy_pin),
        'SERVO_PIN': _pin_bit(config.servo_pin),
        'FRAME_HI': config.frame_reload >> 8,
        'FRAME_LO': config.frame_reload & 0xFF,
        'PARK_HI': config.min_pulse_us >> 8,
        'PARK_LO': config.min_pulse_us & 0xFF,
        'FULL_HI': config.max_pulse_us >> 8,
        'FULL_LO': config.max_pulse_us & 0xFF,
        'LIGHT_STEP': config.light_step_us,
        'HEAVY_STEP': config.heavy_step_us,
    }

    problems = config.validate()
    for name, value in expected.items():
        if name not in result.symbols:
            problems.append(f"{name} is not defined")
            continue
        actual = result.symbols[name].value
        if actual != value:
            problems.append(f"{name} is 0x{actual:X}, expected 0x{value:X}")

    for problem in problems:
        logger.warning(f"Firmware mismatch: {problem}")
    return problems


__all__ = [
    'FirmwareConfig', 'SOURCE_NAME', 'build_firmware', 'check_consistency',
    'firmware_source',
]
