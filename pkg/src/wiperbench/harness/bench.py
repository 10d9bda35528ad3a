"""
Co-simulation of the emulated MCU with the sensor board and the servo

The CPU runs ahead of the event kernel up to the next queued event; its
port writes become net events stamped with the retiring cycle's time, and
its pin reads see the net levels the kernel holds. Because every external
change is a queued event, nothing the CPU reads can change while it runs
ahead.
"""
import logging
from typing import Dict, Optional, Tuple

from ..kernel.simulator import Level, NetKind, SimTime, Simulator, Trace
from ..mcs51.cpu import MCS51, ClockConfig
from ..mcs51.image import ObjectImage
from ..mcs51.sfr import pin_name
from ..peripherals.rain_sensor import DO_NET, HEAVY_NET, WETNESS_NET, RainSensor
from ..peripherals.servo import PWM_NET, Servo
from .scenario import Scenario


logger = logging.getLogger(__name__)

MCU_DRIVER = "mcu"
SCENARIO_DRIVER = "scenario"

# (port, bit) -> net
INPUT_PINS: Dict[Tuple[int, int], str] = {(1, 0): DO_NET, (1, 1): HEAVY_NET}
OUTPUT_PINS: Dict[Tuple[int, int], str] = {(2, 0): PWM_NET}


class Bench:
    """
    One wired-up simulation instance

    Args:
        image: Firmware image
        scenario: Wetness schedule and bench parameters
        fast_forward: Let the CPU skip idle spin loops in bulk
        expose_ports: Also trace every unwired port pin as a 'Pp.b' net
    """

    def __init__(self, image: ObjectImage, scenario: Scenario,
                 fast_forward: bool = True, expose_ports: bool = False):
        self.scenario = scenario
        self.sim = Simulator()
        self.cpu = MCS51(ClockConfig(scenario.crystal_hz),
                         pin_input=self._pin_level,
                         on_port_write=self._on_port_write,
                         fast_forward=fast_forward)
        self.cpu.load_image(image)

        self.outputs: Dict[Tuple[int, int], str] = dict(OUTPUT_PINS)
        if expose_ports:
            for port in range(4):
                for bit in range(8):
                    key = (port, bit)
                    if key not in INPUT_PINS and key not in OUTPUT_PINS:
                        self.outputs[key] = pin_name(port, bit)

        self.sim.add_net(WETNESS_NET, NetKind.ANALOG, SCENARIO_DRIVER, scenario.schedule[0][1])
        self.sensor = RainSensor(scenario.sensor_state())
        self.sensor.attach(self.sim)

        for (port, bit), net in sorted(self.outputs.items()):
            self.sim.add_net(net, NetKind.DIGITAL, MCU_DRIVER, self.cpu.read_pin(port, bit))

        self.servo = Servo(scenario.servo_config())
        self.servo.attach(self.sim)

        for at, wetness in scenario.schedule[1:]:
            self.sim.drive(WETNESS_NET, wetness, at=at)

    def _pin_level(self, port: int, bit: int) -> Level:
        net = INPUT_PINS.get((port, bit))
        if net is None:
            return Level.HIGH
        return self.sim.level(net)

    def _on_port_write(self, port: int, old: int, new: int, at: SimTime):
        changed = old ^ new
        for bit in range(8):
            if not changed & (1 << bit):
                continue
            net = self.outputs.get((port, bit))
            if net is not None:
                self.sim.drive(net, Level((new >> bit) & 1), at=at)

    def run(self, horizon: Optional[SimTime] = None) -> Dict[str, Trace]:
        """
        Run to the horizon

        Returns:
            Traces of every net

        Raises:
            CpuHalt: if the firmware stops
        """
        if horizon is None:
            horizon = self.scenario.horizon_ns
        sim = self.sim
        cpu = self.cpu
        cycle_ns = cpu.cycle_ns

        while True:
            next_event = sim.peek_time()
            limit = horizon if next_event is None else min(next_event, horizon)
            cpu.run_until_cycle(-(-limit // cycle_ns))
            now = min(cpu.time_ns, horizon)
            sim.run_until(max(now, sim.clock))
            if now >= horizon:
                break

        self.servo.sync(horizon)
        traces = sim.run_until(horizon)
        logger.debug(
            f"Bench reached {horizon} ns: {cpu.instructions} instructions "
            f"({cpu.skipped} fast-forwarded), {sim.delivered} events")
        return traces

    def stats(self) -> Dict[str, int]:
        return {
            'cycles': self.cpu.state.cycle_count,
            'instructions': self.cpu.instructions,
            'fast_forwarded': self.cpu.skipped,
            'events': self.sim.delivered,
            'servo_pulses': self.servo.state.accepted,
            'servo_rejected': self.servo.state.rejected,
        }
