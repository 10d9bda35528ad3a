"""
Rain scenario files

Line-oriented 'key = value' text; '#' starts a comment. Keys:

    name = light_rain
    crystal_hz = 12000000
    horizon_ms = 10000
    sensor.<field> = <number>       rain sensor overrides (r_dry, pot_light, ...)
    servo.<field> = <number>        servo overrides (slew_deg_per_s, ...)
    schedule = 0 0.0 / 1000 0.3     (time_ms wetness) pairs, repeatable
    assert = <kind> key=value ...   repeatable

Times are decimal milliseconds converted exactly to integer nanoseconds.
See docs/SCENARIO_FORMAT.md for the assertion kinds.
"""
import logging
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Tuple

from ..kernel.simulator import SimTime
from ..peripherals.rain_sensor import RainSensorState
from ..peripherals.servo import ServoConfig
from ..utils import ms_to_ns, ns_to_ms_text


logger = logging.getLogger(__name__)

SENSOR_FIELDS = frozenset(f.name for f in fields(RainSensorState)) - {'wetness'}
SERVO_FIELDS = frozenset(f.name for f in fields(ServoConfig))
_SERVO_INT_FIELDS = frozenset(f.name for f in fields(ServoConfig) if f.type in (int, 'int'))

# Parameters accepted by each assertion kind
ASSERTION_PARAMS: Dict[str, frozenset] = {
    'sweep_period': frozenset({'expect_ms', 'tol_pct', 'from_ms', 'to_ms', 'min_angle'}),
    'pulse_count': frozenset({'expect', 'tol', 'from_ms', 'to_ms'}),
    'park_angle': frozenset({'after_ms', 'expect', 'tol'}),
    'pulse_period': frozenset({'expect_ms', 'tol_pct', 'from_ms', 'to_ms'}),
    'pulse_width': frozenset({'min_ms', 'max_ms', 'tol_ms', 'from_ms', 'to_ms'}),
    'sweep_start': frozenset({'after_ms', 'within_ms', 'above_ms'}),
    'level': frozenset({'net', 'at_ms', 'expect', 'tol'}),
}

# Parameters without a default
REQUIRED_PARAMS: Dict[str, frozenset] = {
    'sweep_period': frozenset({'expect_ms'}),
    'pulse_count': frozenset({'expect', 'from_ms', 'to_ms'}),
    'park_angle': frozenset({'after_ms'}),
    'pulse_period': frozenset({'from_ms', 'to_ms'}),
    'pulse_width': frozenset({'from_ms', 'to_ms'}),
    'sweep_start': frozenset({'after_ms'}),
    'level': frozenset({'net', 'at_ms', 'expect'}),
}


class ScenarioError(ValueError):
    """Raised for malformed scenario text; line is 1-based when known"""

    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


@dataclass
class AssertionSpec:
    """One check to run over the traces"""
    kind: str
    params: Dict[str, str] = field(default_factory=dict)
    line: Optional[int] = None

    def text(self) -> str:
        """Canonical 'kind key=value ...' form"""
        parts = [self.kind] + [f"{k}={self.params[k]}" for k in sorted(self.params)]
        return " ".join(parts)

    def ns(self, key: str, default: Optional[SimTime] = None) -> Optional[SimTime]:
        """A *_ms parameter in nanoseconds"""
        if key not in self.params:
            return default
        return ms_to_ns(self.params[key])

    def number(self, key: str, default: Optional[float] = None) -> Optional[float]:
        if key not in self.params:
            return default
        return float(self.params[key])

    def __eq__(self, other) -> bool:
        if not isinstance(other, AssertionSpec):
            return NotImplemented
        return self.kind == other.kind and self.params == other.params


@dataclass
class Scenario:
    """A wetness schedule with bench parameters and checks"""
    name: str
    horizon_ns: SimTime
    schedule: List[Tuple[SimTime, float]]
    crystal_hz: int = 12_000_000
    sensor: Dict[str, float] = field(default_factory=dict)
    servo: Dict[str, float] = field(default_factory=dict)
    assertions: List[AssertionSpec] = field(default_factory=list)

    def validate(self):
        """
        Check the schedule invariants

        Raises:
            ScenarioError: on any violation
        """
        if not self.schedule:
            raise ScenarioError("schedule is empty")
        if self.schedule[0][0] != 0:
            raise ScenarioError("schedule must start at time 0")
        for (t0, _), (t1, _) in zip(self.schedule, self.schedule[1:]):
            if t1 <= t0:
                raise ScenarioError(
                    f"schedule times must increase strictly ({ns_to_ms_text(t0)} ms, "
                    f"{ns_to_ms_text(t1)} ms)")
        for at, wetness in self.schedule:
            if not 0.0 <= wetness <= 1.0:
                raise ScenarioError(f"wetness {wetness} at {ns_to_ms_text(at)} ms outside [0, 1]")
        if self.horizon_ns < self.schedule[-1][0]:
            raise ScenarioError("horizon lies before the last schedule entry")

    def wetness_at(self, at: SimTime) -> float:
        """Scheduled wetness in effect at a time"""
        level = self.schedule[0][1]
        for t, wetness in self.schedule:
            if t > at:
                break
            level = wetness
        return level

    def sensor_state(self) -> RainSensorState:
        return RainSensorState(wetness=self.schedule[0][1], **self.sensor)

    def servo_config(self) -> ServoConfig:
        values = {k: int(v) if k in _SERVO_INT_FIELDS else v for k, v in self.servo.items()}
        return ServoConfig(**values)


def _number(text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ScenarioError(f"not a number: {text!r}", line)


def _time(text: str, line: int) -> SimTime:
    try:
        return ms_to_ns(text)
    except ValueError as e:
        raise ScenarioError(str(e), line)


def _parse_schedule(value: str, line: int) -> List[Tuple[SimTime, float]]:
    entries = []
    for chunk in value.split('/'):
        parts = chunk.split()
        if len(parts) != 2:
            raise ScenarioError(f"schedule entry {chunk.strip()!r} is not 'time_ms wetness'", line)
        at = _time(parts[0], line)
        wetness = _number(parts[1], line)
        if not 0.0 <= wetness <= 1.0:
            raise ScenarioError(f"wetness {wetness} outside [0, 1]", line)
        entries.append((at, wetness))
    return entries


def _parse_assertion(value: str, line: int) -> AssertionSpec:
    parts = value.split()
    if not parts:
        raise ScenarioError("empty assertion", line)
    kind = parts[0]
    if kind not in ASSERTION_PARAMS:
        raise ScenarioError(f"unknown assertion kind {kind!r}", line)

    params: Dict[str, str] = {}
    for part in parts[1:]:
        key, sep, text = part.partition('=')
        if not sep or not text:
            raise ScenarioError(f"assertion parameter {part!r} is not key=value", line)
        if key not in ASSERTION_PARAMS[kind]:
            raise ScenarioError(f"unknown parameter {key!r} for {kind}", line)
        if key in params:
            raise ScenarioError(f"parameter {key!r} given twice", line)
        if key.endswith('_ms'):
            _time(text, line)
        elif key != 'net':
            _number(text, line)
        params[key] = text

    missing = REQUIRED_PARAMS[kind] - set(params)
    if missing:
        raise ScenarioError(f"{kind} needs {', '.join(sorted(missing))}", line)
    return AssertionSpec(kind, params, line)


def parse_scenario(text: str, default_name: Optional[str] = None) -> Scenario:
    """
    Parse scenario text

    Args:
        text: Scenario file contents
        default_name: Name to use when the text has no 'name' key

    Returns:
        Validated Scenario

    Raises:
        ScenarioError: with the offending line
    """
    name = default_name
    horizon: Optional[SimTime] = None
    crystal_hz = 12_000_000
    sensor: Dict[str, float] = {}
    servo: Dict[str, float] = {}
    schedule: List[Tuple[SimTime, float]] = []
    schedule_line = None
    assertions: List[AssertionSpec] = []
    seen = set()

    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].strip()
        if not content:
            continue
        key, sep, value = content.partition('=')
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise ScenarioError(f"expected 'key = value', got {content!r}", number)

        if key not in ('schedule', 'assert'):
            if key in seen:
                raise ScenarioError(f"key {key!r} given twice", number)
            seen.add(key)

        if key == 'name':
            if not value or any(ch.isspace() or ch in '/\\' for ch in value):
                raise ScenarioError(f"invalid scenario name {value!r}", number)
            name = value
        elif key == 'horizon_ms':
            horizon = _time(value, number)
        elif key == 'crystal_hz':
            if not value.isdigit() or int(value) <= 0:
                raise ScenarioError(f"crystal_hz must be a positive integer, got {value!r}", number)
            crystal_hz = int(value)
        elif key.startswith('sensor.') and key[7:] in SENSOR_FIELDS:
            sensor[key[7:]] = _number(value, number)
        elif key.startswith('servo.') and key[6:] in SERVO_FIELDS:
            servo[key[6:]] = _number(value, number)
        elif key == 'schedule':
            entries = _parse_schedule(value, number)
            for at, _wetness in entries:
                if schedule and at <= schedule[-1][0]:
                    raise ScenarioError(
                        f"schedule time {ns_to_ms_text(at)} ms does not follow "
                        f"{ns_to_ms_text(schedule[-1][0])} ms", number)
                if not schedule and at != 0:
                    raise ScenarioError("schedule must start at time 0", number)
                schedule.append((at, _wetness))
            schedule_line = schedule_line or number
        elif key == 'assert':
            assertions.append(_parse_assertion(value, number))
        else:
            raise ScenarioError(f"unknown key {key!r}", number)

    if name is None:
        raise ScenarioError("missing 'name'")
    if horizon is None:
        raise ScenarioError("missing 'horizon_ms'")
    if not schedule:
        raise ScenarioError("missing 'schedule'")

    scenario = Scenario(name=name, horizon_ns=horizon, schedule=schedule,
                        crystal_hz=crystal_hz, sensor=sensor, servo=servo,
                        assertions=assertions)
    try:
        scenario.validate()
        scenario.sensor_state()
        scenario.servo_config()
    except ScenarioError as e:
        raise ScenarioError(str(e), schedule_line)
    except (ValueError, TypeError) as e:
        raise ScenarioError(f"invalid sensor or servo parameters: {e}")
    return scenario


def _format_number(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical text form; parse_scenario(serialize_scenario(s)) == s"""
    lines = [
        f"name = {scenario.name}",
        f"crystal_hz = {scenario.crystal_hz}",
        f"horizon_ms = {ns_to_ms_text(scenario.horizon_ns)}",
    ]
    for key in sorted(scenario.sensor):
        lines.append(f"sensor.{key} = {_format_number(scenario.sensor[key])}")
    for key in sorted(scenario.servo):
        lines.append(f"servo.{key} = {_format_number(scenario.servo[key])}")
    for at, wetness in scenario.schedule:
        lines.append(f"schedule = {ns_to_ms_text(at)} {_format_number(wetness)}")
    for spec in scenario.assertions:
        lines.append(f"assert = {spec.text()}")
    return "\n".join(lines) + "\n"
