"""
Scenario checks evaluated over recorded traces
"""
import logging
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from ..kernel.pulses import measure_pulses
from ..kernel.simulator import SimTime, Trace
from ..peripherals.servo import ANGLE_NET, PWM_NET
from .scenario import AssertionSpec, Scenario


logger = logging.getLogger(__name__)

NS_PER_MS = 1_000_000
MIN_SWEEP_INTERVALS = 3


@dataclass
class AssertionResult:
    """Outcome of one check; measured is None when nothing could be measured"""
    kind: str
    spec: str
    measured: Optional[float]
    expected: float
    tolerance: float
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return asdict(self)


def _ms(ns: SimTime) -> float:
    return ns / NS_PER_MS


def angle_peaks(trace: Trace, window: Tuple[SimTime, SimTime],
                min_angle: float = 170.0) -> List[SimTime]:
    """Times of local angle maxima at or above min_angle inside a window"""
    start, end = window
    points = trace.points
    peaks = []
    for i in range(1, len(points) - 1):
        at, value = points[i]
        if not start <= at <= end:
            continue
        if value >= min_angle and value > points[i - 1][1] and value > points[i + 1][1]:
            peaks.append(at)
    return peaks


def _window(spec: AssertionSpec, scenario: Scenario) -> Tuple[SimTime, SimTime]:
    return spec.ns('from_ms', 0), spec.ns('to_ms', scenario.horizon_ns)


def _sweep_period(spec, traces, scenario) -> AssertionResult:
    expect = spec.number('expect_ms')
    tol_pct = spec.number('tol_pct', 5.0)
    tolerance = expect * tol_pct / 100
    peaks = angle_peaks(traces[ANGLE_NET], _window(spec, scenario),
                        spec.number('min_angle', 170.0))

    # The stroke before the first peak is warm-up
    intervals = [b - a for a, b in zip(peaks, peaks[1:])]
    if len(intervals) < MIN_SWEEP_INTERVALS:
        return AssertionResult('sweep_period', spec.text(), None, expect, tolerance, False,
                               f"only {len(intervals)} full sweeps after warm-up, "
                               f"need {MIN_SWEEP_INTERVALS}")
    mean = _ms(sum(intervals)) / len(intervals)
    passed = abs(mean - expect) <= tolerance
    return AssertionResult('sweep_period', spec.text(), mean, expect, tolerance, passed,
                           f"mean of {len(intervals)} sweeps {mean:.3f} ms")


def _pulse_count(spec, traces, scenario) -> AssertionResult:
    expect = spec.number('expect')
    tol = spec.number('tol', 0.0)
    count = len(measure_pulses(traces[PWM_NET], _window(spec, scenario)))
    passed = abs(count - expect) <= tol
    return AssertionResult('pulse_count', spec.text(), float(count), expect, tol, passed,
                           f"{count} pulses")


def _park_angle(spec, traces, scenario) -> AssertionResult:
    after = spec.ns('after_ms')
    expect = spec.number('expect', 0.0)
    tol = spec.number('tol', 0.5)
    trace = traces[ANGLE_NET]

    values = [trace.level_at(after)] + [v for at, v in trace.points if at > after]
    worst = max(values, key=lambda v: abs(v - expect))
    passed = abs(worst - expect) <= tol
    return AssertionResult('park_angle', spec.text(), worst, expect, tol, passed,
                           f"angle after {_ms(after):g} ms stays within "
                           f"{abs(worst - expect):.3f} deg of {expect:g}")


def _pulse_period(spec, traces, scenario) -> AssertionResult:
    expect = spec.number('expect_ms', 20.0)
    tolerance = expect * spec.number('tol_pct', 1.0) / 100
    pulses = measure_pulses(traces[PWM_NET], _window(spec, scenario))
    periods = [_ms(b[0] - a[0]) for a, b in zip(pulses, pulses[1:])]
    if not periods:
        return AssertionResult('pulse_period', spec.text(), None, expect, tolerance, False,
                               "fewer than two pulses")
    worst = max(periods, key=lambda p: abs(p - expect))
    passed = abs(worst - expect) <= tolerance
    return AssertionResult('pulse_period', spec.text(), worst, expect, tolerance, passed,
                           f"{len(periods)} periods, {min(periods):.3f}-{max(periods):.3f} ms")


def _pulse_width(spec, traces, scenario) -> AssertionResult:
    low = spec.number('min_ms', 1.0)
    high = spec.number('max_ms', 2.0)
    tol = spec.number('tol_ms', 0.02)
    widths = [_ms(w) for _, w in measure_pulses(traces[PWM_NET], _window(spec, scenario))]
    if not widths:
        return AssertionResult('pulse_width', spec.text(), None, low, tol, False, "no pulses")
    outliers = [w for w in widths if w < low - tol or w > high + tol]
    worst = outliers[0] if outliers else max(widths)
    return AssertionResult('pulse_width', spec.text(), worst, high, tol, not outliers,
                           f"{len(widths)} pulses, {min(widths):.3f}-{max(widths):.3f} ms, "
                           f"{len(outliers)} outside [{low:g}, {high:g}] ms")


def _sweep_start(spec, traces, scenario) -> AssertionResult:
    after = spec.ns('after_ms')
    within = spec.number('within_ms', 40.0)
    above = spec.number('above_ms', 1.002)
    for rise, width in measure_pulses(traces[PWM_NET], (after, scenario.horizon_ns)):
        if _ms(width) > above:
            latency = _ms(rise - after)
            return AssertionResult('sweep_start', spec.text(), latency, within, 0.0,
                                   latency <= within,
                                   f"first sweep pulse {latency:.3f} ms after the step")
    return AssertionResult('sweep_start', spec.text(), None, within, 0.0, False,
                           "no sweep pulse after the step")


def _level(spec, traces, scenario) -> AssertionResult:
    net = spec.params['net']
    expect = spec.number('expect')
    tol = spec.number('tol', 0.0)
    if net not in traces:
        return AssertionResult('level', spec.text(), None, expect, tol, False,
                               f"no net named {net}")
    at = spec.ns('at_ms')
    value = float(traces[net].level_at(at))
    return AssertionResult('level', spec.text(), value, expect, tol,
                           abs(value - expect) <= tol, f"{net} = {value:g} at {_ms(at):g} ms")


EVALUATORS: Dict[str, Callable[[AssertionSpec, Mapping[str, Trace], Scenario], AssertionResult]] = {
    'sweep_period': _sweep_period,
    'pulse_count': _pulse_count,
    'park_angle': _park_angle,
    'pulse_period': _pulse_period,
    'pulse_width': _pulse_width,
    'sweep_start': _sweep_start,
    'level': _level,
}


def evaluate(spec: AssertionSpec, traces: Mapping[str, Trace],
             scenario: Scenario) -> AssertionResult:
    """Run one check"""
    result = EVALUATORS[spec.kind](spec, traces, scenario)
    logger.debug(f"{scenario.name}: {result.spec} -> {result.passed} ({result.detail})")
    return result
