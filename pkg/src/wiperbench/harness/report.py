"""
Scenario runs, run reports and trace export
"""
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

from ..asm.hexfile import parse_hex
from ..kernel.export import render_csv, render_vcd
from ..kernel.simulator import Trace
from ..logging.activity_logger import ActivityLogger
from ..mcs51.cpu import CpuHalt
from ..mcs51.image import ObjectImage
from .assertions import AssertionResult, evaluate
from .bench import Bench
from .scenario import Scenario


logger = logging.getLogger(__name__)

TRACE_FORMATS = ('csv', 'vcd')


@dataclass
class RunReport:
    """
    Outcome of one scenario run

    wall_clock_s is kept out of to_dict() so the written report depends only
    on the scenario and the firmware.
    """
    scenario: str
    results: List[AssertionResult] = field(default_factory=list)
    halt: Optional[Dict[str, object]] = None
    trace_files: List[str] = field(default_factory=list)
    stats: Dict[str, int] = field(default_factory=dict)
    wall_clock_s: float = 0.0

    @property
    def passed(self) -> bool:
        return self.halt is None and all(r.passed for r in self.results)

    @property
    def failures(self) -> List[AssertionResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        return {
            'scenario': self.scenario,
            'passed': self.passed,
            'halt': self.halt,
            'results': [r.to_dict() for r in self.results],
            'trace_files': list(self.trace_files),
            'stats': dict(self.stats),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        """Human-readable multi-line summary"""
        lines = [f"{'PASS' if self.passed else 'FAIL'} {self.scenario}"]
        if self.halt:
            lines.append(f"  halted: {self.halt['reason']} at PC=0x{self.halt['pc']:04X}, "
                         f"cycle {self.halt['cycle_count']}")
        for r in self.results:
            measured = "n/a" if r.measured is None else f"{r.measured:g}"
            lines.append(f"  [{'ok' if r.passed else 'FAIL'}] {r.spec}: measured {measured}, "
                         f"expected {r.expected:g} +/- {r.tolerance:g} ({r.detail})")
        return "\n".join(lines)


def export_traces(traces: Mapping[str, Trace], directory: Path, name: str,
                  fmt: str = 'csv') -> Path:
    """
    Write traces as <directory>/<name>.<fmt>

    Returns:
        Path written
    """
    if fmt not in TRACE_FORMATS:
        raise ValueError(f"Unknown trace format {fmt!r}; use one of {', '.join(TRACE_FORMATS)}")
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}.{fmt}"
    text = render_csv(traces) if fmt == 'csv' else render_vcd(traces)
    path.write_text(text, encoding='utf-8', newline='\n')
    logger.info(f"Wrote {len(traces)} traces to {path}")
    return path


def run_scenario(scenario: Scenario, firmware: Union[ObjectImage, str],
                 trace_dir: Optional[Path] = None, fmt: str = 'csv',
                 fast_forward: bool = True,
                 activity: Optional[ActivityLogger] = None) -> RunReport:
    """
    Run a scenario against a firmware image and evaluate its assertions

    Args:
        scenario: Parsed scenario
        firmware: ObjectImage or Intel HEX text
        trace_dir: Where to write traces and the JSON report (None: nowhere)
        fmt: Trace format, csv or vcd
        fast_forward: Let the CPU skip idle spin loops
        activity: Activity logger

    Returns:
        RunReport
    """
    if isinstance(firmware, str):
        firmware = parse_hex(firmware)
    activity = activity or ActivityLogger()
    activity.log_run_start(scenario.name, scenario.horizon_ns, scenario.crystal_hz)

    started = time.perf_counter()
    report = RunReport(scenario=scenario.name)
    bench = Bench(firmware, scenario, fast_forward=fast_forward)

    try:
        traces = bench.run()
    except CpuHalt as e:
        report.halt = {'reason': e.reason, 'pc': e.pc, 'cycle_count': e.cycle_count}
        activity.log_halt(scenario.name, e.pc, e.cycle_count, e.reason)
        traces = bench.sim.traces()
    else:
        for spec in scenario.assertions:
            result = evaluate(spec, traces, scenario)
            report.results.append(result)
            activity.log_assertion(scenario.name, spec.kind, result.passed, result.detail)

    report.stats = bench.stats()

    if trace_dir is not None:
        path = export_traces(traces, trace_dir, scenario.name, fmt)
        report.trace_files.append(str(path))
        report_path = trace_dir / f"{scenario.name}.report.json"
        report_path.write_text(report.to_json(), encoding='utf-8', newline='\n')

    report.wall_clock_s = time.perf_counter() - started
    activity.log_run_complete(scenario.name, report.passed, report.wall_clock_s,
                              report.stats.get('events'))
    return report
