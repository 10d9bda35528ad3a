"""
Run every scenario in a directory
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple

from ..asm.hexfile import emit_hex, parse_hex
from ..mcs51.image import ObjectImage
from .report import RunReport, run_scenario
from .scenario import Scenario, parse_scenario


logger = logging.getLogger(__name__)

SCENARIO_SUFFIX = ".scn"


def load_scenarios(directory: Path) -> List[Scenario]:
    """
    Parse every *.scn file in a directory

    Raises:
        ScenarioError: naming the file that failed
        ValueError: if two files share a scenario name
    """
    scenarios = []
    names = {}
    for path in sorted(directory.glob(f"*{SCENARIO_SUFFIX}")):
        try:
            scenario = parse_scenario(path.read_text(encoding='utf-8'), default_name=path.stem)
        except ValueError as e:
            raise type(e)(f"{path}: {e}") from e
        if scenario.name in names:
            raise ValueError(f"Scenario name {scenario.name} used by {names[scenario.name]} and {path}")
        names[scenario.name] = path
        scenarios.append(scenario)
    return scenarios


def _run_one(job: Tuple[Scenario, str, Optional[str], str, bool]) -> RunReport:
    scenario, hex_text, trace_dir, fmt, fast_forward = job
    return run_scenario(scenario, parse_hex(hex_text),
                        Path(trace_dir) if trace_dir else None, fmt, fast_forward)


def check(scenarios: List[Scenario], image: ObjectImage,
          trace_dir: Optional[Path] = None, fmt: str = 'csv',
          jobs: int = 1, fast_forward: bool = True) -> List[RunReport]:
    """
    Run scenarios, one simulation per scenario

    Args:
        scenarios: Scenarios to run
        image: Firmware image
        trace_dir: Trace/report output directory
        fmt: Trace format
        jobs: Worker processes (1 runs in-process)
        fast_forward: Let the CPU skip idle spin loops

    Returns:
        Reports sorted by scenario name
    """
    hex_text = emit_hex(image)
    work = [(s, hex_text, str(trace_dir) if trace_dir else None, fmt, fast_forward)
            for s in scenarios]

    if jobs > 1 and len(work) > 1:
        logger.info(f"Running {len(work)} scenarios on {jobs} workers")
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_one, work))
    else:
        reports = [_run_one(job) for job in work]

    return sorted(reports, key=lambda r: r.scenario)
