"""
Scenario harness: co-simulation bench, assertions and reports
"""
from .assertions import AssertionResult, angle_peaks, evaluate
from .bench import Bench
from .report import RunReport, export_traces, run_scenario
from .runner import check, load_scenarios
from .scenario import (
    AssertionSpec, Scenario, ScenarioError, parse_scenario, serialize_scenario,
)

__all__ = [
    'AssertionResult', 'AssertionSpec', 'Bench', 'RunReport', 'Scenario',
    'ScenarioError', 'angle_peaks', 'check', 'evaluate', 'export_traces',
    'load_scenarios', 'parse_scenario', 'run_scenario', 'serialize_scenario',
]
