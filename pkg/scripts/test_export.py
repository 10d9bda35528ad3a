#!/usr/bin/env python3
"""
Test CSV and VCD trace export
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

from wiperbench.kernel import Level, Trace
from wiperbench.kernel.export import (
    CSV_HEADER, TraceFormatError, _vcd_identifier, parse_csv, parse_vcd, render_csv,
    render_vcd,
)


def sample_traces():
    return {
        "SERVO_PWM": Trace.from_points([(0, Level.LOW), (30_000, Level.HIGH),
                                        (1_030_000, Level.LOW)]),
        "AO": Trace.from_points([(0, 4.950495049504951), (1_000_000, 1.2478)]),
        "DO": Trace.from_points([(0, Level.HIGH), (1_000_000, Level.LOW)]),
    }


def test_csv_layout():
    text = render_csv(sample_traces())
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1:] == [
        "0,AO,4.950495049504951",
        "0,DO,1",
        "0,SERVO_PWM,0",
        "30000,SERVO_PWM,1",
        "1000000,AO,1.2478",
        "1000000,DO,0",
        "1030000,SERVO_PWM,0",
    ]
    assert text.endswith("\n")
    assert "\r" not in text


def test_csv_reads_back():
    traces = sample_traces()
    assert parse_csv(render_csv(traces)) == traces


def test_vcd_reads_back():
    traces = sample_traces()
    text = render_vcd(traces)
    assert "$timescale 1ns $end" in text
    assert "$var real 64" in text
    assert "$var wire 1" in text
    assert parse_vcd(text) == traces


def test_vcd_identifiers_avoid_command_characters():
    codes = [_vcd_identifier(i) for i in range(5000)]
    assert len(set(codes)) == len(codes)
    assert codes[:4] == ['!', '"', '%', '&']
    for code in codes:
        assert '#' not in code and '$' not in code
        assert all(33 <= ord(ch) <= 126 for ch in code)


def test_vcd_with_many_nets_reads_back():
    traces = {
        f"N{i:03d}": Trace.from_points([(0, Level(i % 2)), (1000 + i, Level(1 - i % 2))])
        for i in range(200)
    }
    text = render_vcd(traces)
    body = text.split("$enddefinitions $end\n", 1)[1]
    assert all(line[0] in '#$01' for line in body.splitlines())
    assert parse_vcd(text) == traces


def test_vcd_changes_grouped_by_time():
    text = render_vcd(sample_traces())
    body = text.split("$enddefinitions $end\n", 1)[1].splitlines()
    stamps = [int(line[1:]) for line in body if line.startswith('#')]
    assert stamps == sorted(set(stamps))
    assert stamps == [0, 30_000, 1_000_000, 1_030_000]


def test_rendering_is_deterministic():
    a = sample_traces()
    b = dict(reversed(list(sample_traces().items())))
    assert render_csv(a) == render_csv(b)
    assert render_vcd(a) == render_vcd(b)


def test_bad_input():
    with pytest.raises(TraceFormatError):
        parse_csv("time,net\n")
    with pytest.raises(TraceFormatError):
        parse_csv(CSV_HEADER + "\nabc,DO,1\n")
    with pytest.raises(TraceFormatError):
        parse_vcd("garbage")
    with pytest.raises(TraceFormatError):
        parse_vcd("$enddefinitions $end\n1!\n")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
