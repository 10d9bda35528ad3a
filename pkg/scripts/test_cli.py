#!/usr/bin/env python3
"""
Test the wiperbench command line: subcommands, output files and exit codes
"""
import json
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

from wiperbench.asm import assemble, parse_hex
from wiperbench.firmware import firmware_source
from wiperbench.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, cli_dispatch


PASSING = """\
name = quick_dry
horizon_ms = 100
schedule = 0 0.0
assert = pulse_count from_ms=0 to_ms=100 expect=5 tol=1
"""

FAILING = """\
name = wrong_level
horizon_ms = 50
schedule = 0 0.0
assert = level net=DO at_ms=10 expect=0
"""


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    """Isolated directory with an empty config and no environment overrides"""
    monkeypatch.chdir(tmp_path)
    for name in ('WIPERBENCH_TRACE_DIR', 'WIPERBENCH_CONFIG', 'LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)
    (tmp_path / "config.yaml").write_text("logging:\n  level: ERROR\n")
    (tmp_path / "wiper.a51").write_text(firmware_source())
    return tmp_path


def run_cli(*args) -> int:
    return cli_dispatch(['-c', 'config.yaml', *args])


def test_asm_writes_hex_listing_and_symbols(workspace):
    code = run_cli('asm', 'wiper.a51', '-o', 'wiper.hex',
                   '--listing', 'wiper.lst', '--symbols', 'wiper.sym')
    assert code == EXIT_OK
    assert parse_hex((workspace / "wiper.hex").read_text()) == assemble(firmware_source()).image
    assert "LJMP" in (workspace / "wiper.lst").read_text()
    assert "START" in (workspace / "wiper.sym").read_text()


def test_asm_firmware_from_repository_root(tmp_path, monkeypatch):
    monkeypatch.chdir(Path(__file__).parent.parent)
    for name in ('WIPERBENCH_TRACE_DIR', 'WIPERBENCH_CONFIG', 'LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)
    output = tmp_path / "wiper.hex"

    assert cli_dispatch(['asm', 'firmware/wiper.a51', '-o', str(output)]) == EXIT_OK
    assert parse_hex(output.read_text()) == assemble(firmware_source()).image


def test_asm_error_exits_one(workspace, capsys):
    (workspace / "bad.a51").write_text("NOP\nMOV A,#999\n")
    assert run_cli('asm', 'bad.a51', '-o', 'bad.hex') == EXIT_FAILED
    assert "line 2" in capsys.readouterr().err
    assert not (workspace / "bad.hex").exists()


def test_asm_warnings_go_to_stderr(workspace, capsys):
    (workspace / "warn.a51").write_text("UNUSED EQU 1\nNOP\n")
    assert run_cli('asm', 'warn.a51', '-o', 'warn.hex') == EXIT_OK
    assert "defined but not used" in capsys.readouterr().err


def test_disasm_to_stdout(workspace, capsys):
    run_cli('asm', 'wiper.a51', '-o', 'wiper.hex')
    capsys.readouterr()
    assert run_cli('disasm', 'wiper.hex') == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("LJMP 0x0030\nORG 0x0030\n")
    assert out.endswith("END\n")


def test_disasm_bad_hex_exits_one(workspace):
    (workspace / "bad.hex").write_text(":0100000000FE\n")
    assert run_cli('disasm', 'bad.hex') == EXIT_FAILED


def test_run_passing_scenario(workspace, capsys):
    (workspace / "quick.scn").write_text(PASSING)
    assert run_cli('run', 'quick.scn', '--firmware', 'wiper.a51') == EXIT_OK
    assert capsys.readouterr().out.startswith("PASS quick_dry")


def test_run_json_and_traces(workspace, capsys):
    (workspace / "quick.scn").write_text(PASSING)
    run_cli('asm', 'wiper.a51', '-o', 'wiper.hex')
    capsys.readouterr()

    code = run_cli('run', 'quick.scn', '--firmware', 'wiper.hex', '--json',
                   '--trace-dir', 'out', '--format', 'vcd')

    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report['passed'] is True
    assert report['trace_files'] == [str(Path('out') / 'quick_dry.vcd')]
    assert (workspace / "out" / "quick_dry.vcd").read_text().startswith("$")
    assert (workspace / "out" / "quick_dry.report.json").is_file()


def test_run_failing_assertion_exits_one(workspace, capsys):
    (workspace / "fail.scn").write_text(FAILING)
    assert run_cli('run', 'fail.scn', '--firmware', 'wiper.a51') == EXIT_FAILED
    assert capsys.readouterr().out.startswith("FAIL wrong_level")


def test_run_bad_scenario_exits_one(workspace, capsys):
    (workspace / "bad.scn").write_text("name = bad\nhorizon_ms = 10\nschedule = 0 7\n")
    assert run_cli('run', 'bad.scn', '--firmware', 'wiper.a51') == EXIT_FAILED
    assert "line 3" in capsys.readouterr().err


def test_run_trace_dir_from_environment(workspace, monkeypatch):
    (workspace / "quick.scn").write_text(PASSING)
    monkeypatch.setenv('WIPERBENCH_TRACE_DIR', str(workspace / "env_traces"))
    assert run_cli('run', 'quick.scn', '--firmware', 'wiper.a51') == EXIT_OK
    assert (workspace / "env_traces" / "quick_dry.csv").is_file()


def test_check_directory(workspace, capsys):
    scenarios = workspace / "scenarios"
    scenarios.mkdir()
    (scenarios / "a.scn").write_text(PASSING)
    (scenarios / "b.scn").write_text(PASSING.replace("quick_dry", "quick_dry_2"))

    assert run_cli('check', 'scenarios') == EXIT_OK
    assert "2/2 scenarios passed" in capsys.readouterr().out

    (scenarios / "c.scn").write_text(FAILING)
    assert run_cli('check', 'scenarios', '--firmware', 'wiper.a51') == EXIT_FAILED
    assert "2/3 scenarios passed" in capsys.readouterr().out


def test_config_defaults_fill_scenario(workspace, capsys):
    # A higher DO threshold makes the dry board read wet
    (workspace / "config.yaml").write_text("sensor:\n  pot_light: 4.99\n")
    (workspace / "fail.scn").write_text(FAILING)
    assert run_cli('run', 'fail.scn', '--firmware', 'wiper.a51') == EXIT_OK


@pytest.mark.parametrize("args", [
    (),
    ('frobnicate',),
    ('run', 'quick.scn'),
    ('run', 'quick.scn', '--firmware', 'wiper.a51', '--format', 'xml'),
    ('--log-level', 'LOUD', 'disasm', 'x.hex'),
    ('check', 'scenarios', '--jobs', 'many'),
])
def test_bad_arguments_exit_two(workspace, args):
    (workspace / "quick.scn").write_text(PASSING)
    assert run_cli(*args) == EXIT_USAGE


def test_help_exits_zero(workspace):
    assert run_cli('--help') == EXIT_OK


def test_version(workspace, capsys):
    assert run_cli('--version') == EXIT_OK
    assert "wiperbench 0.1.0" in capsys.readouterr().out


def test_usage_errors_exit_two(workspace):
    assert run_cli('asm', 'missing.a51', '-o', 'x.hex') == EXIT_USAGE
    assert run_cli('disasm', 'missing.hex') == EXIT_USAGE
    assert run_cli('run', 'missing.scn', '--firmware', 'wiper.a51') == EXIT_USAGE
    assert run_cli('check', 'no_such_dir') == EXIT_USAGE

    (workspace / "empty").mkdir()
    assert run_cli('check', 'empty') == EXIT_USAGE

    (workspace / "one").mkdir()
    (workspace / "one" / "a.scn").write_text(PASSING)
    assert run_cli('check', 'one', '--jobs', '0') == EXIT_USAGE


def test_missing_explicit_config_exits_two(workspace):
    assert cli_dispatch(['-c', 'nope.yaml', 'disasm', 'x.hex']) == EXIT_USAGE


def test_unknown_config_key_exits_two(workspace, capsys):
    (workspace / "config.yaml").write_text("sensor:\n  colour: 1\n")
    (workspace / "quick.scn").write_text(PASSING)
    assert run_cli('run', 'quick.scn', '--firmware', 'wiper.a51') == EXIT_USAGE
    assert "colour" in capsys.readouterr().err


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
