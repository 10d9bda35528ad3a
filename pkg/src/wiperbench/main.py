"""
WiperBench command line

    wiperbench asm <src> -o <hex> [--listing FILE] [--symbols FILE]
    wiperbench disasm <hex> [-o FILE]
    wiperbench run <scenario> --firmware <hex|a51> [--trace-dir D] [--format csv|vcd]
    wiperbench check <scenario-dir> [--firmware <hex|a51>] [--jobs N]

Exit codes: 0 success, 1 failed assertions or bad input, 2 usage errors.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .asm import assemble, disassemble, emit_hex, parse_hex
from .config import Config
from .firmware import build_firmware
from .harness import RunReport, check, load_scenarios, parse_scenario, run_scenario
from .harness.scenario import SENSOR_FIELDS, SERVO_FIELDS
from .logging.activity_logger import ActivityLogger, setup_logging
from .mcs51.image import ObjectImage


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

SOURCE_SUFFIXES = ('.a51', '.asm', '.s')


class UsageError(Exception):
    """Bad command line input (exit 2)"""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='wiperbench',
        description='WiperBench - rain-sensing wiper firmware on an emulated AT89C51',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Assemble the firmware
  %(prog)s asm firmware/wiper.a51 -o wiper.hex

  # Run one scenario and keep VCD traces
  %(prog)s run scenarios/light_rain.scn --firmware wiper.hex --trace-dir out --format vcd

  # Run the acceptance suite on four workers
  %(prog)s check scenarios/ --jobs 4
        """
    )
    parser.add_argument('-c', '--config', help='Path to configuration file', default=None)
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', type=str.upper,
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'),
                        help='Override log level from config')

    sub = parser.add_subparsers(dest='command', required=True)

    p_asm = sub.add_parser('asm', help='Assemble source to Intel HEX')
    p_asm.add_argument('source', help='Assembly source file')
    p_asm.add_argument('-o', '--output', required=True, help='HEX output file')
    p_asm.add_argument('--listing', help='Write a listing file')
    p_asm.add_argument('--symbols', help='Write a symbol table file')

    p_dis = sub.add_parser('disasm', help='Disassemble Intel HEX')
    p_dis.add_argument('hex', help='Intel HEX file')
    p_dis.add_argument('-o', '--output', help='Write to a file instead of stdout')

    for name, helptext in (('run', 'Run one scenario'), ('check', 'Run every scenario in a directory')):
        p = sub.add_parser(name, help=helptext)
        if name == 'run':
            p.add_argument('scenario', help='Scenario file')
            p.add_argument('--firmware', required=True, help='Firmware HEX or assembly source')
            p.add_argument('--json', action='store_true', help='Print the JSON report')
        else:
            p.add_argument('scenario_dir', help='Directory of *.scn files')
            p.add_argument('--firmware', help='Firmware HEX or assembly source '
                                              '(default: the shipped firmware)')
            p.add_argument('--jobs', type=int, help='Worker processes')
        p.add_argument('--trace-dir', help='Directory for traces and JSON reports')
        p.add_argument('--format', choices=('csv', 'vcd'), help='Trace format')
        p.add_argument('--no-fast-forward', action='store_true',
                       help='Step idle loops one instruction at a time')

    return parser


def _read(path_text: str, what: str) -> str:
    path = Path(path_text)
    if not path.is_file():
        raise UsageError(f"{what} not found: {path}")
    return path.read_text(encoding='utf-8')


def _load_firmware(path_text: Optional[str]) -> ObjectImage:
    if path_text is None:
        return build_firmware().image
    text = _read(path_text, "firmware")
    if Path(path_text).suffix.lower() in SOURCE_SUFFIXES:
        return assemble(text).image
    return parse_hex(text)


def _cmd_asm(args, config: Config) -> int:
    result = assemble(_read(args.source, "source"))
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    Path(args.output).write_text(emit_hex(result.image), encoding='utf-8', newline='\n')
    if args.listing:
        Path(args.listing).write_text(result.listing, encoding='utf-8', newline='\n')
    if args.symbols:
        Path(args.symbols).write_text(result.symbols.dump(), encoding='utf-8', newline='\n')
    logger.info(f"Assembled {args.source}: {len(result.image)} bytes -> {args.output}")
    return EXIT_OK


def _cmd_disasm(args, config: Config) -> int:
    text = disassemble(parse_hex(_read(args.hex, "HEX file")))
    if args.output:
        Path(args.output).write_text(text, encoding='utf-8', newline='\n')
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _trace_options(args, config: Config):
    trace_dir = Path(args.trace_dir) if args.trace_dir else config.trace_dir
    fmt = args.format or config.trace_format
    if fmt not in ('csv', 'vcd'):
        raise UsageError(f"unknown trace format {fmt!r}")
    fast_forward = config.fast_forward and not args.no_fast_forward
    return trace_dir, fmt, fast_forward


def _apply_defaults(scenario, config: Config):
    """Config sensor/servo values fill in what the scenario leaves unset"""
    for section, allowed, values in (('sensor', SENSOR_FIELDS, config.sensor_defaults),
                                     ('servo', SERVO_FIELDS, config.servo_defaults)):
        unknown = sorted(set(values) - allowed)
        if unknown:
            raise UsageError(f"unknown {section} setting(s) in config: {', '.join(unknown)}")
    scenario.sensor = {**config.sensor_defaults, **scenario.sensor}
    scenario.servo = {**config.servo_defaults, **scenario.servo}
    return scenario


def _cmd_run(args, config: Config) -> int:
    path = Path(args.scenario)
    scenario = _apply_defaults(parse_scenario(_read(args.scenario, "scenario"),
                                              default_name=path.stem), config)
    image = _load_firmware(args.firmware)
    trace_dir, fmt, fast_forward = _trace_options(args, config)

    report = run_scenario(scenario, image, trace_dir, fmt, fast_forward, ActivityLogger())
    print(report.to_json() if args.json else report.summary(), end='' if args.json else '\n')
    return EXIT_OK if report.passed else EXIT_FAILED


def _cmd_check(args, config: Config) -> int:
    directory = Path(args.scenario_dir)
    if not directory.is_dir():
        raise UsageError(f"scenario directory not found: {directory}")
    scenarios = [_apply_defaults(s, config) for s in load_scenarios(directory)]
    if not scenarios:
        raise UsageError(f"no *.scn files in {directory}")
    image = _load_firmware(args.firmware)
    trace_dir, fmt, fast_forward = _trace_options(args, config)
    jobs = args.jobs if args.jobs is not None else config.check_workers
    if jobs < 1:
        raise UsageError("--jobs must be at least 1")

    reports: List[RunReport] = check(scenarios, image, trace_dir, fmt, jobs, fast_forward)
    for report in reports:
        print(report.summary())

    failed = [r.scenario for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} scenarios passed")
    ActivityLogger().log_stats({
        'scenarios': len(reports),
        'failed': failed,
        'instructions': sum(r.stats.get('instructions', 0) for r in reports),
    })
    return EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    'asm': _cmd_asm,
    'disasm': _cmd_disasm,
    'run': _cmd_run,
    'check': _cmd_check,
}


def cli_dispatch(argv: List[str]) -> int:
    """
    Parse arguments and run a subcommand

    Returns:
        Process exit code
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        config = Config(args.config)
    except FileNotFoundError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(
        config.log_dir,
        log_level=args.log_level or config.log_level,
        log_format=config.log_format,
        console_output=True
    )

    try:
        return COMMANDS[args.command](args, config)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        # AssemblyError, HexParseError, ScenarioError and RomLoadError are ValueErrors
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


def main():
    """Main entry point"""
    try:
        sys.exit(cli_dispatch(sys.argv[1:]))
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        sys.exit(EXIT_FAILED)


if __name__ == '__main__':
    main()
