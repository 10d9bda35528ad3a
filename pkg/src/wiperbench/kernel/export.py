"""
Trace export formats

CSV: header "time_ns,net,value", one row per change point, rows sorted by
time then net name. Digital levels are written 0/1, analog values with
Python's shortest round-trip float repr.

VCD: 1 ns timescale, one scope, one variable per net (wire 1 for digital,
real 64 for analog), nets declared in name order, initial levels in a
$dumpvars block at #0.
"""
import logging
from typing import Dict, List, Mapping, Tuple

from .simulator import Level, NetValue, SimTime, Trace


logger = logging.getLogger(__name__)

CSV_HEADER = "time_ns,net,value"
VCD_SCOPE = "wiperbench"


class TraceFormatError(ValueError):
    """Raised when trace text cannot be parsed"""


def _format_value(value: NetValue) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(int(value))


def _is_analog(trace: Trace) -> bool:
    return isinstance(trace.initial, float)


def render_csv(traces: Mapping[str, Trace]) -> str:
    """
    Render traces as CSV

    Args:
        traces: Traces keyed by net name

    Returns:
        CSV text with LF line endings
    """
    rows: List[Tuple[SimTime, str, NetValue]] = []
    for name, trace in traces.items():
        for at, level in trace:
            rows.append((at, name, level))
    rows.sort(key=lambda row: (row[0], row[1]))

    lines = [CSV_HEADER]
    lines.extend(f"{at},{name},{_format_value(level)}" for at, name, level in rows)
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> Dict[str, Trace]:
    """
    Parse CSV produced by render_csv

    Returns:
        Traces keyed by net name
    """
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise TraceFormatError("Missing CSV header")

    points: Dict[str, List[Tuple[SimTime, NetValue]]] = {}
    for index, line in enumerate(lines[1:], start=2):
        try:
            at_text, name, value_text = line.split(',')
            at = int(at_text)
        except ValueError:
            raise TraceFormatError(f"Malformed CSV row {index}: {line!r}")
        value: NetValue
        if value_text in ('0', '1'):
            value = Level(int(value_text))
        else:
            value = float(value_text)
        points.setdefault(name, []).append((at, value))

    return {name: Trace.from_points(pts) for name, pts in points.items()}


# Printable ASCII minus the characters that open VCD commands and timestamps
_VCD_ID_CHARS = "".join(chr(c) for c in range(33, 127) if chr(c) not in "#$")


def _vcd_identifier(index: int) -> str:
    """Printable VCD identifier code for the n-th variable"""
    base = len(_VCD_ID_CHARS)
    chars = []
    index += 1
    while index:
        index, digit = divmod(index - 1, base)
        chars.append(_VCD_ID_CHARS[digit])
    return "".join(chars)


def render_vcd(traces: Mapping[str, Trace]) -> str:
    """
    Render traces as a value change dump

    Args:
        traces: Traces keyed by net name

    Returns:
        VCD text with LF line endings
    """
    names = sorted(traces)
    ids = {name: _vcd_identifier(i) for i, name in enumerate(names)}

    lines = [
        "$version wiperbench $end",
        "$timescale 1ns $end",
        f"$scope module {VCD_SCOPE} $end",
    ]
    for name in names:
        if _is_analog(traces[name]):
            lines.append(f"$var real 64 {ids[name]} {name} $end")
        else:
            lines.append(f"$var wire 1 {ids[name]} {name} $end")
    lines.append("$upscope $end")
    lines.append("$enddefinitions $end")

    def change(name: str, value: NetValue) -> str:
        if isinstance(value, float):
            return f"r{value!r} {ids[name]}"
        return f"{int(value)}{ids[name]}"

    lines.append("#0")
    lines.append("$dumpvars")
    for name in names:
        lines.append(change(name, traces[name].initial))
    lines.append("$end")

    changes: Dict[SimTime, List[str]] = {}
    for name in names:
        for at, level in traces[name].points[1:]:
            changes.setdefault(at, []).append(change(name, level))

    for at in sorted(changes):
        lines.append(f"#{at}")
        lines.extend(changes[at])

    return "\n".join(lines) + "\n"


def parse_vcd(text: str) -> Dict[str, Trace]:
    """
    Parse a value change dump with scalar and real variables

    Returns:
        Traces keyed by variable name
    """
    tokens = text.split()
    names: Dict[str, str] = {}
    kinds: Dict[str, str] = {}
    points: Dict[str, List[Tuple[SimTime, NetValue]]] = {}

    pos = 0
    while pos < len(tokens):
        tok = tokens[pos]
        if tok == '$var':
            try:
                var_type, _size, code, name = tokens[pos + 1:pos + 5]
            except ValueError:
                raise TraceFormatError("Truncated $var declaration")
            names[code] = name
            kinds[code] = var_type
            points[name] = []
            pos = tokens.index('$end', pos) + 1
        elif tok == '$enddefinitions':
            pos = tokens.index('$end', pos) + 1
            break
        elif tok.startswith('$'):
            pos = tokens.index('$end', pos) + 1
        else:
            raise TraceFormatError(f"Unexpected token in header: {tok!r}")

    now = None
    while pos < len(tokens):
        tok = tokens[pos]
        pos += 1
        if tok in ('$dumpvars', '$end'):
            continue
        if tok.startswith('#'):
            now = int(tok[1:])
            continue
        if now is None:
            raise TraceFormatError("Value change before first timestamp")

        if tok[0] in 'rR':
            code = tokens[pos]
            pos += 1
            value: NetValue = float(tok[1:])
        elif tok[0] in '01':
            code = tok[1:]
            value = Level(int(tok[0]))
        else:
            raise TraceFormatError(f"Unsupported value change {tok!r}")

        if code not in names:
            raise TraceFormatError(f"Unknown identifier {code!r}")
        points[names[code]].append((now, value))

    traces = {}
    for name, pts in points.items():
        if pts:
            traces[name] = Trace.from_points(pts)
    return traces
