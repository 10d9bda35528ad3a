"""
Utility functions for WiperBench
"""
from decimal import Decimal, InvalidOperation
import re


_HEX_SUFFIX = re.compile(r'^[0-9][0-9A-F]*H$')
_HEX_PREFIX = re.compile(r'^0X[0-9A-F]+$')
_BINARY = re.compile(r'^[01]+B$')
_DECIMAL = re.compile(r'^[0-9]+$')


def parse_number(literal: str) -> int:
    """
    Parse an assembler numeric literal

    Examples:
        55h -> 85
        0x55 -> 85
        85 -> 85
        01010101b -> 85

    Args:
        literal: Literal text as written in the source

    Returns:
        Integer value

    Raises:
        ValueError: if the text is not a well-formed literal
    """
    text = literal.strip().upper()

    if _HEX_SUFFIX.match(text):
        return int(text[:-1], 16)
    if _HEX_PREFIX.match(text):
        return int(text[2:], 16)
    if _BINARY.match(text):
        return int(text[:-1], 2)
    if _DECIMAL.match(text):
        return int(text, 10)

    raise ValueError(f"Malformed numeric literal: {literal!r}")


def ms_to_ns(text: str) -> int:
    """
    Convert a millisecond quantity written in decimal to integer nanoseconds

    Examples:
        "20" -> 20000000
        "1.5" -> 1500000

    Raises:
        ValueError: if the text is not a decimal number or has sub-ns precision
    """
    try:
        value = Decimal(text.strip())
    except InvalidOperation:
        raise ValueError(f"Not a number: {text!r}")
    if not value.is_finite():
        raise ValueError(f"Not a finite number: {text!r}")

    ns = value * 1_000_000
    if ns != ns.to_integral_value():
        raise ValueError(f"Time {text!r} ms is finer than 1 ns")
    return int(ns)


def ns_to_ms_text(ns: int) -> str:
    """
    Format integer nanoseconds as the shortest exact millisecond text

    Examples:
        20000000 -> "20"
        1500000 -> "1.5"
    """
    sign = '-' if ns < 0 else ''
    whole, frac = divmod(abs(ns), 1_000_000)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:06d}".rstrip('0')


__all__ = ['parse_number', 'ms_to_ns', 'ns_to_ms_text']
