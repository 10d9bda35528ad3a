"""
Disassembler producing canonical, re-assemblable source

Canonical form: one statement per line, no indentation, numbers as
uppercase 0x-prefixed hex, SFRs and SFR bits by name, branch targets as
absolute addresses. Bytes that do not decode become DB directives.
"""
from typing import List, Optional

from ..mcs51.image import ObjectImage
from ..mcs51.opcodes import DecodeError, Instruction, decode
from ..mcs51.sfr import bit_name, sfr_name


class _Truncated(Exception):
    pass


def _direct(address: int) -> str:
    if address >= 0x80:
        name = sfr_name(address)
        if name:
            return name
    return f"0x{address:02X}"


def _bit(address: int) -> str:
    return bit_name(address) or f"0x{address:02X}"


def _branch_target(instr: Instruction, offset: int) -> str:
    raw = instr.address + instr.length + offset
    if 0 <= raw <= 0xFFFF:
        return f"0x{raw:04X}"
    # Target wraps the address space; keep it relative
    delta = raw - instr.address
    return f"${delta:+d}"


def format_operand(instr: Instruction, kind: str, value: Optional[int]) -> str:
    """Canonical text of one operand"""
    if value is None:
        return kind
    if kind == 'direct':
        return _direct(value)
    if kind == '#data':
        return f"#0x{value:02X}"
    if kind == '#data16':
        return f"#0x{value:04X}"
    if kind == 'bit':
        return _bit(value)
    if kind == '/bit':
        return '/' + _bit(value)
    if kind == 'rel':
        return _branch_target(instr, value)
    if kind == 'addr11':
        return f"0x{instr.target:04X}"
    return f"0x{value:04X}"


def format_instruction(instr: Instruction) -> str:
    """Canonical source text of a decoded instruction"""
    operands = [format_operand(instr, kind, value)
                for kind, value in zip(instr.info.operands, instr.values)]
    if operands:
        return f"{instr.info.mnemonic} {','.join(operands)}"
    return instr.info.mnemonic


def disassemble(image: ObjectImage) -> str:
    """
    Disassemble an image as a linear instruction stream

    Each contiguous run is decoded from its first byte; an ORG is emitted
    wherever the next byte is not at the running address.

    Returns:
        Source text that re-assembles to the same bytes
    """
    lines: List[str] = []
    expected = 0

    for start, run in image.segments():
        if start != expected:
            lines.append(f"ORG 0x{start:04X}")
        end = start + len(run)

        def fetch(address: int) -> int:
            if not start <= address < end:
                raise _Truncated()
            return run[address - start]

        address = start
        while address < end:
            try:
                instr = decode(fetch, address)
            except (DecodeError, _Truncated):
                lines.append(f"DB 0x{run[address - start]:02X}")
                address += 1
                continue
            lines.append(format_instruction(instr))
            address += instr.length
        expected = end

    lines.append("END")
    return "\n".join(lines) + "\n"
