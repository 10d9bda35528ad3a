"""
MCS-51 opcode table

One table drives the emulator's decoder, the assembler's encoder and the
disassembler. Operand kinds:

    A AB C DPTR @A+DPTR @A+PC @DPTR R0..R7 @R0 @R1   fixed registers
    direct      8-bit internal RAM / SFR address
    #data       8-bit immediate
    #data16     16-bit immediate
    bit         bit address
    /bit        complemented bit address
    rel         signed 8-bit branch offset from the next instruction
    addr11      11-bit target inside the current 2 KB page
    addr16      16-bit target
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple


@dataclass(frozen=True)
class OpcodeInfo:
    """One opcode table entry"""
    code: int
    mnemonic: str
    operands: Tuple[str, ...]
    length: int
    cycles: int

    @property
    def operand_bytes(self) -> Tuple[str, ...]:
        """
        Operand kinds in encoding order

        MOV direct,direct stores the source address first.
        """
        if self.code == 0x85:
            return ('direct', 'direct')
        return tuple(kind for kind in self.operands if kind in _ENCODED_KINDS)

    def __str__(self):
        if self.operands:
            return f"{self.mnemonic} {','.join(self.operands)}"
        return self.mnemonic


_ENCODED_KINDS = {'direct', '#data', '#data16', 'bit', '/bit', 'rel', 'addr11', 'addr16'}

_KIND_SIZE = {
    'direct': 1, '#data': 1, '#data16': 2, 'bit': 1, '/bit': 1,
    'rel': 1, 'addr11': 1, 'addr16': 2,
}

_REGISTERS = tuple(f"R{n}" for n in range(8))
_INDIRECT = ('@R0', '@R1')

UNASSIGNED_OPCODE = 0xA5


def _entries() -> List[Tuple[int, str, Tuple[str, ...], int]]:
    """(code, mnemonic, operands, cycles) for every assigned opcode"""
    table: List[Tuple[int, str, Tuple[str, ...], int]] = []

    def add(code, mnemonic, operands=(), cycles=1):
        table.append((code, mnemonic, tuple(operands), cycles))

    def arith_family(base, mnemonic, dest='A', cycles=1):
        """
        Register-file family: dest,#data (base+4) / dest,direct (base+5) /
        dest,@Ri (base+6..7) / dest,Rn (base+8..F)
        """
        add(base + 4, mnemonic, (dest, '#data'), cycles)
        add(base + 5, mnemonic, (dest, 'direct'), cycles)
        for i, ind in enumerate(_INDIRECT):
            add(base + 6 + i, mnemonic, (dest, ind), cycles)
        for i, reg in enumerate(_REGISTERS):
            add(base + 8 + i, mnemonic, (dest, reg), cycles)

    # AJMP / ACALL occupy every 32nd slot
    for page in range(8):
        add((page << 5) | 0x01, 'AJMP', ('addr11',), 2)
        add((page << 5) | 0x11, 'ACALL', ('addr11',), 2)

    add(0x00, 'NOP')
    add(0x02, 'LJMP', ('addr16',), 2)
    add(0x03, 'RR', ('A',))
    add(0x04, 'INC', ('A',))
    add(0x05, 'INC', ('direct',))
    for i, ind in enumerate(_INDIRECT):
        add(0x06 + i, 'INC', (ind,))
    for i, reg in enumerate(_REGISTERS):
        add(0x08 + i, 'INC', (reg,))

    add(0x10, 'JBC', ('bit', 'rel'), 2)
    add(0x12, 'LCALL', ('addr16',), 2)
    add(0x13, 'RRC', ('A',))
    add(0x14, 'DEC', ('A',))
    add(0x15, 'DEC', ('direct',))
    for i, ind in enumerate(_INDIRECT):
        add(0x16 + i, 'DEC', (ind,))
    for i, reg in enumerate(_REGISTERS):
        add(0x18 + i, 'DEC', (reg,))

    add(0x20, 'JB', ('bit', 'rel'), 2)
    add(0x22, 'RET', (), 2)
    add(0x23, 'RL', ('A',))
    arith_family(0x20, 'ADD')

    add(0x30, 'JNB', ('bit', 'rel'), 2)
    add(0x32, 'RETI', (), 2)
    add(0x33, 'RLC', ('A',))
    arith_family(0x30, 'ADDC')

    for base, mnemonic, branch in ((0x40, 'ORL', 'JC'), (0x50, 'ANL', 'JNC'), (0x60, 'XRL', 'JZ')):
        add(base, branch, ('rel',), 2)
        add(base + 2, mnemonic, ('direct', 'A'))
        add(base + 3, mnemonic, ('direct', '#data'), 2)
        arith_family(base, mnemonic)

    add(0x70, 'JNZ', ('rel',), 2)
    add(0x72, 'ORL', ('C', 'bit'), 2)
    add(0x73, 'JMP', ('@A+DPTR',), 2)
    add(0x74, 'MOV', ('A', '#data'))
    add(0x75, 'MOV', ('direct', '#data'), 2)
    for i, ind in enumerate(_INDIRECT):
        add(0x76 + i, 'MOV', (ind, '#data'))
    for i, reg in enumerate(_REGISTERS):
        add(0x78 + i, 'MOV', (reg, '#data'))

    add(0x80, 'SJMP', ('rel',), 2)
    add(0x82, 'ANL', ('C', 'bit'), 2)
    add(0x83, 'MOVC', ('A', '@A+PC'), 2)
    add(0x84, 'DIV', ('AB',), 4)
    add(0x85, 'MOV', ('direct', 'direct'), 2)
    for i, ind in enumerate(_INDIRECT):
        add(0x86 + i, 'MOV', ('direct', ind), 2)
    for i, reg in enumerate(_REGISTERS):
        add(0x88 + i, 'MOV', ('direct', reg), 2)

    add(0x90, 'MOV', ('DPTR', '#data16'), 2)
    add(0x92, 'MOV', ('bit', 'C'), 2)
    add(0x93, 'MOVC', ('A', '@A+DPTR'), 2)
    arith_family(0x90, 'SUBB')

    add(0xA0, 'ORL', ('C', '/bit'), 2)
    add(0xA2, 'MOV', ('C', 'bit'))
    add(0xA3, 'INC', ('DPTR',), 2)
    add(0xA4, 'MUL', ('AB',), 4)
    for i, ind in enumerate(_INDIRECT):
        add(0xA6 + i, 'MOV', (ind, 'direct'), 2)
    for i, reg in enumerate(_REGISTERS):
        add(0xA8 + i, 'MOV', (reg, 'direct'), 2)

    add(0xB0, 'ANL', ('C', '/bit'), 2)
    add(0xB2, 'CPL', ('bit',))
    add(0xB3, 'CPL', ('C',))
    add(0xB4, 'CJNE', ('A', '#data', 'rel'), 2)
    add(0xB5, 'CJNE', ('A', 'direct', 'rel'), 2)
    for i, ind in enumerate(_INDIRECT):
        add(0xB6 + i, 'CJNE', (ind, '#data', 'rel'), 2)
    for i, reg in enumerate(_REGISTERS):
        add(0xB8 + i, 'CJNE', (reg, '#data', 'rel'), 2)

    add(0xC0, 'PUSH', ('direct',), 2)
    add(0xC2, 'CLR', ('bit',))
    add(0xC3, 'CLR', ('C',))
    add(0xC4, 'SWAP', ('A',))
    add(0xC5, 'XCH', ('A', 'direct'))
    for i, ind in enumerate(_INDIRECT):
        add(0xC6 + i, 'XCH', ('A', ind))
    for i, reg in enumerate(_REGISTERS):
        add(0xC8 + i, 'XCH', ('A', reg))

    add(0xD0, 'POP', ('direct',), 2)
    add(0xD2, 'SETB', ('bit',))
    add(0xD3, 'SETB', ('C',))
    add(0xD4, 'DA', ('A',))
    add(0xD5, 'DJNZ', ('direct', 'rel'), 2)
    for i, ind in enumerate(_INDIRECT):
        add(0xD6 + i, 'XCHD', ('A', ind))
    for i, reg in enumerate(_REGISTERS):
        add(0xD8 + i, 'DJNZ', (reg, 'rel'), 2)

    add(0xE0, 'MOVX', ('A', '@DPTR'), 2)
    for i, ind in enumerate(_INDIRECT):
        add(0xE2 + i, 'MOVX', ('A', ind), 2)
    add(0xE4, 'CLR', ('A',))
    add(0xE5, 'MOV', ('A', 'direct'))
    for i, ind in enumerate(_INDIRECT):
        add(0xE6 + i, 'MOV', ('A', ind))
    for i, reg in enumerate(_REGISTERS):
        add(0xE8 + i, 'MOV', ('A', reg))

    add(0xF0, 'MOVX', ('@DPTR', 'A'), 2)
    for i, ind in enumerate(_INDIRECT):
        add(0xF2 + i, 'MOVX', (ind, 'A'), 2)
    add(0xF4, 'CPL', ('A',))
    add(0xF5, 'MOV', ('direct', 'A'))
    for i, ind in enumerate(_INDIRECT):
        add(0xF6 + i, 'MOV', (ind, 'A'))
    for i, reg in enumerate(_REGISTERS):
        add(0xF8 + i, 'MOV', (reg, 'A'))

    return table


def _build_table() -> Tuple[Optional[OpcodeInfo], ...]:
    table: List[Optional[OpcodeInfo]] = [None] * 256
    for code, mnemonic, operands, cycles in _entries():
        if table[code] is not None:
            raise RuntimeError(f"Opcode 0x{code:02X} defined twice")
        length = 1 + sum(_KIND_SIZE.get(kind, 0) for kind in operands)
        table[code] = OpcodeInfo(code, mnemonic, operands, length, cycles)
    return tuple(table)


OPCODES: Tuple[Optional[OpcodeInfo], ...] = _build_table()


def _build_forms() -> Dict[str, List[OpcodeInfo]]:
    forms: Dict[str, List[OpcodeInfo]] = {}
    for info in OPCODES:
        if info is not None:
            forms.setdefault(info.mnemonic, []).append(info)
    return forms


# Every encoding of each mnemonic
FORMS: Dict[str, List[OpcodeInfo]] = _build_forms()

MNEMONICS = frozenset(FORMS)


def lookup(code: int) -> Optional[OpcodeInfo]:
    """Table entry for an opcode byte, None for the unassigned opcode"""
    return OPCODES[code & 0xFF]


@dataclass(frozen=True)
class Instruction:
    """
    A decoded instruction

    values is aligned with info.operands: the decoded number for encoded
    operand kinds (rel as a signed offset, addr11 as its 11-bit field),
    None for fixed registers.
    """
    address: int
    info: OpcodeInfo
    values: Tuple[Optional[int], ...]

    @property
    def length(self) -> int:
        return self.info.length

    @property
    def cycles(self) -> int:
        return self.info.cycles

    @property
    def next_address(self) -> int:
        return (self.address + self.info.length) & 0xFFFF

    @property
    def target(self) -> Optional[int]:
        """Absolute branch target for rel/addr11/addr16 operands"""
        for kind, value in zip(self.info.operands, self.values):
            if kind == 'rel':
                return (self.next_address + value) & 0xFFFF
            if kind == 'addr11':
                return (self.next_address & 0xF800) | value
            if kind == 'addr16':
                return value
        return None


class DecodeError(ValueError):
    """Raised when bytes do not form an instruction"""


def decode(fetch, address: int) -> Instruction:
    """
    Decode the instruction at an address

    Args:
        fetch: Callable returning the byte at an address (may raise for
            addresses with no code)
        address: Address of the opcode byte

    Returns:
        Instruction

    Raises:
        DecodeError: for the unassigned opcode
    """
    code = fetch(address)
    info = OPCODES[code]
    if info is None:
        raise DecodeError(f"Unassigned opcode 0x{code:02X} at 0x{address:04X}")

    raw = [fetch((address + i) & 0xFFFF) for i in range(1, info.length)]
    encoded = []
    pos = 0
    for kind in info.operand_bytes:
        if _KIND_SIZE[kind] == 2:
            encoded.append((raw[pos] << 8) | raw[pos + 1])
            pos += 2
        else:
            encoded.append(raw[pos])
            pos += 1
    if code == 0x85:
        # Source address is encoded first
        encoded.reverse()

    values: List[Optional[int]] = []
    queue = iter(encoded)
    for kind in info.operands:
        if kind not in _ENCODED_KINDS:
            values.append(None)
            continue
        value = next(queue)
        if kind == 'rel' and value >= 0x80:
            value -= 0x100
        elif kind == 'addr11':
            value = ((code & 0xE0) << 3) | value
        values.append(value)

    return Instruction(address, info, tuple(values))
