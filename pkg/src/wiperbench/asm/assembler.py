"""
Two-pass MCS-51 assembler

Pass 1 picks an encoding for every statement from its operand syntax alone,
which fixes all sizes and label addresses. Pass 2 evaluates operand
expressions and emits bytes.

Supported directives: ORG, EQU, DB, END. Expressions are sums and
differences of numbers, symbols and '$' (address of the current
statement); 'expr.n' names bit n of a bit-addressable byte.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from ..mcs51.image import ROM_SIZE, ObjectImage
from ..mcs51.opcodes import FORMS, OpcodeInfo
from ..mcs51.sfr import SFR_ADDRESSES, SFR_BITS, bit_address
from .lexer import AssemblyError, Token, tokenize_lines


logger = logging.getLogger(__name__)

_FIXED_KINDS = frozenset({
    'A', 'AB', 'C', 'DPTR', '@A+DPTR', '@A+PC', '@DPTR', '@R0', '@R1',
} | {f"R{n}" for n in range(8)})

# Operand kinds an untagged expression can fill
_EXPRESSION_KINDS = frozenset({'direct', 'bit', 'rel', 'addr11', 'addr16'})


@dataclass
class Symbol:
    """A named value with where it came from"""
    name: str
    value: int
    origin: str  # 'label', 'equ' or 'builtin'
    line: Optional[int] = None


class SymbolTable:
    """Name -> value map, pre-seeded with SFR and SFR bit names"""

    def __init__(self):
        self._symbols: Dict[str, Symbol] = {}
        for name, address in SFR_ADDRESSES.items():
            self._symbols[name] = Symbol(name, address, 'builtin')
        for name, address in SFR_BITS.items():
            self._symbols[name] = Symbol(name, address, 'builtin')
        self.referenced: set = set()

    def define(self, name: str, value: int, origin: str, line: int):
        existing = self._symbols.get(name)
        if existing is not None:
            if existing.origin == 'builtin':
                raise AssemblyError(f"Symbol {name} redefines a built-in SFR name", line)
            raise AssemblyError(
                f"Duplicate symbol {name} (first defined on line {existing.line})", line)
        self._symbols[name] = Symbol(name, value & 0xFFFF, origin, line)

    def lookup(self, name: str) -> Optional[int]:
        symbol = self._symbols.get(name)
        if symbol is None:
            return None
        self.referenced.add(name)
        return symbol.value

    def __contains__(self, name: str) -> bool:
        return name in self._symbols

    def __getitem__(self, name: str) -> Symbol:
        return self._symbols[name]

    def user_symbols(self) -> List[Symbol]:
        """Labels and EQU symbols in definition order"""
        return [s for s in self._symbols.values() if s.origin != 'builtin']

    def dump(self) -> str:
        """Symbol listing, one 'NAME value origin' line per user symbol"""
        return "".join(f"{s.name:<16} 0x{s.value:04X} {s.origin}\n"
                       for s in sorted(self.user_symbols(), key=lambda s: s.name))


@dataclass
class Operand:
    """
    One parsed operand

    kind is a fixed register kind ('A', '@R0', ...), 'imm' for #expr,
    'nbit' for /expr or 'expr' for a bare expression.
    """
    kind: str
    expr: List[Token] = field(default_factory=list)


@dataclass
class SourceStatement:
    """A parsed source line"""
    line: int
    text: str
    label: Optional[str] = None
    op: Optional[str] = None
    operands: List[Operand] = field(default_factory=list)
    # EQU/ORG/DB operands as raw token groups
    args: List[List[Token]] = field(default_factory=list)
    form: Optional[OpcodeInfo] = None
    address: int = 0
    size: int = 0


@dataclass
class AssemblyResult:
    """Output of assemble()"""
    image: ObjectImage
    symbols: SymbolTable
    listing: str
    warnings: List[str]

    def __iter__(self) -> Iterator:
        return iter((self.image, self.symbols, self.listing))


def _split_commas(tokens: List[Token]) -> List[List[Token]]:
    groups: List[List[Token]] = [[]]
    for tok in tokens:
        if tok.kind == 'COMMA':
            groups.append([])
        else:
            groups[-1].append(tok)
    return groups


def _parse_operand(tokens: List[Token], line: int) -> Operand:
    if not tokens:
        raise AssemblyError("Missing operand", line)
    first = tokens[0]
    kinds = [t.kind for t in tokens]
    texts = [t.text for t in tokens]

    if kinds == ['REG'] and first.text != 'PC':
        return Operand(first.text)
    if first.kind == 'AT':
        if kinds == ['AT', 'REG'] and texts[1] in ('R0', 'R1', 'DPTR'):
            return Operand('@' + texts[1])
        if kinds == ['AT', 'REG', 'PLUS', 'REG'] and texts[1] == 'A' \
                and texts[3] in ('DPTR', 'PC'):
            return Operand(f"@A+{texts[3]}")
        raise AssemblyError(f"Bad indirect operand {''.join(texts)}", line)
    if first.kind == 'IMM':
        number = Token('NUMBER', first.text[1:], first.line, first.column, first.value)
        return Operand('imm', [number] + tokens[1:])
    if first.kind == 'HASH':
        return Operand('imm', tokens[1:])
    if first.kind == 'SLASH':
        return Operand('nbit', tokens[1:])
    if any(t.kind == 'REG' for t in tokens):
        raise AssemblyError(f"Register in expression: {' '.join(texts)}", line)
    return Operand('expr', tokens)


def _operand_fits(operand: Operand, kind: str) -> bool:
    if kind in _FIXED_KINDS:
        return operand.kind == kind
    if kind in ('#data', '#data16'):
        return operand.kind == 'imm'
    if kind == '/bit':
        return operand.kind == 'nbit'
    return operand.kind == 'expr' and kind in _EXPRESSION_KINDS


def _select_form(stmt: SourceStatement) -> OpcodeInfo:
    forms = FORMS.get(stmt.op)
    if forms is None:
        raise AssemblyError(f"Unknown mnemonic {stmt.op}", stmt.line)
    for form in forms:
        if len(form.operands) != len(stmt.operands):
            continue
        if all(_operand_fits(op, kind) for op, kind in zip(stmt.operands, form.operands)):
            # AJMP/ACALL share a mnemonic across pages; pass 2 picks the page
            return form
    shapes = ','.join(op.kind for op in stmt.operands) or 'no operands'
    raise AssemblyError(f"Operand mismatch for {stmt.op}: {shapes}", stmt.line)


class Assembler:
    """
    Assembles one source text

    Use assemble() for the common case.
    """

    def __init__(self, source: str):
        self.source = source
        self.symbols = SymbolTable()
        self.statements: List[SourceStatement] = []
        self.warnings: List[str] = []
        self._equ_lines: Dict[str, int] = {}

    # ------------------------------------------------------------------
    # Parsing

    def _parse(self):
        lines = self.source.splitlines()
        ended = False
        for number, tokens in enumerate(tokenize_lines(self.source), start=1):
            if not tokens:
                continue
            if ended:
                self.warnings.append(f"line {number}: text after END ignored")
                continue
            stmt = self._parse_statement(tokens, number, lines[number - 1])
            self.statements.append(stmt)
            if stmt.op == 'END':
                ended = True

    def _parse_statement(self, tokens: List[Token], line: int, text: str) -> SourceStatement:
        stmt = SourceStatement(line=line, text=text)
        pos = 0
        if tokens[0].kind == 'LABEL':
            stmt.label = tokens[0].text
            pos = 1

        rest = tokens[pos:]
        if not rest:
            return stmt

        head = rest[0]
        if head.kind == 'IDENT' and len(rest) > 1 and rest[1].kind == 'DIRECTIVE' \
                and rest[1].text == 'EQU':
            if stmt.label:
                raise AssemblyError("EQU cannot carry a label", line)
            stmt.label = head.text
            stmt.op = 'EQU'
            stmt.args = [rest[2:]]
            if not rest[2:]:
                raise AssemblyError("EQU needs a value", line)
            return stmt

        if head.kind == 'DIRECTIVE':
            stmt.op = head.text
            if stmt.op == 'EQU':
                raise AssemblyError("EQU needs a name", line)
            stmt.args = _split_commas(rest[1:]) if len(rest) > 1 else []
            if stmt.op in ('ORG', 'DB') and (not stmt.args or any(not a for a in stmt.args)):
                raise AssemblyError(f"{stmt.op} needs an operand", line)
            if stmt.op == 'END' and stmt.args:
                raise AssemblyError("END takes no operands", line)
            return stmt

        if head.kind != 'MNEMONIC':
            raise AssemblyError(f"Unknown mnemonic {head.text}", line)

        stmt.op = head.text
        if len(rest) > 1:
            stmt.operands = [_parse_operand(group, line) for group in _split_commas(rest[1:])]
        stmt.form = _select_form(stmt)
        return stmt

    # ------------------------------------------------------------------
    # Expressions

    def _evaluate(self, tokens: List[Token], here: int, line: int) -> int:
        """
        Evaluate [-]term {(+|-) term} where term is NUMBER, symbol or $,
        optionally followed by .bit
        """
        if not tokens:
            raise AssemblyError("Missing expression", line)

        total = 0
        sign = 1
        pos = 0
        expect_term = True

        while pos < len(tokens):
            tok = tokens[pos]
            if expect_term:
                if tok.kind == 'MINUS' and pos == 0:
                    sign = -1
                    pos += 1
                    continue
                if tok.kind == 'NUMBER':
                    value = tok.value
                elif tok.kind == 'DOLLAR':
                    value = here
                elif tok.kind == 'IDENT':
                    value = self.symbols.lookup(tok.text)
                    if value is None:
                        raise AssemblyError(f"Undefined symbol {tok.text}", line)
                elif tok.kind == 'STRING' and len(tok.text) == 1:
                    value = ord(tok.text)
                else:
                    raise AssemblyError(f"Unexpected {tok.text!r} in expression", line)
                pos += 1

                if pos + 1 < len(tokens) and tokens[pos].kind == 'DOT':
                    bit_tok = tokens[pos + 1]
                    if bit_tok.kind != 'NUMBER':
                        raise AssemblyError("Bit index must be a number", line)
                    try:
                        value = bit_address(value, bit_tok.value)
                    except ValueError as e:
                        raise AssemblyError(str(e), line)
                    pos += 2

                total += sign * value
                expect_term = False
            else:
                if tok.kind == 'PLUS':
                    sign = 1
                elif tok.kind == 'MINUS':
                    sign = -1
                else:
                    raise AssemblyError(f"Expected + or - before {tok.text!r}", line)
                pos += 1
                expect_term = True

        if expect_term:
            raise AssemblyError("Expression ends with an operator", line)
        return total

    # ------------------------------------------------------------------
    # Passes

    def _pass1(self):
        location = 0
        for stmt in self.statements:
            if stmt.op == 'EQU':
                value = self._evaluate(stmt.args[0], location, stmt.line)
                self.symbols.define(stmt.label, value, 'equ', stmt.line)
                self._equ_lines[stmt.label] = stmt.line
                continue

            if stmt.op == 'ORG':
                if len(stmt.args) != 1:
                    raise AssemblyError("ORG takes one operand", stmt.line)
                location = self._evaluate(stmt.args[0], location, stmt.line)
                if not 0 <= location < ROM_SIZE:
                    raise AssemblyError(f"ORG 0x{location:04X} is beyond the 4 KB ROM", stmt.line)

            stmt.address = location
            if stmt.label:
                self.symbols.define(stmt.label, location, 'label', stmt.line)

            if stmt.op == 'DB':
                stmt.size = sum(len(arg[0].text) if len(arg) == 1 and arg[0].kind == 'STRING'
                                else 1 for arg in stmt.args)
            elif stmt.form is not None:
                stmt.size = stmt.form.length
            location += stmt.size

    def _encode(self, stmt: SourceStatement) -> bytes:
        form = stmt.form
        next_address = stmt.address + form.length
        values: Dict[int, int] = {}
        opcode = form.code

        for index, (operand, kind) in enumerate(zip(stmt.operands, form.operands)):
            if kind in _FIXED_KINDS:
                continue
            value = self._evaluate(operand.expr, stmt.address, stmt.line)

            if kind == 'rel':
                offset = value - next_address
                if not -128 <= offset <= 127:
                    raise AssemblyError(
                        f"Branch target 0x{value & 0xFFFF:04X} out of range ({offset:+d})",
                        stmt.line)
                value = offset & 0xFF
            elif kind == 'addr11':
                if not 0 <= value <= 0xFFFF or (value & 0xF800) != (next_address & 0xF800):
                    raise AssemblyError(
                        f"{stmt.op} target 0x{value & 0xFFFF:04X} outside the current 2 KB page",
                        stmt.line)
                opcode = (opcode & 0x1F) | ((value >> 3) & 0xE0)
                value &= 0xFF
            elif kind == 'addr16':
                if not 0 <= value <= 0xFFFF:
                    raise AssemblyError(f"Address {value} outside 0-0xFFFF", stmt.line)
            elif kind == '#data16':
                if not -0x8000 <= value <= 0xFFFF:
                    raise AssemblyError(f"Immediate {value} does not fit 16 bits", stmt.line)
                value &= 0xFFFF
            elif kind == '#data':
                if not -0x80 <= value <= 0xFF:
                    raise AssemblyError(f"Immediate {value} does not fit 8 bits", stmt.line)
                value &= 0xFF
            else:
                if not 0 <= value <= 0xFF:
                    raise AssemblyError(f"{kind} operand {value} outside 0-0xFF", stmt.line)
            values[index] = value

        encoded: List[int] = [opcode]
        order = [i for i, kind in enumerate(form.operands) if kind not in _FIXED_KINDS]
        if form.code == 0x85:
            # MOV direct,direct stores the source address first
            order.reverse()
        for index in order:
            kind = form.operands[index]
            if kind in ('#data16', 'addr16'):
                encoded.extend((values[index] >> 8, values[index] & 0xFF))
            else:
                encoded.append(values[index])
        return bytes(encoded)

    def _db_bytes(self, stmt: SourceStatement) -> bytes:
        out = bytearray()
        for arg in stmt.args:
            if len(arg) == 1 and arg[0].kind == 'STRING':
                out.extend(arg[0].text.encode('latin-1'))
                continue
            value = self._evaluate(arg, stmt.address, stmt.line)
            if not -0x80 <= value <= 0xFF:
                raise AssemblyError(f"DB value {value} does not fit a byte", stmt.line)
            out.append(value & 0xFF)
        return bytes(out)

    def _pass2(self) -> Tuple[ObjectImage, str]:
        image = ObjectImage()
        listing: List[str] = []
        for stmt in self.statements:
            if stmt.op == 'DB':
                data = self._db_bytes(stmt)
            elif stmt.form is not None:
                data = self._encode(stmt)
            else:
                data = b''

            if stmt.address + len(data) > ROM_SIZE:
                raise AssemblyError("Code extends beyond the 4 KB ROM", stmt.line)
            for offset, byte in enumerate(data):
                try:
                    image.put(stmt.address + offset, byte)
                except ValueError as e:
                    raise AssemblyError(str(e), stmt.line)

            if data or stmt.label and stmt.op != 'EQU':
                hex_bytes = ' '.join(f"{b:02X}" for b in data)
                listing.append(f"{stmt.address:04X}  {hex_bytes:<9} {stmt.text.rstrip()}")
            else:
                listing.append(f"{'':4}  {'':<9} {stmt.text.rstrip()}")

        return image, "\n".join(listing) + "\n" if listing else ""

    def run(self) -> AssemblyResult:
        self._parse()
        self._pass1()
        image, listing = self._pass2()

        for name, line in self._equ_lines.items():
            if name not in self.symbols.referenced:
                self.warnings.append(f"line {line}: symbol {name} defined but not used")

        for warning in self.warnings:
            logger.warning(warning)
        logger.debug(f"Assembled {len(image)} bytes, {len(self.symbols.user_symbols())} symbols")
        return AssemblyResult(image, self.symbols, listing, self.warnings)


def assemble(source: str) -> AssemblyResult:
    """
    Assemble MCS-51 source text

    Args:
        source: Assembly source

    Returns:
        AssemblyResult with image, symbols, listing and warnings

    Raises:
        AssemblyError: with the offending line number
    """
    return Assembler(source).run()
