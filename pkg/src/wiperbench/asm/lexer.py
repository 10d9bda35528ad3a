"""
Tokenizer for MCS-51 assembly source

Mnemonics, directives, register names and identifiers are case-insensitive
and come out upper-cased. Comments run from ';' to the end of the line.
"""
from dataclasses import dataclass
from typing import List, Optional

from ..mcs51.opcodes import MNEMONICS
from ..utils import parse_number


DIRECTIVES = frozenset({'ORG', 'EQU', 'DB', 'END'})
REGISTERS = frozenset({'A', 'AB', 'C', 'DPTR', 'PC'} | {f"R{n}" for n in range(8)})

_PUNCTUATION = {
    ',': 'COMMA',
    '@': 'AT',
    '+': 'PLUS',
    '-': 'MINUS',
    '/': 'SLASH',
    '.': 'DOT',
    '$': 'DOLLAR',
}


class AssemblyError(ValueError):
    """Raised for any error in assembly source; carries the 1-based line"""

    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.message = message
        self.line = line


class LexError(AssemblyError):
    """Raised for characters or literals the tokenizer cannot accept"""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (column {column})", line)
        self.column = column


@dataclass(frozen=True)
class Token:
    """One lexical token; value holds the number for NUMBER/IMM tokens"""
    kind: str
    text: str
    line: int
    column: int
    value: Optional[int] = None

    def __str__(self):
        if self.value is not None:
            return f"[{self.kind} 0x{self.value:X}]"
        return f"[{self.kind} {self.text}]"


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in '_?'


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in '_?'


def _tokenize_line(text: str, line: int) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    length = len(text)

    def number_at(start: int):
        end = start
        while end < length and _is_ident_char(text[end]):
            end += 1
        literal = text[start:end]
        try:
            return parse_number(literal), literal, end
        except ValueError:
            raise LexError(f"Malformed numeric literal {literal!r}", line, start + 1)

    while pos < length:
        ch = text[pos]
        column = pos + 1

        if ch in ' \t\r':
            pos += 1
        elif ch == ';':
            break
        elif ch.isdigit():
            value, literal, pos = number_at(pos)
            tokens.append(Token('NUMBER', literal, line, column, value))
        elif ch == '#':
            if pos + 1 < length and text[pos + 1].isdigit():
                value, literal, pos = number_at(pos + 1)
                tokens.append(Token('IMM', '#' + literal, line, column, value))
            else:
                tokens.append(Token('HASH', '#', line, column))
                pos += 1
        elif _is_ident_start(ch):
            end = pos
            while end < length and _is_ident_char(text[end]):
                end += 1
            word = text[pos:end].upper()
            after = end
            while after < length and text[after] in ' \t':
                after += 1
            if after < length and text[after] == ':' and word not in MNEMONICS \
                    and word not in REGISTERS and word not in DIRECTIVES:
                tokens.append(Token('LABEL', word, line, column))
                pos = after + 1
                continue
            if word in MNEMONICS:
                kind = 'MNEMONIC'
            elif word in DIRECTIVES:
                kind = 'DIRECTIVE'
            elif word in REGISTERS:
                kind = 'REG'
            else:
                kind = 'IDENT'
            tokens.append(Token(kind, word, line, column))
            pos = end
        elif ch in '\'"':
            end = text.find(ch, pos + 1)
            if end < 0:
                raise LexError("Unterminated string", line, column)
            tokens.append(Token('STRING', text[pos + 1:end], line, column))
            pos = end + 1
        elif ch in _PUNCTUATION:
            tokens.append(Token(_PUNCTUATION[ch], ch, line, column))
            pos += 1
        else:
            raise LexError(f"Illegal character {ch!r}", line, column)

    return tokens


def tokenize(source: str) -> List[Token]:
    """
    Split source text into tokens

    Args:
        source: Assembly source

    Returns:
        Tokens in source order, each with its line and column

    Raises:
        LexError: on an illegal character or malformed literal
    """
    tokens: List[Token] = []
    for number, text in enumerate(source.splitlines(), start=1):
        tokens.extend(_tokenize_line(text, number))
    return tokens


def tokenize_lines(source: str) -> List[List[Token]]:
    """Tokens grouped per source line (index 0 is line 1)"""
    return [_tokenize_line(text, number)
            for number, text in enumerate(source.splitlines(), start=1)]
