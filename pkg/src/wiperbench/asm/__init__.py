"""
MCS-51 assembler, Intel HEX codec and disassembler
"""
from .assembler import AssemblyResult, Symbol, SymbolTable, assemble
from .disassembler import disassemble, format_instruction
from .hexfile import HexParseError, checksum, emit_hex, parse_hex
from .lexer import AssemblyError, LexError, Token, tokenize

__all__ = [
    'AssemblyError', 'AssemblyResult', 'HexParseError', 'LexError', 'Symbol',
    'SymbolTable', 'Token', 'assemble', 'checksum', 'disassemble',
    'emit_hex', 'format_instruction', 'parse_hex', 'tokenize',
]
