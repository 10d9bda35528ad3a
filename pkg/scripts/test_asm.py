#!/usr/bin/env python3
"""
Test the assembler, the Intel HEX codec and the disassembler
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest
from hypothesis import assume, given, settings, strategies as st

from wiperbench.asm import (
    AssemblyError, HexParseError, LexError, assemble, checksum, disassemble,
    emit_hex, parse_hex, tokenize,
)
from wiperbench.mcs51 import ObjectImage


def code_of(source: str) -> bytes:
    image = assemble(source).image
    return bytes(value for _, value in image)


# ---------------------------------------------------------------------------
# Lexer


def test_tokens_are_upper_cased_and_carry_columns():
    tokens = tokenize("loop:  mov a,#12h ; comment")
    assert [(t.kind, t.text) for t in tokens] == [
        ('LABEL', 'LOOP'), ('MNEMONIC', 'MOV'), ('REG', 'A'),
        ('COMMA', ','), ('IMM', '#12h'),
    ]
    assert tokens[1].column == 8
    assert tokens[-1].value == 0x12


def test_lexer_rejects_illegal_character():
    with pytest.raises(LexError) as excinfo:
        assemble("NOP\n  MOV A,`\n")
    assert excinfo.value.line == 2
    assert excinfo.value.column == 9


def test_lexer_rejects_malformed_number():
    with pytest.raises(LexError):
        tokenize("MOV A,#12q")


# ---------------------------------------------------------------------------
# Encoding


@pytest.mark.parametrize("source, expected", [
    ("NOP", "00"),
    ("MOV A,#55h", "7455"),
    ("MOV 30h,#0", "753000"),
    ("MOV 40h,30h", "853040"),
    ("MOV R7,A", "FF"),
    ("MOV @R1,A", "F7"),
    ("MOV DPTR,#1234h", "901234"),
    ("SETB P2.0", "D2A0"),
    ("CLR TR0", "C28C"),
    ("ANL C,/ACC.7", "B0E7"),
    ("PUSH ACC", "C0E0"),
    ("MOVC A,@A+DPTR", "93"),
    ("LJMP 0ABCh", "020ABC"),
    ("CJNE A,#3,$", "B403FD"),
    ("MOV 20h.1,C", "9201"),
])
def test_encodings(source, expected):
    assert code_of(source).hex().upper() == expected


def test_labels_and_relative_branches():
    source = """
            ORG 0
    START:  MOV R2,#3
    AGAIN:  DJNZ R2,AGAIN
            SJMP START
    """
    assert code_of(source).hex().upper() == "7A03DAFE80FA"


def test_ajmp_uses_page_bits():
    source = """
            ORG 0100h
            AJMP TARGET
            ORG 0523h
    TARGET: NOP
    """
    image = assemble(source).image
    assert image.data[0x0100] == 0xA1
    assert image.data[0x0101] == 0x23


def test_equ_and_dollar_expressions():
    source = """
    COUNT   EQU 10
    BASE    EQU 30h
            MOV R0,#BASE+COUNT-1
            SJMP $-2
    """
    assert code_of(source).hex().upper() == "783980FC"


def test_db_strings_and_values():
    assert code_of("DB 'AB', 1, -1\n") == b'AB\x01\xff'


def test_symbol_table_and_listing():
    result = assemble("LIMIT EQU 5\nSTART: MOV A,#LIMIT\nSJMP START\n")
    assert result.symbols["START"].value == 0
    assert result.symbols["START"].origin == 'label'
    assert result.symbols["LIMIT"].origin == 'equ'
    assert result.symbols.dump() == (
        "LIMIT            0x0005 equ\n"
        "START            0x0000 label\n"
    )
    lines = result.listing.splitlines()
    assert lines[1].startswith("0000  74 05")
    assert lines[2].startswith("0002  80 FC")


def test_warnings():
    result = assemble("UNUSED EQU 1\nNOP\nEND\nNOP\n")
    assert result.warnings == [
        "line 4: text after END ignored",
        "line 1: symbol UNUSED defined but not used",
    ]
    assert len(result.image) == 1


@pytest.mark.parametrize("source, line, fragment", [
    ("NOP\nFOO A\n", 2, "Unknown mnemonic FOO"),
    ("MOV A,MISSING\n", 1, "Undefined symbol MISSING"),
    ("X: NOP\nX: NOP\n", 2, "Duplicate symbol X"),
    ("TR0: NOP\n", 1, "built-in SFR name"),
    ("NOP\nMOV A,#300\n", 2, "does not fit 8 bits"),
    ("SJMP FAR\nORG 200h\nFAR: NOP\n", 1, "out of range"),
    ("ORG 1000h\nNOP\n", 1, "beyond the 4 KB ROM"),
    ("ORG 0FFFh\nLJMP 0\n", 2, "beyond the 4 KB ROM"),
    ("NOP\nORG 0\nNOP\n", 3, "already holds a byte"),
    ("SETB 31h.0\n", 1, "not bit addressable"),
    ("MOV A,R0,R1\n", 1, "Operand mismatch"),
    ("AJMP 0800h\n", 1, "outside the current 2 KB page"),
])
def test_errors_carry_line_numbers(source, line, fragment):
    with pytest.raises(AssemblyError) as excinfo:
        assemble(source)
    assert excinfo.value.line == line
    assert fragment in str(excinfo.value)


# ---------------------------------------------------------------------------
# Intel HEX


def test_checksum():
    assert checksum(bytes([0x03, 0x00, 0x30, 0x00, 0x02, 0x33, 0x7A])) == 0x1E


def test_emit_hex_splits_records():
    image = ObjectImage.from_bytes(bytes(range(20)))
    image.put(0x0100, 0xAA)
    lines = emit_hex(image).splitlines()
    assert lines[0] == ":10000000000102030405060708090A0B0C0D0E0F78"
    assert lines[1] == ":0400100010111213A6"
    assert lines[2] == ":01010000AA54"
    assert lines[-1] == ":00000001FF"
    assert len(lines) == 4


@given(st.dictionaries(st.integers(0, 4095), st.integers(0, 255), max_size=300))
def test_every_record_sums_to_zero(data):
    for line in emit_hex(ObjectImage(data)).splitlines():
        assert sum(bytes.fromhex(line[1:])) % 256 == 0


def test_hex_reads_back():
    image = assemble("MOV A,#1\nORG 40h\nDB 1,2,3\n").image
    assert parse_hex(emit_hex(image)) == image


def test_empty_image():
    assert emit_hex(ObjectImage()) == ":00000001FF\n"
    assert len(parse_hex(":00000001FF\n")) == 0


@pytest.mark.parametrize("text, record, fragment", [
    (":0100000000FE\n", 1, "checksum"),
    ("0100000000FF\n", 1, "start code"),
    (":01000000ZZFF\n", 1, "invalid hex"),
    (":0200000000FE\n", 1, "length byte"),
    (":020000040000FA\n:00000001FF\n", 1, "unsupported record type"),
    (":0100000001FE\n", 2, "missing end-of-file"),
    (":00000001FF\n:0100000001FE\n", 2, "after end-of-file"),
    (":0100000001FE\n:0100000002FD\n:00000001FF\n", 2, "already holds"),
])
def test_hex_errors(text, record, fragment):
    with pytest.raises(HexParseError) as excinfo:
        parse_hex(text)
    assert excinfo.value.record == record
    assert fragment in str(excinfo.value)


# ---------------------------------------------------------------------------
# Disassembler


def test_disassembly_is_canonical():
    image = assemble("MOV TH0,#0B1h\nSETB TR0\nJNB TF0,$\nPUSH ACC\nDB 0A5h\n").image
    assert disassemble(image) == (
        "MOV TH0,#0xB1\n"
        "SETB TR0\n"
        "JNB TF0,0x0005\n"
        "PUSH ACC\n"
        "DB 0xA5\n"
        "END\n"
    )


def test_disassembly_emits_org_for_gaps():
    image = assemble("ORG 0030h\nNOP\n").image
    assert disassemble(image).splitlines() == ["ORG 0x0030", "NOP", "END"]


def test_truncated_instruction_becomes_db():
    image = ObjectImage.from_bytes(bytes([0x02, 0x12]))
    assert disassemble(image).splitlines() == ["DB 0x02", "DB 0x12", "END"]


@settings(max_examples=500, deadline=None)
@given(st.binary(min_size=1, max_size=256), st.integers(0, 3840))
def test_disassembly_reassembles_to_same_bytes(blob, origin):
    assume(origin + len(blob) <= 4096)
    image = ObjectImage.from_bytes(blob, origin)
    assert assemble(disassemble(image)).image == image


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
