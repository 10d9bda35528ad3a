"""
Intel HEX encoding and decoding

Record layout: ':' LL AAAA TT DD... CC, uppercase hex, one record per line.
Only data (00) and end-of-file (01) records are used.
"""
import logging
from enum import IntEnum

from ..mcs51.image import ObjectImage


logger = logging.getLogger(__name__)

MAX_RECORD_BYTES = 16
EOF_RECORD = ":00000001FF"


class RecordType(IntEnum):
    """Intel HEX record types"""
    DATA = 0x00
    END_OF_FILE = 0x01


class HexParseError(ValueError):
    """Raised for malformed HEX text; record is the 1-based record index"""

    def __init__(self, message: str, record: int):
        super().__init__(f"record {record}: {message}")
        self.record = record


def checksum(payload: bytes) -> int:
    """Two's complement of the byte sum"""
    return (-sum(payload)) & 0xFF


def _build_record(address: int, record_type: RecordType, data: bytes = b'') -> str:
    """
    Build one HEX record line

    Args:
        address: Load address of the first data byte
        record_type: Record type
        data: Data bytes (at most 255)

    Returns:
        Record text without line ending
    """
    payload = bytes([len(data), (address >> 8) & 0xFF, address & 0xFF, record_type]) + data
    return ':' + (payload + bytes([checksum(payload)])).hex().upper()


def emit_hex(image: ObjectImage) -> str:
    """
    Encode an image as Intel HEX

    Each contiguous run is cut into records of at most 16 bytes.

    Returns:
        HEX text with LF line endings, ending with the EOF record
    """
    lines = []
    for start, run in image.segments():
        for offset in range(0, len(run), MAX_RECORD_BYTES):
            chunk = run[offset:offset + MAX_RECORD_BYTES]
            lines.append(_build_record(start + offset, RecordType.DATA, chunk))
    lines.append(EOF_RECORD)
    return "\n".join(lines) + "\n"


def parse_hex(text: str) -> ObjectImage:
    """
    Decode Intel HEX text

    Raises:
        HexParseError: on bad syntax, bad checksum, an unsupported record
            type, overlapping data, data after EOF or a missing EOF record
    """
    image = ObjectImage()
    seen_eof = False
    index = 0

    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        index += 1

        if seen_eof:
            raise HexParseError("record after end-of-file record", index)
        if not line.startswith(':'):
            raise HexParseError("missing ':' start code", index)
        try:
            raw = bytes.fromhex(line[1:])
        except ValueError:
            raise HexParseError("invalid hex digits", index)
        if len(raw) < 5 or len(raw) != raw[0] + 5:
            raise HexParseError("length byte does not match record size", index)
        if sum(raw) & 0xFF:
            expected = checksum(raw[:-1])
            raise HexParseError(
                f"checksum 0x{raw[-1]:02X} does not match 0x{expected:02X}", index)

        count = raw[0]
        address = (raw[1] << 8) | raw[2]
        record_type = raw[3]
        data = raw[4:4 + count]

        if record_type == RecordType.DATA:
            for offset, byte in enumerate(data):
                try:
                    image.put(address + offset, byte)
                except ValueError as e:
                    raise HexParseError(str(e), index)
        elif record_type == RecordType.END_OF_FILE:
            seen_eof = True
        else:
            raise HexParseError(f"unsupported record type 0x{record_type:02X}", index)

    if not seen_eof:
        raise HexParseError("missing end-of-file record", index + 1)

    logger.debug(f"Parsed {index} HEX records, {len(image)} bytes")
    return image
