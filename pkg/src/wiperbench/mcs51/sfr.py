"""
Special function register and bit address map of the AT89C51
"""
from typing import Dict, Optional, Tuple


SFR_ADDRESSES: Dict[str, int] = {
    'P0': 0x80,
    'SP': 0x81,
    'DPL': 0x82,
    'DPH': 0x83,
    'PCON': 0x87,
    'TCON': 0x88,
    'TMOD': 0x89,
    'TL0': 0x8A,
    'TL1': 0x8B,
    'TH0': 0x8C,
    'TH1': 0x8D,
    'P1': 0x90,
    'SCON': 0x98,
    'SBUF': 0x99,
    'P2': 0xA0,
    'IE': 0xA8,
    'P3': 0xB0,
    'IP': 0xB8,
    'PSW': 0xD0,
    'ACC': 0xE0,
    'B': 0xF0,
}

SFR_BITS: Dict[str, int] = {
    # TCON
    'IT0': 0x88, 'IE0': 0x89, 'IT1': 0x8A, 'IE1': 0x8B,
    'TR0': 0x8C, 'TF0': 0x8D, 'TR1': 0x8E, 'TF1': 0x8F,
    # SCON
    'RI': 0x98, 'TI': 0x99, 'RB8': 0x9A, 'TB8': 0x9B,
    'REN': 0x9C, 'SM2': 0x9D, 'SM1': 0x9E, 'SM0': 0x9F,
    # IE
    'EX0': 0xA8, 'ET0': 0xA9, 'EX1': 0xAA, 'ET1': 0xAB, 'ES': 0xAC, 'EA': 0xAF,
    # IP
    'PX0': 0xB8, 'PT0': 0xB9, 'PX1': 0xBA, 'PT1': 0xBB, 'PS': 0xBC,
    # PSW
    'P': 0xD0, 'OV': 0xD2, 'RS0': 0xD3, 'RS1': 0xD4, 'F0': 0xD5, 'AC': 0xD6, 'CY': 0xD7,
}

PORT_ADDRESSES: Tuple[int, int, int, int] = (0x80, 0x90, 0xA0, 0xB0)

# PSW flag masks
PSW_CY = 0x80
PSW_AC = 0x40
PSW_F0 = 0x20
PSW_RS1 = 0x10
PSW_RS0 = 0x08
PSW_OV = 0x04
PSW_P = 0x01

# TCON masks
TCON_TF1 = 0x80
TCON_TR1 = 0x40
TCON_TF0 = 0x20
TCON_TR0 = 0x10
TCON_IE1 = 0x08
TCON_IT1 = 0x04
TCON_IE0 = 0x02
TCON_IT0 = 0x01

# IE masks
IE_EA = 0x80
IE_ES = 0x10
IE_ET1 = 0x08
IE_EX1 = 0x04
IE_ET0 = 0x02
IE_EX0 = 0x01

_SFR_NAMES = {addr: name for name, addr in SFR_ADDRESSES.items()}
_BIT_NAMES = {addr: name for name, addr in SFR_BITS.items()}


def bit_location(bit_address: int) -> Tuple[int, int]:
    """
    Resolve a bit address to its byte address and mask

    Bits 0x00-0x7F live in internal RAM 0x20-0x2F; bits 0x80-0xFF live in
    the SFRs whose address is a multiple of 8.
    """
    if bit_address < 0x80:
        return 0x20 + (bit_address >> 3), 1 << (bit_address & 0x07)
    return bit_address & 0xF8, 1 << (bit_address & 0x07)


def bit_address(byte_address: int, bit: int) -> int:
    """
    Bit address of bit n of a bit-addressable byte

    Raises:
        ValueError: if the byte is not bit addressable or the bit is not 0-7
    """
    if not 0 <= bit <= 7:
        raise ValueError(f"Bit index {bit} outside 0-7")
    if 0x20 <= byte_address <= 0x2F:
        return ((byte_address - 0x20) << 3) + bit
    if byte_address >= 0x80 and byte_address <= 0xFF and byte_address % 8 == 0:
        return byte_address + bit
    raise ValueError(f"Address 0x{byte_address:02X} is not bit addressable")


def sfr_name(address: int) -> Optional[str]:
    """Name of an SFR address, if it has one"""
    return _SFR_NAMES.get(address)


def bit_name(bit_addr: int) -> Optional[str]:
    """Symbolic name of a bit address (TF0, or P1.3 style for SFR bits)"""
    if bit_addr in _BIT_NAMES:
        return _BIT_NAMES[bit_addr]
    if bit_addr >= 0x80:
        byte_name = _SFR_NAMES.get(bit_addr & 0xF8)
        if byte_name:
            return f"{byte_name}.{bit_addr & 0x07}"
    return None


def pin_name(port: int, bit: int) -> str:
    """Net-style pin name, e.g. P1.0"""
    return f"P{port}.{bit}"
