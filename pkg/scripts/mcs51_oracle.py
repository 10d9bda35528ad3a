#!/usr/bin/env python3
"""
Reference MCS-51 interpreter for equivalence tests

A deliberately plain, opcode-switch implementation that shares no code
with wiperbench.mcs51: lengths and cycle counts come from the grids below,
flags are computed from carry chains. It models internal RAM, the SFR
block as plain memory (ports read back their latch, as they do with no
external drive) and nothing else; instructions that would start a timer
or enable an interrupt raise Unsupported so a comparison can stop there.
"""
from typing import Dict, Optional

ROM = 4096

# Rows are the high opcode nibble, columns the low nibble; 0 marks 0xA5
LENGTHS = [
    "1231121111111111", "3231121111111111", "3211221111111111", "3211221111111111",
    "2223221111111111", "2223221111111111", "2223221111111111", "2221232222222222",
    "2221132222222222", "3221221111111111", "2221102222222222", "2221333333333333",
    "2221121111111111", "2221131122222222", "1211121111111111", "1211121111111111",
]
CYCLES = [
    "1221111111111111", "2221111111111111", "2221111111111111", "2221111111111111",
    "2212111111111111", "2212111111111111", "2212111111111111", "2222121111111111",
    "2222422222222222", "2222111111111111", "2212402222222222", "2211222222222222",
    "2211111111111111", "2211121122222222", "2222111111111111", "2222111111111111",
]

MOVX = {0xE0, 0xE2, 0xE3, 0xF0, 0xF2, 0xF3}

ACC, B, PSW, SP, DPL, DPH, SBUF = 0xE0, 0xF0, 0xD0, 0x81, 0x82, 0x83, 0x99
GUARDED = {0x88, 0xA8}      # TCON, IE


def length_of(op: int) -> int:
    return int(LENGTHS[op >> 4][op & 0x0F])


def cycles_of(op: int) -> int:
    return int(CYCLES[op >> 4][op & 0x0F])


class Halted(Exception):
    pass


class Unsupported(Exception):
    pass


class Oracle:
    def __init__(self, code: bytes):
        self.code = bytes(code).ljust(ROM, b'\x00')
        self.pc = 0
        self.iram = bytearray(128)
        self.sfr = bytearray(128)
        for port in (0x80, 0x90, 0xA0, 0xB0):
            self.sfr[port - 0x80] = 0xFF
        self.sfr[SP - 0x80] = 0x07
        self.cycles = 0

    # memory -----------------------------------------------------------

    def rd(self, a: int) -> int:
        if a < 0x80:
            return self.iram[a]
        if a == SBUF:
            raise Halted("SBUF")
        return self.sfr[a - 0x80]

    def wr(self, a: int, v: int):
        v &= 0xFF
        if a < 0x80:
            self.iram[a] = v
            return
        if a == SBUF:
            raise Halted("SBUF")
        if a in GUARDED:
            raise Unsupported(hex(a))
        self.sfr[a - 0x80] = v

    def ri(self, a: int) -> int:
        return self.iram[a] if a < 0x80 else 0xFF

    def wi(self, a: int, v: int):
        if a < 0x80:
            self.iram[a] = v & 0xFF

    def rbit(self, b: int) -> int:
        byte = 0x20 + (b >> 3) if b < 0x80 else b & 0xF8
        return (self.rd(byte) >> (b & 7)) & 1

    def wbit(self, b: int, v: int):
        byte = 0x20 + (b >> 3) if b < 0x80 else b & 0xF8
        old = self.rd(byte)
        self.wr(byte, (old | (1 << (b & 7))) if v else (old & ~(1 << (b & 7))))

    @property
    def a(self) -> int:
        return self.sfr[ACC - 0x80]

    @a.setter
    def a(self, v: int):
        self.sfr[ACC - 0x80] = v & 0xFF

    @property
    def psw(self) -> int:
        return self.sfr[PSW - 0x80]

    def cy(self) -> int:
        return self.psw >> 7

    def set_flag(self, bit: int, v):
        if v:
            self.sfr[PSW - 0x80] |= 1 << bit
        else:
            self.sfr[PSW - 0x80] &= ~(1 << bit) & 0xFF

    def r_addr(self, n: int) -> int:
        return ((self.psw >> 3) & 3) * 8 + n

    def push(self, v: int):
        sp = (self.sfr[SP - 0x80] + 1) & 0xFF
        self.sfr[SP - 0x80] = sp
        self.wi(sp, v)

    def pop(self) -> int:
        sp = self.sfr[SP - 0x80]
        v = self.ri(sp)
        self.sfr[SP - 0x80] = (sp - 1) & 0xFF
        return v

    def dptr(self) -> int:
        return (self.sfr[DPH - 0x80] << 8) | self.sfr[DPL - 0x80]

    # operands by low nibble ------------------------------------------

    def src(self, lo: int, b1: int) -> int:
        """Source byte of the lo = 4..F family"""
        if lo == 4:
            return b1
        if lo == 5:
            return self.rd(b1)
        if lo in (6, 7):
            return self.ri(self.iram[self.r_addr(lo - 6)])
        return self.iram[self.r_addr(lo - 8)]

    def dst_get(self, lo: int, b1: int) -> int:
        if lo == 4:
            return self.a
        return self.src(lo, b1)

    def dst_set(self, lo: int, b1: int, v: int):
        if lo == 4:
            self.a = v
        elif lo == 5:
            self.wr(b1, v)
        elif lo in (6, 7):
            self.wi(self.iram[self.r_addr(lo - 6)], v)
        else:
            self.iram[self.r_addr(lo - 8)] = v & 0xFF

    # execution --------------------------------------------------------

    def snapshot(self) -> Dict[str, object]:
        return {
            'pc': self.pc,
            'iram': bytes(self.iram),
            'sfr': bytes(self.sfr),
            'cycles': self.cycles,
            'in_service': (),
        }

    def add(self, v: int, c: int):
        a = self.a
        c6 = (a & 0x7F) + (v & 0x7F) + c > 0x7F
        total = a + v + c
        self.set_flag(7, total > 0xFF)
        self.set_flag(6, (a & 0x0F) + (v & 0x0F) + c > 0x0F)
        self.set_flag(2, c6 != (total > 0xFF))
        self.a = total

    def subb(self, v: int):
        a = self.a
        c = self.cy()
        borrow = a < v + c
        b6 = (a & 0x7F) < (v & 0x7F) + c
        self.set_flag(7, borrow)
        self.set_flag(6, (a & 0x0F) < (v & 0x0F) + c)
        self.set_flag(2, b6 != borrow)
        self.a = a - v - c

    def step(self):
        pc = self.pc
        if pc >= ROM:
            raise Halted("pc")
        op = self.code[pc]
        if op == 0xA5 or op in MOVX:
            raise Halted("opcode")
        n = length_of(op)
        if pc + n > ROM:
            raise Halted("fetch")
        b1 = self.code[pc + 1] if n > 1 else 0
        b2 = self.code[pc + 2] if n > 2 else 0
        nxt = pc + n
        hi, lo = op >> 4, op & 0x0F
        new_pc: Optional[int] = None

        def rel(offset: int) -> int:
            return (nxt + (offset - 256 if offset > 127 else offset)) & 0xFFFF

        if lo == 1:
            target = (nxt & 0xF800) | ((op >> 5) << 8) | b1
            if hi & 1:
                self.push(nxt & 0xFF)
                self.push(nxt >> 8)
            new_pc = target
        elif op == 0x00:
            pass
        elif op == 0x02:
            new_pc = (b1 << 8) | b2
        elif op == 0x12:
            self.push(nxt & 0xFF)
            self.push(nxt >> 8)
            new_pc = (b1 << 8) | b2
        elif op in (0x22, 0x32):
            h = self.pop()
            l_ = self.pop()
            new_pc = (h << 8) | l_
        elif op == 0x03:
            self.a = (self.a >> 1) | ((self.a & 1) << 7)
        elif op == 0x13:
            a = self.a
            self.a = (a >> 1) | (self.cy() << 7)
            self.set_flag(7, a & 1)
        elif op == 0x23:
            self.a = (self.a << 1) | (self.a >> 7)
        elif op == 0x33:
            a = self.a
            self.a = (a << 1) | self.cy()
            self.set_flag(7, a & 0x80)
        elif hi in (0, 1) and lo >= 4:
            delta = 1 if hi == 0 else -1
            self.dst_set(lo, b1, self.dst_get(lo, b1) + delta)
        elif op in (0x10, 0x20, 0x30):
            bit = self.rbit(b1)
            if op == 0x10:
                if bit:
                    self.wbit(b1, 0)
                    new_pc = rel(b2)
            elif bit == (op == 0x20):
                new_pc = rel(b2)
        elif hi in (2, 3) and lo >= 4:
            self.add(self.src(lo, b1), self.cy() if hi == 3 else 0)
        elif hi == 9 and lo >= 4:
            self.subb(self.src(lo, b1))
        elif hi in (4, 5, 6) and lo >= 2:
            fn = {4: lambda x, y: x | y, 5: lambda x, y: x & y, 6: lambda x, y: x ^ y}[hi]
            if lo == 2:
                self.wr(b1, fn(self.rd(b1), self.a))
            elif lo == 3:
                self.wr(b1, fn(self.rd(b1), b2))
            else:
                self.a = fn(self.a, self.src(lo, b1))
        elif op in (0x40, 0x50, 0x60, 0x70, 0x80):
            taken = {0x40: self.cy() == 1, 0x50: self.cy() == 0, 0x60: self.a == 0,
                     0x70: self.a != 0, 0x80: True}[op]
            if taken:
                new_pc = rel(b1)
        elif op in (0x72, 0x82, 0xA0, 0xB0):
            bit = self.rbit(b1)
            if op in (0xA0, 0xB0):
                bit ^= 1
            if op in (0x72, 0xA0):
                self.set_flag(7, self.cy() | bit)
            else:
                self.set_flag(7, self.cy() & bit)
        elif op == 0x73:
            new_pc = (self.a + self.dptr()) & 0xFFFF
        elif op == 0x74:
            self.a = b1
        elif op == 0x75:
            self.wr(b1, b2)
        elif op in (0x76, 0x77):
            self.wi(self.iram[self.r_addr(lo - 6)], b1)
        elif hi == 7 and lo >= 8:
            self.iram[self.r_addr(lo - 8)] = b1
        elif op in (0x83, 0x93):
            base = nxt if op == 0x83 else self.dptr()
            address = (self.a + base) & 0xFFFF
            self.a = self.code[address] if address < ROM else 0xFF
        elif op == 0x84:
            b = self.sfr[B - 0x80]
            self.set_flag(7, 0)
            if b == 0:
                self.set_flag(2, 1)
            else:
                q, r = divmod(self.a, b)
                self.a = q
                self.sfr[B - 0x80] = r
                self.set_flag(2, 0)
        elif op == 0xA4:
            p = self.a * self.sfr[B - 0x80]
            self.a = p & 0xFF
            self.sfr[B - 0x80] = p >> 8
            self.set_flag(7, 0)
            self.set_flag(2, p > 0xFF)
        elif op == 0x85:
            self.wr(b2, self.rd(b1))
        elif hi == 8 and lo >= 6:
            self.wr(b1, self.src(lo, b1) if lo >= 8 else self.ri(self.iram[self.r_addr(lo - 6)]))
        elif op == 0x90:
            self.sfr[DPH - 0x80] = b1
            self.sfr[DPL - 0x80] = b2
        elif op == 0x92:
            self.wbit(b1, self.cy())
        elif op == 0xA2:
            self.set_flag(7, self.rbit(b1))
        elif op == 0xA3:
            d = (self.dptr() + 1) & 0xFFFF
            self.sfr[DPH - 0x80] = d >> 8
            self.sfr[DPL - 0x80] = d & 0xFF
        elif hi == 0xA and lo >= 6:
            v = self.rd(b1)
            if lo >= 8:
                self.iram[self.r_addr(lo - 8)] = v
            else:
                self.wi(self.iram[self.r_addr(lo - 6)], v)
        elif op == 0xB2:
            self.wbit(b1, self.rbit(b1) ^ 1)
        elif op == 0xB3:
            self.set_flag(7, self.cy() ^ 1)
        elif hi == 0xB and lo >= 4:
            left = self.a if lo in (4, 5) else self.src(lo, 0)
            right = self.rd(b1) if lo == 5 else b1
            self.set_flag(7, left < right)
            if left != right:
                new_pc = rel(b2)
        elif op == 0xC0:
            self.push(self.rd(b1))
        elif op == 0xD0:
            v = self.pop()
            self.wr(b1, v)
        elif op in (0xC2, 0xD2):
            self.wbit(b1, op == 0xD2)
        elif op in (0xC3, 0xD3):
            self.set_flag(7, op == 0xD3)
        elif op == 0xC4:
            self.a = ((self.a << 4) | (self.a >> 4)) & 0xFF
        elif hi == 0xC and lo >= 5:
            v = self.src(lo, b1)
            self.dst_set(lo, b1, self.a)
            self.a = v
        elif op == 0xD4:
            a = self.a
            cy = self.cy()
            if (a & 0x0F) > 9 or (self.psw >> 6) & 1:
                a += 6
                if a > 0xFF:
                    cy = 1
                a &= 0xFF
            if (a >> 4) > 9 or cy:
                a += 0x60
                if a > 0xFF:
                    cy = 1
                a &= 0xFF
            self.set_flag(7, cy)
            self.a = a
        elif op == 0xD5:
            v = (self.rd(b1) - 1) & 0xFF
            self.wr(b1, v)
            if v:
                new_pc = rel(b2)
        elif op in (0xD6, 0xD7):
            address = self.iram[self.r_addr(lo - 6)]
            v = self.ri(address)
            a = self.a
            self.wi(address, (v & 0xF0) | (a & 0x0F))
            self.a = (a & 0xF0) | (v & 0x0F)
        elif hi == 0xD and lo >= 8:
            r = self.r_addr(lo - 8)
            self.iram[r] = (self.iram[r] - 1) & 0xFF
            if self.iram[r]:
                new_pc = rel(b1)
        elif op == 0xE4:
            self.a = 0
        elif op == 0xF4:
            self.a = self.a ^ 0xFF
        elif hi == 0xE and lo >= 5:
            self.a = self.src(lo, b1)
        elif hi == 0xF and lo >= 5:
            self.dst_set(lo, b1, self.a)
        else:
            raise AssertionError(f"opcode 0x{op:02X} not handled")

        self.pc = nxt if new_pc is None else new_pc
        self.set_flag(0, bin(self.a).count('1') & 1)
        self.cycles += cycles_of(op)
