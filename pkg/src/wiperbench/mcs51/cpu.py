"""
AT89C51 instruction-level emulator

Executes from a 4 KB code ROM with 128 bytes of internal RAM, the SFR
block, both timers and the four quasi-bidirectional ports. Time is counted
in machine cycles; ClockConfig converts cycles to nanoseconds.

Port writes are reported through on_port_write once the instruction has
retired, stamped with the cycle count at retirement.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from ..kernel.simulator import Level
from .image import ROM_SIZE, ObjectImage
from .opcodes import DecodeError, Instruction, decode
from .sfr import (
    IE_EA, IE_ET0, IE_ET1, IE_EX0, IE_EX1, PORT_ADDRESSES, PSW_AC, PSW_CY,
    PSW_OV, PSW_P, SFR_ADDRESSES, TCON_IE0, TCON_IE1, TCON_IT0, TCON_IT1,
    TCON_TF0, TCON_TF1, bit_location,
)
from .timers import cycles_to_overflow, tick_timers


logger = logging.getLogger(__name__)

_ACC = SFR_ADDRESSES['ACC']
_B = SFR_ADDRESSES['B']
_PSW = SFR_ADDRESSES['PSW']
_SP = SFR_ADDRESSES['SP']
_DPL = SFR_ADDRESSES['DPL']
_DPH = SFR_ADDRESSES['DPH']
_TCON = SFR_ADDRESSES['TCON']
_TMOD = SFR_ADDRESSES['TMOD']
_IE = SFR_ADDRESSES['IE']
_IP = SFR_ADDRESSES['IP']
_SBUF = SFR_ADDRESSES['SBUF']

_PORT_INDEX = {address: port for port, address in enumerate(PORT_ADDRESSES)}

# (request flag in TCON, enable bit in IE, priority bit in IP, vector,
#  edge-mode bit in TCON or None), in polling order
_INTERRUPT_SOURCES = (
    (TCON_IE0, IE_EX0, 0x01, 0x0003, TCON_IT0),
    (TCON_TF0, IE_ET0, 0x02, 0x000B, None),
    (TCON_IE1, IE_EX1, 0x04, 0x0013, TCON_IT1),
    (TCON_TF1, IE_ET1, 0x08, 0x001B, None),
)

INTERRUPT_LATENCY = 3

PinInput = Callable[[int, int], int]
PortWriteHook = Callable[[int, int, int, int], None]


class CpuHalt(RuntimeError):
    """Raised when the emulator stops on something it cannot execute"""

    def __init__(self, reason: str, pc: int, cycle_count: int):
        super().__init__(f"{reason} (PC=0x{pc:04X}, cycle {cycle_count})")
        self.reason = reason
        self.pc = pc
        self.cycle_count = cycle_count


class RomLoadError(ValueError):
    """Raised when an image does not fit the 4 KB code ROM"""

    def __init__(self, address: int):
        super().__init__(f"address out of ROM: 0x{address:04X}")
        self.address = address


@dataclass(frozen=True)
class ClockConfig:
    """Crystal frequency; one machine cycle is 12 crystal periods"""
    crystal_hz: int = 12_000_000

    def __post_init__(self):
        if self.crystal_hz <= 0 or (12 * 10**9) % self.crystal_hz:
            raise ValueError(
                f"Crystal {self.crystal_hz} Hz does not give a whole-ns machine cycle"
            )

    @property
    def machine_cycle_ns(self) -> int:
        return 12 * 10**9 // self.crystal_hz


@dataclass
class CpuState:
    """Programmer-visible machine state"""
    pc: int = 0
    iram: bytearray = field(default_factory=lambda: bytearray(128))
    # Index is SFR address - 0x80
    sfr: bytearray = field(default_factory=lambda: bytearray(128))
    code: bytes = bytes(ROM_SIZE)
    cycle_count: int = 0
    # Priority levels of interrupts being serviced, innermost last
    in_service: List[int] = field(default_factory=list)

    def _get(self, address: int) -> int:
        return self.sfr[address - 0x80]

    def _set(self, address: int, value: int):
        self.sfr[address - 0x80] = value & 0xFF

    @property
    def acc(self) -> int:
        return self._get(_ACC)

    @acc.setter
    def acc(self, value: int):
        self._set(_ACC, value)

    @property
    def b(self) -> int:
        return self._get(_B)

    @b.setter
    def b(self, value: int):
        self._set(_B, value)

    @property
    def psw(self) -> int:
        return self._get(_PSW)

    @psw.setter
    def psw(self, value: int):
        self._set(_PSW, value)

    @property
    def sp(self) -> int:
        return self._get(_SP)

    @sp.setter
    def sp(self, value: int):
        self._set(_SP, value)

    @property
    def dptr(self) -> int:
        return (self._get(_DPH) << 8) | self._get(_DPL)

    @dptr.setter
    def dptr(self, value: int):
        self._set(_DPH, (value >> 8) & 0xFF)
        self._set(_DPL, value & 0xFF)

    @property
    def carry(self) -> bool:
        return bool(self.psw & PSW_CY)

    @property
    def bank(self) -> int:
        """Active register bank from PSW.RS1:RS0"""
        return (self.psw >> 3) & 0x03

    def reg(self, n: int) -> int:
        """Value of Rn in the active bank"""
        return self.iram[self.bank * 8 + n]

    def sfr_value(self, name: str) -> int:
        """SFR value by name (P1, TH0, ...)"""
        return self._get(SFR_ADDRESSES[name])

    def snapshot(self) -> Dict[str, object]:
        """Comparable copy of everything an instruction can change"""
        return {
            'pc': self.pc,
            'iram': bytes(self.iram),
            'sfr': bytes(self.sfr),
            'cycles': self.cycle_count,
            'in_service': tuple(self.in_service),
        }


def _parity(value: int) -> int:
    return bin(value).count('1') & 1


class MCS51:
    """
    AT89C51 core

    Args:
        clock: Crystal configuration
        pin_input: Callable(port, bit) returning the external level of a
            pin; pins read High when omitted
        on_port_write: Callable(port, old_latch, new_latch, time_ns) invoked
            after an instruction changes a port latch
        fast_forward: Advance idle spin loops in bulk
    """

    def __init__(self, clock: Optional[ClockConfig] = None,
                 pin_input: Optional[PinInput] = None,
                 on_port_write: Optional[PortWriteHook] = None,
                 fast_forward: bool = True):
        self.clock = clock or ClockConfig()
        self.cycle_ns = self.clock.machine_cycle_ns
        self.pin_input = pin_input
        self.on_port_write = on_port_write
        self.fast_forward = fast_forward

        self.state = CpuState()
        self.instructions = 0
        self.skipped = 0
        self._pending_ports: List[Tuple[int, int, int]] = []
        self._irq_blocked = False
        # Address of the instruction being executed, for halt reports
        self._instr_pc = 0

        self._handlers: Dict[str, Callable[[Instruction], None]] = {
            'NOP': self._nop,
            'AJMP': self._jump, 'LJMP': self._jump, 'SJMP': self._jump,
            'JMP': self._jmp_indirect,
            'ACALL': self._call, 'LCALL': self._call,
            'RET': self._ret, 'RETI': self._reti,
            'INC': self._inc, 'DEC': self._dec,
            'ADD': self._add, 'ADDC': self._add, 'SUBB': self._subb,
            'ANL': self._logic, 'ORL': self._logic, 'XRL': self._logic,
            'MOV': self._mov, 'MOVC': self._movc,
            'CLR': self._bit_op, 'SETB': self._bit_op, 'CPL': self._bit_op,
            'RL': self._rotate, 'RLC': self._rotate, 'RR': self._rotate,
            'RRC': self._rotate, 'SWAP': self._rotate,
            'DA': self._da,
            'XCH': self._xch, 'XCHD': self._xchd,
            'MUL': self._mul, 'DIV': self._div,
            'PUSH': self._push_direct, 'POP': self._pop_direct,
            'JC': self._cond_jump, 'JNC': self._cond_jump,
            'JZ': self._cond_jump, 'JNZ': self._cond_jump,
            'JB': self._bit_jump, 'JNB': self._bit_jump, 'JBC': self._bit_jump,
            'CJNE': self._cjne, 'DJNZ': self._djnz,
        }
        self.reset()

    # ------------------------------------------------------------------
    # Lifecycle

    def reset(self) -> CpuState:
        """
        Apply the reset values

        Internal RAM and the code ROM keep their contents.
        """
        s = self.state
        s.pc = 0
        s.sfr[:] = bytes(len(s.sfr))
        for address in PORT_ADDRESSES:
            s.sfr[address - 0x80] = 0xFF
        s.sp = 0x07
        s.cycle_count = 0
        s.in_service.clear()
        self.instructions = 0
        self.skipped = 0
        self._pending_ports.clear()
        self._irq_blocked = False
        return s

    def load_image(self, image: ObjectImage):
        """
        Program the code ROM

        Raises:
            RomLoadError: if a byte lies at or above 4096
        """
        for address, _value in image:
            if not 0 <= address < ROM_SIZE:
                raise RomLoadError(address)
        self.state.code = image.to_rom()
        logger.debug(f"Loaded {len(image)} bytes into code ROM")

    def load_hex(self, text: str):
        """Program the code ROM from Intel HEX text"""
        from ..asm.hexfile import parse_hex
        self.load_image(parse_hex(text))

    @property
    def time_ns(self) -> int:
        """Simulated time of the last retired cycle"""
        return self.state.cycle_count * self.cycle_ns

    # ------------------------------------------------------------------
    # Execution

    def _halt(self, reason: str) -> CpuHalt:
        pc = self._instr_pc
        logger.warning(f"CPU halt at 0x{pc:04X}: {reason}")
        return CpuHalt(reason, pc, self.state.cycle_count)

    def _fetch(self, address: int) -> int:
        if address >= ROM_SIZE:
            raise self._halt(f"fetch from 0x{address:04X} outside 4 KB ROM")
        return self.state.code[address]

    def step(self) -> int:
        """
        Retire one instruction, tick the timers and take a pending interrupt

        Returns:
            Machine cycles consumed

        Raises:
            CpuHalt: on an unimplemented opcode, MOVX, serial port access or
                a fetch outside the ROM
        """
        s = self.state
        start = s.pc
        self._instr_pc = start
        if start >= ROM_SIZE:
            raise self._halt(f"PC 0x{start:04X} outside 4 KB ROM")
        try:
            instr = decode(self._fetch, start)
        except DecodeError:
            raise self._halt(
                f"unimplemented opcode 0x{s.code[start]:02X} at 0x{start:04X}")
        if instr.info.mnemonic == 'MOVX':
            raise self._halt(
                f"unimplemented opcode 0x{s.code[start]:02X} at 0x{start:04X}")

        s.pc = instr.next_address
        self._irq_blocked = False
        try:
            self._handlers[instr.info.mnemonic](instr)
        except CpuHalt:
            s.pc = start
            self._pending_ports.clear()
            raise

        self.instructions += 1
        cycles = instr.cycles
        self._retire(cycles)
        return cycles + self._service_interrupts()

    def _retire(self, cycles: int):
        s = self.state
        s.psw = (s.psw & ~PSW_P) | _parity(s.acc)
        s.cycle_count += cycles
        self.tick_timers(cycles)
        if self._pending_ports:
            self._flush_ports()

    def _flush_ports(self):
        changes: Dict[int, List[int]] = {}
        for port, old, new in self._pending_ports:
            if port in changes:
                changes[port][1] = new
            else:
                changes[port] = [old, new]
        self._pending_ports.clear()

        if self.on_port_write is None:
            return
        at = self.time_ns
        for port, (old, new) in changes.items():
            if old != new:
                self.on_port_write(port, old, new, at)

    def run_until_cycle(self, target: int) -> int:
        """
        Execute until cycle_count reaches target

        The last instruction may overrun the target by its own length.

        Returns:
            Cycles executed
        """
        s = self.state
        start = s.cycle_count
        while s.cycle_count < target:
            if self.fast_forward and self._skip_idle_loop(target - s.cycle_count):
                continue
            self.step()
        return s.cycle_count - start

    def run_for(self, cycles: int) -> int:
        """Execute at least a number of machine cycles; returns cycles run"""
        if cycles <= 0:
            return 0
        return self.run_until_cycle(self.state.cycle_count + cycles)

    def _skip_idle_loop(self, remaining: int) -> bool:
        """
        Advance a taken `JB/JNB bit,$` or an `SJMP $` in bulk

        Stops one iteration short of the next timer overflow and never
        passes the cycle target, so the result equals stepping.

        Returns:
            True if any iterations were skipped
        """
        s = self.state
        pc = s.pc
        if pc + 2 >= ROM_SIZE:
            return False
        code = s.code
        op = code[pc]
        if op == 0x80 and code[pc + 1] == 0xFE:
            pass
        elif op in (0x20, 0x30) and code[pc + 2] == 0xFD:
            if self._read_bit(code[pc + 1]) != (op == 0x20):
                return False
        else:
            return False

        if self._interrupt_requested():
            return False

        iterations = remaining // 2
        overflow = cycles_to_overflow(s.sfr, self._int_pins())
        if overflow is not None:
            iterations = min(iterations, (overflow - 1) // 2)
        if iterations <= 0:
            return False

        s.cycle_count += 2 * iterations
        self.tick_timers(2 * iterations)
        self.instructions += iterations
        self.skipped += iterations
        return True

    def tick_timers(self, cycles: int) -> Tuple[bool, bool]:
        """Advance both timers; returns (TF0 set, TF1 set) during the tick"""
        return tick_timers(self.state.sfr, cycles, self._int_pins())

    def _int_pins(self) -> Tuple[bool, bool]:
        # INT0/INT1 matter only to timers with GATE set
        if not self.state.sfr[_TMOD - 0x80] & 0x88:
            return True, True
        return bool(self.read_pin(3, 2)), bool(self.read_pin(3, 3))

    # ------------------------------------------------------------------
    # Interrupts

    def _interrupt_requested(self) -> bool:
        sfr = self.state.sfr
        ie = sfr[_IE - 0x80]
        if not ie & IE_EA:
            return False
        tcon = sfr[_TCON - 0x80]
        return any(tcon & flag and ie & enable
                   for flag, enable, _prio, _vec, _edge in _INTERRUPT_SOURCES)

    def _service_interrupts(self) -> int:
        """Vector to the highest-priority pending interrupt; returns cycles used"""
        if self._irq_blocked or not self._interrupt_requested():
            return 0

        s = self.state
        tcon = s.sfr[_TCON - 0x80]
        ie = s.sfr[_IE - 0x80]
        ip = s.sfr[_IP - 0x80]
        current = max(s.in_service) if s.in_service else -1

        for level in (1, 0):
            if level <= current:
                continue
            for flag, enable, priority, vector, edge in _INTERRUPT_SOURCES:
                if not (tcon & flag and ie & enable):
                    continue
                if (1 if ip & priority else 0) != level:
                    continue
                # Timer flags and edge-triggered external flags clear on vectoring
                if edge is None or tcon & edge:
                    s.sfr[_TCON - 0x80] &= ~flag
                self._push(s.pc & 0xFF)
                self._push(s.pc >> 8)
                s.pc = vector
                s.in_service.append(level)
                logger.debug(f"Interrupt vector 0x{vector:04X} at cycle {s.cycle_count}")
                self._retire(INTERRUPT_LATENCY)
                return INTERRUPT_LATENCY
        return 0

    # ------------------------------------------------------------------
    # Memory

    def read_pin(self, port: int, bit: int) -> Level:
        """
        Level seen on a port pin

        A latch bit of 0 pulls the pin low; otherwise the external level
        shows through.
        """
        latch = self.state.sfr[PORT_ADDRESSES[port] - 0x80]
        if not latch & (1 << bit):
            return Level.LOW
        return self._external(port, bit)

    def _external(self, port: int, bit: int) -> Level:
        if self.pin_input is None:
            return Level.HIGH
        return Level.HIGH if self.pin_input(port, bit) else Level.LOW

    def _port_pins(self, port: int) -> int:
        latch = self.state.sfr[PORT_ADDRESSES[port] - 0x80]
        if self.pin_input is None or latch == 0:
            return latch
        value = 0
        for bit in range(8):
            if latch & (1 << bit) and self.pin_input(port, bit):
                value |= 1 << bit
        return value

    def _read_direct(self, address: int, latch: bool = False) -> int:
        """
        Read a direct address

        Ports read their pins unless latch is set (read-modify-write).
        """
        if address < 0x80:
            return self.state.iram[address]
        if address == _SBUF:
            raise self._halt("serial port is not modeled")
        if not latch and address in _PORT_INDEX:
            return self._port_pins(_PORT_INDEX[address])
        return self.state.sfr[address - 0x80]

    def _write_direct(self, address: int, value: int):
        value &= 0xFF
        s = self.state
        if address < 0x80:
            s.iram[address] = value
            return
        if address == _SBUF:
            raise self._halt("serial port is not modeled")
        if address in _PORT_INDEX:
            old = s.sfr[address - 0x80]
            self._pending_ports.append((_PORT_INDEX[address], old, value))
        elif address in (_IE, _IP):
            self._irq_blocked = True
        s.sfr[address - 0x80] = value

    def _read_indirect(self, address: int) -> int:
        # Only 128 bytes of internal RAM exist
        if address >= 0x80:
            return 0xFF
        return self.state.iram[address]

    def _write_indirect(self, address: int, value: int):
        if address < 0x80:
            self.state.iram[address] = value & 0xFF

    def _read_bit(self, bit: int, latch: bool = False) -> bool:
        byte, mask = bit_location(bit)
        if byte < 0x80:
            return bool(self.state.iram[byte] & mask)
        if not latch and byte in _PORT_INDEX:
            return self.read_pin(_PORT_INDEX[byte], mask.bit_length() - 1) == Level.HIGH
        return bool(self._read_direct(byte, latch=True) & mask)

    def _write_bit(self, bit: int, value: bool):
        byte, mask = bit_location(bit)
        current = self._read_direct(byte, latch=True)
        self._write_direct(byte, current | mask if value else current & ~mask)

    def _push(self, value: int):
        s = self.state
        s.sp = (s.sp + 1) & 0xFF
        self._write_indirect(s.sp, value)

    def _pop(self) -> int:
        s = self.state
        value = self._read_indirect(s.sp)
        s.sp = (s.sp - 1) & 0xFF
        return value

    def _location(self, instr: Instruction, index: int) -> Tuple[str, int]:
        """
        Resolve a byte operand to ('d', direct address), ('i', indirect
        address) or ('k', constant)
        """
        kind = instr.info.operands[index]
        value = instr.values[index]
        s = self.state
        if kind == 'A':
            return 'd', _ACC
        if kind == 'direct':
            return 'd', value
        if kind in ('#data', '#data16'):
            return 'k', value
        if kind in ('@R0', '@R1'):
            return 'i', s.iram[s.bank * 8 + int(kind[2])]
        if kind[0] == 'R':
            return 'd', s.bank * 8 + int(kind[1])
        raise ValueError(f"Operand {kind} is not a byte location")

    def _read(self, loc: Tuple[str, int], latch: bool = False) -> int:
        space, address = loc
        if space == 'd':
            return self._read_direct(address, latch)
        if space == 'i':
            return self._read_indirect(address)
        return address

    def _write(self, loc: Tuple[str, int], value: int):
        space, address = loc
        if space == 'd':
            self._write_direct(address, value)
        elif space == 'i':
            self._write_indirect(address, value)

    def _set_flags(self, cy: Optional[bool] = None, ac: Optional[bool] = None,
                   ov: Optional[bool] = None):
        s = self.state
        psw = s.psw
        for flag, mask in ((cy, PSW_CY), (ac, PSW_AC), (ov, PSW_OV)):
            if flag is not None:
                psw = psw | mask if flag else psw & ~mask
        s.psw = psw

    # ------------------------------------------------------------------
    # Instruction semantics

    def _nop(self, instr: Instruction):
        pass

    def _jump(self, instr: Instruction):
        self.state.pc = instr.target

    def _jmp_indirect(self, instr: Instruction):
        s = self.state
        s.pc = (s.acc + s.dptr) & 0xFFFF

    def _call(self, instr: Instruction):
        s = self.state
        self._push(s.pc & 0xFF)
        self._push(s.pc >> 8)
        s.pc = instr.target

    def _ret(self, instr: Instruction):
        high = self._pop()
        low = self._pop()
        self.state.pc = (high << 8) | low

    def _reti(self, instr: Instruction):
        self._ret(instr)
        if self.state.in_service:
            self.state.in_service.pop()
        self._irq_blocked = True

    def _inc(self, instr: Instruction):
        s = self.state
        if instr.info.operands[0] == 'DPTR':
            s.dptr = (s.dptr + 1) & 0xFFFF
            return
        loc = self._location(instr, 0)
        self._write(loc, self._read(loc, latch=True) + 1)

    def _dec(self, instr: Instruction):
        loc = self._location(instr, 0)
        self._write(loc, self._read(loc, latch=True) - 1)

    def _add(self, instr: Instruction):
        s = self.state
        a = s.acc
        b = self._read(self._location(instr, 1))
        c = 1 if instr.info.mnemonic == 'ADDC' and s.carry else 0
        total = a + b + c
        self._set_flags(
            cy=total > 0xFF,
            ac=(a & 0x0F) + (b & 0x0F) + c > 0x0F,
            ov=bool((a ^ total) & (b ^ total) & 0x80),
        )
        s.acc = total

    def _subb(self, instr: Instruction):
        s = self.state
        a = s.acc
        b = self._read(self._location(instr, 1))
        c = 1 if s.carry else 0
        diff = a - b - c
        self._set_flags(
            cy=diff < 0,
            ac=(a & 0x0F) - (b & 0x0F) - c < 0,
            ov=bool((a ^ b) & (a ^ diff) & 0x80),
        )
        s.acc = diff & 0xFF

    def _logic(self, instr: Instruction):
        mnemonic = instr.info.mnemonic
        operands = instr.info.operands
        if operands[0] == 'C':
            bit = self._read_bit(instr.values[1])
            if operands[1] == '/bit':
                bit = not bit
            carry = self.state.carry
            self._set_flags(cy=(carry and bit) if mnemonic == 'ANL' else (carry or bit))
            return

        dest = self._location(instr, 0)
        a = self._read(dest, latch=True)
        b = self._read(self._location(instr, 1))
        if mnemonic == 'ANL':
            result = a & b
        elif mnemonic == 'ORL':
            result = a | b
        else:
            result = a ^ b
        self._write(dest, result)

    def _mov(self, instr: Instruction):
        operands = instr.info.operands
        if operands == ('C', 'bit'):
            self._set_flags(cy=self._read_bit(instr.values[1]))
        elif operands == ('bit', 'C'):
            self._write_bit(instr.values[0], self.state.carry)
        elif operands[0] == 'DPTR':
            self.state.dptr = instr.values[1]
        else:
            value = self._read(self._location(instr, 1))
            self._write(self._location(instr, 0), value)

    def _movc(self, instr: Instruction):
        s = self.state
        base = s.dptr if instr.info.operands[1] == '@A+DPTR' else s.pc
        address = (s.acc + base) & 0xFFFF
        s.acc = s.code[address] if address < ROM_SIZE else 0xFF

    def _bit_op(self, instr: Instruction):
        mnemonic = instr.info.mnemonic
        kind = instr.info.operands[0]
        s = self.state
        if kind == 'A':
            s.acc = 0 if mnemonic == 'CLR' else s.acc ^ 0xFF
        elif kind == 'C':
            if mnemonic == 'CPL':
                self._set_flags(cy=not s.carry)
            else:
                self._set_flags(cy=mnemonic == 'SETB')
        else:
            bit = instr.values[0]
            if mnemonic == 'CPL':
                self._write_bit(bit, not self._read_bit(bit, latch=True))
            else:
                self._write_bit(bit, mnemonic == 'SETB')

    def _rotate(self, instr: Instruction):
        s = self.state
        a = s.acc
        mnemonic = instr.info.mnemonic
        if mnemonic == 'RL':
            s.acc = ((a << 1) | (a >> 7)) & 0xFF
        elif mnemonic == 'RR':
            s.acc = ((a >> 1) | (a << 7)) & 0xFF
        elif mnemonic == 'RLC':
            carry = 1 if s.carry else 0
            self._set_flags(cy=bool(a & 0x80))
            s.acc = ((a << 1) | carry) & 0xFF
        elif mnemonic == 'RRC':
            carry = 0x80 if s.carry else 0
            self._set_flags(cy=bool(a & 0x01))
            s.acc = (a >> 1) | carry
        else:
            s.acc = ((a << 4) | (a >> 4)) & 0xFF

    def _da(self, instr: Instruction):
        s = self.state
        value = s.acc
        carry = s.carry
        if (value & 0x0F) > 9 or s.psw & PSW_AC:
            value += 0x06
            if value > 0xFF:
                carry = True
        if ((value >> 4) & 0x0F) > 9 or carry:
            value += 0x60
            if value > 0xFF:
                carry = True
        self._set_flags(cy=carry)
        s.acc = value & 0xFF

    def _xch(self, instr: Instruction):
        s = self.state
        loc = self._location(instr, 1)
        value = self._read(loc)
        self._write(loc, s.acc)
        s.acc = value

    def _xchd(self, instr: Instruction):
        s = self.state
        loc = self._location(instr, 1)
        value = self._read(loc)
        a = s.acc
        self._write(loc, (value & 0xF0) | (a & 0x0F))
        s.acc = (a & 0xF0) | (value & 0x0F)

    def _mul(self, instr: Instruction):
        s = self.state
        product = s.acc * s.b
        s.acc = product & 0xFF
        s.b = product >> 8
        self._set_flags(cy=False, ov=product > 0xFF)

    def _div(self, instr: Instruction):
        s = self.state
        if s.b == 0:
            # Quotient and remainder are undefined; A and B are left alone
            self._set_flags(cy=False, ov=True)
            return
        quotient, remainder = divmod(s.acc, s.b)
        s.acc = quotient
        s.b = remainder
        self._set_flags(cy=False, ov=False)

    def _push_direct(self, instr: Instruction):
        self._push(self._read_direct(instr.values[0]))

    def _pop_direct(self, instr: Instruction):
        self._write_direct(instr.values[0], self._pop())

    def _cond_jump(self, instr: Instruction):
        s = self.state
        mnemonic = instr.info.mnemonic
        if mnemonic == 'JC':
            taken = s.carry
        elif mnemonic == 'JNC':
            taken = not s.carry
        elif mnemonic == 'JZ':
            taken = s.acc == 0
        else:
            taken = s.acc != 0
        if taken:
            s.pc = instr.target

    def _bit_jump(self, instr: Instruction):
        bit = instr.values[0]
        mnemonic = instr.info.mnemonic
        if mnemonic == 'JBC':
            if self._read_bit(bit, latch=True):
                self._write_bit(bit, False)
                self.state.pc = instr.target
            return
        if self._read_bit(bit) == (mnemonic == 'JB'):
            self.state.pc = instr.target

    def _cjne(self, instr: Instruction):
        a = self._read(self._location(instr, 0))
        b = self._read(self._location(instr, 1))
        self._set_flags(cy=a < b)
        if a != b:
            self.state.pc = instr.target

    def _djnz(self, instr: Instruction):
        loc = self._location(instr, 0)
        value = (self._read(loc, latch=True) - 1) & 0xFF
        self._write(loc, value)
        if value:
            self.state.pc = instr.target
