"""
Timer/counter 0 and 1

Timers advance once per machine cycle while running. Counter mode (C/T=1)
counts T0/T1 pin edges, which the bench does not model, so a timer in
counter mode holds its value. All updates are arithmetic so a tick of any
length costs the same.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

from .sfr import TCON_TF0, TCON_TF1, TCON_TR0, TCON_TR1

# Offsets into the SFR block (address - 0x80)
_TCON = 0x08
_TMOD = 0x09
_TL = (0x0A, 0x0B)
_TH = (0x0C, 0x0D)

_TF = (TCON_TF0, TCON_TF1)
_TR = (TCON_TR0, TCON_TR1)


@dataclass(frozen=True)
class TimerState:
    """Snapshot of one timer's control bits and counter"""
    timer: int
    mode: int
    gate: bool
    counter_mode: bool
    running: bool
    overflow: bool
    th: int
    tl: int

    @property
    def count(self) -> int:
        """16-bit TH:TL value"""
        return (self.th << 8) | self.tl


def _control(sfr: bytearray, timer: int) -> Tuple[int, bool, bool]:
    """(mode, gate, counter_mode) for a timer from TMOD"""
    nibble = (sfr[_TMOD] >> (4 * timer)) & 0x0F
    return nibble & 0x03, bool(nibble & 0x08), bool(nibble & 0x04)


def _enabled(sfr: bytearray, timer: int, int_pin: bool) -> bool:
    """Run condition: TR set, timer mode, and gate open"""
    _mode, gate, counter_mode = _control(sfr, timer)
    if counter_mode or not sfr[_TCON] & _TR[timer]:
        return False
    return int_pin or not gate


def timer_state(sfr: bytearray, timer: int, int_pin: bool = True) -> TimerState:
    """Snapshot of timer 0 or 1"""
    mode, gate, counter_mode = _control(sfr, timer)
    return TimerState(
        timer=timer,
        mode=mode,
        gate=gate,
        counter_mode=counter_mode,
        running=_enabled(sfr, timer, int_pin),
        overflow=bool(sfr[_TCON] & _TF[timer]),
        th=sfr[_TH[timer]],
        tl=sfr[_TL[timer]],
    )


def _counters(sfr: bytearray, int_pins: Tuple[bool, bool]):
    """
    Yield (kind, timer register slot, flag timer) for every counting unit

    kind is the counter width/mode; flag timer is whose TF the unit sets,
    or None when its overflow is not flagged.
    """
    mode0, _, _ = _control(sfr, 0)
    mode1, _, counter1 = _control(sfr, 1)

    if mode0 == 3:
        if _enabled(sfr, 0, int_pins[0]):
            yield ('tl8', 0, 0)
        # TH0 runs from TR1 alone and borrows TF1
        if sfr[_TCON] & TCON_TR1:
            yield ('th8', 0, 1)
        # Timer 1 keeps counting without a flag unless it is in mode 3
        if mode1 != 3 and not counter1:
            yield (mode1, 1, None)
        return

    if _enabled(sfr, 0, int_pins[0]):
        yield (mode0, 0, 0)
    if mode1 != 3 and _enabled(sfr, 1, int_pins[1]):
        yield (mode1, 1, 1)


def _advance(sfr: bytearray, kind, slot: int, cycles: int) -> int:
    """Advance one counting unit; returns the number of overflows"""
    th, tl = _TH[slot], _TL[slot]

    if kind == 0:
        count = (sfr[th] << 5) | (sfr[tl] & 0x1F)
        total = count + cycles
        count = total & 0x1FFF
        sfr[th] = count >> 5
        sfr[tl] = (sfr[tl] & 0xE0) | (count & 0x1F)
        return total >> 13

    if kind == 1:
        total = ((sfr[th] << 8) | sfr[tl]) + cycles
        sfr[th] = (total >> 8) & 0xFF
        sfr[tl] = total & 0xFF
        return total >> 16

    if kind == 2:
        total = sfr[tl] + cycles
        if total < 0x100:
            sfr[tl] = total
            return 0
        period = 0x100 - sfr[th]
        beyond = total - 0x100
        sfr[tl] = sfr[th] + beyond % period
        return 1 + beyond // period

    reg = tl if kind == 'tl8' else th
    total = sfr[reg] + cycles
    sfr[reg] = total & 0xFF
    return total >> 8


def tick_timers(sfr: bytearray, cycles: int,
                int_pins: Tuple[bool, bool] = (True, True)) -> Tuple[bool, bool]:
    """
    Advance both timers by a number of machine cycles

    Args:
        sfr: SFR block (address 0x80 at index 0)
        cycles: Machine cycles elapsed
        int_pins: INT0/INT1 pin levels for GATE control

    Returns:
        (TF0 set, TF1 set) during this tick
    """
    flagged = [False, False]
    if cycles <= 0:
        return False, False

    for kind, slot, flag in list(_counters(sfr, int_pins)):
        overflows = _advance(sfr, kind, slot, cycles)
        if overflows and flag is not None:
            sfr[_TCON] |= _TF[flag]
            flagged[flag] = True

    return flagged[0], flagged[1]


def cycles_to_overflow(sfr: bytearray,
                       int_pins: Tuple[bool, bool] = (True, True)) -> Optional[int]:
    """
    Machine cycles until the next flagged overflow of any running timer

    Returns:
        Cycle count, or None when no flagged counter is running
    """
    nearest = None
    for kind, slot, flag in _counters(sfr, int_pins):
        if flag is None:
            continue
        th, tl = sfr[_TH[slot]], sfr[_TL[slot]]
        if kind == 0:
            distance = 0x2000 - ((th << 5) | (tl & 0x1F))
        elif kind == 1:
            distance = 0x10000 - ((th << 8) | tl)
        elif kind == 2:
            distance = 0x100 - tl
        elif kind == 'tl8':
            distance = 0x100 - tl
        else:
            distance = 0x100 - th
        if nearest is None or distance < nearest:
            nearest = distance
    return nearest
