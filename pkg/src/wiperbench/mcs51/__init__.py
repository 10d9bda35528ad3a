"""
AT89C51 (MCS-51) emulator
"""
from .cpu import ClockConfig, CpuHalt, CpuState, MCS51, RomLoadError
from .image import ROM_SIZE, ObjectImage
from .opcodes import OPCODES, DecodeError, Instruction, OpcodeInfo, decode
from .timers import TimerState, timer_state

__all__ = [
    'ClockConfig', 'CpuHalt', 'CpuState', 'DecodeError', 'Instruction',
    'MCS51', 'OPCODES', 'ObjectImage', 'OpcodeInfo', 'ROM_SIZE',
    'RomLoadError', 'TimerState', 'decode', 'timer_state',
]
