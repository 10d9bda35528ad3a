"""
Discrete-event simulation kernel
"""
from .simulator import (
    Event, Level, Net, NetError, NetKind, SchedulingError, SimTime,
    Simulator, Trace, ms, seconds, us,
)
from .pulses import measure_pulses

__all__ = [
    'Event', 'Level', 'Net', 'NetError', 'NetKind', 'SchedulingError',
    'SimTime', 'Simulator', 'Trace', 'measure_pulses', 'ms', 'seconds', 'us',
]
