"""
Pulse measurement over digital traces
"""
from typing import List, Optional, Tuple

from .simulator import Level, SimTime, Trace


def measure_pulses(trace: Trace,
                   window: Optional[Tuple[SimTime, SimTime]] = None
                   ) -> List[Tuple[SimTime, SimTime]]:
    """
    Find every complete high pulse inside a window

    A pulse counts when both its rising and its falling edge lie inside
    [start, end]; a pulse already high at the window start or still high at
    the window end is omitted.

    Args:
        trace: Trace of a digital net
        window: (start, end) in ns; None covers the whole trace

    Returns:
        (rise time, width) pairs in time order
    """
    points = trace.points
    if isinstance(points[0][1], float):
        raise ValueError("measure_pulses needs a digital trace")

    start, end = window if window is not None else (0, points[-1][0])

    pulses = []
    rise = None
    previous = points[0][1]
    for at, level in points[1:]:
        if at > end:
            break
        if level == Level.HIGH and previous == Level.LOW:
            rise = at if at >= start else None
        elif level == Level.LOW and previous == Level.HIGH and rise is not None:
            pulses.append((rise, at - rise))
            rise = None
        previous = level

    return pulses
