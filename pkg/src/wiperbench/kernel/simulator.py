"""
Deterministic discrete-event simulation core

A global integer-nanosecond clock, named digital/analog nets, an event
queue ordered by (timestamp, insertion sequence) and append-only traces
of every net's change points.
"""
import heapq
import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union


logger = logging.getLogger(__name__)

# Nanoseconds since reset
SimTime = int

NS_PER_US = 1_000
NS_PER_MS = 1_000_000
NS_PER_S = 1_000_000_000


def us(value: int) -> SimTime:
    """Microseconds to SimTime"""
    return value * NS_PER_US


def ms(value: int) -> SimTime:
    """Milliseconds to SimTime"""
    return value * NS_PER_MS


def seconds(value: int) -> SimTime:
    """Seconds to SimTime"""
    return value * NS_PER_S


class Level(IntEnum):
    """Digital logic level"""
    LOW = 0
    HIGH = 1


class NetKind(Enum):
    """Net kinds"""
    DIGITAL = "digital"
    ANALOG = "analog"


NetValue = Union[Level, float]


class SchedulingError(RuntimeError):
    """Raised when an event or horizon lies in the simulated past"""


class NetError(ValueError):
    """Raised for unknown nets, level/kind mismatches and driver conflicts"""


def coerce_level(kind: NetKind, value) -> NetValue:
    """
    Validate a value against a net kind

    Args:
        kind: Net kind
        value: Level for digital nets, number of volts (or any float
            quantity) for analog nets

    Returns:
        Level or float
    """
    if kind is NetKind.DIGITAL:
        if isinstance(value, float) or value not in (0, 1):
            raise NetError(f"Digital net cannot carry {value!r}")
        return Level(int(value))

    if isinstance(value, Level) or isinstance(value, bool):
        raise NetError(f"Analog net cannot carry logic level {value!r}")
    if not isinstance(value, (int, float)):
        raise NetError(f"Analog net cannot carry {value!r}")
    return float(value)


class Trace:
    """
    Ordered change points of one net

    The first entry is the reset level at tick 0; timestamps are strictly
    increasing.
    """

    def __init__(self, initial: NetValue):
        self._points: List[Tuple[SimTime, NetValue]] = [(0, initial)]

    @classmethod
    def from_points(cls, points: List[Tuple[SimTime, NetValue]]) -> 'Trace':
        """Build a trace from (time, level) pairs (first must be at tick 0)"""
        if not points or points[0][0] != 0:
            raise NetError("Trace must start at tick 0")
        trace = cls(points[0][1])
        for at, level in points[1:]:
            trace.record(at, level)
        return trace

    def record(self, at: SimTime, level: NetValue):
        """
        Append a change point

        A second change at the same timestamp replaces the first; a change
        back to the previous level collapses the zero-width glitch.
        """
        last_at, last_level = self._points[-1]
        if at < last_at:
            raise SchedulingError(f"Trace time {at} before last change {last_at}")

        if at == last_at:
            if len(self._points) == 1:
                self._points[0] = (0, level)
                return
            self._points.pop()
            if self._points[-1][1] == level:
                return
            self._points.append((at, level))
            return

        if level == last_level:
            return
        self._points.append((at, level))

    @property
    def points(self) -> List[Tuple[SimTime, NetValue]]:
        """Change points (copy)"""
        return list(self._points)

    @property
    def initial(self) -> NetValue:
        """Reset level"""
        return self._points[0][1]

    def level_at(self, at: SimTime) -> NetValue:
        """Level in effect at a given time"""
        level = self._points[0][1]
        for t, value in self._points:
            if t > at:
                break
            level = value
        return level

    def __iter__(self) -> Iterator[Tuple[SimTime, NetValue]]:
        return iter(self._points)

    def __len__(self) -> int:
        return len(self._points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return self._points == other._points

    def __repr__(self):
        return f"Trace({self._points!r})"


@dataclass
class Net:
    """A named wire with exactly one driver"""
    name: str
    kind: NetKind
    driver: str
    level: NetValue
    trace: Trace = field(init=False)

    def __post_init__(self):
        self.level = coerce_level(self.kind, self.level)
        self.trace = Trace(self.level)


@dataclass(frozen=True)
class Event:
    """A level change scheduled on a net"""
    at: SimTime
    net: str
    new_level: NetValue


Watcher = Callable[['Simulator', Net, NetValue, NetValue], None]


class Simulator:
    """
    Single-threaded event loop

    Components attach nets they drive and watch nets they read; watchers
    run when a delivered event changes a net's level and may schedule
    further events, including zero-delay events at the current time.
    """

    def __init__(self):
        self.clock: SimTime = 0
        self.nets: Dict[str, Net] = {}
        self._queue: List[Tuple[SimTime, int, Event]] = []
        self._sequence = 0
        self._watchers: Dict[str, List[Watcher]] = {}
        self.delivered = 0

    def add_net(self, name: str, kind: NetKind, driver: str, initial) -> Net:
        """
        Declare a net

        Args:
            name: Unique net name
            kind: Digital or analog
            driver: Name of the single component driving the net
            initial: Reset level

        Returns:
            The new net
        """
        if name in self.nets:
            existing = self.nets[name]
            raise NetError(
                f"Net {name} already driven by {existing.driver}, "
                f"cannot add driver {driver}"
            )
        if self.clock != 0:
            raise NetError(f"Net {name} declared after reset (clock={self.clock})")

        net = Net(name, kind, driver, initial)
        self.nets[name] = net
        return net

    def net(self, name: str) -> Net:
        """Look up a net by name"""
        try:
            return self.nets[name]
        except KeyError:
            raise NetError(f"Unknown net: {name}")

    def level(self, name: str) -> NetValue:
        """Current level of a net"""
        return self.net(name).level

    def watch(self, name: str, watcher: Watcher):
        """Register a callback for level changes on a net"""
        self.net(name)
        self._watchers.setdefault(name, []).append(watcher)

    def schedule(self, event: Event):
        """
        Queue an event

        Raises:
            SchedulingError: if the event lies before the current clock
        """
        if event.at < self.clock:
            raise SchedulingError(
                f"Event on {event.net} at {event.at} ns is before clock {self.clock} ns"
            )
        net = self.net(event.net)
        coerce_level(net.kind, event.new_level)

        heapq.heappush(self._queue, (event.at, self._sequence, event))
        self._sequence += 1

    def drive(self, name: str, level, at: Optional[SimTime] = None):
        """Schedule a level change (defaults to the current time)"""
        self.schedule(Event(self.clock if at is None else at, name, level))

    def peek_time(self) -> Optional[SimTime]:
        """Timestamp of the next queued event, or None"""
        if self._queue:
            return self._queue[0][0]
        return None

    def run_until(self, horizon: SimTime) -> Dict[str, Trace]:
        """
        Deliver every event with timestamp <= horizon and advance the clock

        Args:
            horizon: Time to advance to

        Returns:
            Traces of all nets
        """
        if horizon < self.clock:
            raise SchedulingError(f"Horizon {horizon} ns is before clock {self.clock} ns")

        while self._queue and self._queue[0][0] <= horizon:
            at, _, event = heapq.heappop(self._queue)
            self.clock = at
            self._deliver(event)

        self.clock = horizon
        return self.traces()

    def _deliver(self, event: Event):
        """Apply one event and notify watchers"""
        net = self.nets[event.net]
        new_level = coerce_level(net.kind, event.new_level)
        self.delivered += 1

        if new_level == net.level:
            return

        old_level = net.level
        net.level = new_level
        net.trace.record(self.clock, new_level)

        for watcher in self._watchers.get(net.name, ()):
            watcher(self, net, old_level, new_level)

    def traces(self) -> Dict[str, Trace]:
        """Traces of all nets, keyed by net name"""
        return {name: net.trace for name, net in self.nets.items()}
