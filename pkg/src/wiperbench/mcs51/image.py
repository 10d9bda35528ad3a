"""
Object image: the sparse byte map an assembler produces and the ROM loads
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Tuple


ROM_SIZE = 4096


@dataclass
class ObjectImage:
    """Sparse address -> byte map over the code space"""
    data: Dict[int, int] = field(default_factory=dict)
    entry: int = 0x0000

    @classmethod
    def from_bytes(cls, blob: bytes, origin: int = 0) -> 'ObjectImage':
        """Contiguous bytes starting at origin"""
        return cls({origin + i: b for i, b in enumerate(blob)})

    def put(self, address: int, value: int):
        """
        Store one byte

        Raises:
            ValueError: if the address already holds a byte
        """
        if address in self.data:
            raise ValueError(f"Address 0x{address:04X} already holds a byte")
        self.data[address] = value & 0xFF

    def segments(self) -> List[Tuple[int, bytes]]:
        """Contiguous runs as (start address, bytes), in address order"""
        runs: List[Tuple[int, bytes]] = []
        start = None
        chunk = bytearray()
        previous = None
        for address in sorted(self.data):
            if previous is None or address != previous + 1:
                if start is not None:
                    runs.append((start, bytes(chunk)))
                start = address
                chunk = bytearray()
            chunk.append(self.data[address])
            previous = address
        if start is not None:
            runs.append((start, bytes(chunk)))
        return runs

    @property
    def size(self) -> int:
        """One past the highest used address (0 when empty)"""
        return max(self.data) + 1 if self.data else 0

    def to_rom(self, size: int = ROM_SIZE) -> bytes:
        """Dense ROM contents; unspecified bytes are 0x00"""
        rom = bytearray(size)
        for address, value in self.data.items():
            rom[address] = value
        return bytes(rom)

    def __len__(self) -> int:
        return len(self.data)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self.data.items()))
