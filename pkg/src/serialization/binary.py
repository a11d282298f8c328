"""Little-endian binary containers.

Every artifact file starts with four magic bytes and a u32 format
version, followed by a type-specific body. Integers are little-endian
unsigned unless noted; real arrays are stored row-major as float64
(float32 for descriptor payloads).
"""

import struct
from pathlib import Path
from typing import Union

import numpy as np

from src.exceptions import FormatError

FORMAT_VERSION = 1

PathLike = Union[str, Path]


class BinaryWriter:
    """Accumulates a container body in memory."""

    def __init__(self, magic: bytes, version: int = FORMAT_VERSION):
        if len(magic) != 4:
            raise ValueError("Magic must be exactly four bytes")
        self._parts = [magic, struct.pack("<I", version)]

    def u8(self, value: int):
        self._parts.append(struct.pack("<B", value))

    def u32(self, value: int):
        self._parts.append(struct.pack("<I", value))

    def i32(self, value: int):
        self._parts.append(struct.pack("<i", value))

    def u64(self, value: int):
        self._parts.append(struct.pack("<Q", value))

    def text(self, value: str):
        encoded = value.encode("utf-8")
        self.u32(len(encoded))
        self._parts.append(encoded)

    def f64(self, values):
        self._parts.append(np.ascontiguousarray(values, dtype="<f8").tobytes())

    def f32(self, values):
        self._parts.append(np.ascontiguousarray(values, dtype="<f4").tobytes())

    def getvalue(self) -> bytes:
        return b"".join(self._parts)

    def save(self, path: PathLike):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.getvalue())


class BinaryReader:
    """Sequential reader over a container; checks magic and version up front.

    Raises:
        FormatError: On a wrong magic, an unsupported version, truncation
            or trailing bytes
    """

    def __init__(self, data: bytes, magic: bytes, source: str = "<bytes>"):
        self._data = memoryview(data)
        self._offset = 0
        self.source = source
        found = bytes(self._take(4))
        if found != magic:
            raise FormatError(
                f"{source}: expected magic {magic!r}, found {found!r}"
            )
        self.version = self.u32()
        if self.version != FORMAT_VERSION:
            raise FormatError(
                f"{source}: unsupported {magic.decode()} version {self.version}"
            )

    @classmethod
    def open(cls, path: PathLike, magic: bytes) -> "BinaryReader":
        path = Path(path)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise FormatError(f"Artifact not found: {path}") from None
        return cls(data, magic, str(path))

    def _take(self, size: int) -> memoryview:
        end = self._offset + size
        if size < 0 or end > len(self._data):
            raise FormatError(f"{self.source}: truncated at byte {self._offset}")
        chunk = self._data[self._offset:end]
        self._offset = end
        return chunk

    def _unpack(self, fmt: str):
        return struct.unpack(fmt, self._take(struct.calcsize(fmt)))[0]

    def u8(self) -> int:
        return self._unpack("<B")

    def u32(self) -> int:
        return self._unpack("<I")

    def i32(self) -> int:
        return self._unpack("<i")

    def u64(self) -> int:
        return self._unpack("<Q")

    def text(self) -> str:
        raw = bytes(self._take(self.u32()))
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{self.source}: invalid UTF-8 string") from exc

    def f64(self, count: int, shape=None) -> np.ndarray:
        values = np.frombuffer(self._take(8 * count), dtype="<f8").astype(np.float64)
        return values.reshape(shape) if shape is not None else values

    def f32(self, count: int, shape=None) -> np.ndarray:
        values = np.frombuffer(self._take(4 * count), dtype="<f4").astype(np.float64)
        return values.reshape(shape) if shape is not None else values

    def finish(self):
        if self._offset != len(self._data):
            raise FormatError(
                f"{self.source}: {len(self._data) - self._offset} trailing bytes"
            )
