"""Bounds-checked little-endian reads over an immutable byte buffer.

Every parser in this package goes through a Cursor so that truncated or
corrupt inputs surface as structured errors carrying the byte offset,
never as IndexError or a silent short read.
"""

from __future__ import annotations

import struct

from ..errors import BinaryParseError


class Cursor:
    __slots__ = ("data", "pos", "_error")

    def __init__(self, data: bytes, error_cls: type[BinaryParseError], pos: int = 0):
        self.data = data
        self.pos = pos
        self._error = error_cls

    def fail(self, message: str, offset: int | None = None):
        raise self._error(message, offset=self.pos if offset is None else offset)

    def need(self, n: int) -> None:
        if n < 0 or self.pos + n > len(self.data):
            self.fail(f"need {n} bytes but only {len(self.data) - self.pos} remain")

    def read(self, n: int) -> bytes:
        self.need(n)
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        self.need(1)
        value = self.data[self.pos]
        self.pos += 1
        return value

    def u16(self) -> int:
        self.need(2)
        value = struct.unpack_from("<H", self.data, self.pos)[0]
        self.pos += 2
        return value

    def u32(self) -> int:
        self.need(4)
        value = struct.unpack_from("<I", self.data, self.pos)[0]
        self.pos += 4
        return value

    def i32(self) -> int:
        self.need(4)
        value = struct.unpack_from("<i", self.data, self.pos)[0]
        self.pos += 4
        return value

    def uleb128(self) -> int:
        result = 0
        shift = 0
        while True:
            byte = self.u8()
            result |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return result
            shift += 7
            if shift > 35:
                self.fail("uleb128 value too long")

    def seek(self, pos: int) -> None:
        if pos < 0 or pos > len(self.data):
            self.fail(f"seek target {pos} outside input of {len(self.data)} bytes",
                      offset=pos)
        self.pos = pos

    def at(self, pos: int) -> "Cursor":
        sub = Cursor(self.data, self._error, 0)
        sub.seek(pos)
        return sub

    def remaining(self) -> int:
        return len(self.data) - self.pos
