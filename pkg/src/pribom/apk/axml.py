"""Decoder for Android binary XML (compiled manifests, layouts, menus).

Implements the chunk stream subset documented in docs/formats.md: the
file header (type 0x0003), string pool, resource map, namespace and
element chunks. Attribute values come out typed; references to
resources keep their 32-bit id for later resolution against the
resource table.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

from ..errors import AxmlError
from .ioutil import Cursor

RES_STRING_POOL_TYPE = 0x0001
RES_XML_TYPE = 0x0003
RES_XML_START_NAMESPACE = 0x0100
RES_XML_END_NAMESPACE = 0x0101
RES_XML_START_ELEMENT = 0x0102
RES_XML_END_ELEMENT = 0x0103
RES_XML_CDATA = 0x0104
RES_XML_RESOURCE_MAP = 0x0180

UTF8_FLAG = 1 << 8

# Res_value data types we surface.
TYPE_NULL = 0x00
TYPE_REFERENCE = 0x01
TYPE_STRING = 0x03
TYPE_FLOAT = 0x04
TYPE_INT_DEC = 0x10
TYPE_INT_HEX = 0x11
TYPE_INT_BOOLEAN = 0x12

ANDROID_NS = "http://schemas.android.com/apk/res/android"


@dataclass(frozen=True)
class ResourceReference:
    """A typed attribute value pointing at a resource table entry."""
    resource_id: int


@dataclass(frozen=True)
class XmlAttribute:
    namespace: str | None
    name: str
    value: object  # str | int | bool | float | ResourceReference | None


@dataclass(frozen=True)
class XmlElement:
    namespace: str | None
    name: str
    attributes: tuple[XmlAttribute, ...]
    children: tuple["XmlElement", ...]

    def attr(self, name: str, namespace: str | None = ANDROID_NS):
        for a in self.attributes:
            if a.name == name and a.namespace == namespace:
                return a.value
        return None

    def iter_tree(self):
        yield self
        for child in self.children:
            yield from child.iter_tree()


@dataclass(frozen=True)
class BinaryXmlDocument:
    root: XmlElement

    @cached_property
    def element_count(self) -> int:
        return sum(1 for _ in self.root.iter_tree())


class _StringPool:
    def __init__(self, strings: list[str]):
        self.strings = strings

    def get(self, index: int, cur: Cursor) -> str:
        if index < 0 or index >= len(self.strings):
            cur.fail(f"string pool index {index} out of range "
                     f"(pool has {len(self.strings)} strings)")
        return self.strings[index]

    def get_optional(self, index: int, cur: Cursor) -> str | None:
        if index in (0xFFFFFFFF, -1):
            return None
        return self.get(index, cur)


def _read_length(cur: Cursor, wide: bool) -> int:
    if wide:
        first = cur.u16()
        if first & 0x8000:
            second = cur.u16()
            return ((first & 0x7FFF) << 16) | second
        return first
    first = cur.u8()
    if first & 0x80:
        second = cur.u8()
        return ((first & 0x7F) << 8) | second
    return first


def parse_string_pool(cur: Cursor, chunk_start: int, header_size: int,
                      chunk_size: int) -> _StringPool:
    string_count = cur.u32()
    style_count = cur.u32()
    flags = cur.u32()
    strings_start = cur.u32()
    cur.u32()  # styles_start, styles are not decoded
    is_utf8 = bool(flags & UTF8_FLAG)

    if strings_start > chunk_size:
        cur.fail(f"string data offset {strings_start} beyond chunk of {chunk_size} bytes")
    if string_count * 4 > chunk_size:
        cur.fail(f"declared {string_count} strings cannot fit in chunk")

    cur.seek(chunk_start + header_size)
    offsets = [cur.u32() for _ in range(string_count)]
    for _ in range(style_count):
        cur.u32()

    strings = []
    data_base = chunk_start + strings_start
    for off in offsets:
        sub = cur.at(data_base + off) if data_base + off <= len(cur.data) else None
        if sub is None:
            cur.fail(f"string offset {off} beyond input", offset=data_base + off)
        if is_utf8:
            _read_length(sub, wide=False)  # UTF-16 code unit count, unused
            byte_len = _read_length(sub, wide=False)
            raw = sub.read(byte_len)
            strings.append(raw.decode("utf-8", "replace"))
        else:
            char_len = _read_length(sub, wide=True)
            raw = sub.read(char_len * 2)
            strings.append(raw.decode("utf-16-le", "replace"))
    return _StringPool(strings)


def _decode_value(cur: Cursor, pool: _StringPool, raw_index: int):
    size = cur.u16()
    cur.u8()  # res0
    data_type = cur.u8()
    data = cur.u32()
    if size != 8:
        cur.fail(f"typed value size {size} is not 8")
    if data_type == TYPE_STRING:
        if raw_index not in (0xFFFFFFFF, -1):
            return pool.get(raw_index, cur)
        return pool.get(data, cur)
    if data_type == TYPE_REFERENCE:
        return ResourceReference(data)
    if data_type == TYPE_INT_BOOLEAN:
        return data != 0
    if data_type in (TYPE_INT_DEC, TYPE_INT_HEX):
        return data if data < 0x80000000 else data - 0x100000000
    if data_type == TYPE_FLOAT:
        return struct.unpack("<f", struct.pack("<I", data))[0]
    if data_type == TYPE_NULL:
        return None
    # Dimensions, fractions, colors: keep the raw word.
    return data


def decode_binary_xml(data: bytes) -> BinaryXmlDocument:
    """Decode one compiled XML file into an element tree."""
    cur = Cursor(data, AxmlError)
    chunk_type = cur.u16()
    header_size = cur.u16()
    total_size = cur.u32()
    if chunk_type != RES_XML_TYPE:
        cur.fail(f"bad magic: expected chunk type 0x0003, got 0x{chunk_type:04x}",
                 offset=0)
    if total_size != len(data):
        cur.fail(f"declared size {total_size} does not match input of "
                 f"{len(data)} bytes", offset=4)
    cur.seek(header_size)

    pool: _StringPool | None = None
    ns_stack: list[tuple[str, str]] = []  # (prefix, uri)
    uri_by_index: dict[int, str] = {}
    element_stack: list[tuple[str | None, str, tuple[XmlAttribute, ...], list]] = []
    root: XmlElement | None = None

    while cur.remaining() >= 8:
        chunk_start = cur.pos
        ctype = cur.u16()
        chsize = cur.u16()
        csize = cur.u32()
        if csize < 8 or chunk_start + csize > len(data):
            cur.fail(f"chunk at {chunk_start} declares {csize} bytes beyond input",
                     offset=chunk_start)
        body = cur.at(chunk_start + 8)

        if ctype == RES_STRING_POOL_TYPE:
            pool = parse_string_pool(body, chunk_start, chsize, csize)
        elif ctype == RES_XML_RESOURCE_MAP:
            pass  # attribute-name resource ids, not needed for extraction
        elif ctype in (RES_XML_START_NAMESPACE, RES_XML_END_NAMESPACE):
            if pool is None:
                cur.fail("namespace chunk before string pool", offset=chunk_start)
            body.u32()  # line number
            body.u32()  # comment
            prefix_idx = body.i32()
            uri_idx = body.i32()
            if ctype == RES_XML_START_NAMESPACE:
                prefix = pool.get_optional(prefix_idx, body) or ""
                uri = pool.get(uri_idx, body)
                ns_stack.append((prefix, uri))
                uri_by_index[uri_idx] = uri
            elif ns_stack:
                ns_stack.pop()
        elif ctype == RES_XML_START_ELEMENT:
            if pool is None:
                cur.fail("element chunk before string pool", offset=chunk_start)
            body.u32()  # line number
            body.u32()  # comment
            ns_idx = body.i32()
            name_idx = body.i32()
            body.u16()  # attribute start
            attr_size = body.u16()
            attr_count = body.u16()
            body.u16()  # id index
            body.u16()  # class index
            body.u16()  # style index
            if attr_size < 20:
                body.fail(f"attribute size {attr_size} below minimum 20")
            if 36 + attr_count * attr_size > csize:
                body.fail(f"{attr_count} attributes do not fit in chunk of {csize} bytes")
            attrs = []
            for i in range(attr_count):
                acur = cur.at(chunk_start + 8 + 28 + i * attr_size)
                a_ns = acur.i32()
                a_name = acur.i32()
                a_raw = acur.i32()
                value = _decode_value(acur, pool, a_raw)
                attrs.append(XmlAttribute(
                    namespace=pool.get_optional(a_ns, acur),
                    name=pool.get(a_name, acur),
                    value=value))
            element_stack.append((
                pool.get_optional(ns_idx, body),
                pool.get(name_idx, body),
                tuple(attrs),
                []))
        elif ctype == RES_XML_END_ELEMENT:
            if not element_stack:
                cur.fail("end-element chunk without matching start", offset=chunk_start)
            ns, name, attrs, children = element_stack.pop()
            element = XmlElement(namespace=ns, name=name, attributes=attrs,
                                 children=tuple(children))
            if element_stack:
                element_stack[-1][3].append(element)
            elif root is None:
                root = element
            else:
                cur.fail("multiple root elements", offset=chunk_start)
        elif ctype == RES_XML_CDATA:
            pass
        else:
            cur.fail(f"unknown chunk type 0x{ctype:04x}", offset=chunk_start)
        cur.seek(chunk_start + csize)

    if element_stack:
        cur.fail(f"{len(element_stack)} elements left open at end of input")
    if root is None:
        cur.fail("document contains no elements")
    return BinaryXmlDocument(root=root)
