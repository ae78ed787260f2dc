"""Decoder for the compiled resource table (resources.arsc).

Only what the inventory needs is extracted: the id/name pairing for
every entry (so widget ids resolve to readable names and back) and, for
file-backed resources such as layouts and drawables, the path string
the entry points at.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ArscError
from .axml import RES_STRING_POOL_TYPE, parse_string_pool
from .ioutil import Cursor

RES_TABLE_TYPE = 0x0002
RES_TABLE_PACKAGE_TYPE = 0x0200
RES_TABLE_TYPE_TYPE = 0x0201
RES_TABLE_TYPE_SPEC_TYPE = 0x0202
RES_TABLE_LIBRARY_TYPE = 0x0203

NO_ENTRY = 0xFFFFFFFF
FLAG_COMPLEX = 0x0001
TYPE_STRING = 0x03


@dataclass(frozen=True)
class ResourceEntry:
    type_name: str
    entry_name: str
    file_path: str | None = None  # set for file-backed resources


@dataclass(frozen=True)
class ResourceTable:
    package_id: int
    entries: dict  # resource id -> ResourceEntry
    reverse: dict  # (type_name, entry_name) -> resource id

    def lookup(self, resource_id: int) -> ResourceEntry | None:
        return self.entries.get(resource_id)

    def reverse_lookup(self, type_name: str, entry_name: str) -> int | None:
        return self.reverse.get((type_name, entry_name))

    def name_of(self, resource_id: int) -> str | None:
        entry = self.entries.get(resource_id)
        return entry.entry_name if entry else None


def resolve_resource_id(resource_id: int) -> tuple[int, int, int]:
    """Bit decomposition 0xPPTTEEEE -> (package, type index, entry index)."""
    return ((resource_id >> 24) & 0xFF,
            (resource_id >> 16) & 0xFF,
            resource_id & 0xFFFF)


def compose_resource_id(package: int, type_index: int, entry_index: int) -> int:
    return ((package & 0xFF) << 24) | ((type_index & 0xFF) << 16) | (entry_index & 0xFFFF)


def _parse_package(cur: Cursor, chunk_start: int, header_size: int, chunk_size: int,
                   global_pool) -> tuple[int, dict, dict]:
    package_id = cur.u32()
    cur.read(256)  # package name, 128 UTF-16 code units
    type_strings_off = cur.u32()
    cur.u32()  # last public type
    key_strings_off = cur.u32()
    cur.u32()  # last public key

    def pool_at(offset: int):
        sub = cur.at(chunk_start + offset)
        ptype = sub.u16()
        phead = sub.u16()
        psize = sub.u32()
        if ptype != RES_STRING_POOL_TYPE:
            sub.fail(f"expected string pool at package offset {offset}, "
                     f"got chunk type 0x{ptype:04x}")
        if chunk_start + offset + psize > len(cur.data):
            sub.fail("string pool extends beyond input")
        return parse_string_pool(sub, chunk_start + offset, phead, psize)

    type_pool = pool_at(type_strings_off)
    key_pool = pool_at(key_strings_off)

    entries: dict[int, ResourceEntry] = {}
    reverse: dict[tuple[str, str], int] = {}

    pos = chunk_start + header_size
    # Walk past whichever of the two pools comes first in the body.
    end = chunk_start + chunk_size
    walker = cur.at(pos)
    while walker.pos + 8 <= end:
        sub_start = walker.pos
        stype = walker.u16()
        shead = walker.u16()
        ssize = walker.u32()
        if ssize < 8 or sub_start + ssize > end:
            walker.fail(f"package sub-chunk at {sub_start} declares {ssize} bytes "
                        "beyond package", offset=sub_start)
        if stype == RES_TABLE_TYPE_TYPE:
            body = walker.at(sub_start + 8)
            type_id = body.u8()
            body.u8()   # flags
            body.u16()  # reserved
            entry_count = body.u32()
            entries_start = body.u32()
            if entry_count * 4 > ssize:
                body.fail(f"type chunk declares {entry_count} entries beyond its size")
            if type_id == 0 or type_id > len(type_pool.strings):
                body.fail(f"type id {type_id} has no type name")
            type_name = type_pool.strings[type_id - 1]
            offsets_cur = walker.at(sub_start + shead)
            offsets = [offsets_cur.u32() for _ in range(entry_count)]
            for entry_index, offset in enumerate(offsets):
                if offset == NO_ENTRY:
                    continue
                ecur = walker.at(sub_start + entries_start + offset)
                ecur.u16()  # entry size
                flags = ecur.u16()
                key_index = ecur.u32()
                entry_name = key_pool.get(key_index, ecur)
                file_path = None
                if not flags & FLAG_COMPLEX:
                    ecur.u16()  # value size
                    ecur.u8()   # res0
                    data_type = ecur.u8()
                    data = ecur.u32()
                    if data_type == TYPE_STRING:
                        file_path = global_pool.get(data, ecur)
                resource_id = compose_resource_id(package_id, type_id, entry_index)
                existing = entries.get(resource_id)
                if existing is None:
                    entries[resource_id] = ResourceEntry(type_name, entry_name, file_path)
                    reverse[(type_name, entry_name)] = resource_id
                elif existing.file_path is None and file_path is not None:
                    entries[resource_id] = ResourceEntry(type_name, entry_name, file_path)
        elif stype in (RES_TABLE_TYPE_SPEC_TYPE, RES_STRING_POOL_TYPE,
                       RES_TABLE_LIBRARY_TYPE):
            pass
        else:
            walker.fail(f"unknown package sub-chunk type 0x{stype:04x}",
                        offset=sub_start)
        walker.seek(sub_start + ssize)
    return package_id, entries, reverse


def parse_resource_table(data: bytes) -> ResourceTable:
    """Decode resources.arsc into forward and reverse id/name indices."""
    cur = Cursor(data, ArscError)
    chunk_type = cur.u16()
    header_size = cur.u16()
    total_size = cur.u32()
    if chunk_type != RES_TABLE_TYPE:
        cur.fail(f"bad magic: expected chunk type 0x0002, got 0x{chunk_type:04x}",
                 offset=0)
    if total_size != len(data):
        cur.fail(f"declared size {total_size} does not match input of "
                 f"{len(data)} bytes", offset=4)
    package_count = cur.u32()
    cur.seek(header_size)

    global_pool = None
    package_id = 0
    entries: dict[int, ResourceEntry] = {}
    reverse: dict[tuple[str, str], int] = {}
    packages_seen = 0

    while cur.remaining() >= 8:
        chunk_start = cur.pos
        ctype = cur.u16()
        chsize = cur.u16()
        csize = cur.u32()
        if csize < 8 or chunk_start + csize > len(data):
            cur.fail(f"chunk at {chunk_start} declares {csize} bytes beyond input",
                     offset=chunk_start)
        if ctype == RES_STRING_POOL_TYPE:
            global_pool = parse_string_pool(cur.at(chunk_start + 8),
                                            chunk_start, chsize, csize)
        elif ctype == RES_TABLE_PACKAGE_TYPE:
            if global_pool is None:
                cur.fail("package chunk before global string pool",
                         offset=chunk_start)
            pid, pentries, preverse = _parse_package(
                cur.at(chunk_start + 8), chunk_start, chsize, csize, global_pool)
            package_id = pid
            entries.update(pentries)
            reverse.update(preverse)
            packages_seen += 1
        else:
            cur.fail(f"unknown table chunk type 0x{ctype:04x}", offset=chunk_start)
        cur.seek(chunk_start + csize)

    if packages_seen != package_count:
        cur.fail(f"header declares {package_count} packages, found {packages_seen}")
    return ResourceTable(package_id=package_id, entries=entries, reverse=reverse)
