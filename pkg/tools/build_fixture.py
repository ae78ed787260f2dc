#!/usr/bin/env python3
"""Builds the checked-in test fixture APK from scratch.

Standalone encoders for the three binary formats live here, written
directly against the published format layouts and kept independent of
the decoders in src/ so fixture bytes are not produced by the code
under test. Output is fully deterministic (fixed zip timestamps,
stored compression, fixed string order).

Usage: python tools/build_fixture.py [tests/fixtures]

See tests/fixtures/PROVENANCE.md for what the fixture contains.
"""

from __future__ import annotations

import hashlib
import struct
import sys
import zipfile
import zlib
from pathlib import Path

ANDROID_NS = "http://schemas.android.com/apk/res/android"

# Fixture resource ids (package 0x7f, type ids per the type string pool below).
ID_ACTION_SHARE = 0x7F090037   # decimal 2131296311
ID_BTN_LOCATE = 0x7F090038     # decimal 2131296312
ID_DRAWABLE_PIN = 0x7F020000
ID_LAYOUT_MAIN = 0x7F030000
ID_MENU_MAIN = 0x7F040000

# Framework attribute resource ids (cosmetic; decoders match by name).
ATTR_IDS = {
    "label": 0x01010001,
    "icon": 0x01010002,
    "name": 0x01010003,
    "id": 0x010100D0,
    "background": 0x010100D4,
    "src": 0x01010119,
    "title": 0x010101E1,
    "versionCode": 0x0101021B,
    "versionName": 0x0101021C,
    "onClick": 0x0101026F,
}


def align4(buf: bytearray, pad: bytes = b"\x00") -> None:
    while len(buf) % 4:
        buf.extend(pad)


# ---------------------------------------------------------------------------
# String pool (shared by AXML and ARSC writers); UTF-16 encoding.
# ---------------------------------------------------------------------------

def string_pool_chunk(strings: list[str]) -> bytes:
    offsets = []
    data = bytearray()
    for s in strings:
        offsets.append(len(data))
        encoded = s.encode("utf-16-le")
        data += struct.pack("<H", len(s)) + encoded + b"\x00\x00"
    align4(data)
    header_size = 28
    strings_start = header_size + 4 * len(strings)
    total = strings_start + len(data)
    chunk = bytearray()
    chunk += struct.pack("<HHI", 0x0001, header_size, total)
    chunk += struct.pack("<IIIII", len(strings), 0, 0, strings_start, 0)
    for off in offsets:
        chunk += struct.pack("<I", off)
    chunk += data
    return bytes(chunk)


# ---------------------------------------------------------------------------
# Binary XML writer
# ---------------------------------------------------------------------------

class Elem:
    def __init__(self, name: str, attrs=None, children=None):
        self.name = name
        self.attrs = attrs or []  # (ns|None, name, value) tuples
        self.children = children or []


def _axml_value(value, pool_index):
    """Returns (raw_index, data_type, data) for a typed attribute value."""
    if isinstance(value, str):
        return pool_index(value), 0x03, pool_index(value)
    if isinstance(value, bool):
        return 0xFFFFFFFF, 0x12, 0xFFFFFFFF if value else 0
    if isinstance(value, tuple) and value[0] == "ref":
        return 0xFFFFFFFF, 0x01, value[1]
    if isinstance(value, int):
        return 0xFFFFFFFF, 0x10, value & 0xFFFFFFFF
    raise TypeError(f"unsupported attribute value {value!r}")


def build_axml(root: Elem) -> bytes:
    strings: list[str] = []
    index: dict[str, int] = {}

    def pool_index(s: str) -> int:
        if s not in index:
            index[s] = len(strings)
            strings.append(s)
        return index[s]

    # Android tooling puts resource-mapped attribute names first.
    attr_names: list[str] = []

    def collect(elem: Elem):
        for ns, name, _ in elem.attrs:
            if ns == ANDROID_NS and name in ATTR_IDS and name not in attr_names:
                attr_names.append(name)
        for child in elem.children:
            collect(child)

    collect(root)
    for name in attr_names:
        pool_index(name)
    pool_index(ANDROID_NS)
    pool_index("android")

    def collect_rest(elem: Elem):
        for ns, name, value in elem.attrs:
            pool_index(name)
            if isinstance(value, str):
                pool_index(value)
        pool_index(elem.name)
        for child in elem.children:
            collect_rest(child)

    collect_rest(root)

    body = bytearray()

    def node_header(chunk_type: int, size: int) -> bytes:
        return struct.pack("<HHI", chunk_type, 16, size) + struct.pack("<iI", 1, 0xFFFFFFFF)

    # start namespace
    body += node_header(0x0100, 24)
    body += struct.pack("<II", pool_index("android"), pool_index(ANDROID_NS))

    def emit(elem: Elem):
        attr_count = len(elem.attrs)
        size = 16 + 20 + attr_count * 20
        chunk = bytearray()
        chunk += node_header(0x0102, size)
        chunk += struct.pack("<ii", -1, pool_index(elem.name))
        chunk += struct.pack("<HHHHHH", 20, 20, attr_count, 0, 0, 0)
        for ns, name, value in elem.attrs:
            raw, dtype, data = _axml_value(value, pool_index)
            chunk += struct.pack("<iiI", pool_index(ns) if ns else -1,
                                 pool_index(name), raw)
            chunk += struct.pack("<HBBI", 8, 0, dtype, data)
        body.extend(chunk)
        for child in elem.children:
            emit(child)
        end = bytearray()
        end += node_header(0x0103, 24)
        end += struct.pack("<ii", -1, pool_index(elem.name))
        body.extend(end)

    emit(root)
    body += node_header(0x0101, 24)
    body += struct.pack("<II", pool_index("android"), pool_index(ANDROID_NS))

    pool = string_pool_chunk(strings)
    resmap = struct.pack("<HHI", 0x0180, 8, 8 + 4 * len(attr_names))
    resmap += b"".join(struct.pack("<I", ATTR_IDS[n]) for n in attr_names)

    total = 8 + len(pool) + len(resmap) + len(body)
    return struct.pack("<HHI", 0x0003, 8, total) + pool + resmap + bytes(body)


# ---------------------------------------------------------------------------
# Resource table writer
# ---------------------------------------------------------------------------

TYPE_NAMES = ["attr", "drawable", "layout", "menu", "string", "dimen",
              "color", "style", "id"]  # type ids 1..9; "id" is 9 on purpose


def build_arsc() -> bytes:
    global_strings = ["res/drawable/pin.png", "res/layout/main.xml",
                      "res/menu/main_menu.xml"]
    key_strings = ["pin", "main", "main_menu", "action_share", "btn_locate"]

    # (type id, {entry index: (key index, value string index | None)})
    types = [
        (2, {0x0000: (0, 0)}),            # drawable/pin -> res/drawable/pin.png
        (3, {0x0000: (1, 1)}),            # layout/main
        (4, {0x0000: (2, 2)}),            # menu/main_menu
        (9, {0x0037: (3, None),           # id/action_share
             0x0038: (4, None)}),         # id/btn_locate
    ]

    global_pool = string_pool_chunk(global_strings)
    type_pool = string_pool_chunk(TYPE_NAMES)
    key_pool = string_pool_chunk(key_strings)

    body = bytearray()
    for type_id, entries in types:
        entry_count = max(entries) + 1
        spec = struct.pack("<HHI", 0x0202, 16, 16 + 4 * entry_count)
        spec += struct.pack("<BBHI", type_id, 0, 0, entry_count)
        spec += b"\x00" * (4 * entry_count)
        body += spec

        offsets = bytearray()
        edata = bytearray()
        for i in range(entry_count):
            if i in entries:
                offsets += struct.pack("<I", len(edata))
                key_index, value_index = entries[i]
                edata += struct.pack("<HHI", 8, 0, key_index)
                if value_index is not None:
                    edata += struct.pack("<HBBI", 8, 0, 0x03, value_index)
                else:
                    edata += struct.pack("<HBBI", 8, 0, 0x12, 0)  # boolean false
            else:
                offsets += struct.pack("<I", 0xFFFFFFFF)
        header_size = 20 + 28  # chunk header + id/flags/count/start + config
        entries_start = header_size + len(offsets)
        size = entries_start + len(edata)
        chunk = struct.pack("<HHI", 0x0201, header_size, size)
        chunk += struct.pack("<BBHII", type_id, 0, 0, entry_count, entries_start)
        chunk += struct.pack("<I", 28) + b"\x00" * 24  # default config
        body += chunk + offsets + edata

    package_header_size = 288
    name = "com.example.fixture".encode("utf-16-le")
    name += b"\x00" * (256 - len(name))
    type_strings_off = package_header_size
    key_strings_off = type_strings_off + len(type_pool)
    package_size = key_strings_off + len(key_pool) + len(body)
    package = struct.pack("<HHI", 0x0200, package_header_size, package_size)
    package += struct.pack("<I", 0x7F) + name
    package += struct.pack("<IIII", type_strings_off, len(TYPE_NAMES),
                           key_strings_off, len(key_strings))
    package += struct.pack("<I", 0)  # typeIdOffset
    package += type_pool + key_pool + body

    total = 12 + len(global_pool) + len(package)
    return struct.pack("<HHI", 0x0002, 12, total) + struct.pack("<I", 1) \
        + global_pool + package


# ---------------------------------------------------------------------------
# DEX writer
# ---------------------------------------------------------------------------

ACC_PUBLIC = 0x0001
ACC_PROTECTED = 0x0004
ACC_INTERFACE = 0x0200
ACC_ABSTRACT = 0x0400
ACC_ANNOTATION = 0x2000
ACC_CONSTRUCTOR = 0x10000

ANNOTATION_FLAGS = ACC_PUBLIC | ACC_INTERFACE | ACC_ABSTRACT | ACC_ANNOTATION
INTERFACE_FLAGS = ACC_PUBLIC | ACC_INTERFACE | ACC_ABSTRACT

_INVOKE_OPS = {"virtual": 0x6E, "super": 0x6F, "direct": 0x70,
               "static": 0x71, "interface": 0x72}


def uleb128(value: int) -> bytes:
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def class_desc(dotted: str) -> str:
    return "L" + dotted.replace(".", "/") + ";"


def shorty_char(descriptor: str) -> str:
    if descriptor[0] in "[L":
        return "L"
    return descriptor[0]


class DexWriter:
    """Assembles a dex file from class descriptions.

    Methods are (name, param descriptors, return descriptor,
    access flags, ops). ops is None for abstract methods, else a list of
    instruction tuples:
      ("const", reg, value), ("const-string", reg, text),
      ("new-instance", reg, dotted_class), ("move-result-object", reg),
      ("invoke", kind, (dotted_class, name, params, ret), regs),
      ("check-cast", reg, dotted_class), ("return-void",), ("return", reg)
    """

    def __init__(self):
        self.class_items = []

    def add_class(self, name, superclass, interfaces=(), access=ACC_PUBLIC,
                  methods=()):
        self.class_items.append((name, superclass, tuple(interfaces),
                                 access, list(methods)))

    # -- symbol collection ---------------------------------------------------

    def _collect(self):
        strings: set[str] = set()
        types: set[str] = set()
        protos: set[tuple] = set()
        method_ids: set[tuple] = set()

        def add_proto(params, ret):
            shorty = shorty_char(ret) + "".join(shorty_char(p) for p in params)
            strings.add(shorty)
            types.add(ret)
            for p in params:
                types.add(p)
            protos.add((tuple(params), ret))

        def add_method(cls, mname, params, ret):
            types.add(class_desc(cls))
            strings.add(mname)
            add_proto(params, ret)
            method_ids.add((class_desc(cls), mname, (tuple(params), ret)))

        for name, superclass, interfaces, _access, methods in self.class_items:
            types.add(class_desc(name))
            if superclass:
                types.add(class_desc(superclass))
            for iface in interfaces:
                types.add(class_desc(iface))
            for mname, params, ret, _f, ops in methods:
                add_method(name, mname, tuple(params), ret)
                for op in ops or []:
                    if op[0] == "invoke":
                        cls, tname, tparams, tret = op[2]
                        add_method(cls, tname, tuple(tparams), tret)
                    elif op[0] == "const-string":
                        strings.add(op[2])
                    elif op[0] in ("new-instance", "check-cast"):
                        types.add(class_desc(op[2]))

        self.strings = sorted(strings | {t for t in types})
        self.string_index = {s: i for i, s in enumerate(self.strings)}
        self.types = sorted(types, key=lambda t: self.string_index[t])
        self.type_index = {t: i for i, t in enumerate(self.types)}
        self.protos = sorted(
            protos,
            key=lambda p: (self.type_index[p[1]],
                           tuple(self.type_index[x] for x in p[0])))
        self.proto_index = {p: i for i, p in enumerate(self.protos)}
        self.methods = sorted(
            method_ids,
            key=lambda m: (self.type_index[m[0]],
                           self.string_index[m[1]],
                           self.proto_index[m[2]]))
        self.method_index = {m: i for i, m in enumerate(self.methods)}

    # -- instruction assembly ------------------------------------------------

    def _assemble(self, ops) -> bytes:
        units: list[int] = []
        for op in ops:
            kind = op[0]
            if kind == "const":
                _, reg, value = op
                if -8 <= value <= 7 and reg < 16:
                    units.append(0x12 | ((reg | ((value & 0xF) << 4)) << 8))
                else:
                    units += [0x14 | (reg << 8), value & 0xFFFF,
                              (value >> 16) & 0xFFFF]
            elif kind == "const-string":
                _, reg, text = op
                units += [0x1A | (reg << 8), self.string_index[text]]
            elif kind == "new-instance":
                _, reg, cls = op
                units += [0x22 | (reg << 8), self.type_index[class_desc(cls)]]
            elif kind == "check-cast":
                _, reg, cls = op
                units += [0x1F | (reg << 8), self.type_index[class_desc(cls)]]
            elif kind == "move-result-object":
                units.append(0x0C | (op[1] << 8))
            elif kind == "invoke":
                _, ikind, target, regs = op
                cls, mname, params, ret = target
                midx = self.method_index[(class_desc(cls), mname,
                                          (tuple(params), ret))]
                regs = list(regs)
                assert len(regs) <= 5, "use range form for >5 args"
                a = len(regs)
                g = regs[4] if a == 5 else 0
                padded = regs[:4] + [0] * (4 - min(a, 4))
                word3 = (padded[3] << 12) | (padded[2] << 8) \
                    | (padded[1] << 4) | padded[0]
                units += [_INVOKE_OPS[ikind] | (((a << 4) | g) << 8), midx, word3]
            elif kind == "return-void":
                units.append(0x0E)
            elif kind == "return":
                units.append(0x0F | (op[1] << 8))
            else:
                raise ValueError(f"unknown op {kind!r}")
        return b"".join(struct.pack("<H", u) for u in units)

    # -- file assembly -------------------------------------------------------

    def build(self) -> bytes:
        self._collect()
        S, T, P, M, C = (len(self.strings), len(self.types), len(self.protos),
                         len(self.methods), len(self.class_items))
        header_size = 0x70
        string_ids_off = header_size
        type_ids_off = string_ids_off + 4 * S
        proto_ids_off = type_ids_off + 4 * T
        field_ids_off = proto_ids_off + 12 * P
        method_ids_off = field_ids_off  # no fields
        class_defs_off = method_ids_off + 8 * M
        data_off = class_defs_off + 32 * C

        data = bytearray()

        def append_aligned(blob: bytes) -> int:
            align4(data)
            offset = data_off + len(data)
            data.extend(blob)
            return offset

        # type lists (interfaces + proto params), deduplicated
        type_list_offsets: dict[tuple, int] = {}

        def type_list_off(items: tuple) -> int:
            if not items:
                return 0
            if items not in type_list_offsets:
                blob = struct.pack("<I", len(items))
                blob += b"".join(struct.pack("<H", self.type_index[t])
                                 for t in items)
                type_list_offsets[items] = append_aligned(blob)
            return type_list_offsets[items]

        for name, superclass, interfaces, _a, _m in self.class_items:
            type_list_off(tuple(class_desc(i) for i in interfaces))
        for params, _ret in self.protos:
            type_list_off(tuple(params))

        # code items
        code_offsets: dict[int, int] = {}
        for ci, (_n, _s, _i, _a, methods) in enumerate(self.class_items):
            for mi, (mname, params, ret, _f, ops) in enumerate(methods):
                if ops is None:
                    continue
                insns = self._assemble(ops)
                regs = 8
                ins = 1 + len(params)  # instance methods only in this fixture
                blob = struct.pack("<HHHHII", regs, ins, 5, 0, 0,
                                   len(insns) // 2)
                blob += insns
                code_offsets[(ci, mi)] = append_aligned(blob)

        # class data
        class_data_offsets: dict[int, int] = {}
        for ci, (name, _s, _i, _a, methods) in enumerate(self.class_items):
            if not methods:
                class_data_offsets[ci] = 0
                continue
            direct = [(mi, m) for mi, m in enumerate(methods)
                      if m[0] == "<init>" or (m[3] & ACC_CONSTRUCTOR)]
            virtual = [(mi, m) for mi, m in enumerate(methods)
                       if (mi, m) not in direct]
            blob = bytearray()
            blob += uleb128(0) + uleb128(0)
            blob += uleb128(len(direct)) + uleb128(len(virtual))
            for group in (direct, virtual):
                ordered = sorted(
                    group,
                    key=lambda item: self.method_index[(
                        class_desc(name), item[1][0],
                        (tuple(item[1][1]), item[1][2]))])
                prev = 0
                for mi, (mname, params, ret, flags, ops) in ordered:
                    midx = self.method_index[(class_desc(name), mname,
                                              (tuple(params), ret))]
                    blob += uleb128(midx - prev)
                    prev = midx
                    blob += uleb128(flags)
                    blob += uleb128(code_offsets.get((ci, mi), 0))
            class_data_offsets[ci] = data_off + len(data)
            data.extend(blob)

        # string data
        string_data_offsets = []
        for s in self.strings:
            string_data_offsets.append(data_off + len(data))
            data.extend(uleb128(len(s)))
            data.extend(s.encode("utf-8"))  # fixture strings are ASCII
            data.append(0)

        # map list
        align4(data)
        map_off = data_off + len(data)
        map_items = [
            (0x0000, 1, 0),
            (0x0001, S, string_ids_off),
            (0x0002, T, type_ids_off),
            (0x0003, P, proto_ids_off),
            (0x0005, M, method_ids_off),
            (0x0006, C, class_defs_off),
            (0x2001, len(code_offsets), 0),
            (0x1000, 1, map_off),
        ]
        map_blob = struct.pack("<I", len(map_items))
        for item_type, count, offset in map_items:
            map_blob += struct.pack("<HHII", item_type, 0, count, offset)
        data.extend(map_blob)

        file_size = data_off + len(data)

        out = bytearray(file_size)
        out[0:8] = b"dex\n035\x00"
        struct.pack_into("<I", out, 32, file_size)
        struct.pack_into("<I", out, 36, header_size)
        struct.pack_into("<I", out, 40, 0x12345678)
        struct.pack_into("<II", out, 44, 0, 0)            # link
        struct.pack_into("<I", out, 52, map_off)
        struct.pack_into("<II", out, 56, S, string_ids_off)
        struct.pack_into("<II", out, 64, T, type_ids_off)
        struct.pack_into("<II", out, 72, P, proto_ids_off)
        struct.pack_into("<II", out, 80, 0, 0)            # fields
        struct.pack_into("<II", out, 88, M, method_ids_off)
        struct.pack_into("<II", out, 96, C, class_defs_off)
        struct.pack_into("<II", out, 104, len(data), data_off)

        pos = string_ids_off
        for off in string_data_offsets:
            struct.pack_into("<I", out, pos, off)
            pos += 4
        pos = type_ids_off
        for t in self.types:
            struct.pack_into("<I", out, pos, self.string_index[t])
            pos += 4
        pos = proto_ids_off
        for params, ret in self.protos:
            shorty = shorty_char(ret) + "".join(shorty_char(p) for p in params)
            struct.pack_into("<III", out, pos, self.string_index[shorty],
                             self.type_index[ret],
                             type_list_offsets.get(tuple(params), 0))
            pos += 12
        pos = method_ids_off
        for cls, mname, proto in self.methods:
            struct.pack_into("<HHI", out, pos, self.type_index[cls],
                             self.proto_index[proto], self.string_index[mname])
            pos += 8
        pos = class_defs_off
        for ci, (name, superclass, interfaces, access, _m) in enumerate(self.class_items):
            iface_off = type_list_offsets.get(
                tuple(class_desc(i) for i in interfaces), 0)
            struct.pack_into(
                "<IIIIIIII", out, pos,
                self.type_index[class_desc(name)], access,
                self.type_index[class_desc(superclass)] if superclass else 0xFFFFFFFF,
                iface_off, 0xFFFFFFFF, 0, class_data_offsets[ci], 0)
            pos += 32
        out[data_off:file_size] = data

        digest = hashlib.sha1(out[32:]).digest()
        out[12:32] = digest
        struct.pack_into("<I", out, 8, zlib.adler32(bytes(out[12:])))
        return bytes(out)


# ---------------------------------------------------------------------------
# Fixture content
# ---------------------------------------------------------------------------

VIEW = "android.view.View"
LOCATION_MANAGER_GET = ("android.location.LocationManager",
                        "getLastKnownLocation",
                        ["Ljava/lang/String;"], "Landroid/location/Location;")


def build_main_dex() -> bytes:
    w = DexWriter()
    w.add_class(
        "com.example.MainActivity", "android.app.Activity",
        methods=[
            ("<init>", [], "V", ACC_PUBLIC | ACC_CONSTRUCTOR, [
                ("invoke", "direct", ("android.app.Activity", "<init>", [], "V"), [0]),
                ("return-void",),
            ]),
            ("onCreate", ["Landroid/os/Bundle;"], "V", ACC_PROTECTED, [
                ("invoke", "super",
                 ("android.app.Activity", "onCreate", ["Landroid/os/Bundle;"], "V"),
                 [6, 7]),
                ("const", 0, ID_BTN_LOCATE),
                ("invoke", "virtual",
                 ("android.app.Activity", "findViewById", ["I"],
                  "Landroid/view/View;"), [6, 0]),
                ("move-result-object", 1),
                ("new-instance", 2, "com.example.Loc$1"),
                ("invoke", "direct", ("com.example.Loc$1", "<init>", [], "V"), [2]),
                ("invoke", "virtual",
                 ("android.view.View", "setOnClickListener",
                  ["Landroid/view/View$OnClickListener;"], "V"), [1, 2]),
                ("return-void",),
            ]),
            ("onLocate", ["Landroid/view/View;"], "V", ACC_PUBLIC, [
                ("const-string", 1, "location"),
                ("invoke", "virtual",
                 ("android.app.Activity", "getSystemService",
                  ["Ljava/lang/String;"], "Ljava/lang/Object;"), [6, 1]),
                ("move-result-object", 2),
                ("check-cast", 2, "android.location.LocationManager"),
                ("const-string", 0, "gps"),
                ("invoke", "virtual", LOCATION_MANAGER_GET, [2, 0]),
                ("move-result-object", 3),
                ("invoke", "interface",
                 ("javax.inject.Provider", "get", [], "Ljava/lang/Object;"), [4]),
                ("return-void",),
            ]),
            ("onOptionsItemSelected", ["Landroid/view/MenuItem;"], "Z",
             ACC_PUBLIC, [
                 ("const", 0, 1),
                 ("return", 0),
             ]),
        ])
    w.add_class(
        "com.example.Loc$1", "java.lang.Object",
        interfaces=["android.view.View$OnClickListener"],
        methods=[
            ("<init>", [], "V", ACC_PUBLIC | ACC_CONSTRUCTOR, [
                ("invoke", "direct", ("java.lang.Object", "<init>", [], "V"), [0]),
                ("return-void",),
            ]),
            ("onClick", ["Landroid/view/View;"], "V", ACC_PUBLIC, [
                ("invoke", "virtual",
                 ("com.example.MainActivity", "onLocate",
                  ["Landroid/view/View;"], "V"), [0, 2]),
                ("return-void",),
            ]),
        ])
    return w.build()


def build_library_dex() -> bytes:
    w = DexWriter()
    annotation = "java.lang.annotation.Annotation"
    for cls in ("javax.inject.Inject", "javax.inject.Qualifier",
                "javax.inject.Scope", "javax.inject.Singleton"):
        w.add_class(cls, "java.lang.Object", interfaces=[annotation],
                    access=ANNOTATION_FLAGS, methods=[])
    w.add_class("javax.inject.Named", "java.lang.Object",
                interfaces=[annotation], access=ANNOTATION_FLAGS,
                methods=[("value", [], "Ljava/lang/String;",
                          ACC_PUBLIC | ACC_ABSTRACT, None)])
    w.add_class("javax.inject.Provider", "java.lang.Object",
                access=INTERFACE_FLAGS,
                methods=[("get", [], "Ljava/lang/Object;",
                          ACC_PUBLIC | ACC_ABSTRACT, None)])
    return w.build()


def build_manifest() -> bytes:
    return build_axml(Elem("manifest", [
        (None, "package", "com.example.fixture"),
        (ANDROID_NS, "versionCode", 1),
        (ANDROID_NS, "versionName", "1.0"),
    ], [
        Elem("uses-permission", [
            (ANDROID_NS, "name", "android.permission.ACCESS_COARSE_LOCATION"),
        ]),
        Elem("application", [
            (ANDROID_NS, "label", "Fixture"),
        ], [
            Elem("activity", [
                (ANDROID_NS, "name", "com.example.MainActivity"),
            ]),
        ]),
    ]))


def build_layout() -> bytes:
    return build_axml(Elem("LinearLayout", [], [
        Elem("Button", [
            (ANDROID_NS, "id", ("ref", ID_BTN_LOCATE)),
            (ANDROID_NS, "onClick", "onLocate"),
            (ANDROID_NS, "background", ("ref", ID_DRAWABLE_PIN)),
        ]),
        Elem("ImageView", [
            (ANDROID_NS, "src", ("ref", ID_DRAWABLE_PIN)),
        ]),
    ]))


def build_menu() -> bytes:
    return build_axml(Elem("menu", [], [
        Elem("item", [
            (ANDROID_NS, "id", ("ref", ID_ACTION_SHARE)),
            (ANDROID_NS, "title", "Share"),
        ]),
    ]))


def build_png() -> bytes:
    def chunk(tag: bytes, payload: bytes) -> bytes:
        return (struct.pack(">I", len(payload)) + tag + payload
                + struct.pack(">I", zlib.crc32(tag + payload)))

    ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 2, 0, 0, 0)
    idat = zlib.compress(b"\x00\x80\x40\x20")
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr)
            + chunk(b"IDAT", idat) + chunk(b"IEND", b""))


def build_apk(out_path: Path) -> None:
    members = [
        ("AndroidManifest.xml", build_manifest()),
        ("resources.arsc", build_arsc()),
        ("classes.dex", build_main_dex()),
        ("classes2.dex", build_library_dex()),
        ("res/layout/main.xml", build_layout()),
        ("res/menu/main_menu.xml", build_menu()),
        ("res/drawable/pin.png", build_png()),
    ]
    with zipfile.ZipFile(out_path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name, blob in members:
            info = zipfile.ZipInfo(name, date_time=(2024, 1, 1, 0, 0, 0))
            zf.writestr(info, blob)


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else \
        Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    apk = out_dir / "fixture.apk"
    build_apk(apk)
    print(f"wrote {apk} ({apk.stat().st_size} bytes)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
