"""APK container access.

An APK is a zip archive; this module indexes its members and exposes
the ones the pipeline consumes: the compiled manifest, the resource
table, layout and menu XML, and every classes*.dex member.
"""

from __future__ import annotations

import re
import zipfile
from dataclasses import dataclass
from functools import cached_property

from ..errors import ApkError

MANIFEST_MEMBER = "AndroidManifest.xml"
RESOURCES_MEMBER = "resources.arsc"
_DEX_RE = re.compile(r"^classes[0-9]*\.dex$")
_LAYOUT_RE = re.compile(r"^res/layout[^/]*/.+\.xml$")
_MENU_RE = re.compile(r"^res/menu[^/]*/.+\.xml$")


@dataclass(frozen=True)
class ApkArchive:
    path: str
    entry_index: dict  # member name -> (header offset, compressed, uncompressed, method)

    @cached_property
    def members(self) -> tuple[str, ...]:
        return tuple(sorted(self.entry_index))

    def read(self, member: str) -> bytes:
        if member not in self.entry_index:
            raise ApkError(f"{self.path}: no archive member {member!r}")
        with zipfile.ZipFile(self.path) as zf:
            return zf.read(member)

    def dex_members(self) -> tuple[str, ...]:
        names = [m for m in self.members if _DEX_RE.match(m)]

        def order(name: str) -> int:
            digits = name[len("classes"):-len(".dex")]
            return int(digits) if digits else 1

        return tuple(sorted(names, key=order))

    def layout_members(self) -> tuple[str, ...]:
        return tuple(m for m in self.members if _LAYOUT_RE.match(m))

    def menu_members(self) -> tuple[str, ...]:
        return tuple(m for m in self.members if _MENU_RE.match(m))


def open_apk(path: str) -> ApkArchive:
    """Index the archive and verify the required members are present."""
    try:
        with zipfile.ZipFile(path) as zf:
            index = {
                info.filename: (info.header_offset, info.compress_size,
                                info.file_size, info.compress_type)
                for info in zf.infolist()
            }
    except FileNotFoundError:
        raise ApkError(f"{path}: file does not exist")
    except zipfile.BadZipFile as exc:
        raise ApkError(f"{path}: not a zip archive ({exc})")

    if MANIFEST_MEMBER not in index:
        raise ApkError(f"{path}: missing {MANIFEST_MEMBER}")
    archive = ApkArchive(path=path, entry_index=index)
    if not archive.dex_members():
        raise ApkError(f"{path}: no classes*.dex member")
    return archive
