"""Third-party library detection from structural class profiles.

A class profile is the multiset of its methods' (parameter arity,
return category, access kind) triples; profiles hash to hex digests
that are stable under renaming, so obfuscated packages still match.
Signature entries pair those hashes with name/version metadata. The
package_prefixes in a signature are a fast path only; detection always
falls back to a whole-model scan so results never depend on names.
"""

from __future__ import annotations

import hashlib
import json
import re
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from . import assets
from .apk.dex import DexModel, MethodDef
from .diagnostics import Diagnostics
from .errors import PribomError
from .model import TplRecord


def method_triple(m: MethodDef) -> tuple[int, str, str]:
    ret = m.ref.return_descriptor
    if ret == "V":
        category = "void"
    elif ret.startswith("["):
        category = "array"
    elif ret.startswith("L"):
        category = "object"
    else:
        category = "primitive"
    if m.is_static:
        kind = "static"
    elif m.is_abstract:
        kind = "abstract"
    else:
        kind = "instance"
    return (len(m.ref.param_descriptors), category, kind)


def class_profile_hash(methods: tuple[MethodDef, ...]) -> str:
    triples = sorted(method_triple(m) for m in methods)
    payload = json.dumps(triples, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class LibrarySignature:
    name: str
    version: str
    package_prefixes: tuple[str, ...]
    class_profiles: dict  # label -> profile hash

    def __post_init__(self):
        if not self.class_profiles:
            raise PribomError(f"signature {self.name} {self.version}: "
                              "class_profiles must be non-empty")
        if not self.package_prefixes:
            raise PribomError(f"signature {self.name} {self.version}: "
                              "package_prefixes must be non-empty")


@dataclass(frozen=True)
class DetectionResult:
    record: TplRecord
    matched_classes: tuple[str, ...]


def load_signatures(override=None) -> list[LibrarySignature]:
    raw = assets.load_json_asset(assets.TPL_SIGNATURES, override)
    return [LibrarySignature(
        name=row["name"], version=row["version"],
        package_prefixes=tuple(row["package_prefixes"]),
        class_profiles=dict(row["class_profiles"])) for row in raw]


def _version_key(version: str):
    parts = re.split(r"(\d+)", version)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p)


def _match(signature: LibrarySignature, app_profiles: dict) -> tuple[int, list[str]]:
    """Multiset match of signature profile hashes against the app.

    Returns (matched profile count, matched app class names). App
    classes under a signature prefix are consumed first so matched
    names are stable and meaningful when the library is unobfuscated.
    """
    wanted: dict[str, int] = {}
    for digest in signature.class_profiles.values():
        wanted[digest] = wanted.get(digest, 0) + 1

    def prefix_rank(name: str) -> tuple:
        in_prefix = any(name == p or name.startswith(p + ".")
                        for p in signature.package_prefixes)
        return (0 if in_prefix else 1, name)

    matched = 0
    matched_classes: list[str] = []
    by_digest: dict[str, list[str]] = {}
    for name, digest in app_profiles.items():
        by_digest.setdefault(digest, []).append(name)
    for digest, need in wanted.items():
        candidates = sorted(by_digest.get(digest, ()), key=prefix_rank)
        take = min(need, len(candidates))
        matched += take
        matched_classes.extend(candidates[:take])
    return matched, sorted(matched_classes)


def detect(dex: DexModel, db: list[LibrarySignature], threshold: float = 0.8,
           diags: Diagnostics | None = None) -> list[DetectionResult]:
    """Libraries whose profile coverage reaches the threshold.

    One result per library name: the highest-confidence version wins,
    ties break toward the newest version.
    """
    if not db:
        raise PribomError("signature database is empty")
    if not 0.0 < threshold <= 1.0:
        raise PribomError(f"threshold {threshold} outside (0, 1]")

    app_profiles = {name: class_profile_hash(methods)
                    for name, methods in dex.methods_by_class.items()}
    for cdef in dex.classes:  # classes with no methods still have a profile
        app_profiles.setdefault(cdef.name, class_profile_hash(()))

    best: dict[str, tuple] = {}  # name -> (confidence, version key, result)
    for signature in db:
        matched, matched_classes = _match(signature, app_profiles)
        confidence = matched / len(signature.class_profiles)
        confidence = min(max(confidence, 0.0), 1.0)
        if confidence < threshold:
            continue
        result = DetectionResult(
            record=TplRecord(name=signature.name, version=signature.version,
                             confidence=round(confidence, 4)),
            matched_classes=tuple(matched_classes))
        key = (confidence, _version_key(signature.version))
        if signature.name not in best or key > best[signature.name][:2]:
            best[signature.name] = (confidence, _version_key(signature.version), result)

    results = [entry[2] for _, entry in sorted(best.items())]
    if diags is not None:
        for result in results:
            diags.info("tpl-detector",
                       f"detected {result.record.name} {result.record.version} "
                       f"(confidence {result.record.confidence})")
    return results


def attribute_to_widgets(results: list[DetectionResult],
                         reachable_by_widget: dict) -> dict:
    """widget id -> TplRecords whose matched classes own a reachable method."""
    out: dict[int, list[TplRecord]] = {}
    for widget_id, reachable in reachable_by_widget.items():
        owners = {ref.class_name for ref in reachable}
        records = [r.record for r in results
                   if owners.intersection(r.matched_classes)]
        out[widget_id] = sorted(records, key=TplRecord.sort_key)
    return out


@dataclass(frozen=True)
class MetadataSource:
    """Version/date metadata, offline by default.

    Remote mode fetches ``<base>/<name>`` (a JSON object shaped like the
    offline entries) and caches every response to a local file so that
    reruns are hermetic.
    """

    entries: dict
    mode: str = "offline_file"
    base_url: str | None = None
    cache_path: str | None = None

    @classmethod
    def offline(cls, override=None) -> "MetadataSource":
        raw = assets.load_json_asset(assets.TPL_METADATA, override)
        return cls(entries=dict(raw), mode="offline_file")

    @classmethod
    def remote(cls, base_url: str, cache_path: str) -> "MetadataSource":
        cache = Path(cache_path)
        entries = {}
        if cache.exists():
            entries = json.loads(cache.read_text("utf-8"))
        return cls(entries=entries, mode="remote", base_url=base_url,
                   cache_path=cache_path)

    def get(self, name: str):
        if name in self.entries:
            return self.entries[name]
        if self.mode != "remote":
            return None
        url = f"{self.base_url.rstrip('/')}/{name}"
        try:
            with urllib.request.urlopen(url, timeout=10) as response:
                payload = json.loads(response.read().decode("utf-8"))
        except Exception as exc:
            raise PribomError(f"metadata fetch for {name} failed: {exc}")
        self.entries[name] = payload
        if self.cache_path:
            Path(self.cache_path).write_text(
                json.dumps(self.entries, indent=2, sort_keys=True) + "\n",
                "utf-8")
        return payload


def enrich(records: list[TplRecord], source: MetadataSource,
           diags: Diagnostics | None = None) -> list[TplRecord]:
    """Fill latest_version and publish dates where the source knows the name."""
    out = []
    for record in records:
        meta = source.get(record.name)
        if meta is None:
            if diags is not None:
                diags.info("tpl-detector",
                           f"no metadata for {record.name}; record unchanged")
            out.append(record)
            continue
        current_dates = meta.get("publish_date_current_versions", {})
        out.append(TplRecord(
            name=record.name,
            version=record.version,
            latest_version=meta.get("latest_version"),
            publish_date_current=current_dates.get(record.version),
            publish_date_latest=meta.get("publish_date_latest"),
            confidence=record.confidence))
    return out
