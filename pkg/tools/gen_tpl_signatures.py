#!/usr/bin/env python3
"""Regenerates src/pribom/data/tpl_signatures.json.

Profiles are computed with the same structural hashing the detector
uses, over class shapes of the libraries we ship signatures for. Run
after changing the profile definition in pribom.tpl.

Usage: python tools/gen_tpl_signatures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pribom.apk.dex import ACC_ABSTRACT, ACC_PUBLIC, ACC_STATIC, MethodDef  # noqa: E402
from pribom.model import MethodRef  # noqa: E402
from pribom.tpl import class_profile_hash  # noqa: E402


def method(owner, name, params, ret, flags=ACC_PUBLIC, abstract=False):
    return MethodDef(
        owner=owner,
        ref=MethodRef(class_name=owner, method_name=name,
                      param_descriptors=tuple(params), return_descriptor=ret),
        access_flags=flags | (ACC_ABSTRACT if abstract else 0),
        body=None if abstract else _EMPTY_BODY)


class _Body:  # minimal stand-in: profile hashing only reads flags/body presence
    ops = ()
    registers = 0


_EMPTY_BODY = _Body()

OBJ = "Ljava/lang/Object;"
STR = "Ljava/lang/String;"

# javax.inject 1: five annotation types plus the Provider interface.
JAVAX_INJECT_1 = {
    "javax.inject.Inject": [],
    "javax.inject.Named": [method("javax.inject.Named", "value", [], STR,
                                  abstract=True)],
    "javax.inject.Provider": [method("javax.inject.Provider", "get", [], OBJ,
                                     abstract=True)],
    "javax.inject.Qualifier": [],
    "javax.inject.Scope": [],
    "javax.inject.Singleton": [],
}

# Synthetic 1.1 variant: same shapes plus one helper class, so version
# discrimination has something to discriminate.
JAVAX_INJECT_1_1 = dict(JAVAX_INJECT_1)
JAVAX_INJECT_1_1["javax.inject.Providers"] = [
    method("javax.inject.Providers", "of", [OBJ], "Ljavax/inject/Provider;",
           flags=ACC_PUBLIC | ACC_STATIC),
    method("javax.inject.Providers", "checkNotNull", [OBJ, STR], OBJ,
           flags=ACC_PUBLIC | ACC_STATIC),
]


def signature(name, version, prefixes, classes):
    return {
        "name": name,
        "version": version,
        "package_prefixes": prefixes,
        "class_profiles": {cls: class_profile_hash(tuple(methods))
                           for cls, methods in sorted(classes.items())},
    }


def main() -> int:
    signatures = [
        signature("javax.inject", "1", ["javax.inject"], JAVAX_INJECT_1),
        signature("javax.inject", "1.1", ["javax.inject"], JAVAX_INJECT_1_1),
    ]
    out = Path(__file__).resolve().parent.parent / "src" / "pribom" / "data" / "tpl_signatures.json"
    out.write_text(json.dumps(signatures, indent=2) + "\n")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
