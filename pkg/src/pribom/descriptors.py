"""DEX type descriptor handling.

Two textual conventions coexist in the inventory and both must
round-trip:

* Java-style pretty names, e.g. ``boolean`` or ``android.view.MenuItem``,
  used in handler strings such as
  ``com.example.A: boolean onOptionsItemSelected(android.view.MenuItem)``.
* Raw DEX descriptors, e.g. ``Z`` or ``Landroid/view/MenuItem;``, used in
  the hyphen-separated method path form
  ``Lcls;-name-(params)ret``.
"""

from __future__ import annotations

from .errors import PribomError

_PRIMITIVES = {
    "V": "void",
    "Z": "boolean",
    "B": "byte",
    "S": "short",
    "C": "char",
    "I": "int",
    "J": "long",
    "F": "float",
    "D": "double",
}
_PRIMITIVES_REV = {v: k for k, v in _PRIMITIVES.items()}


class DescriptorError(PribomError):
    """A type or method descriptor string does not parse."""


def pretty_type(descriptor: str) -> str:
    """Render a DEX type descriptor as a Java-style type name."""
    dims = 0
    d = descriptor
    while d.startswith("["):
        dims += 1
        d = d[1:]
    if d in _PRIMITIVES:
        base = _PRIMITIVES[d]
    elif d.startswith("L") and d.endswith(";") and len(d) > 2:
        base = d[1:-1].replace("/", ".")
    else:
        raise DescriptorError(f"bad type descriptor: {descriptor!r}")
    return base + "[]" * dims


def type_descriptor(pretty: str) -> str:
    """Inverse of pretty_type."""
    dims = 0
    name = pretty
    while name.endswith("[]"):
        dims += 1
        name = name[:-2]
    name = name.strip()
    if not name:
        raise DescriptorError(f"bad type name: {pretty!r}")
    if name in _PRIMITIVES_REV:
        base = _PRIMITIVES_REV[name]
    else:
        base = "L" + name.replace(".", "/") + ";"
    return "[" * dims + base


def split_parameter_descriptors(params: str) -> list[str]:
    """Split the parameter segment of a method descriptor into types.

    ``Ljava/lang/String;I[B`` -> ["Ljava/lang/String;", "I", "[B"].
    """
    out: list[str] = []
    i = 0
    n = len(params)
    while i < n:
        start = i
        while i < n and params[i] == "[":
            i += 1
        if i >= n:
            raise DescriptorError(f"dangling array marker in {params!r}")
        if params[i] in _PRIMITIVES and params[i] != "V":
            i += 1
        elif params[i] == "L":
            end = params.find(";", i)
            if end < 0:
                raise DescriptorError(f"unterminated class descriptor in {params!r}")
            i = end + 1
        else:
            raise DescriptorError(f"bad parameter descriptor at {i} in {params!r}")
        out.append(params[start:i])
    return out


def class_descriptor(dotted: str) -> str:
    return "L" + dotted.replace(".", "/") + ";"


def dotted_class(descriptor: str) -> str:
    if not (descriptor.startswith("L") and descriptor.endswith(";")):
        raise DescriptorError(f"not a class descriptor: {descriptor!r}")
    return descriptor[1:-1].replace("/", ".")


def render_method_path(class_name: str, method_name: str,
                       param_descriptors: tuple[str, ...] | list[str],
                       return_descriptor: str) -> str:
    """Hyphen-separated smali-like path, e.g.

    ``Landroid/location/LocationManager;-getLastKnownLocation-(Ljava/lang/String;)Landroid/location/Location;``
    """
    return "{};-{}-({}){}".format(
        "L" + class_name.replace(".", "/"),
        method_name,
        "".join(param_descriptors),
        return_descriptor,
    )


def parse_method_path(path: str) -> tuple[str, str, tuple[str, ...], str]:
    """Parse the hyphen-separated path back to its components."""
    if not path.startswith("L"):
        raise DescriptorError(f"method path must start with 'L': {path!r}")
    sep1 = path.find(";-")
    if sep1 < 0:
        raise DescriptorError(f"missing class terminator in {path!r}")
    class_name = path[1:sep1].replace("/", ".")
    rest = path[sep1 + 2:]
    sep2 = rest.find("-(")
    if sep2 < 0:
        raise DescriptorError(f"missing parameter list in {path!r}")
    method_name = rest[:sep2]
    sig = rest[sep2 + 1:]
    close = sig.find(")")
    if not sig.startswith("(") or close < 0:
        raise DescriptorError(f"malformed signature in {path!r}")
    params = tuple(split_parameter_descriptors(sig[1:close]))
    ret = sig[close + 1:]
    pretty_type(ret)  # validates
    return class_name, method_name, params, ret
