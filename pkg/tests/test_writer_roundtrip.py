"""Round-trips through the standalone fixture encoders.

tools/build_fixture.py encodes the binary formats independently of the
decoders under test; agreeing on randomized inputs is strong evidence
both sides implement the published formats rather than each other's
bugs.
"""

import importlib.util
import random
from pathlib import Path

import pytest

from pribom.apk.axml import ResourceReference, decode_binary_xml
from pribom.apk.dex import (ConstLoad, Invoke, MoveResult, NewInstance,
                            StringLoad, parse_dex)

_SPEC = importlib.util.spec_from_file_location(
    "build_fixture", Path(__file__).parent.parent / "tools" / "build_fixture.py")
fixture_tool = importlib.util.module_from_spec(_SPEC)
_SPEC.loader.exec_module(fixture_tool)


# ---------------------------------------------------------------------------
# DEX
# ---------------------------------------------------------------------------

FRAMEWORK_TARGETS = [
    ("android.app.Activity", "finish", [], "V"),
    ("android.util.Log", "d", ["Ljava/lang/String;", "Ljava/lang/String;"], "I"),
    ("java.lang.Object", "hashCode", [], "I"),
]
PARAM_POOL = [[], ["I"], ["Ljava/lang/String;"], ["Landroid/view/View;", "I"]]
RET_POOL = ["V", "I", "Z", "Ljava/lang/String;", "Landroid/view/View;"]


def random_writer_classes(rng):
    class_names = [f"gen.p{rng.randrange(3)}.C{i}"
                   for i in range(rng.randint(1, 5))]
    local_targets = []
    descriptions = []
    for name in class_names:
        methods = []
        used = set()
        for m in range(rng.randint(0, 4)):
            method_name = f"m{m}"
            params = rng.choice(PARAM_POOL)
            ret = rng.choice(RET_POOL)
            key = (method_name, tuple(params), ret)
            if key in used:
                continue
            used.add(key)
            methods.append([method_name, params, ret,
                            fixture_tool.ACC_PUBLIC, None])
            local_targets.append((name, method_name, params, ret))
        descriptions.append([name, rng.choice(["java.lang.Object",
                                               "android.app.Activity"]),
                             [], fixture_tool.ACC_PUBLIC, methods])

    # Second pass: give every method a body now that targets exist.
    for description in descriptions:
        for method in description[4]:
            ops = []
            for _ in range(rng.randint(0, 6)):
                choice = rng.randrange(5)
                if choice == 0:
                    ops.append(("const", rng.randrange(8),
                                rng.choice([0, 1, -3, 100,
                                            0x7F050000 + rng.randrange(256)])))
                elif choice == 1:
                    ops.append(("const-string", rng.randrange(8),
                                rng.choice(["gps", "network", "tag"])))
                elif choice == 2:
                    target_cls = rng.choice([d[0] for d in descriptions])
                    ops.append(("new-instance", rng.randrange(8), target_cls))
                elif choice == 3:
                    ops.append(("move-result-object", rng.randrange(8)))
                else:
                    if local_targets and rng.random() < 0.5:
                        target = rng.choice(local_targets)
                        kind = "virtual"
                    else:
                        target = rng.choice(FRAMEWORK_TARGETS)
                        kind = rng.choice(["virtual", "static"])
                    arity = 1 + len(target[2])
                    regs = [rng.randrange(8) for _ in range(min(arity, 5))]
                    ops.append(("invoke", kind,
                                (target[0], target[1], list(target[2]),
                                 target[3]), regs))
            ops.append(("return-void",) if method[2] == "V"
                       else ("return", 0))
            method[4] = ops
    return descriptions


def expected_lift(ops):
    out = []
    for op in ops:
        kind = op[0]
        if kind == "const":
            out.append(ConstLoad(register=op[1], value=op[2]))
        elif kind == "const-string":
            out.append(StringLoad(register=op[1], value=op[2]))
        elif kind == "new-instance":
            out.append(NewInstance(register=op[1], type_name=op[2]))
        elif kind == "move-result-object":
            out.append(MoveResult(register=op[1]))
        elif kind == "invoke":
            _, ikind, (cls, name, params, ret), regs = op
            from pribom.model import MethodRef
            out.append(Invoke(kind=ikind,
                              method=MethodRef(cls, name, tuple(params), ret),
                              args=tuple(regs)))
        # returns and check-casts are stepped over, not lifted
    return tuple(out)


@pytest.mark.parametrize("seed", range(15))
def test_dex_writer_parser_agree_on_random_models(seed):
    rng = random.Random(seed)
    descriptions = random_writer_classes(rng)
    writer = fixture_tool.DexWriter()
    for name, superclass, interfaces, access, methods in descriptions:
        writer.add_class(name, superclass, interfaces=interfaces,
                         access=access,
                         methods=[tuple(m) for m in methods])
    model = parse_dex(writer.build())

    assert {c.name for c in model.classes} \
        == {d[0] for d in descriptions}
    for name, superclass, _ifaces, _access, methods in descriptions:
        cdef = model.class_by_name[name]
        assert cdef.superclass == superclass
        parsed = {(m.ref.method_name, m.ref.param_descriptors,
                   m.ref.return_descriptor): m
                  for m in model.methods_by_class.get(name, ())}
        assert len(parsed) == len(methods)
        for method_name, params, ret, _flags, ops in methods:
            mdef = parsed[(method_name, tuple(params), ret)]
            assert mdef.body is not None
            assert mdef.body.ops == expected_lift(ops)


# ---------------------------------------------------------------------------
# Binary XML
# ---------------------------------------------------------------------------

ATTR_POOL = ["id", "name", "label", "background", "src", "title", "onClick"]


def random_elem(rng, depth=0):
    attrs = []
    for attr_name in rng.sample(ATTR_POOL, rng.randint(0, 3)):
        roll = rng.random()
        if roll < 0.4:
            value = rng.choice(["hello", "onTap", "com.example.Cls"])
        elif roll < 0.7:
            value = ("ref", 0x7F000000 + rng.randrange(1 << 16))
        elif roll < 0.9:
            value = rng.randrange(1 << 16)
        else:
            value = rng.random() < 0.5
        attrs.append((fixture_tool.ANDROID_NS, attr_name, value))
    children = []
    if depth < 3:
        for _ in range(rng.randint(0, 3 - depth)):
            children.append(random_elem(rng, depth + 1))
    return fixture_tool.Elem(rng.choice(["LinearLayout", "Button", "item",
                                         "view", "ImageView"]),
                             attrs, children)


def assert_same_tree(elem, decoded):
    assert decoded.name == elem.name
    assert len(decoded.attributes) == len(elem.attrs)
    for (ns, name, value), parsed in zip(elem.attrs, decoded.attributes):
        assert parsed.namespace == ns
        assert parsed.name == name
        if isinstance(value, tuple):
            assert parsed.value == ResourceReference(value[1])
        else:
            assert parsed.value == value
    assert len(decoded.children) == len(elem.children)
    for child, parsed_child in zip(elem.children, decoded.children):
        assert_same_tree(child, parsed_child)


@pytest.mark.parametrize("seed", range(15))
def test_axml_writer_parser_agree_on_random_trees(seed):
    rng = random.Random(1000 + seed)
    root = random_elem(rng)
    document = decode_binary_xml(fixture_tool.build_axml(root))
    assert_same_tree(root, document.root)
