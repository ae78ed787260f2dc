"""Whole-app call graph via class hierarchy analysis.

Dispatch semantics, shared with the brute-force oracle in the test
suite:

* static/direct/super calls resolve to the single named target,
  walking up the superclass chain for app classes.
* a virtual or interface call to ``T.m`` resolves to every non-abstract
  definition of ``m`` in ``T`` and every app subtype of ``T``.
* when the receiver class is not in the app, or no concrete definition
  exists (all-abstract, or the definition lives outside the app), the
  call keeps the declared reference as a leaf node. Framework and
  library boundaries therefore stay visible in reachability queries.
* reflective calls (Class.forName / Method.invoke) produce no edges;
  the calling method is marked reflective and reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .apk.dex import DexModel, MethodDef, REFLECTION_METHODS
from .diagnostics import Diagnostics
from .errors import HierarchyCycleError
from .model import MethodRef


@dataclass(frozen=True)
class ClassHierarchy:
    subclasses: dict      # class name -> tuple of direct app subclasses
    implementers: dict    # interface name -> tuple of direct app implementers
    resolution: dict      # (class, name, params) -> defining app class name
    app_classes: frozenset

    def subtypes(self, name: str) -> set[str]:
        """All app classes at or below ``name`` (classes and interfaces)."""
        seen: set[str] = set()
        stack = [name]
        while stack:
            current = stack.pop()
            if current in seen:
                continue
            seen.add(current)
            stack.extend(self.subclasses.get(current, ()))
            stack.extend(self.implementers.get(current, ()))
        return seen

    def framework_root(self, name: str, dex: DexModel) -> str | None:
        """First non-app superclass reached from ``name``, if any."""
        current = dex.class_by_name.get(name)
        while current is not None:
            if current.superclass is None:
                return None
            if current.superclass not in self.app_classes:
                return current.superclass
            current = dex.class_by_name.get(current.superclass)
        return None


def build_class_hierarchy(dex: DexModel) -> ClassHierarchy:
    app = frozenset(c.name for c in dex.classes)
    subclasses: dict[str, list[str]] = {}
    implementers: dict[str, list[str]] = {}
    for c in sorted(dex.classes, key=lambda c: c.name):
        if c.superclass is not None:
            subclasses.setdefault(c.superclass, []).append(c.name)
        for iface in c.interfaces:
            implementers.setdefault(iface, []).append(c.name)

    # Cycle check over superclass + interface edges among app classes.
    color: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(name: str, trail: list[str]):
        state = color.get(name)
        if state == 2:
            return
        if state == 1:
            cycle = " -> ".join(trail[trail.index(name):] + [name])
            raise HierarchyCycleError(f"inheritance cycle among app classes: {cycle}")
        color[name] = 1
        trail.append(name)
        c = dex.class_by_name[name]
        parents = [p for p in (c.superclass, *c.interfaces) if p in app]
        for parent in parents:
            visit(parent, trail)
        trail.pop()
        color[name] = 2

    for name in sorted(app):
        visit(name, [])

    resolution: dict[tuple, str] = {}
    for c in dex.classes:
        current: str | None = c.name
        chain: list[str] = []
        while current is not None and current in app:
            chain.append(current)
            current = dex.class_by_name[current].superclass
        for owner in chain:
            for m in dex.methods_by_class.get(owner, ()):
                key = (c.name, m.ref.method_name, m.ref.param_descriptors)
                resolution.setdefault(key, owner)

    return ClassHierarchy(
        subclasses={k: tuple(v) for k, v in subclasses.items()},
        implementers={k: tuple(v) for k, v in implementers.items()},
        resolution=resolution,
        app_classes=app,
    )


@dataclass(frozen=True)
class CallGraph:
    nodes: tuple[MethodRef, ...]
    edges: tuple[tuple[MethodRef, MethodRef, str], ...]
    reflective: frozenset

    @cached_property
    def node_set(self) -> frozenset:
        return frozenset(self.nodes)

    @cached_property
    def successors(self) -> dict:
        out: dict[MethodRef, list[MethodRef]] = {}
        for caller, callee, _kind in self.edges:
            out.setdefault(caller, []).append(callee)
        return {k: tuple(v) for k, v in out.items()}

    def dump(self) -> str:
        """One edge per line: caller<TAB>callee<TAB>kind."""
        lines = [f"{c.render()}\t{t.render()}\t{kind}" for c, t, kind in self.edges]
        return "\n".join(lines) + ("\n" if lines else "")


def _concrete_definitions(dex: DexModel, class_names: set[str],
                          name: str, params: tuple) -> list[MethodDef]:
    found = []
    for cls in class_names:
        for m in dex.methods_by_class.get(cls, ()):
            if (m.ref.method_name == name
                    and m.ref.param_descriptors == params
                    and not m.is_abstract):
                found.append(m)
    return found


def _resolve_single(h: ClassHierarchy, ref: MethodRef) -> MethodRef:
    """Static/direct/super target: the definition found up the chain."""
    owner = h.resolution.get((ref.class_name, ref.method_name, ref.param_descriptors))
    if owner is None or owner == ref.class_name:
        return ref
    return MethodRef(class_name=owner, method_name=ref.method_name,
                     param_descriptors=ref.param_descriptors,
                     return_descriptor=ref.return_descriptor)


def build_call_graph(dex: DexModel, h: ClassHierarchy,
                     diags: Diagnostics | None = None) -> CallGraph:
    nodes: set[MethodRef] = set()
    edges: set[tuple[MethodRef, MethodRef, str]] = set()
    reflective: set[MethodRef] = set()

    for m in dex.methods:
        nodes.add(m.ref)
        if m.body is None:
            continue
        caller = m.ref
        for inv in m.body.invocations():
            target = inv.method
            if (target.class_name, target.method_name) in REFLECTION_METHODS:
                reflective.add(caller)
                if diags is not None:
                    diags.warning("callgraph",
                                  f"reflective call in {caller.render()}: "
                                  f"{target.class_name}.{target.method_name} "
                                  "cannot be resolved statically")
                continue
            if inv.kind in ("static", "direct", "super"):
                resolved = _resolve_single(h, target)
                edges.add((caller, resolved, inv.kind))
                nodes.add(resolved)
                continue
            # virtual / interface dispatch
            if target.class_name not in h.app_classes:
                edges.add((caller, target, inv.kind))
                nodes.add(target)
                continue
            cone = h.subtypes(target.class_name)
            concrete = _concrete_definitions(dex, cone, target.method_name,
                                             target.param_descriptors)
            if not concrete:
                edges.add((caller, target, inv.kind))
                nodes.add(target)
                continue
            for definition in concrete:
                edges.add((caller, definition.ref, inv.kind))
                nodes.add(definition.ref)

    return CallGraph(
        nodes=tuple(sorted(nodes)),
        edges=tuple(sorted(edges, key=lambda e: (e[0], e[1], e[2]))),
        reflective=frozenset(reflective),
    )


def reachable_methods(graph: CallGraph, entry: MethodRef,
                      diags: Diagnostics | None = None) -> set:
    """Transitive closure from ``entry``, inclusive."""
    if entry not in graph.node_set:
        if diags is not None:
            diags.warning("callgraph",
                          f"entry {entry.render()} is not in the call graph")
        return set()
    seen = {entry}
    stack = [entry]
    while stack:
        current = stack.pop()
        for nxt in graph.successors.get(current, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen
