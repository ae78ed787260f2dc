import random

import pytest

import synth
from pribom.callgraph import (build_call_graph, build_class_hierarchy,
                              reachable_methods)
from pribom.diagnostics import Diagnostics
from pribom.errors import HierarchyCycleError
from synth import clazz, interface, inv, method, model, oracle_edges, ref


def graph_of(dex):
    return build_call_graph(dex, build_class_hierarchy(dex))


class TestHierarchy:
    def test_direct_subclasses(self):
        dex = model([clazz("app.A"), clazz("app.B", superclass="app.A"),
                     clazz("app.C", superclass="app.A")], [])
        h = build_class_hierarchy(dex)
        assert set(h.subclasses["app.A"]) == {"app.B", "app.C"}
        assert h.subtypes("app.A") == {"app.A", "app.B", "app.C"}

    def test_cycle_is_an_error(self):
        dex = model([clazz("app.A", superclass="app.B"),
                     clazz("app.B", superclass="app.A")], [])
        with pytest.raises(HierarchyCycleError, match="cycle"):
            build_class_hierarchy(dex)

    def test_framework_superclasses_are_roots(self, fixture_dex):
        h = build_class_hierarchy(fixture_dex)
        root = h.framework_root("com.example.MainActivity", fixture_dex)
        assert root == "android.app.Activity"

    def test_interface_implementers_tracked(self):
        dex = model([interface("app.I"),
                     clazz("app.A", interfaces=("app.I",))], [])
        h = build_class_hierarchy(dex)
        assert h.subtypes("app.I") == {"app.I", "app.A"}


class TestChaDispatch:
    def _overriding_model(self):
        methods = [
            method("app.A", "m"),
            method("app.B", "m"),
            method("app.C", "m"),
            method("app.Caller", "run", ops=[inv("virtual", "app.A", "m")]),
        ]
        classes = [clazz("app.A"), clazz("app.B", superclass="app.A"),
                   clazz("app.C", superclass="app.A"), clazz("app.Caller")]
        return model(classes, methods)

    def test_virtual_call_fans_out_to_all_overrides(self):
        dex = self._overriding_model()
        graph = graph_of(dex)
        caller = ref("app.Caller", "run")
        callees = {callee for src, callee, _ in graph.edges if src == caller}
        assert callees == {ref("app.A", "m"), ref("app.B", "m"),
                           ref("app.C", "m")}
        assert oracle_edges(dex) == set(graph.edges)

    def test_static_call_is_single_edge(self):
        dex = model(
            [clazz("app.A"), clazz("app.B", superclass="app.A"),
             clazz("app.Caller")],
            [method("app.A", "m", flags=synth.ACC_PUBLIC | synth.ACC_STATIC),
             method("app.B", "m", flags=synth.ACC_PUBLIC | synth.ACC_STATIC),
             method("app.Caller", "run", ops=[inv("static", "app.A", "m")])])
        graph = graph_of(dex)
        caller = ref("app.Caller", "run")
        callees = [callee for src, callee, _ in graph.edges if src == caller]
        assert callees == [ref("app.A", "m")]

    def test_method_without_invocations_has_out_degree_zero(self):
        dex = model([clazz("app.A")], [method("app.A", "quiet")])
        graph = graph_of(dex)
        assert ref("app.A", "quiet") in graph.node_set
        assert graph.successors.get(ref("app.A", "quiet")) is None

    def test_framework_call_is_a_leaf(self):
        dex = model([clazz("app.A")],
                    [method("app.A", "run",
                            ops=[inv("virtual", "android.app.Activity",
                                     "finish")])])
        graph = graph_of(dex)
        leaf = ref("android.app.Activity", "finish")
        assert leaf in graph.node_set
        assert graph.successors.get(leaf) is None

    def test_all_abstract_target_keeps_declared_leaf(self):
        dex = model(
            [interface("app.I"), clazz("app.Caller")],
            [method("app.I", "m", abstract=True),
             method("app.Caller", "run", ops=[inv("interface", "app.I", "m")])])
        graph = graph_of(dex)
        assert (ref("app.Caller", "run"), ref("app.I", "m"), "interface") \
            in set(graph.edges)

    def test_reflection_has_no_edges_but_is_reported(self):
        dex = model([clazz("app.A")], [
            method("app.A", "run", ops=[
                inv("static", "java.lang.Class", "forName",
                    ("Ljava/lang/String;",), "Ljava/lang/Class;")])])
        diags = Diagnostics()
        graph = build_call_graph(dex, build_class_hierarchy(dex), diags)
        assert not graph.edges
        assert ref("app.A", "run") in graph.reflective
        assert any("reflective" in m for m in diags.messages())

    def test_deterministic_iteration_order(self):
        dex = self._overriding_model()
        first = graph_of(dex)
        second = graph_of(dex)
        assert first.nodes == second.nodes
        assert first.edges == second.edges
        assert list(first.nodes) == sorted(first.nodes)


class TestReachability:
    def test_entry_with_no_callees(self):
        dex = model([clazz("app.A")], [method("app.A", "quiet")])
        graph = graph_of(dex)
        entry = ref("app.A", "quiet")
        assert reachable_methods(graph, entry) == {entry}

    def test_fixture_click_reaches_location_api(self, fixture_dex):
        graph = graph_of(fixture_dex)
        entry = ref("com.example.Loc$1", "onClick", ("Landroid/view/View;",))
        reachable = reachable_methods(graph, entry)
        assert ref("android.location.LocationManager", "getLastKnownLocation",
                   ("Ljava/lang/String;",), "Landroid/location/Location;") \
            in reachable

    def test_cycle_terminates(self):
        dex = model([clazz("app.A")], [
            method("app.A", "a", ops=[inv("virtual", "app.A", "b")]),
            method("app.A", "b", ops=[inv("virtual", "app.A", "a")])])
        graph = graph_of(dex)
        assert reachable_methods(graph, ref("app.A", "a")) \
            == {ref("app.A", "a"), ref("app.A", "b")}

    def test_unknown_entry_is_empty_with_diagnostic(self):
        dex = model([clazz("app.A")], [method("app.A", "quiet")])
        graph = graph_of(dex)
        diags = Diagnostics()
        assert reachable_methods(graph, ref("app.Z", "nope"), diags) == set()
        assert diags.count() == 1

    def test_reachable_set_closed_under_edges(self):
        for seed in range(5):
            dex = synth.random_model(seed)
            graph = graph_of(dex)
            for entry in graph.nodes[:10]:
                reached = reachable_methods(graph, entry)
                assert entry in reached
                for node in reached:
                    for callee in graph.successors.get(node, ()):
                        assert callee in reached

    def test_adding_an_edge_never_shrinks_reachability(self):
        rng = random.Random(7)
        for _ in range(20):
            nodes = [ref("app.N", f"m{i}") for i in range(8)]
            edges = {(rng.choice(nodes), rng.choice(nodes))
                     for _ in range(rng.randint(0, 12))}

            def closure(edge_set, entry):
                seen = {entry}
                frontier = [entry]
                while frontier:
                    node = frontier.pop()
                    for a, b in edge_set:
                        if a == node and b not in seen:
                            seen.add(b)
                            frontier.append(b)
                return seen

            extra = (rng.choice(nodes), rng.choice(nodes))
            for entry in nodes:
                assert closure(edges, entry) <= closure(edges | {extra}, entry)


class TestOracleEquivalence:
    def test_cha_matches_brute_force_on_random_models(self):
        for seed in range(25):
            dex = synth.random_model(seed)
            assert len(dex.methods) <= 50
            graph = graph_of(dex)
            assert set(graph.edges) == oracle_edges(dex), f"seed {seed}"

    def test_cha_matches_oracle_on_fixture(self, fixture_dex):
        graph = graph_of(fixture_dex)
        assert set(graph.edges) == oracle_edges(fixture_dex)
