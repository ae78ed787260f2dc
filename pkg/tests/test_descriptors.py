import pytest
from hypothesis import given, strategies as st

from pribom import descriptors
from pribom.descriptors import DescriptorError
from pribom.model import MethodRef


def test_pretty_primitives():
    assert descriptors.pretty_type("Z") == "boolean"
    assert descriptors.pretty_type("V") == "void"
    assert descriptors.pretty_type("[I") == "int[]"
    assert descriptors.pretty_type("[[J") == "long[][]"


def test_pretty_class():
    assert descriptors.pretty_type("Landroid/view/MenuItem;") == "android.view.MenuItem"
    assert descriptors.pretty_type("[Ljava/lang/String;") == "java.lang.String[]"


def test_bad_descriptor_rejected():
    for bad in ("", "L", "Lfoo", "Q", "[", "Lfoo;;extra? no"):
        with pytest.raises(DescriptorError):
            descriptors.pretty_type(bad)


def test_split_parameters():
    params = descriptors.split_parameter_descriptors("Ljava/lang/String;I[BJ")
    assert params == ["Ljava/lang/String;", "I", "[B", "J"]
    assert descriptors.split_parameter_descriptors("") == []
    with pytest.raises(DescriptorError):
        descriptors.split_parameter_descriptors("Ljava/lang/String")


def test_method_path_render_matches_worked_example():
    path = descriptors.render_method_path(
        "android.location.LocationManager", "getLastKnownLocation",
        ("Ljava/lang/String;",), "Landroid/location/Location;")
    assert path == ("Landroid/location/LocationManager;-getLastKnownLocation-"
                    "(Ljava/lang/String;)Landroid/location/Location;")


def test_method_path_round_trip():
    path = ("Landroid/location/LocationManager;-getLastKnownLocation-"
            "(Ljava/lang/String;)Landroid/location/Location;")
    cls, name, params, ret = descriptors.parse_method_path(path)
    assert cls == "android.location.LocationManager"
    assert name == "getLastKnownLocation"
    assert params == ("Ljava/lang/String;",)
    assert ret == "Landroid/location/Location;"
    assert descriptors.render_method_path(cls, name, params, ret) == path


_primitive = st.sampled_from(["Z", "B", "S", "C", "I", "J", "F", "D"])
_segment = st.from_regex(r"[a-z][a-z0-9]{0,5}", fullmatch=True)
_class_desc = st.lists(_segment, min_size=1, max_size=4).map(
    lambda parts: "L" + "/".join(parts) + ";")
_type_desc = st.one_of(
    _primitive, _class_desc,
    st.tuples(st.integers(1, 3), st.one_of(_primitive, _class_desc)).map(
        lambda t: "[" * t[0] + t[1]))


@given(_type_desc)
def test_type_descriptor_round_trip(descriptor):
    assert descriptors.type_descriptor(
        descriptors.pretty_type(descriptor)) == descriptor


@given(cls=st.lists(_segment, min_size=1, max_size=4).map(".".join),
       name=st.from_regex(r"[a-zA-Z<][a-zA-Z0-9_>$]{0,10}", fullmatch=True),
       params=st.lists(_type_desc, max_size=4),
       ret=st.one_of(st.just("V"), _type_desc))
def test_method_ref_render_parse_round_trip(cls, name, params, ret):
    original = MethodRef(class_name=cls, method_name=name,
                         param_descriptors=tuple(params),
                         return_descriptor=ret)
    assert MethodRef.parse(original.render()) == original
    reparsed = descriptors.parse_method_path(original.method_path())
    assert reparsed == (cls, name, tuple(params), ret)
