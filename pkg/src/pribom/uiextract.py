"""Widget and callback extraction.

Combines three binding sources into one deterministic widget list:

* layout/menu XML declarations (elements carrying an ``android:id``,
  including an ``android:onClick`` name resolved against activity
  classes later);
* programmatic registrations, found by scanning each method body for
  the const-id -> findViewById -> setOn<X>Listener pattern with
  intra-method register tracking;
* framework callbacks: every activity/fragment override of
  ``onOptionsItemSelected`` binds each menu-item widget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .apk.axml import ANDROID_NS, BinaryXmlDocument, ResourceReference
from .apk.arsc import ResourceTable
from .apk.dex import ConstLoad, DexModel, Invoke, MoveResult, NewInstance
from .diagnostics import Diagnostics
from .model import (UNKNOWN_WIDGET_TYPE, EventBinding, MethodRef,
                    WidgetIdentifier)

# Attributes that bind an image source to a widget; overridable by config.
DEFAULT_ICON_ATTRIBUTES = (
    "android:src",
    "android:background",
    "android:drawableLeft",
    "android:drawableRight",
    "android:drawableTop",
    "android:drawableBottom",
    "android:drawableStart",
    "android:drawableEnd",
    "app:srcCompat",
    "android:icon",
)

# setOn<X>Listener registration -> (event, callback name, callback params).
LISTENER_SETTERS = {
    "setOnClickListener": ("click", "onClick", ("Landroid/view/View;",)),
    "setOnLongClickListener": ("long_click", "onLongClick", ("Landroid/view/View;",)),
    "setOnTouchListener": ("touch", "onTouch",
                           ("Landroid/view/View;", "Landroid/view/MotionEvent;")),
    "setOnItemSelectedListener": (
        "item_selected", "onItemSelected",
        ("Landroid/widget/AdapterView;", "Landroid/view/View;", "I", "J")),
    "setOnItemClickListener": (
        "item_click", "onItemClick",
        ("Landroid/widget/AdapterView;", "Landroid/view/View;", "I", "J")),
    "setOnCheckedChangeListener": (
        "checked_change", "onCheckedChanged",
        ("Landroid/widget/CompoundButton;", "Z")),
    "addTextChangedListener": (
        "text_changed", "onTextChanged",
        ("Ljava/lang/CharSequence;", "I", "I", "I")),
    "setOnFocusChangeListener": ("focus_change", "onFocusChange",
                                 ("Landroid/view/View;", "Z")),
}

MENU_ITEM_TYPE = "android.view.MenuItem"
_VIEW_PACKAGE_CLASSES = {"View", "ViewGroup", "SurfaceView", "TextureView", "ViewStub"}


@dataclass(frozen=True)
class UiConfig:
    icon_attributes: tuple[str, ...] = DEFAULT_ICON_ATTRIBUTES
    extra_listener_setters: dict = field(default_factory=dict)

    def setters(self) -> dict:
        merged = dict(LISTENER_SETTERS)
        merged.update(self.extra_listener_setters)
        return merged


@dataclass(frozen=True)
class LayoutWidget:
    identifier: WidgetIdentifier
    onclick_names: tuple[str, ...]  # unresolved android:onClick handler names


def qualify_widget_type(name: str) -> str:
    if "." in name:
        return name
    if name in _VIEW_PACKAGE_CLASSES:
        return f"android.view.{name}"
    if name == "WebView":
        return f"android.webkit.{name}"
    return f"android.widget.{name}"


def _split_qualified(attr: str) -> tuple[str | None, str]:
    prefix, sep, name = attr.partition(":")
    if not sep:
        return None, attr
    uri = {"android": ANDROID_NS,
           "app": "http://schemas.android.com/apk/res-auto"}.get(prefix, prefix)
    return uri, name


def _resolve_src(value, table: ResourceTable) -> str | None:
    if isinstance(value, str):
        return value
    if isinstance(value, ResourceReference):
        entry = table.lookup(value.resource_id)
        if entry is None:
            return f"res/0x{value.resource_id:08x}"
        if entry.file_path:
            return entry.file_path
        return f"res/{entry.type_name}/{entry.entry_name}"
    return None


def extract_layout_widgets(layouts: list[BinaryXmlDocument],
                           table: ResourceTable,
                           config: UiConfig | None = None,
                           diags: Diagnostics | None = None) -> list[LayoutWidget]:
    """Widgets declared in layout and menu documents.

    Menu documents are recognized by their ``menu`` root element; their
    items become ``android.view.MenuItem`` widgets. Elements without an
    ``android:id`` are skipped and counted.
    """
    config = config or UiConfig()
    icon_attrs = [_split_qualified(a) for a in config.icon_attributes]
    widgets: dict[int, LayoutWidget] = {}
    skipped = 0

    for doc in layouts:
        is_menu = doc.root.name == "menu"
        for element in doc.root.iter_tree():
            id_value = element.attr("id")
            if not isinstance(id_value, ResourceReference):
                if element is not doc.root:
                    skipped += 1
                continue
            widget_id = id_value.resource_id
            if is_menu:
                widget_type = MENU_ITEM_TYPE
            else:
                widget_type = qualify_widget_type(element.name)
            name = table.name_of(widget_id)
            if name is None and diags is not None:
                diags.warning("ui-extractor",
                              f"widget id 0x{widget_id:08x} does not resolve "
                              "in the resource table")
            src = []
            for ns, attr_name in icon_attrs:
                resolved = _resolve_src(element.attr(attr_name, ns), table)
                if resolved is not None and resolved not in src:
                    src.append(resolved)
            onclick = element.attr("onClick")
            onclick_names = (onclick,) if isinstance(onclick, str) else ()
            if widget_id in widgets:
                if diags is not None:
                    diags.warning("ui-extractor",
                                  f"widget id 0x{widget_id:08x} declared more "
                                  "than once; keeping the first declaration")
                continue
            widgets[widget_id] = LayoutWidget(
                identifier=WidgetIdentifier(
                    widget_type=widget_type, widget_id=widget_id,
                    widget_name=name, widget_src=tuple(src)),
                onclick_names=onclick_names)
    if skipped and diags is not None:
        diags.info("ui-extractor",
                   f"skipped {skipped} layout elements without android:id")
    return [widgets[k] for k in sorted(widgets)]


def _is_view_lookup(method: MethodRef) -> bool:
    return (method.method_name == "findViewById"
            and method.param_descriptors == ("I",))


def _callback_ref(dex: DexModel, listener_class: str, callback: str,
                  params: tuple[str, ...]) -> MethodRef | None:
    current: str | None = listener_class
    while current is not None:
        found = dex.find_method(current, callback, params)
        if found is not None:
            return found.ref
        cdef = dex.class_by_name.get(current)
        current = cdef.superclass if cdef else None
    return None


def framework_root_of(dex: DexModel, class_name: str) -> str | None:
    """First superclass outside the app, walking up from ``class_name``."""
    current = dex.class_by_name.get(class_name)
    while current is not None:
        parent = current.superclass
        if parent is None:
            return None
        if parent not in dex.class_by_name:
            return parent
        current = dex.class_by_name[parent]
    return None


def _is_activity_like(dex: DexModel, class_name: str) -> bool:
    root = framework_root_of(dex, class_name)
    return root is not None and root.rsplit(".", 1)[-1].endswith("Activity")


def _is_screen_class(dex: DexModel, class_name: str) -> bool:
    root = framework_root_of(dex, class_name)
    if root is None:
        return False
    simple = root.rsplit(".", 1)[-1]
    return simple.endswith("Activity") or simple.endswith("Fragment")


def extract_programmatic_bindings(dex: DexModel, table: ResourceTable,
                                  menu_widget_ids=(),
                                  config: UiConfig | None = None,
                                  diags: Diagnostics | None = None
                                  ) -> list[tuple[int, EventBinding]]:
    """Registrations made in code plus framework menu callbacks."""
    config = config or UiConfig()
    setters = config.setters()
    out: list[tuple[int, EventBinding]] = []

    for mdef in dex.methods:
        if mdef.body is None:
            continue
        const_in: dict[int, int] = {}       # register -> const value
        view_id: dict[int, int] = {}        # register -> widget id
        instance: dict[int, str] = {}       # register -> new-instance class
        pending_view: int | None = None
        for op in mdef.body.ops:
            if isinstance(op, ConstLoad):
                const_in[op.register] = op.value
                pending_view = None
            elif isinstance(op, NewInstance):
                instance[op.register] = op.type_name
                pending_view = None
            elif isinstance(op, MoveResult):
                if pending_view is not None:
                    view_id[op.register] = pending_view
                    pending_view = None
            elif isinstance(op, Invoke):
                pending_view = None
                if _is_view_lookup(op.method) and len(op.args) >= 2:
                    id_register = op.args[-1]
                    value = const_in.get(id_register)
                    if value is None:
                        if diags is not None:
                            diags.warning(
                                "ui-extractor",
                                f"{mdef.ref.render()}: findViewById argument "
                                f"register v{id_register} is not a traced "
                                "constant; unresolved widget id")
                    else:
                        pending_view = value & 0xFFFFFFFF
                    continue
                setter = setters.get(op.method.method_name)
                if setter is None or len(op.args) < 2:
                    continue
                event, callback, callback_params = setter
                receiver, listener = op.args[0], op.args[1]
                widget = view_id.get(receiver)
                if widget is None:
                    if diags is not None:
                        diags.info("ui-extractor",
                                   f"{mdef.ref.render()}: listener receiver "
                                   f"v{receiver} is not a traced view; skipped")
                    continue
                listener_class = instance.get(listener)
                if listener_class is None:
                    if diags is not None:
                        diags.warning("ui-extractor",
                                      f"{mdef.ref.render()}: unresolvable "
                                      f"listener target for {event}")
                    continue
                handler = _callback_ref(dex, listener_class, callback,
                                        callback_params)
                if handler is None:
                    if diags is not None:
                        diags.warning("ui-extractor",
                                      f"{mdef.ref.render()}: listener class "
                                      f"{listener_class} does not define "
                                      f"{callback}")
                    continue
                out.append((widget, EventBinding(event=event, handler=handler,
                                                 origin="programmatic")))

    menu_params = ("Landroid/view/MenuItem;",)
    for cdef in dex.classes:
        if not _is_screen_class(dex, cdef.name):
            continue
        override = dex.find_method(cdef.name, "onOptionsItemSelected", menu_params)
        if override is None or override.body is None:
            continue
        for widget_id in menu_widget_ids:
            out.append((widget_id, EventBinding(
                event="item_selected", handler=override.ref,
                origin="framework_callback")))

    out.sort(key=lambda pair: (pair[0], pair[1].sort_key()))
    return out


def resolve_xml_handlers(widgets: list[LayoutWidget], dex: DexModel,
                         diags: Diagnostics | None = None
                         ) -> list[tuple[int, EventBinding]]:
    """Bind android:onClick names to activity methods.

    The name must match a public ``void <name>(android.view.View)``
    defined by an activity class. Several matching activities all yield
    bindings plus an ambiguity diagnostic; zero matches drop the
    binding with a diagnostic.
    """
    view_params = ("Landroid/view/View;",)
    activity_classes = sorted(
        c.name for c in dex.classes if _is_activity_like(dex, c.name))
    out: list[tuple[int, EventBinding]] = []
    for widget in widgets:
        for name in widget.onclick_names:
            matches = []
            for cls in activity_classes:
                found = dex.find_method(cls, name, view_params)
                if found is not None and found.ref.return_descriptor == "V":
                    matches.append(found.ref)
            if not matches:
                if diags is not None:
                    diags.warning("ui-extractor",
                                  f"android:onClick handler {name!r} has no "
                                  "matching activity method; binding dropped")
                continue
            if len(matches) > 1 and diags is not None:
                diags.warning("ui-extractor",
                              f"ambiguous handler {name!r}: defined by "
                              f"{len(matches)} activities")
            for ref in matches:
                out.append((widget.identifier.widget_id, EventBinding(
                    event="click", handler=ref, origin="xml_attribute")))
    out.sort(key=lambda pair: (pair[0], pair[1].sort_key()))
    return out


def assemble_widgets(layout_widgets: list[LayoutWidget],
                     bindings: list[tuple[int, EventBinding]],
                     table: ResourceTable,
                     diags: Diagnostics | None = None
                     ) -> list[tuple[WidgetIdentifier, tuple[EventBinding, ...]]]:
    """Union layout widgets with ids seen only programmatically.

    Programmatic-only ids still become widgets, typed with the
    "unknown" sentinel, so no binding is silently lost.
    """
    identifiers = {w.identifier.widget_id: w.identifier for w in layout_widgets}
    grouped: dict[int, list[EventBinding]] = {
        wid: [] for wid in identifiers}
    for widget_id, binding in bindings:
        if widget_id not in identifiers:
            name = table.name_of(widget_id)
            if name is None and diags is not None:
                diags.warning("ui-extractor",
                              f"programmatic widget id 0x{widget_id:08x} does "
                              "not resolve in the resource table")
            identifiers[widget_id] = WidgetIdentifier(
                widget_type=UNKNOWN_WIDGET_TYPE, widget_id=widget_id,
                widget_name=name)
            grouped[widget_id] = []
        grouped[widget_id].append(binding)
    return [(identifiers[wid], tuple(sorted(set(grouped[wid]),
                                            key=EventBinding.sort_key)))
            for wid in sorted(identifiers)]
