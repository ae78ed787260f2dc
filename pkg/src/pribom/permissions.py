"""Permission and data-type mapping.

Three data assets drive this stage: the catalog of Android permissions
with protection levels and data-type categories, the curated
API-to-permission rule set (exact method descriptors, axplorer style),
and the widget-class API-level table. Only dangerous permissions map to
the ten data-type categories; matches on other protection levels are
kept visible through diagnostics but never enter the inventory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import assets
from .descriptors import parse_method_path
from .diagnostics import Diagnostics
from .errors import NotDangerousError, PribomError, UnknownPermissionError
from .model import DATA_TYPES, PermissionFinding, MethodRef


@dataclass(frozen=True)
class PermissionCatalog:
    """permission -> (protection level, data type for dangerous ones)."""

    levels: dict
    categories: dict

    @classmethod
    def load(cls, override=None) -> "PermissionCatalog":
        raw = assets.load_json_asset(assets.PERMISSION_CATALOG, override)
        levels = {}
        categories = {}
        for row in raw:
            permission = row["permission"]
            level = row["protection_level"]
            levels[permission] = level
            data_type = row.get("data_type")
            if level == "dangerous":
                if data_type not in DATA_TYPES:
                    raise PribomError(
                        f"catalog: dangerous permission {permission} has "
                        f"invalid data_type {data_type!r}")
                categories[permission] = data_type
            elif data_type is not None:
                raise PribomError(
                    f"catalog: non-dangerous permission {permission} must "
                    "not carry a data_type")
        return cls(levels=levels, categories=categories)

    def data_type_of(self, permission: str) -> str:
        """Category for a dangerous permission; errors otherwise."""
        level = self.levels.get(permission)
        if level is None:
            raise UnknownPermissionError(
                f"{permission} is not in the permission catalog")
        if level != "dangerous":
            raise NotDangerousError(
                f"{permission} has protection level {level!r}; only dangerous "
                "permissions map to data types")
        return self.categories[permission]

    def dangerous_permissions(self) -> tuple[str, ...]:
        return tuple(sorted(self.categories))


@dataclass(frozen=True)
class ApiRule:
    descriptor: str  # method path form, exact match
    permissions: tuple[str, ...]
    min_api: int


@dataclass(frozen=True)
class ApiPermissionMap:
    rules: dict  # descriptor -> ApiRule

    @classmethod
    def load(cls, catalog: PermissionCatalog, override=None) -> "ApiPermissionMap":
        raw = assets.load_json_asset(assets.API_PERMISSION_MAP, override)
        rules = {}
        for row in raw:
            descriptor = row["descriptor"]
            parse_method_path(descriptor)  # must be a well-formed descriptor
            rule = ApiRule(descriptor=descriptor,
                           permissions=tuple(row["permissions"]),
                           min_api=int(row["min_api"]))
            if rule.min_api < 1:
                raise PribomError(f"api map: {descriptor} min_api must be >= 1")
            for permission in rule.permissions:
                if permission not in catalog.levels:
                    raise PribomError(
                        f"api map: {descriptor} names permission {permission} "
                        "that is absent from the catalog")
            if descriptor in rules:
                raise PribomError(f"api map: duplicate descriptor {descriptor}")
            rules[descriptor] = rule
        return cls(rules=rules)


@dataclass(frozen=True)
class WidgetApiTable:
    levels: dict  # widget class name -> introduction level

    @classmethod
    def load(cls, override=None) -> "WidgetApiTable":
        raw = assets.load_json_asset(assets.WIDGET_API_TABLE, override)
        levels = {}
        for row in raw:
            level = int(row["introduced_level"])
            if level < 1:
                raise PribomError(
                    f"widget api table: {row['class']} level must be >= 1")
            levels[row["class"]] = level
        return cls(levels=levels)


def widget_min_api(widget_type: str, table: WidgetApiTable,
                   diags: Diagnostics | None = None) -> int:
    level = table.levels.get(widget_type)
    if level is None:
        if diags is not None:
            diags.info("permission-mapper",
                       f"widget class {widget_type} is not in the API table; "
                       "defaulting to level 1")
        return 1
    return level


def map_apis(reachable: Iterable[MethodRef], api_map: ApiPermissionMap,
             catalog: PermissionCatalog,
             diags: Diagnostics | None = None) -> list[PermissionFinding]:
    """Findings for every reachable method that matches a rule.

    Output is a function of the input set only: duplicates collapse and
    the result is sorted, so iteration order of ``reachable`` never
    shows through.
    """
    findings: set[PermissionFinding] = set()
    skipped: set[tuple[str, str]] = set()
    for ref in reachable:
        rule = api_map.rules.get(ref.method_path())
        if rule is None:
            continue
        for permission in rule.permissions:
            try:
                data_type = catalog.data_type_of(permission)
            except NotDangerousError:
                skipped.add((permission, rule.descriptor))
                continue
            findings.add(PermissionFinding(
                permission=permission,
                data_type=data_type,
                method_path=rule.descriptor,
                min_api_level=rule.min_api))
    if diags is not None:
        for permission, descriptor in sorted(skipped):
            diags.info("permission-mapper",
                       f"{descriptor} requires non-dangerous permission "
                       f"{permission}; excluded from data types")
    return sorted(findings, key=PermissionFinding.sort_key)
