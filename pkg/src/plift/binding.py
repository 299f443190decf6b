"""Variant derivation: bind a product line under one configuration.

Objects whose presence condition is false under the configuration are
dropped from the graph entirely, so quantifier extents exclude them for
free.  Single references to dropped objects become NONE; list slots keep
exactly the surviving elements in source order.  Basic values pass
through unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (InstanceGraph, ListVal, ModelObject, NONE, Ref)
from .variability import Configuration, ProductLine, eval_formula


@dataclass(frozen=True)
class BoundVariant:
    graph: InstanceGraph
    config: Configuration
    provenance: dict[str, bool]  # object id -> kept


def bind(pl: ProductLine, k: Configuration) -> BoundVariant:
    """Derive the concrete variant of ``pl`` under configuration ``k``."""
    kept: dict[str, bool] = {
        oid: eval_formula(pl.presence.condition(oid), k.assignment)
        for oid in pl.model.objects
    }
    objects: dict[str, ModelObject] = {}
    for oid, obj in pl.model.objects.items():
        if not kept[oid]:
            continue
        slots = {}
        for name, val in obj.slots.items():
            if isinstance(val, Ref):
                if val.is_none or not kept.get(val.target, False):
                    slots[name] = Ref(NONE)
                else:
                    slots[name] = val
            elif isinstance(val, ListVal):
                slots[name] = ListVal(tuple(
                    t for t in val.targets if kept.get(t, False)))
            else:
                slots[name] = val
        objects[oid] = ModelObject(oid, obj.type, slots)
    return BoundVariant(InstanceGraph(objects), k, kept)


def _basic_signature(obj: ModelObject) -> tuple:
    """Type plus everything about an object that a bijection must preserve
    without looking at other objects."""
    parts = [obj.type]
    for name in sorted(obj.slots):
        val = obj.slots[name]
        if isinstance(val, Ref):
            parts.append((name, "ref", val.is_none))
        elif isinstance(val, ListVal):
            parts.append((name, "list", len(val.targets)))
        else:
            parts.append((name, type(val).__name__, val.value))
    return tuple(parts)


def structurally_equal(a: InstanceGraph, b: InstanceGraph) -> bool:
    """Type-preserving bijection test; ids themselves need not match.

    Basic slots must agree exactly; references and list elements must map
    consistently under the bijection (NONE maps to NONE).  Uses signature
    partitioning plus backtracking, which is plenty for model-sized graphs.
    """
    if len(a.objects) != len(b.objects):
        return False
    a_ids = list(a.objects)
    groups: dict[tuple, list[str]] = {}
    for oid, obj in b.objects.items():
        groups.setdefault(_basic_signature(obj), []).append(oid)
    for obj in a.objects.values():
        sig = _basic_signature(obj)
        if sig not in groups:
            return False

    def consistent(mapping: dict[str, str], aid: str, bid: str) -> bool:
        ao, bo = a.objects[aid], b.objects[bid]
        for name, aval in ao.slots.items():
            bval = bo.slots.get(name)
            if isinstance(aval, Ref):
                if not isinstance(bval, Ref):
                    return False
                if aval.is_none or bval.is_none:
                    if aval.is_none != bval.is_none:
                        return False
                    continue
                mapped = mapping.get(aval.target)
                if mapped is not None and mapped != bval.target:
                    return False
                if aval.target in mapping and mapped is None:
                    return False
            elif isinstance(aval, ListVal):
                if not isinstance(bval, ListVal) or \
                        len(aval.targets) != len(bval.targets):
                    return False
                for at, bt in zip(aval.targets, bval.targets):
                    mapped = mapping.get(at)
                    if mapped is not None and mapped != bt:
                        return False
        return True

    def backtrack(i: int, mapping: dict[str, str], used: set[str]) -> bool:
        if i == len(a_ids):
            # re-verify reference structure under the complete bijection
            for aid, bid in mapping.items():
                ao, bo = a.objects[aid], b.objects[bid]
                for name, aval in ao.slots.items():
                    bval = bo.slots[name]
                    if isinstance(aval, Ref) and not aval.is_none:
                        if mapping[aval.target] != bval.target:
                            return False
                    elif isinstance(aval, ListVal):
                        if tuple(mapping[t] for t in aval.targets) != \
                                bval.targets:
                            return False
            return True
        aid = a_ids[i]
        for bid in groups[_basic_signature(a.objects[aid])]:
            if bid in used:
                continue
            if not consistent(mapping, aid, bid):
                continue
            mapping[aid] = bid
            used.add(bid)
            if backtrack(i + 1, mapping, used):
                return True
            del mapping[aid]
            used.remove(bid)
        return False

    return backtrack(0, {}, set())
