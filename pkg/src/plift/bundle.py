"""Bundle documents: YAML ingestion and serialization.

A bundle is five documents: metamodel, model, feature model, presence
table, constraints.  All use YAML.

  metamodel:   classes: {Class: {attr: {type: T, many: bool} | "T"}}
  model:       objects: {id: {type: Class, slots: {name: value}}}
  features:    features: [name...]; formula: "..." or ["...", ...] (conjoined)
  presence:    presence: {object-id: "formula"}
  constraints: constraints: {name: "constraint text"}

Slot values decode against the declared attribute: strings are references
for class-typed slots and plain strings for string slots; null is the
NONE reference; lists hold object ids.  Values that contradict the
declaration are kept in their natural kind so the typechecker can report
them instead of the loader guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import parser
from .constraints import TypedConstraint, typecheck_constraint
from .errors import BundleError, ParseError, PliftError
from .metamodel import (Attribute, ClassBody, Metamodel, Multiplicity,
                        validate_metamodel)
from .model import (BoolVal, InstanceGraph, IntVal, ListVal, ModelObject,
                    NONE, Ref, StringVal, Value)
from .variability import (FeatureModel, PresenceTable, ProductLine,
                          conjoin, validate_product_line)


@dataclass(frozen=True)
class Bundle:
    product_line: ProductLine
    constraints: dict[str, TypedConstraint] = field(default_factory=dict)
    constraint_texts: dict[str, str] = field(default_factory=dict)


def _load_yaml(path: Path, what: str) -> dict:
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise BundleError(f"{what} file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise BundleError(f"{what} file {path} is not valid YAML: {exc}") \
            from exc
    if not isinstance(data, dict):
        raise BundleError(f"{what} file {path} must hold a mapping")
    return data


def metamodel_from_dict(data: dict) -> Metamodel:
    classes = {}
    raw = data.get("classes")
    if not isinstance(raw, dict):
        raise BundleError("metamodel document needs a 'classes' map")
    for cname, attrs in raw.items():
        body: dict[str, Attribute] = {}
        for aname, spec in (attrs or {}).items():
            if isinstance(spec, str):
                body[aname] = Attribute(spec)
            elif isinstance(spec, dict) and "type" in spec:
                mult = Multiplicity.MANY if spec.get("many") \
                    else Multiplicity.ONE
                body[aname] = Attribute(str(spec["type"]), mult)
            else:
                raise BundleError(
                    f"attribute {cname}.{aname}: expected a type name or "
                    "a {type, many} map")
        classes[cname] = ClassBody(body)
    return Metamodel(classes)


def _decode_slot(attr: Attribute | None, raw) -> Value:
    if attr is not None:
        if attr.multiplicity is Multiplicity.MANY:
            if isinstance(raw, list) and \
                    all(isinstance(x, str) for x in raw):
                return ListVal(tuple(raw))
        elif not attr.is_basic:
            if raw is None:
                return Ref(NONE)
            if isinstance(raw, str):
                return Ref(raw)
        elif attr.target_type == "string" and isinstance(raw, str):
            return StringVal(raw)
    # natural decoding; mismatches surface in the typechecker
    if isinstance(raw, bool):
        return BoolVal(raw)
    if isinstance(raw, int):
        return IntVal(raw)
    if isinstance(raw, str):
        return StringVal(raw)
    if raw is None:
        return Ref(NONE)
    if isinstance(raw, list) and all(isinstance(x, str) for x in raw):
        return ListVal(tuple(raw))
    raise BundleError(f"cannot decode slot value {raw!r}")


def model_from_dict(data: dict, mm: Metamodel) -> InstanceGraph:
    raw = data.get("objects")
    if raw is None:
        raise BundleError("model document needs an 'objects' map")
    objects = {}
    for oid, entry in (raw or {}).items():
        if not isinstance(entry, dict) or "type" not in entry:
            raise BundleError(f"object '{oid}' needs a 'type'")
        cls = str(entry["type"])
        body = mm.classes.get(cls)
        slots = {}
        for sname, rawval in (entry.get("slots") or {}).items():
            attr = body.attributes.get(sname) if body else None
            slots[sname] = _decode_slot(attr, rawval)
        objects[oid] = ModelObject(oid, cls, slots)
    return InstanceGraph(objects)


def features_from_dict(data: dict) -> FeatureModel:
    names = data.get("features")
    if not isinstance(names, list):
        raise BundleError("feature document needs a 'features' list")
    raw = data.get("formula", "true")
    parts = raw if isinstance(raw, list) else [raw]
    try:
        formulas = [parser.parse_prop_formula(str(p)) for p in parts]
    except ParseError as exc:
        raise BundleError(f"feature-model formula: {exc}") from exc
    return FeatureModel(tuple(str(n) for n in names), conjoin(formulas))


def presence_from_dict(data: dict) -> PresenceTable:
    raw = data.get("presence") or {}
    conditions = {}
    for oid, text in raw.items():
        try:
            conditions[oid] = parser.parse_prop_formula(str(text))
        except ParseError as exc:
            raise BundleError(
                f"presence condition for '{oid}': {exc}") from exc
    return PresenceTable(conditions)


def constraint_texts_from_dict(data: dict) -> dict[str, str]:
    raw = data.get("constraints") or {}
    return {str(name): str(text) for name, text in raw.items()}


def load_bundle(metamodel: Path, model: Path, features: Path,
                presence: Path | None = None,
                constraints: Path | None = None) -> Bundle:
    """Load, cross-validate, and typecheck a full bundle."""
    mm = metamodel_from_dict(_load_yaml(Path(metamodel), "metamodel"))
    report = validate_metamodel(mm)
    if report:
        raise BundleError("metamodel is not well-defined:\n  "
                          + "\n  ".join(str(d) for d in report))
    graph = model_from_dict(_load_yaml(Path(model), "model"), mm)
    fm = features_from_dict(_load_yaml(Path(features), "features"))
    table = presence_from_dict(
        _load_yaml(Path(presence), "presence")) if presence \
        else PresenceTable({})
    pl = ProductLine(mm, graph, fm, table)
    problems = validate_product_line(pl)
    if problems:
        raise BundleError("product line is inconsistent:\n  "
                          + "\n  ".join(str(d) for d in problems))
    texts = constraint_texts_from_dict(
        _load_yaml(Path(constraints), "constraints")) if constraints else {}
    typed = {}
    for name, text in texts.items():
        try:
            typed[name] = typecheck_constraint(
                parser.parse_constraint(text), mm)
        except PliftError as exc:
            raise BundleError(f"constraint '{name}': {exc}") from exc
    return Bundle(pl, typed, texts)


# --- serialization ------------------------------------------------------

def _encode_slot(val: Value):
    if isinstance(val, Ref):
        return None if val.is_none else val.target
    if isinstance(val, ListVal):
        return list(val.targets)
    return val.value


def model_to_dict(g: InstanceGraph) -> dict:
    return {"objects": {
        oid: {"type": obj.type,
              "slots": {name: _encode_slot(v)
                        for name, v in obj.slots.items()}}
        for oid, obj in g.objects.items()}}


def dump_model(g: InstanceGraph) -> str:
    """Deterministic YAML form; NONE references serialize as null."""
    return yaml.safe_dump(model_to_dict(g), sort_keys=False,
                          default_flow_style=False)


def configuration_from_file(path: Path) -> dict[str, bool]:
    data = _load_yaml(Path(path), "configuration")
    out = {}
    for name, val in data.items():
        if not isinstance(val, bool):
            raise BundleError(
                f"configuration value for '{name}' must be true/false")
        out[str(name)] = val
    return out
