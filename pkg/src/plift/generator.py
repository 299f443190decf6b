"""Synthetic product lines: randomized instances for the agreement suite
and a deterministic large fixture for the scalability smoke test.

Random product lines stay inside the oracle's comfort zone (few features,
small graphs) while exercising every construct: optional objects, NONE-able
references, filtered lists, and constraints covering every grammar
production.  The scaled generator builds a product/process/resource style
model of roughly the published case-study size.
"""

from __future__ import annotations

import random

from . import variability as v
from .constraints import (And, BoolLit, Compare, Constraint, EXISTS, FORALL,
                          Implies, IntLit, Nav, Not, Or, Quant, SizeOf,
                          StrLit, TypeSet, NavSet, TypedConstraint,
                          typecheck_constraint)
from .metamodel import Attribute, ClassBody, Metamodel, Multiplicity
from .model import BoolVal, InstanceGraph, IntVal, ListVal, ModelObject, Ref, \
    StringVal
from .variability import FeatureModel, PresenceTable, ProductLine

_WORDS = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")


def random_feature_model(rng: random.Random, max_features: int = 8) -> FeatureModel:
    n = rng.randint(1, max_features)
    features = tuple(f"feat{i}" for i in range(n))
    clauses: list[v.PropFormula] = []
    for _ in range(rng.randint(0, n)):
        a, b = rng.choice(features), rng.choice(features)
        lhs: v.PropFormula = v.FeatVar(a)
        rhs: v.PropFormula = v.FeatVar(b)
        if rng.random() < 0.3:
            rhs = v.Not(rhs)
        clauses.append(v.Implies(lhs, rhs))
    if rng.random() < 0.2:
        clauses.append(v.FeatVar(rng.choice(features)))
    return FeatureModel(features, v.conjoin(clauses))


def random_metamodel(rng: random.Random, max_classes: int = 3) -> Metamodel:
    n = rng.randint(1, max_classes)
    names = [f"Cls{i}" for i in range(n)]
    classes = {}
    for cname in names:
        attrs: dict[str, Attribute] = {}
        for i in range(rng.randint(1, 3)):
            kind = rng.random()
            if kind < 0.4:
                attrs[f"a{i}"] = Attribute(
                    rng.choice(("int", "string", "bool")))
            elif kind < 0.75:
                attrs[f"a{i}"] = Attribute(rng.choice(names))
            else:
                attrs[f"a{i}"] = Attribute(rng.choice(names),
                                           Multiplicity.MANY)
        classes[cname] = ClassBody(attrs)
    return Metamodel(classes)


def random_product_line(rng: random.Random, max_features: int = 8,
                        max_objects: int = 30,
                        max_classes: int = 3) -> ProductLine:
    fm = random_feature_model(rng, max_features)
    mm = random_metamodel(rng, max_classes)
    n_objects = rng.randint(len(mm.classes), max_objects)
    ids_by_class: dict[str, list[str]] = {c: [] for c in mm.classes}
    order = []
    for i in range(n_objects):
        cname = rng.choice(list(mm.classes))
        oid = f"o{i}"
        ids_by_class[cname].append(oid)
        order.append((oid, cname))
    # reference slots need a target, so no class may stay empty
    for cname in mm.classes:
        if not ids_by_class[cname]:
            oid = f"o{len(order)}"
            ids_by_class[cname].append(oid)
            order.append((oid, cname))
    objects: dict[str, ModelObject] = {}
    for oid, cname in order:
        slots = {}
        for aname, attr in mm.classes[cname].attributes.items():
            if attr.multiplicity is Multiplicity.MANY:
                pool = ids_by_class[attr.target_type]
                count = rng.randint(0, min(4, len(pool)))
                slots[aname] = ListVal(tuple(rng.sample(pool, count)))
            elif attr.target_type == "int":
                slots[aname] = IntVal(rng.randint(0, 5))
            elif attr.target_type == "bool":
                slots[aname] = BoolVal(rng.random() < 0.5)
            elif attr.target_type == "string":
                slots[aname] = StringVal(rng.choice(_WORDS))
            else:
                slots[aname] = Ref(rng.choice(ids_by_class[attr.target_type]))
        objects[oid] = ModelObject(oid, cname, slots)
    conditions = {}
    for oid, _ in order:
        if rng.random() < 0.5:
            conditions[oid] = _random_presence(rng, fm.features)
    return ProductLine(mm, InstanceGraph(objects), fm,
                       PresenceTable(conditions))


def _random_presence(rng: random.Random, features) -> v.PropFormula:
    a = v.FeatVar(rng.choice(features))
    roll = rng.random()
    if roll < 0.4:
        return a
    if roll < 0.6:
        return v.Not(a)
    b = v.FeatVar(rng.choice(features))
    if roll < 0.8:
        return v.Or(a, b)
    return v.And(a, v.Not(b))


# --- random constraints -----------------------------------------------

class ConstraintGenerator:
    """Random well-typed constraints over a metamodel.

    Tracks which grammar productions it has emitted so the test suite can
    assert full coverage across a run.
    """

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used_productions: set[str] = set()

    def _mark(self, production: str):
        self.used_productions.add(production)

    def constraint(self, mm: Metamodel) -> TypedConstraint | None:
        self._fresh = 0
        root = self._quant(mm, {}, depth=0, toplevel=True)
        if root is None:
            return None
        return typecheck_constraint(Constraint(root), mm)

    def _var(self) -> str:
        self._fresh += 1
        return f"v{self._fresh}"

    def _list_navs(self, mm: Metamodel, env: dict[str, str]):
        out = []
        for var, cls in env.items():
            for aname, attr in mm.classes[cls].attributes.items():
                if attr.multiplicity is Multiplicity.MANY:
                    out.append((Nav(var, (aname,)), attr.target_type))
        return out

    def _quant(self, mm, env, depth, toplevel=False):
        rng = self.rng
        kind = rng.choice((FORALL, EXISTS))
        self._mark("quant-" + kind)
        var = self._var()
        lists = self._list_navs(mm, env)
        if lists and rng.random() < 0.4:
            nav, elem = rng.choice(lists)
            domain = NavSet(nav)
            self._mark("set-nav")
        else:
            elem = rng.choice(list(mm.classes))
            domain = TypeSet(elem)
            self._mark("set-type")
        body = self._expr(mm, {**env, var: elem}, depth + 1)
        if body is None:
            return None
        return Quant(kind, var, domain, body)

    def _expr(self, mm, env, depth):
        rng = self.rng
        if depth < 4:
            roll = rng.random()
            if roll < 0.18:
                inner = self._expr(mm, env, depth + 1)
                self._mark("not")
                return None if inner is None else Not(inner)
            if roll < 0.3:
                node = rng.choice((Or, And, Implies))
                self._mark(node.__name__.lower())
                lhs = self._expr(mm, env, depth + 1)
                rhs = self._expr(mm, env, depth + 1)
                if lhs is None or rhs is None:
                    return None
                return node(lhs, rhs)
            if roll < 0.45:
                return self._quant(mm, env, depth)
        return self._atom(mm, env)

    def _terms_by_type(self, mm, env):
        """All navigations reachable from bound vars, grouped by type."""
        by_type: dict[str, list] = {}
        for var, cls in env.items():
            by_type.setdefault(cls, []).append(Nav(var, ()))
            for aname, attr in mm.classes[cls].attributes.items():
                if attr.multiplicity is Multiplicity.MANY:
                    by_type.setdefault("int", []).append(
                        SizeOf(Nav(var, (aname,))))
                    continue
                by_type.setdefault(attr.target_type, []).append(
                    Nav(var, (aname,)))
                if not attr.is_basic:
                    for bname, battr in \
                            mm.classes[attr.target_type].attributes.items():
                        if battr.multiplicity is Multiplicity.MANY:
                            by_type.setdefault("int", []).append(
                                SizeOf(Nav(var, (aname, bname))))
                        elif battr.is_basic:
                            by_type.setdefault(battr.target_type, []).append(
                                Nav(var, (aname, bname)))
        return by_type

    def _atom(self, mm, env):
        rng = self.rng
        by_type = self._terms_by_type(mm, env)
        candidates = [t for t in by_type if by_type[t]]
        if not candidates:
            self._mark("atom-bool-literal")
            return BoolLit(rng.random() < 0.8)
        t = rng.choice(candidates)
        lhs = rng.choice(by_type[t])
        if t == "int":
            op = rng.choice(("=", "!=", "<", "<=", ">", ">="))
            rhs = rng.choice(by_type[t] + [IntLit(rng.randint(0, 5))] * 2)
            self._mark("atom-int-" + op)
        elif t == "string":
            op = rng.choice(("=", "!="))
            rhs = rng.choice(by_type[t] + [StrLit(rng.choice(_WORDS))] * 2)
            self._mark("atom-string")
        elif t == "bool":
            op = rng.choice(("=", "!="))
            rhs = rng.choice(by_type[t] + [BoolLit(rng.random() < 0.5)] * 2)
            self._mark("atom-bool")
        else:
            op = rng.choice(("=", "!="))
            rhs = rng.choice(by_type[t])
            self._mark("atom-object")
        if isinstance(lhs, SizeOf) or isinstance(rhs, SizeOf):
            self._mark("atom-size")
        return Compare(op, lhs, rhs)


# --- scaled fixture ----------------------------------------------------

def scaled_metamodel() -> Metamodel:
    return Metamodel({
        "Product": ClassBody({
            "name": Attribute("string"),
            "parts": Attribute("Part", Multiplicity.MANY),
        }),
        "Part": ClassBody({
            "name": Attribute("string"),
        }),
        "ProductionStep": ClassBody({
            "name": Attribute("string"),
            "assembledPart": Attribute("Part"),
            "requiredOp": Attribute("Operation"),
        }),
        "Machine": ClassBody({
            "name": Attribute("string"),
            "providedOp": Attribute("Operation"),
        }),
        "Operation": ClassBody({
            "name": Attribute("string"),
            "minValue": Attribute("int"),
            "maxValue": Attribute("int"),
        }),
        "Deployment": ClassBody({
            "step": Attribute("ProductionStep"),
            "machine": Attribute("Machine"),
        }),
    })


def scaled_constraint_texts() -> dict[str, str]:
    return {
        "steps-deployed":
            "forall s in ProductionStep: exists d in Deployment: d.step = s",
        "parts-assembled":
            "forall prod in Product: forall part in prod.parts: "
            "exists step in ProductionStep: step.assembledPart = part",
        "deployments-capable":
            "forall d in Deployment: !(d.step.requiredOp.name = "
            "d.machine.providedOp.name && (d.step.requiredOp.minValue > "
            "d.machine.providedOp.maxValue || d.step.requiredOp.maxValue < "
            "d.machine.providedOp.minValue))",
    }


def scaled_product_line(seed: int = 7, n_features: int = 28,
                        n_optional: int = 21, groups: int = 100,
                        parts_per_group: int = 3,
                        variable_groups: int = 18) -> ProductLine:
    """Deterministic case-study-sized product line.

    At the defaults: 100 groups x 3 x (part, operation, step, deployment)
    plus 10 machines, 10 machine operations and 8 products = 1228 objects,
    28 features (21 optional), and 18 variable groups x 6 = 108 presence
    conditions.  Built valid by construction: each part has exactly one
    assembling step sharing its presence condition, and every step is
    deployed to a machine providing a same-named, range-compatible
    operation.
    """
    rng = random.Random(seed)
    mandatory = n_features - n_optional
    features = tuple(
        [f"base{i}" for i in range(mandatory)]
        + [f"opt{i}" for i in range(n_optional)])
    clauses: list[v.PropFormula] = [v.FeatVar(f"base{i}")
                                    for i in range(mandatory)]
    for i in range(1, n_optional):
        if rng.random() < 0.35:
            clauses.append(v.Implies(v.FeatVar(f"opt{i}"),
                                     v.FeatVar(f"opt{rng.randrange(i)}")))
    fm = FeatureModel(features, v.conjoin(clauses))

    objects: dict[str, ModelObject] = {}
    conditions: dict[str, v.PropFormula] = {}

    def add(oid, cls, **slots):
        objects[oid] = ModelObject(oid, cls, slots)
        return oid

    machines = []
    for i in range(10):
        op = add(f"mop{i}", "Operation", name=StringVal(f"op{i}"),
                 minValue=IntVal(0), maxValue=IntVal(100))
        machines.append(add(f"machine{i}", "Machine",
                            name=StringVal(f"machine{i}"),
                            providedOp=Ref(op)))
    part_ids: list[str] = []
    for g in range(groups):
        optional = g < variable_groups
        if optional:
            pc: v.PropFormula = v.FeatVar(f"opt{g % n_optional}")
            if g % 5 == 0:
                pc = v.Or(pc, v.FeatVar(f"opt{(g + 7) % n_optional}"))
        for p in range(parts_per_group):
            idx = g * parts_per_group + p
            part = add(f"part{idx}", "Part", name=StringVal(f"part{idx}"))
            sop = add(f"sop{idx}", "Operation",
                      name=StringVal(f"op{idx % 10}"),
                      minValue=IntVal(10), maxValue=IntVal(60))
            step = add(f"step{idx}", "ProductionStep",
                       name=StringVal(f"step{idx}"),
                       assembledPart=Ref(part), requiredOp=Ref(sop))
            add(f"depl{idx}", "Deployment", step=Ref(step),
                machine=Ref(machines[idx % 10]))
            part_ids.append(part)
            if optional:
                conditions[part] = pc
                conditions[step] = pc
    n_products = 8
    per_product = len(part_ids) // n_products
    for i in range(n_products):
        chunk = part_ids[i * per_product:(i + 1) * per_product]
        add(f"product{i}", "Product", name=StringVal(f"product{i}"),
            parts=ListVal(tuple(chunk)))
    return ProductLine(scaled_metamodel(), InstanceGraph(objects), fm,
                       PresenceTable(conditions))
