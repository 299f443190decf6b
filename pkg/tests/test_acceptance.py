"""Acceptance suite: one test per release criterion, at the stated
budgets.  Run with ``pytest tests/test_acceptance.py -v -s`` to see the
per-criterion PASS lines.
"""

import random
import time

import pytest

from plift import smt
from plift import oracle as oracle_mod
from plift.binding import bind, structurally_equal
from plift.bundle import load_bundle
from plift.constraints import (And, Compare, EXISTS, FORALL, Implies, Nav,
                               NavSet, Not, Quant, Selected, TypeSet,
                               typecheck_constraint)
from plift.fixtures import bundle_paths
from plift.generator import (ConstraintGenerator, random_product_line,
                             scaled_constraint_texts, scaled_product_line)
from plift.lifting import lift
from plift.parser import parse_constraint
from plift.variability import enumerate_configurations, make_configuration


def _report(criterion: str, elapsed: float, budget: float):
    print(f"ACCEPTANCE {criterion}: PASS ({elapsed:.2f}s / budget {budget:.0f}s)")


def _expected_type_match() -> Quant:
    premises = And(
        Compare("=", Nav("a", ("paramName",)), Nav("p", ("paramName",))),
        Compare("=", Nav("a", ("varName",)), Nav("v", ("varName",))))
    conclusion = Compare("=", Nav("v", ("varType",)), Nav("p", ("paramType",)))
    innermost = Quant(EXISTS, "v", TypeSet("VariableDeclaration"),
                      And(Selected("v"), Implies(premises, conclusion)))
    over_params = Quant(FORALL, "p", NavSet(Nav("F_def", ("params",))),
                        innermost)
    over_defs = Quant(EXISTS, "F_def", TypeSet("FunctionDefinition"),
                      And(Selected("F_def"), over_params))
    over_args = Quant(FORALL, "a", NavSet(Nav("F_call", ("args",))),
                      over_defs)
    return Quant(FORALL, "F_call", TypeSet("FunctionCall"),
                 Implies(Selected("F_call"), over_args))


def test_criterion_1_lifting_golden(microlang):
    start = time.monotonic()

    def q(kind, var, domain, body):
        return Quant(kind, var, domain, body)

    expected = {
        "unique-fun-names": q(
            FORALL, "f1", TypeSet("FunctionDefinition"),
            Implies(Selected("f1"), Not(
                q(EXISTS, "f2", TypeSet("FunctionDefinition"),
                  And(Selected("f2"),
                      And(Compare("!=", Nav("f1"), Nav("f2")),
                          Compare("=", Nav("f1", ("funName",)),
                                  Nav("f2", ("funName",))))))))),
        "args-defined": q(
            FORALL, "a", TypeSet("Argument"),
            Implies(Selected("a"),
                    q(EXISTS, "v", TypeSet("VariableDeclaration"),
                      And(Selected("v"),
                          Compare("=", Nav("a", ("varName",)),
                                  Nav("v", ("varName",))))))),
        "type-match": _expected_type_match(),
    }
    for name, want in expected.items():
        got = lift(microlang.constraints[name]).root
        assert got == want, f"lifted AST mismatch for {name}"
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    _report("1 (lifting golden)", elapsed, 1)


def test_criterion_2_end_to_end_microlang_violation(microlang):
    start = time.monotonic()
    verdict = smt.check(microlang.product_line,
                        microlang.constraints["type-match"])
    elapsed = time.monotonic() - start
    assert isinstance(verdict, smt.Violation)
    assert verdict.config.assignment["FPU"] is True
    assert verdict.config.assignment["Runtime"] is True
    assert verdict.confirmed is True
    assert elapsed < 10.0
    _report("2 (end-to-end violation)", elapsed, 10)


def test_criterion_3_variant_derivation(microlang, myprogram1, myprogram2):
    start = time.monotonic()
    pl = microlang.product_line
    base = {"SoftwareOptimization": True, "ControllerFeatures": True,
            "Precision": False, "Runtime": True}
    k1 = make_configuration(pl.feature_model, dict(base, FPU=False))
    k2 = make_configuration(pl.feature_model, dict(base, FPU=True))
    assert structurally_equal(bind(pl, k1).graph, myprogram1)
    assert structurally_equal(bind(pl, k2).graph, myprogram2)
    _report("3 (variant derivation)", time.monotonic() - start, 5)


def test_criterion_4_pen_validity_and_seeded_faults(pen):
    start = time.monotonic()
    for name, tc in pen.constraints.items():
        verdict = smt.check(pen.product_line, tc)
        assert isinstance(verdict, smt.AllVariantsSatisfy), name
    for fault in ("presence_fault1.yaml", "presence_fault2.yaml",
                  "presence_fault3.yaml"):
        bundle = load_bundle(**bundle_paths("pen", presence=fault))
        violations = [
            verdict for verdict in (
                smt.check(bundle.product_line, tc)
                for tc in bundle.constraints.values())
            if isinstance(verdict, smt.Violation)]
        assert violations, f"{fault} was not detected"
        assert all(violation.confirmed for violation in violations), fault
    elapsed = time.monotonic() - start
    assert elapsed < 30.0
    _report("4 (pen validity and faults)", elapsed, 30)


def test_criterion_5_iff_theorem_property_suite():
    start = time.monotonic()
    rng = random.Random(424242)
    gen = ConstraintGenerator(rng)
    checked = 0
    disagreements = []
    while checked < 200:
        pl = random_product_line(rng, max_features=8, max_objects=30,
                                 max_classes=3)
        tc = gen.constraint(pl.metamodel)
        if tc is None:
            continue
        oracle_verdict = oracle_mod.oracle_check(pl, tc)
        smt_verdict = smt.check(pl, tc)
        oracle_violates = isinstance(oracle_verdict, oracle_mod.Violation)
        smt_violates = isinstance(smt_verdict, smt.Violation)
        assert not isinstance(smt_verdict, smt.SolverUnknown)
        if oracle_violates != smt_violates:
            disagreements.append((checked, oracle_verdict, smt_verdict))
        if smt_violates:
            assert smt_verdict.confirmed, \
                f"unconfirmed counterexample at case {checked}"
        checked += 1
    assert not disagreements, disagreements[:3]
    # the random constraints must have exercised the whole grammar
    required = {"quant-forall", "quant-exists", "set-type", "set-nav",
                "not", "or", "and", "implies", "atom-size", "atom-object",
                "atom-string", "atom-bool"}
    assert required <= gen.used_productions
    elapsed = time.monotonic() - start
    assert elapsed < 600.0
    _report("5 (iff-theorem, 200 cases)", elapsed, 600)


def test_criterion_6_scalability_smoke(pen):
    pl = scaled_product_line()
    assert len(pl.model.objects) >= 1200
    assert len(pl.feature_model.features) == 28
    assert 100 <= len(pl.presence.conditions) <= 120
    start = time.monotonic()
    for name, text in scaled_constraint_texts().items():
        tc = typecheck_constraint(parse_constraint(text), pl.metamodel)
        verdict = smt.check(pl, tc)
        assert isinstance(verdict, smt.AllVariantsSatisfy), name
    big_elapsed = time.monotonic() - start
    assert big_elapsed < 60.0
    start = time.monotonic()
    for name, tc in pen.constraints.items():
        smt.check(pen.product_line, tc)
    pen_elapsed = time.monotonic() - start
    assert pen_elapsed < 5.0
    print(f"ACCEPTANCE 6 (scalability): PASS "
          f"(large {big_elapsed:.2f}s / 60s, pen {pen_elapsed:.2f}s / 5s)")


def test_criterion_7_emission_determinism(pen):
    start = time.monotonic()
    lc = lift(pen.constraints["steps-deployed"])
    first = smt.emit_smt(pen.product_line, lc).text.encode()
    second = smt.emit_smt(pen.product_line, lc).text.encode()
    assert first == second
    # published feature block, compared token-wise (whitespace-insensitive)
    from test_smt import PEN_FEATURE_BLOCK, _tokens
    script = smt.emit_smt(pen.product_line, lc)
    assert _tokens("\n".join(script.section("features"))) == \
        _tokens(PEN_FEATURE_BLOCK)
    _report("7 (determinism)", time.monotonic() - start, 5)


def test_criterion_8_enumeration_counts(pen, microlang):
    start = time.monotonic()
    assert len(enumerate_configurations(
        pen.product_line.feature_model)) == 2
    assert len(enumerate_configurations(
        microlang.product_line.feature_model)) == 3
    _report("8 (enumeration counts)", time.monotonic() - start, 5)
