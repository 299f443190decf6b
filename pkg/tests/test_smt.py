import dataclasses
import subprocess
import sys

import pytest

from plift import variability as v
from plift.bundle import load_bundle
from plift.constraints import typecheck_constraint
from plift.errors import (BundleError, DecodeError, InvalidConfiguration,
                          SolverParseError, SolverProcessError)
from plift.fixtures import bundle_paths
from plift.lifting import lift
from plift.parser import parse_constraint
from plift.smt import (AllVariantsSatisfy, SolverUnknown, Violation, check,
                       decode_model, emit_smt, resolve_solver_cmd)

PEN_FEATURE_BLOCK = """
(declare-const PenFeatures Bool)
(declare-const OpenMechanism Bool)
(declare-const TwistToOpen Bool)
(declare-const PushToOpen Bool)
(assert (=> OpenMechanism PenFeatures))
(assert (=> OpenMechanism (or PushToOpen TwistToOpen)))
(assert (=> PushToOpen OpenMechanism))
(assert (=> TwistToOpen OpenMechanism))
(assert (=> TwistToOpen (not PushToOpen)))
(assert (=> PushToOpen (not TwistToOpen)))
(assert (=> PenFeatures OpenMechanism))
(assert (= PenFeatures true))
"""


def _tokens(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def test_pen_feature_block_matches_published_listing(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["steps-deployed"]))
    got = " ".join(_tokens("\n".join(script.section("features"))))
    expected = " ".join(_tokens(PEN_FEATURE_BLOCK))
    assert got == expected


def test_part_datatype_declaration(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["steps-deployed"]))
    datatypes = "\n".join(script.section("datatypes"))
    assert ("(declare-datatypes () "
            "((Part BasePen PushButton TwistableHead NONE_Part)))"
            in datatypes)


def test_selection_asserts_follow_presence_table(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["steps-deployed"]))
    sel = "\n".join(script.section("selection"))
    assert "(assert (= (selected_Part BasePen) true))" in sel
    assert "(assert (= (selected_Part PushButton) PushToOpen))" in sel
    assert "(assert (= (selected_Part TwistableHead) TwistToOpen))" in sel
    assert "(assert (= (selected_Part NONE_Part) false))" in sel


def test_list_slot_emits_guarded_concatenation(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["steps-deployed"]))
    slots = "\n".join(script.section("slots"))
    assert "(declare-fun Product_parts (Product) (Seq Part))" in slots
    assert ("(assert (= (Product_parts Pen) (seq.++ "
            "(ite (selected_Part BasePen) (seq.unit BasePen) "
            "(as seq.empty (Seq Part))) "
            "(ite (selected_Part PushButton) (seq.unit PushButton) "
            "(as seq.empty (Seq Part))) "
            "(ite (selected_Part TwistableHead) (seq.unit TwistableHead) "
            "(as seq.empty (Seq Part))))))" in slots)
    assert "(assert (= (Product_parts NONE_Product) " \
        "(as seq.empty (Seq Part))))" in slots


def test_reference_slot_emits_ite_binding(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["steps-deployed"]))
    slots = "\n".join(script.section("slots"))
    assert ("(assert (= (Deployment_step Depl3) "
            "(ite (selected_ProductionStep ScrewHead) ScrewHead "
            "NONE_ProductionStep)))" in slots)


def test_none_rows_are_pinned_to_defaults(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["steps-deployed"]))
    slots = "\n".join(script.section("slots"))
    assert "(assert (= (Part_name NONE_Part) \"\"))" in slots
    assert "(assert (= (Operation_minValue NONE_Operation) 0))" in slots
    assert ("(assert (= (Deployment_step NONE_Deployment) "
            "NONE_ProductionStep))" in slots)


def test_basic_atoms_carry_non_none_guards(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["deployments-capable"]))
    constraint = "\n".join(script.section("constraint"))
    # d.step.requiredOp.name dereferences two references; its guard tests
    # the requiredOp prefix against the Operation NONE element
    assert ("(not (= (ProductionStep_requiredOp (Deployment_step d)) "
            "NONE_Operation))" in constraint)


def test_object_equality_carries_no_guard(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["steps-deployed"]))
    constraint = "\n".join(script.section("constraint"))
    assert "(= (Deployment_step d) s)" in constraint
    assert "NONE_ProductionStep))" not in constraint


def test_emit_is_deterministic(pen, microlang):
    for bundle in (pen, microlang):
        for name, tc in bundle.constraints.items():
            lc = lift(tc)
            first = emit_smt(bundle.product_line, lc).text
            second = emit_smt(bundle.product_line, lc).text
            assert first == second


def test_negated_constraint_asserted(pen):
    script = emit_smt(pen.product_line,
                      lift(pen.constraints["steps-deployed"]))
    (cmd,) = script.section("constraint")
    assert cmd.startswith("(assert (not (forall ((s ProductionStep)) ")
    assert script.section("check") == ("(check-sat)", "(get-model)")


def test_symbol_collision_rejected(pen):
    pl = pen.product_line
    fm = dataclasses.replace(pl.feature_model)
    collided = dataclasses.replace(
        pl, feature_model=v.FeatureModel(
            fm.features + ("Depl1",), fm.formula))
    with pytest.raises(BundleError, match="collision"):
        emit_smt(collided, lift(pen.constraints["steps-deployed"]))


# --- model decoding -----------------------------------------------------

SAT_OUTPUT = """sat
(
  (define-fun TwistToOpen () Bool
    true)
  (define-fun PenFeatures () Bool
    true)
  (define-fun OpenMechanism () Bool
    true)
  (define-fun selected_Part ((x!0 Part)) Bool
    (ite (= x!0 PushButton) false true))
)
"""


def test_decode_model_reads_features_and_defaults(pen):
    config = decode_model(SAT_OUTPUT, pen.product_line.feature_model)
    assert config.assignment == {
        "PenFeatures": True, "OpenMechanism": True,
        "TwistToOpen": True, "PushToOpen": False}


def test_decode_model_rejects_invalid_assignment(pen):
    # twist and push both on violates the exclusion
    bad = SAT_OUTPUT.replace(
        "(define-fun PenFeatures () Bool\n    true)",
        "(define-fun PenFeatures () Bool\n    true)\n"
        "  (define-fun PushToOpen () Bool\n    true)")
    with pytest.raises(InvalidConfiguration):
        decode_model(bad, pen.product_line.feature_model)


def test_decode_model_rejects_garbage_value(pen):
    bad = SAT_OUTPUT.replace(
        "(define-fun TwistToOpen () Bool\n    true)",
        "(define-fun TwistToOpen () Bool\n    maybe)")
    with pytest.raises(DecodeError):
        decode_model(bad, pen.product_line.feature_model)


# --- solver driver -------------------------------------------------------

def test_resolve_solver_cmd_priorities(monkeypatch):
    monkeypatch.delenv("PLIFT_SOLVER", raising=False)
    default = resolve_solver_cmd(None)
    assert default[-2:] == ["-m", "plift.smtsolve"]
    monkeypatch.setenv("PLIFT_SOLVER", "mysolver --flag")
    assert resolve_solver_cmd(None) == ["mysolver", "--flag"]
    assert resolve_solver_cmd("other -x") == ["other", "-x"]
    assert resolve_solver_cmd(["list", "form"]) == ["list", "form"]


def test_check_with_missing_solver(pen):
    with pytest.raises(SolverProcessError):
        check(pen.product_line, pen.constraints["steps-deployed"],
              solver_cmd="/nonexistent/solver-binary")


def test_check_with_garbage_solver(pen):
    cmd = [sys.executable, "-c", "print('flurble')"]
    with pytest.raises(SolverParseError):
        check(pen.product_line, pen.constraints["steps-deployed"],
              solver_cmd=cmd)


def test_check_with_silent_failing_solver(pen):
    cmd = [sys.executable, "-c", "import sys; sys.exit(4)"]
    with pytest.raises(SolverProcessError):
        check(pen.product_line, pen.constraints["steps-deployed"],
              solver_cmd=cmd)


def test_check_timeout_yields_unknown(pen):
    cmd = [sys.executable, "-c", "import time; time.sleep(30)"]
    verdict = check(pen.product_line, pen.constraints["steps-deployed"],
                    solver_cmd=cmd, timeout=0.5)
    assert isinstance(verdict, SolverUnknown)
    assert "timeout" in verdict.reason


def test_check_unknown_response(pen):
    cmd = [sys.executable, "-c", "print('unknown')"]
    verdict = check(pen.product_line, pen.constraints["steps-deployed"],
                    solver_cmd=cmd)
    assert isinstance(verdict, SolverUnknown)


# --- end-to-end verdicts (bundled solver) ----------------------------------

def test_pen_constraints_all_satisfied(pen):
    for name, tc in pen.constraints.items():
        verdict = check(pen.product_line, tc)
        assert isinstance(verdict, AllVariantsSatisfy), name


def test_microlang_type_match_violation(microlang):
    verdict = check(microlang.product_line,
                    microlang.constraints["type-match"])
    assert isinstance(verdict, Violation)
    assert verdict.confirmed is True
    assert verdict.config.assignment["FPU"] is True
    assert verdict.config.assignment["Runtime"] is True


def test_fault_bundles_yield_confirmed_violations():
    expectations = {
        "presence_fault1.yaml": "parts-assembled",
        "presence_fault2.yaml": "steps-deployed",
        "presence_fault3.yaml": "parts-assembled",
    }
    for presence, broken in expectations.items():
        bundle = load_bundle(**bundle_paths("pen", presence=presence))
        verdict = check(bundle.product_line, bundle.constraints[broken])
        assert isinstance(verdict, Violation), presence
        assert verdict.confirmed is True


def test_unsatisfiable_feature_model_means_vacuous_truth(pen):
    pl = pen.product_line
    fm = pl.feature_model
    void = dataclasses.replace(
        pl, feature_model=v.FeatureModel(fm.features,
                                         v.And(fm.formula, v.FALSE)))
    verdict = check(void, pen.constraints["steps-deployed"])
    assert isinstance(verdict, AllVariantsSatisfy)
