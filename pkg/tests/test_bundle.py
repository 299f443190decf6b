import pytest
import yaml

from plift.binding import structurally_equal
from plift.bundle import (dump_model, load_bundle, metamodel_from_dict,
                          model_from_dict, model_to_dict)
from plift.errors import BundleError
from plift.fixtures import bundle_paths, fixture_path
from plift.model import IntVal, NONE, Ref, StringVal


def test_fixture_bundles_load(microlang, pen):
    assert set(microlang.constraints) == {
        "unique-fun-names", "args-defined", "type-match"}
    assert set(pen.constraints) == {
        "steps-deployed", "parts-assembled", "deployments-capable"}


def test_model_round_trip_is_structurally_equal(microlang, pen):
    for bundle in (microlang, pen):
        mm = bundle.product_line.metamodel
        g = bundle.product_line.model
        reloaded = model_from_dict(yaml.safe_load(dump_model(g)), mm)
        assert reloaded == g
        assert structurally_equal(reloaded, g)


def test_dump_is_deterministic(pen):
    g = pen.product_line.model
    assert dump_model(g) == dump_model(g)


def test_none_serializes_as_null(pen, myprogram1):
    from plift.binding import bind
    from plift.variability import enumerate_configurations
    pl = pen.product_line
    push = next(k for k in enumerate_configurations(pl.feature_model)
                if k.assignment["PushToOpen"])
    doc = model_to_dict(bind(pl, push).graph)
    assert doc["objects"]["Depl3"]["slots"]["step"] is None


def test_declared_types_drive_decoding(microlang):
    mm = microlang.product_line.metamodel
    g = model_from_dict({"objects": {
        "d": {"type": "DataType", "slots": {"typeName": "integer"}},
        "x": {"type": "VariableDeclaration",
              "slots": {"varName": "v", "varType": "d"}},
    }}, mm)
    assert g.objects["x"].slots["varType"] == Ref("d")
    assert g.objects["x"].slots["varName"] == StringVal("v")


def test_wrong_kinds_survive_loading_for_the_typechecker(microlang):
    from plift.model import typecheck_graph
    mm = microlang.product_line.metamodel
    g = model_from_dict({"objects": {
        "a": {"type": "Argument", "slots": {"paramName": "p",
                                            "varName": 3}},
    }}, mm)
    assert g.objects["a"].slots["varName"] == IntVal(3)
    assert any(d.code == "kind-mismatch" for d in typecheck_graph(mm, g))


def test_missing_file_raises_bundle_error(tmp_path):
    paths = bundle_paths("pen")
    with pytest.raises(BundleError, match="not found"):
        load_bundle(metamodel=paths["metamodel"],
                    model=tmp_path / "nope.yaml",
                    features=paths["features"])


def test_invalid_yaml_raises_bundle_error(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("objects: [unbalanced")
    paths = bundle_paths("pen")
    with pytest.raises(BundleError, match="YAML"):
        load_bundle(metamodel=paths["metamodel"], model=bad,
                    features=paths["features"])


def test_ill_typed_bundle_rejected(tmp_path):
    paths = bundle_paths("pen")
    model = tmp_path / "model.yaml"
    model.write_text("objects:\n  d:\n    type: Deployment\n    slots:\n"
                     "      step: ghost\n      machine: ghost\n")
    with pytest.raises(BundleError, match="inconsistent"):
        load_bundle(metamodel=paths["metamodel"], model=model,
                    features=paths["features"])


def test_bad_constraint_named_in_error(tmp_path):
    paths = bundle_paths("pen")
    constraints = tmp_path / "constraints.yaml"
    constraints.write_text(
        'constraints:\n  broken: "forall x in Ghost: true"\n')
    with pytest.raises(BundleError, match="broken"):
        load_bundle(metamodel=paths["metamodel"], model=paths["model"],
                    features=paths["features"], presence=paths["presence"],
                    constraints=constraints)


def test_metamodel_well_definedness_enforced(tmp_path):
    mm_doc = tmp_path / "mm.yaml"
    mm_doc.write_text("classes:\n  A:\n    x: Ghost\n")
    paths = bundle_paths("pen")
    with pytest.raises(BundleError, match="well-defined"):
        load_bundle(metamodel=mm_doc, model=paths["model"],
                    features=paths["features"])


def test_shorthand_attribute_spec():
    mm = metamodel_from_dict({"classes": {
        "A": {"x": "int", "ys": {"type": "A", "many": True}}}})
    assert mm.classes["A"].attributes["x"].target_type == "int"
    assert mm.classes["A"].attributes["ys"].many
