import pytest

from plift.errors import (BasicTypeHasNoAttributes, UnknownAttribute,
                          UnknownType)
from plift.metamodel import (Attribute, ClassBody, Metamodel, Multiplicity,
                             lookup_attribute, validate_metamodel)


def test_microlang_metamodel_is_well_defined(microlang):
    assert validate_metamodel(microlang.product_line.metamodel) == []


def test_empty_metamodel_is_well_defined():
    assert validate_metamodel(Metamodel({})) == []


def test_missing_type_reported_with_class_attribute_and_type():
    mm = Metamodel({"A": ClassBody({"x": Attribute("B")})})
    report = validate_metamodel(mm)
    assert len(report) == 1
    diag = report[0]
    assert diag.code == "unknown-type"
    assert diag.subject == "A.x"
    assert "'B'" in diag.message


def test_basic_type_redeclaration_reported():
    mm = Metamodel({"int": ClassBody({})})
    report = validate_metamodel(mm)
    assert [d.code for d in report] == ["basic-type-redeclared"]


def test_validation_is_declaration_order_independent():
    a = Attribute("B")
    mm1 = Metamodel({"A": ClassBody({"x": a}), "C": ClassBody({"y": a})})
    mm2 = Metamodel({"C": ClassBody({"y": a}), "A": ClassBody({"x": a})})
    assert validate_metamodel(mm1) == validate_metamodel(mm2)


def test_lookup_params_yields_many_parameter(microlang):
    mm = microlang.product_line.metamodel
    attr = lookup_attribute(mm, "FunctionDefinition", "params")
    assert attr == Attribute("Parameter", Multiplicity.MANY)


def test_lookup_unknown_attribute(microlang):
    mm = microlang.product_line.metamodel
    with pytest.raises(UnknownAttribute):
        lookup_attribute(mm, "FunctionDefinition", "missing")


def test_lookup_on_basic_type(microlang):
    mm = microlang.product_line.metamodel
    with pytest.raises(BasicTypeHasNoAttributes):
        lookup_attribute(mm, "int", "x")


def test_lookup_unknown_type(microlang):
    mm = microlang.product_line.metamodel
    with pytest.raises(UnknownType):
        lookup_attribute(mm, "Deployment", "step")


def test_every_attribute_of_well_defined_metamodel_resolves(microlang, pen):
    for bundle in (microlang, pen):
        mm = bundle.product_line.metamodel
        assert validate_metamodel(mm) == []
        for cname, body in mm.classes.items():
            for aname in body.attributes:
                assert lookup_attribute(mm, cname, aname) is not None
