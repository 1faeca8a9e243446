"""Spec construction, validation, triples, and the file format round-trip."""

import json
from fractions import Fraction as F

import pytest

from linkagekit import catalog
from linkagekit.model import (
    Bar,
    Driver,
    Joint,
    LinkageSpec,
    ParseError,
    Tracer,
    ValidationError,
    collinear_triples,
    load,
    save,
    validate,
)


def test_every_builtin_validates():
    for name in catalog.names():
        report = validate(catalog.builtin(name))
        assert report.ok, [c for c in report.failures]


def test_builtin_bar_lengths_match_committed_table():
    for name, lengths in catalog.EXPECTED_LENGTHS.items():
        spec = catalog.builtin(name)
        assert {b.id: b.length for b in spec.bars} == lengths


def test_unknown_builtin():
    with pytest.raises(catalog.UnknownModelError, match="no_such_linkage"):
        catalog.entry("no_such_linkage")


def test_roundtrip_every_builtin():
    for name in catalog.names():
        spec = catalog.builtin(name)
        assert load(save(spec)) == spec


def test_collinear_triples_hart():
    triples = {t.mid: t for t in collinear_triples(catalog.builtin("hart_inversor"))}
    assert set(triples) == {"O", "P", "Q"}
    assert triples["Q"].t == F(1, 2)
    assert triples["Q"].outer_bar == "bc"


def test_collinear_triples_lambda_off_center():
    (t,) = collinear_triples(catalog.builtin("chebyshev_lambda"))
    assert (t.mid, t.a, t.b) == ("B", "A", "T")
    assert t.t == F(1, 2)


def test_collinear_triples_aframe_quarter_points():
    triples = {t.mid: t for t in collinear_triples(catalog.builtin("hart_aframe"))}
    assert triples["M1"].t == F(3, 4)
    assert triples["M2"].t == F(3, 4)


def _two_bar(length_b=F(4)):
    return LinkageSpec(
        name="toy",
        joints=(Joint("A", (F(0), F(0))), Joint("B", (F(6), F(0))), Joint("P", None)),
        bars=(Bar("u", "A", "P", F(4)), Bar("v", "B", "P", length_b)),
        driver=Driver("u"),
        tracer=Tracer(joint="P"),
    )


def test_validate_flags_missing_mobility():
    report = validate(_two_bar())
    assert not report.ok
    assert "one-dof" in {c.name for c in report.failures}


def _mangled(mutate):
    doc = json.loads(save(catalog.builtin("compass")))
    mutate(doc)
    return json.dumps(doc)


def test_parse_error_not_json():
    with pytest.raises(ParseError, match="not valid JSON"):
        load("{nope")


def test_parse_error_missing_driver():
    def drop(doc):
        del doc["driver"]

    with pytest.raises(ParseError, match="driver"):
        load(_mangled(drop))


def test_negative_length_rejected():
    def poison(doc):
        doc["bars"][0]["length"] = [-3, 1]

    with pytest.raises((ParseError, ValidationError)):
        load(_mangled(poison))


def test_duplicate_joint_id_rejected():
    def clash(doc):
        doc["joints"][1]["id"] = "O"

    with pytest.raises((ParseError, ValidationError)):
        load(_mangled(clash))


def test_save_uses_exact_rationals():
    assert "." not in save(catalog.builtin("chebyshev_lambda"))
