import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coalgames import fixpoint
from coalgames.auction import make_dollar, make_zero_one
from coalgames.document import DocumentError, bundled, dumps, load, loads, parse, to_document
from coalgames.schema import Affine, Kind, bisimilar, validate

from corpus import random_system

systems = st.builds(random_system, st.randoms(use_true_random=False))


def zero_one_doc():
    return {
        "agents": ["A", "B"],
        "kind": "profile",
        "root": {"var": "AsBc"},
        "variables": {
            "AsBc": {"agent": "A", "choice": "l", "left": {"var": "v", "offset": 0}, "right": {"var": "BcAs", "offset": 0}},
            "BcAs": {"agent": "B", "choice": "r", "left": {"var": "w", "offset": 0}, "right": {"var": "AsBc", "offset": 0}},
            "v": {"leaf": {"A": {"const": "0", "slope": "0"}, "B": {"const": 1, "slope": 0}}},
            "w": {"leaf": {"A": {"const": "1", "slope": "0"}, "B": {"const": "0", "slope": "0"}}},
        },
    }


def test_parse_zero_one():
    system = parse(zero_one_doc())
    assert system.kind is Kind.PROFILE and not system.indexed
    assert bisimilar(system, make_zero_one()[1]["AsBc"])


@settings(max_examples=200, deadline=None)
@given(systems)
def test_round_trip_is_bisimilar(system):
    again = loads(dumps(system))
    assert bisimilar(again, system)
    assert dumps(again) == dumps(system)


def test_round_trip_games_and_dollar():
    game, profiles = make_dollar(Fraction(7, 3))
    for system in (game, *profiles.values()):
        assert bisimilar(parse(json.loads(dumps(system))), system)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(extra=1),
        lambda d: d["root"].update(where="x"),
        lambda d: d["variables"]["AsBc"].update(colour="red"),
        lambda d: d["variables"]["v"]["leaf"]["A"].update(curve=1),
    ],
)
def test_unknown_fields_rejected(mutate):
    doc = zero_one_doc()
    mutate(doc)
    with pytest.raises(DocumentError, match="unknown field"):
        parse(doc)


@pytest.mark.parametrize("bad", ["1/0", "0.5", 0.5, "x/2", True])
def test_bad_rationals_rejected(bad):
    doc = zero_one_doc()
    doc["variables"]["v"]["leaf"]["A"]["const"] = bad
    with pytest.raises(DocumentError):
        parse(doc)


def test_structural_errors():
    doc = zero_one_doc()
    doc["kind"] = "tournament"
    with pytest.raises(DocumentError):
        parse(doc)
    doc = zero_one_doc()
    doc["variables"]["AsBc"]["choice"] = "up"
    with pytest.raises(DocumentError):
        parse(doc)
    doc = zero_one_doc()
    doc["variables"]["AsBc"]["left"]["offset"] = -1
    with pytest.raises(DocumentError):
        parse(doc)
    with pytest.raises(DocumentError):
        loads("{not json")


def test_dangling_variable_parses_but_fails_validation():
    doc = zero_one_doc()
    doc["variables"]["AsBc"]["right"]["var"] = "Z"
    report = validate(parse(doc))
    assert not report.ok
    assert any("Z" in d for d in report.defects)


def test_parameters_and_overrides():
    system = load("@dollar_asbc")
    assert system["v"].utility["B"] == Affine(2, -1)
    half = load("@dollar_asbc", {"r": "1/2"})
    assert half["v"].utility["B"] == Affine(Fraction(1, 2), -1)
    assert half["w"].utility["A"] == Affine(Fraction(1, 2), -1)
    assert not fixpoint.spe(half)
    with pytest.raises(DocumentError):
        load("@dollar_asbc", {"q": "1"})
    with pytest.raises(DocumentError):
        load("@dollar_asbc", {"r": "1/0"})


def test_negated_parameter():
    doc = json.loads(bundled("dollar_asbc"))
    doc["variables"]["v"]["leaf"]["A"]["const"] = "-r"
    system = parse(doc, {"r": "3"})
    assert system["v"].utility["A"] == Affine(-3, -1)


def test_bundled_files_match_constructors():
    _, zo = make_zero_one()
    assert bisimilar(load("@zero_one_asbc"), zo["AsBc"])
    assert bisimilar(load("@zero_one_acbs"), zo["AcBs"])
    for r in ("1/2", "2", "10"):
        game, dollar = make_dollar(Fraction(r))
        assert bisimilar(load("@dollar_asbc", {"r": r}), dollar["AsBc"])
        assert bisimilar(load("@dollar_acbs", {"r": r}), dollar["AcBs"])
        assert bisimilar(load("@dollar_game", {"r": r}), game)
    with pytest.raises(DocumentError):
        load("@nope")


def test_load_missing_file(tmp_path):
    with pytest.raises(DocumentError):
        load(tmp_path / "absent.json")


def test_to_document_uses_strings():
    doc = to_document(make_dollar(Fraction(1, 3))[1]["AsBc"])
    assert doc["variables"]["v"]["leaf"]["B"] == {"const": "1/3", "slope": "-1"}
