from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coalgames import fixpoint
from coalgames.auction import make_dollar, make_zero_one
from coalgames.deviation import (
    DeviationPath,
    DivergentComparison,
    NotStronglyConvergent,
    dominates,
    enumerate_deviations,
    one_deviation_principle,
)
from coalgames.schema import Choice, EquationSystem, Kind, Leaf, Node, Utility, VarRef
from coalgames.unfold import TreeNode, iter_nodes, unfold

from corpus import random_system

L, R = Choice.LEFT, Choice.RIGHT
V = Utility.of({"A": 0, "B": 1})
W = Utility.of({"A": 1, "B": 0})


def both_continue():
    return EquationSystem(
        ("A", "B"),
        Kind.PROFILE,
        {
            "Ac": Node("A", VarRef("v"), VarRef("Bc"), R),
            "Bc": Node("B", VarRef("w"), VarRef("Ac"), R),
            "v": Leaf(V),
            "w": Leaf(W),
        },
        "Ac",
    )


def sc_systems():
    return st.builds(random_system, st.randoms(use_true_random=False)).filter(fixpoint.strongly_convergent)


def test_enumerate_zero_one():
    _, profiles = make_zero_one()
    found = enumerate_deviations(profiles["AsBc"], 3)
    assert [d.address for d in found] == [(), (R,), (R, R)]
    assert [(d.original, d.flipped) for d in found] == [(L, R), (R, L), (L, R)]


def test_enumerate_leaf_and_dollar():
    leaf = EquationSystem(("A", "B"), Kind.PROFILE, {"S": Leaf(V)}, "S")
    assert enumerate_deviations(leaf, 5) == []
    _, profiles = make_dollar(2)
    assert [d.address for d in enumerate_deviations(profiles["AsBc"], 2)] == [(), (R,)]


@settings(max_examples=150, deadline=None)
@given(st.builds(random_system, st.randoms(use_true_random=False)), st.integers(min_value=1, max_value=7))
def test_enumeration_counts_decision_positions(system, depth):
    tree = unfold(system, None, depth)
    decisions = [address for address, t in iter_nodes(tree) if isinstance(t, TreeNode)]
    found = enumerate_deviations(system, depth)

    def key(address):
        return "".join(c.value for c in address)

    assert sorted(map(key, (d.address for d in found))) == sorted(map(key, decisions))
    assert found == enumerate_deviations(system, depth + 1)[: len(found)]
    keys = [(len(d.address), [c.value for c in d.address]) for d in found]
    assert keys == sorted(keys)


def test_dominance_examples():
    _, zo = make_zero_one()
    assert dominates(zo["AsBc"], DeviationPath((), L, R))
    assert dominates(zo["AsBc"], DeviationPath((R,), R, L))
    _, dollar = make_dollar(Fraction(1, 2))
    assert not dominates(dollar["AsBc"], DeviationPath((R,), R, L))
    _, dollar = make_dollar(1)
    assert dominates(dollar["AsBc"], DeviationPath((R,), R, L))


def test_dominance_errors():
    with pytest.raises(DivergentComparison):
        dominates(both_continue(), DeviationPath((), R, L))
    _, zo = make_zero_one()
    with pytest.raises(ValueError):
        DeviationPath((), L, L)


def test_principle_examples():
    _, zo = make_zero_one()
    report = one_deviation_principle(zo["AsBc"])
    assert (report.spe, report.all_dominated, report.agree) == (True, True, True)
    assert report.witness is None

    game, dollar = make_dollar(Fraction(1, 2))
    report = one_deviation_principle(dollar["AsBc"])
    assert (report.spe, report.all_dominated, report.agree) == (False, False, True)
    assert report.witness_var == "BcAs"
    assert dollar["AsBc"]["BcAs"].agent == "B"

    with pytest.raises(NotStronglyConvergent) as info:
        one_deviation_principle(both_continue())
    assert info.value.var == "Ac"


@settings(max_examples=200, deadline=None)
@given(sc_systems())
def test_principle_three_routes_agree(system):
    report = one_deviation_principle(system)
    enumerated = all(dominates(system, d) for d in enumerate_deviations(system, 2 * len(system)))
    assert report.spe == enumerated == report.all_dominated


@settings(max_examples=200, deadline=None)
@given(sc_systems(), st.integers(min_value=1, max_value=6))
def test_dominance_is_pe_at_the_landing_variable(system, depth):
    for d in enumerate_deviations(system, depth):
        var = system.root
        for step in d.address:
            var = system[var].child(step).var
        assert dominates(system, d) == fixpoint.pe(system, var)
