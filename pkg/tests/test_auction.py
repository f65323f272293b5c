import math
from fractions import Fraction

import pytest

from coalgames import fixpoint
from coalgames.auction import (
    PlayerPattern,
    StopPattern,
    characterize,
    check_features,
    enumerate_patterns,
    make_dollar,
    make_zero_one,
    pattern_to_profile,
)
from coalgames.schema import Affine, Choice, Leaf, SchemaError, Utility, bisimilar, project, validate

L, R = Choice.LEFT, Choice.RIGHT
STOPS = PlayerPattern((), (L,))
CONTINUES = PlayerPattern((), (R,))
AS_BC = StopPattern(STOPS, CONTINUES)
AC_BS = StopPattern(CONTINUES, STOPS)


def concrete_spe(pattern: StopPattern, r: Fraction) -> bool:
    """Check subgame perfection stage by stage with plain numbers.

    Stage k has an A node then a B node; stopping at stage k pays
    (-k, r-k) if A stops and (r-k, -k) if B stops.  Choices are periodic
    after the longer preperiod, so a window of stages covers every case.
    """
    q = max(len(pattern.a.preperiod), len(pattern.b.preperiod))
    p = math.lcm(len(pattern.a.period), len(pattern.b.period))
    horizon = q + 2 * p

    def outcome(stage, mover):
        # mover 0 = A at `stage`, 1 = B at `stage`
        for _ in range(2 * (q + p) + 2):
            pat = pattern.a if mover == 0 else pattern.b
            if pat.choice_at(stage) is L:
                return {"A": -stage, "B": r - stage} if mover == 0 else {"A": r - stage, "B": -stage}
            if mover == 1:
                stage += 1
            mover = 1 - mover
        return None

    for k in range(horizon + 1):
        for mover, agent in ((0, "A"), (1, "B")):
            pat = pattern.a if mover == 0 else pattern.b
            stop = {"A": -k, "B": r - k} if mover == 0 else {"A": r - k, "B": -k}
            cont = outcome(k, 1) if mover == 0 else outcome(k + 1, 0)
            if cont is None:
                return False
            chosen, other = (stop, cont) if pat.choice_at(k) is L else (cont, stop)
            if chosen[agent] < other[agent]:
                return False
    return True


def oracle_characterize(r, q, p):
    return {pat for pat in enumerate_patterns(q, p) if concrete_spe(pat, Fraction(r))}


def test_make_zero_one():
    game, profiles = make_zero_one()
    assert game.root == "G"
    assert sorted(game.nodes) == ["G", "H"]
    assert validate(game).ok and all(validate(p).ok for p in profiles.values())
    assert bisimilar(project(profiles["AsBc"]), game)
    assert bisimilar(project(profiles["AcBs"]), game)
    assert fixpoint.induced_utility(profiles["AcBs"]) == Utility.of({"A": 1, "B": 0})


def test_make_dollar():
    game, profiles = make_dollar(2)
    leaf = game[game["G"].left.var]
    assert isinstance(leaf, Leaf)
    assert leaf.utility["A"] == Affine(0, -1)
    assert game.indexed and game["H"].right.offset == 1
    assert fixpoint.spe(make_dollar(1)[1]["AsBc"])
    assert not fixpoint.spe(make_dollar(Fraction(1, 2))[1]["AsBc"])


@pytest.mark.parametrize("r", [Fraction(1, 2), 1, 2, 5])
def test_b_variable_threshold_for_every_start(r):
    _, profiles = make_dollar(r)
    for start in range(4):
        shifted = profiles["AsBc"].with_root("AsBc", start)
        assert fixpoint.pe(shifted, "BcAs") is (Fraction(r) >= 1)


def test_pattern_profiles_match_named_profiles():
    game, profiles = make_dollar(2)
    as_bc = pattern_to_profile(game, AS_BC)
    assert validate(as_bc).ok
    assert bisimilar(as_bc, profiles["AsBc"])
    assert bisimilar(pattern_to_profile(game, AC_BS), profiles["AcBs"])
    assert bisimilar(project(as_bc), game)


def test_pattern_both_continue_not_convergent():
    game, _ = make_dollar(2)
    profile = pattern_to_profile(game, StopPattern(CONTINUES, CONTINUES))
    assert not fixpoint.strongly_convergent(profile)


def test_pattern_late_stopper_is_not_spe():
    game, _ = make_dollar(2)
    pattern = StopPattern(PlayerPattern((R,), (L,)), CONTINUES)
    assert not fixpoint.spe(pattern_to_profile(game, pattern))
    assert not concrete_spe(pattern, Fraction(2))


def test_pattern_bounds():
    game, _ = make_dollar(2)
    with pytest.raises(SchemaError):
        pattern_to_profile(game, StopPattern(PlayerPattern((R, R, R), (L,)), CONTINUES), max_preperiod=2)
    with pytest.raises(SchemaError):
        characterize(2, 5, 1)
    with pytest.raises(ValueError):
        PlayerPattern((), ())


def test_pattern_variable_count_bound():
    game, _ = make_dollar(2)
    for pattern in enumerate_patterns(2, 3):
        profile = pattern_to_profile(game, pattern)
        a, b = pattern.a.positions, pattern.b.positions
        assert len(profile.nodes) <= 2 * a * b


def test_canonical_patterns():
    assert PlayerPattern((L,), (L, L)).canonical() == STOPS
    assert PlayerPattern((R, L), (R, L)).canonical() == PlayerPattern((), (R, L))
    assert PlayerPattern((R,), (L, R)).canonical() == PlayerPattern((), (R, L))
    for pat in enumerate_patterns(2, 3):
        for player in (pat.a, pat.b):
            canon = player.canonical()
            assert [player.choice_at(k) for k in range(20)] == [canon.choice_at(k) for k in range(20)]


def test_schema_and_concrete_spe_agree_on_patterns():
    for r in (Fraction(1, 2), 1, 2):
        game, _ = make_dollar(r)
        for pattern in enumerate_patterns(2, 2):
            assert fixpoint.spe(pattern_to_profile(game, pattern)) == concrete_spe(pattern, Fraction(r)), (r, str(pattern))


@pytest.mark.parametrize("r", [2, Fraction(3, 2)])
@pytest.mark.parametrize("q, p", [(1, 1), (2, 2), (3, 2)])
def test_characterize_above_one(r, q, p):
    found = characterize(r, q, p)
    assert set(found) == {AS_BC, AC_BS} == oracle_characterize(r, q, p)


def test_characterize_below_one_keeps_only_the_b_stopper():
    # A's check for AcBs is r - n >= -n, true for every r >= 0
    found = characterize(Fraction(1, 2), 2, 2)
    assert set(found) == {AC_BS} == oracle_characterize(Fraction(1, 2), 2, 2)


def test_characterize_at_one_admits_ties():
    # with r = 1, B is indifferent between stopping at n and A stopping at n+1
    found = set(characterize(1, 1, 1))
    assert found == oracle_characterize(1, 1, 1)
    assert {AS_BC, AC_BS} < found
    assert StopPattern(PlayerPattern((R,), (L,)), PlayerPattern((L,), (R,))) in found


def test_escalation_corollary():
    for pattern in characterize(2, 2, 2):
        continuing = [p for p in (pattern.a, pattern.b) if set(p.period) == {R}]
        assert len(continuing) == 1
        stopper = pattern.b if continuing[0] is pattern.a else pattern.a
        assert set(stopper.preperiod) <= {L} and set(stopper.period) == {L}


def test_features_dollar():
    game, _ = make_dollar(1)
    report = check_features(game, strict1=False)
    assert report.feature1 and report.feature2 and not report.strict1
    assert not check_features(make_dollar(-1)[0]).feature1
    assert check_features(make_dollar(Fraction(3, 2))[0], strict1=True).feature1
    assert not check_features(make_dollar(1)[0], strict1=True).feature1


def test_features_improving_payoffs_break_feature_two():
    game, _ = make_dollar(2)
    equations = dict(game.equations)
    equations["v"] = Leaf(Utility.of({"A": Affine(0, 1), "B": Affine(2, 1)}))
    equations["w"] = Leaf(Utility.of({"A": Affine(2, 1), "B": Affine(0, 1)}))
    modified = type(game)(game.agents, game.kind, equations, game.root, True)
    assert not check_features(modified).feature2


def test_features_zero_one_game():
    game, _ = make_zero_one()
    report = check_features(game)
    assert report.feature1 and not report.feature2


def test_features_reject_other_shapes():
    _, profiles = make_zero_one()
    game = project(profiles["AsBc"])
    bad = type(game)(game.agents, game.kind, {**game.equations, "BcAs": game["AsBc"]}, game.root)
    with pytest.raises(SchemaError):
        check_features(bad)


@pytest.mark.parametrize("r", [Fraction(3, 2), 2, 3])
def test_strict_features_imply_two_stationary_patterns(r):
    game, _ = make_dollar(r)
    report = check_features(game, strict1=True)
    assert report.feature1 and report.feature2
    assert set(characterize(r, 2, 2)) == {AS_BC, AC_BS}
