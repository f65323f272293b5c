"""The 0/1 game, the dollar auction, and stop/continue profile families.

Throughout, ``l`` means *stop* (take the payoff leaf) and ``r`` means
*continue* (hand the move to the other player).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import fixpoint
from .schema import (
    Affine,
    Choice,
    EquationSystem,
    Kind,
    Leaf,
    Node,
    SchemaError,
    Utility,
    VarRef,
    as_fraction,
    bisimilar,
)

__all__ = [
    "FeatureReport",
    "PlayerPattern",
    "StopPattern",
    "alternating_shape",
    "characterize",
    "check_features",
    "enumerate_patterns",
    "make_dollar",
    "make_zero_one",
    "pattern_to_profile",
]

STOP, CONTINUE = Choice.LEFT, Choice.RIGHT
MAX_BOUND = 4


def _profile_pair(
    first: str, second: str, c1: Choice, c2: Choice, names: tuple[str, str], leaves: dict, indexed: bool
) -> EquationSystem:
    x, y = names
    equations = {
        x: Node("A", VarRef("v"), VarRef(y), c1),
        y: Node("B", VarRef("w"), VarRef(x, 1 if indexed else 0), c2),
        **leaves,
    }
    return EquationSystem(("A", "B"), Kind.PROFILE, equations, first, indexed=indexed)


def _build(v: Utility, w: Utility, indexed: bool) -> tuple[EquationSystem, dict[str, EquationSystem]]:
    leaves = {"v": Leaf(v), "w": Leaf(w)}
    game = EquationSystem(
        ("A", "B"),
        Kind.GAME,
        {
            "G": Node("A", VarRef("v"), VarRef("H")),
            "H": Node("B", VarRef("w"), VarRef("G", 1 if indexed else 0)),
            **leaves,
        },
        "G",
        indexed=indexed,
    )
    as_bc = _profile_pair("AsBc", "BcAs", STOP, CONTINUE, ("AsBc", "BcAs"), leaves, indexed)
    ac_bs = _profile_pair("AcBs", "BsAc", CONTINUE, STOP, ("AcBs", "BsAc"), leaves, indexed)
    profiles = {
        "AsBc": as_bc,
        "BcAs": as_bc.with_root("BcAs"),
        "AcBs": ac_bs,
        "BsAc": ac_bs.with_root("BsAc"),
    }
    return game, profiles


def make_zero_one() -> tuple[EquationSystem, dict[str, EquationSystem]]:
    """The 0/1 game: whoever stops first gets 0, the other gets 1."""
    v = Utility.of({"A": 0, "B": 1})
    w = Utility.of({"A": 1, "B": 0})
    return _build(v, w, indexed=False)


def make_dollar(r: Fraction | int | str) -> tuple[EquationSystem, dict[str, EquationSystem]]:
    """The dollar auction with prize ``r``; stopping at stage n costs the stopper n."""
    r = as_fraction(r)
    v = Utility.of({"A": Affine(0, -1), "B": Affine(r, -1)})
    w = Utility.of({"A": Affine(r, -1), "B": Affine(0, -1)})
    return _build(v, w, indexed=True)


@dataclass(frozen=True)
class PlayerPattern:
    """Choice at a player's k-th decision: ``preperiod[k]``, then ``period`` repeated."""

    preperiod: tuple[Choice, ...] = ()
    period: tuple[Choice, ...] = (STOP,)

    def __post_init__(self):
        object.__setattr__(self, "preperiod", _choices(self.preperiod))
        object.__setattr__(self, "period", _choices(self.period))
        if not self.period:
            raise ValueError("period must be nonempty")

    @property
    def positions(self) -> int:
        return len(self.preperiod) + len(self.period)

    def choice_at(self, k: int) -> Choice:
        q = len(self.preperiod)
        return self.preperiod[k] if k < q else self.period[(k - q) % len(self.period)]

    def choice_at_position(self, pos: int) -> Choice:
        q = len(self.preperiod)
        return self.preperiod[pos] if pos < q else self.period[pos - q]

    def next_position(self, pos: int) -> int:
        return pos + 1 if pos + 1 < self.positions else len(self.preperiod)

    def canonical(self) -> "PlayerPattern":
        """Shortest description of the same choice sequence."""
        period = self.period
        for size in range(1, len(period) + 1):
            if len(period) % size == 0 and period == period[:size] * (len(period) // size):
                period = period[:size]
                break
        pre = self.preperiod
        while pre and pre[-1] is period[-1]:
            pre = pre[:-1]
            period = period[-1:] + period[:-1]
        return PlayerPattern(pre, period)

    def __str__(self) -> str:
        pre = "".join(c.value for c in self.preperiod)
        return f"{pre}({''.join(c.value for c in self.period)})"


def _choices(values: Sequence) -> tuple[Choice, ...]:
    return tuple(c if isinstance(c, Choice) else Choice(c) for c in values)


@dataclass(frozen=True)
class StopPattern:
    a: PlayerPattern
    b: PlayerPattern

    def canonical(self) -> "StopPattern":
        return StopPattern(self.a.canonical(), self.b.canonical())

    def __str__(self) -> str:
        return f"A:{self.a} B:{self.b}"

    def as_dict(self) -> dict:
        return {
            player: {
                "preperiod": [c.value for c in p.preperiod],
                "period": [c.value for c in p.period],
            }
            for player, p in (("A", self.a), ("B", self.b))
        }


@dataclass(frozen=True)
class _Shape:
    first: str
    second: str
    first_agent: str
    second_agent: str
    first_leaf: VarRef
    second_leaf: VarRef
    to_second: int
    to_first: int


def alternating_shape(game: EquationSystem) -> _Shape:
    """Recognise a two-variable alternating stop/continue game, or raise SchemaError."""
    game.require_valid()
    x = game.root
    ex = game[x]
    if not isinstance(ex, Node):
        raise SchemaError("root is not a decision")
    y = ex.right.var
    ey = game[y]
    if not isinstance(ey, Node) or ey.right.var != x or y == x:
        raise SchemaError("continuing must alternate between two decision variables")
    if ex.agent == ey.agent:
        raise SchemaError("the two decision variables must belong to different players")
    for eq in (ex, ey):
        if not isinstance(game[eq.left.var], Leaf):
            raise SchemaError("stopping must lead to a payoff")
    return _Shape(x, y, ex.agent, ey.agent, ex.left, ey.left, ex.right.offset, ey.right.offset)


def pattern_to_profile(
    game: EquationSystem,
    pattern: StopPattern,
    max_preperiod: int | None = None,
    max_period: int | None = None,
) -> EquationSystem:
    """Profile on ``game`` where each player follows their eventually periodic pattern.

    Variables are named ``<agent><i>_<j>`` with ``i``, ``j`` the positions
    inside the first and second mover's patterns.
    """
    for p in (pattern.a, pattern.b):
        if max_preperiod is not None and len(p.preperiod) > max_preperiod:
            raise SchemaError(f"preperiod longer than {max_preperiod}")
        if max_period is not None and len(p.period) > max_period:
            raise SchemaError(f"period longer than {max_period}")
    shape = alternating_shape(game)
    by_agent = {"A": pattern.a, "B": pattern.b}
    try:
        first_pat, second_pat = by_agent[shape.first_agent], by_agent[shape.second_agent]
    except KeyError:
        raise SchemaError("patterns are defined for players A and B") from None

    def name(agent: str, i: int, j: int) -> str:
        return f"{agent}{i}_{j}"

    equations: dict = {
        shape.first_leaf.var: game[shape.first_leaf.var],
        shape.second_leaf.var: game[shape.second_leaf.var],
    }
    i = j = 0
    while name(shape.first_agent, i, j) not in equations:
        nxt_i, nxt_j = first_pat.next_position(i), second_pat.next_position(j)
        equations[name(shape.first_agent, i, j)] = Node(
            shape.first_agent,
            shape.first_leaf,
            VarRef(name(shape.second_agent, i, j), shape.to_second),
            first_pat.choice_at_position(i),
        )
        equations[name(shape.second_agent, i, j)] = Node(
            shape.second_agent,
            shape.second_leaf,
            VarRef(name(shape.first_agent, nxt_i, nxt_j), shape.to_first),
            second_pat.choice_at_position(j),
        )
        i, j = nxt_i, nxt_j
    return EquationSystem(
        game.agents,
        Kind.PROFILE,
        equations,
        name(shape.first_agent, 0, 0),
        indexed=game.indexed,
        root_index=game.root_index,
    )


def _player_patterns(q: int, p: int) -> list[PlayerPattern]:
    seen = {}
    for pre_len in range(q + 1):
        for per_len in range(1, p + 1):
            for pre in itertools.product((STOP, CONTINUE), repeat=pre_len):
                for per in itertools.product((STOP, CONTINUE), repeat=per_len):
                    canon = PlayerPattern(pre, per).canonical()
                    seen.setdefault(canon, None)
    return list(seen)


def enumerate_patterns(q: int, p: int) -> Iterator[StopPattern]:
    """Every distinct pattern pair with preperiods up to ``q`` and periods up to ``p``."""
    players = _player_patterns(q, p)
    for a in players:
        for b in players:
            yield StopPattern(a, b)


def characterize(r: Fraction | int | str, q: int = 2, p: int = 2) -> list[StopPattern]:
    """All subgame perfect pattern profiles of the dollar auction with prize ``r``.

    Results are deduplicated by bisimilarity of the induced profiles.
    """
    if not (1 <= q <= MAX_BOUND and 1 <= p <= MAX_BOUND):
        raise SchemaError(f"bounds must lie in 1..{MAX_BOUND}")
    game, _ = make_dollar(r)
    classes: list[tuple[StopPattern, EquationSystem]] = []
    for pattern in enumerate_patterns(q, p):
        profile = pattern_to_profile(game, pattern)
        if not fixpoint.spe(profile):
            continue
        if not any(bisimilar(profile, other) for _, other in classes):
            classes.append((pattern, profile))
    return [pattern for pattern, _ in classes]


@dataclass(frozen=True)
class FeatureReport:
    feature1: bool
    feature2: bool
    strict1: bool

    def as_dict(self) -> dict:
        return {"feature1": self.feature1, "feature2": self.feature2, "strict1": self.strict1}


def check_features(game: EquationSystem, strict1: bool = False) -> FeatureReport:
    """Decide the two structural features behind the escalation characterization.

    1. Each mover does at least as well (better, if ``strict1``) when the
       other player stops at the next node as when stopping now.
    2. Each mover strictly prefers stopping now to stopping at their own
       next decision.

    Both are affine inequalities decided for every index n >= 0.
    """
    s = alternating_shape(game)
    leaf_x = game[s.first_leaf.var].utility.shift(s.first_leaf.offset)
    leaf_y = game[s.second_leaf.var].utility.shift(s.second_leaf.offset)
    cycle = s.to_second + s.to_first
    # (mover, stop-now payoff, other-stops-next payoff, my-next-stop payoff), index of the mover's node
    checks = [
        (s.first_agent, leaf_x, leaf_y.shift(s.to_second), leaf_x.shift(cycle)),
        (s.second_agent, leaf_y, leaf_x.shift(s.to_first), leaf_y.shift(cycle)),
    ]
    feature1 = feature2 = True
    for agent, now, other_next, mine_later in checks:
        feature1 &= other_next[agent].ge_everywhere(now[agent], 0, strict=strict1)
        feature2 &= now[agent].ge_everywhere(mine_later[agent], 0, strict=True)
    return FeatureReport(feature1, feature2, strict1)
