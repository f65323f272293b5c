"""One-deviations and the one-deviation principle.

A one-deviation of a profile flips the choice at exactly one position of
the (unfolded) tree.  Positions are addressed by the list of directions
taken from the root.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import fixpoint
from .schema import Choice, EquationSystem, Kind, Leaf, Node, SchemaError

__all__ = [
    "DeviationPath",
    "DivergentComparison",
    "NotStronglyConvergent",
    "PrincipleReport",
    "dominates",
    "enumerate_deviations",
    "one_deviation_principle",
]


class DivergentComparison(SchemaError):
    """A payoff comparison needs the induced utility of a divergent subprofile."""


class NotStronglyConvergent(SchemaError):
    def __init__(self, var: str):
        super().__init__(f"profile is not strongly convergent: play from {var} never ends")
        self.var = var


@dataclass(frozen=True)
class DeviationPath:
    address: tuple[Choice, ...]
    original: Choice
    flipped: Choice

    def __post_init__(self):
        object.__setattr__(self, "address", tuple(self.address))
        if self.original is self.flipped:
            raise ValueError("a deviation must change the choice")

    def __str__(self) -> str:
        where = "".join(c.value for c in self.address) or "root"
        return f"{where}: {self.original}->{self.flipped}"

    def as_dict(self) -> dict:
        return {
            "address": [c.value for c in self.address],
            "original": self.original.value,
            "flipped": self.flipped.value,
        }


def _profile(system: EquationSystem) -> EquationSystem:
    if system.kind is not Kind.PROFILE:
        raise SchemaError("expected a profile system")
    return system.require_valid()


def enumerate_deviations(system: EquationSystem, depth: int) -> list[DeviationPath]:
    """One deviation per decision position at address length < ``depth``.

    Ordered by address length, then lexicographically with l before r.
    """
    _profile(system)
    found = []
    layer = [((), system.root)]
    for _ in range(depth):
        following = []
        for address, var in layer:
            eq = system[var]
            if isinstance(eq, Leaf):
                continue
            found.append(DeviationPath(address, eq.choice, eq.choice.other))
            following.append((address + (Choice.LEFT,), eq.left.var))
            following.append((address + (Choice.RIGHT,), eq.right.var))
        layer = following
    return found


def _resolve(system: EquationSystem, address: tuple[Choice, ...]) -> str:
    var = system.root
    for step in address:
        eq = system[var]
        if not isinstance(eq, Node):
            raise SchemaError(f"address {''.join(c.value for c in address)} passes through a payoff")
        var = eq.child(step).var
    return var


def _realised(system: EquationSystem, var: str):
    # walk the play from var, accumulating offsets; independent of fixpoint's tables
    total = 0
    seen = set()
    while True:
        eq = system[var]
        if isinstance(eq, Leaf):
            return eq.utility.shift(total)
        if var in seen:
            return None
        seen.add(var)
        total += eq.chosen.offset
        var = eq.chosen.var


def dominates(system: EquationSystem, d: DeviationPath) -> bool:
    """Whether the profile is at least as good as its deviation ``d`` for the mover.

    The comparison is made at the deviation position, for every index the
    variable found there can take.
    """
    _profile(system)
    var = _resolve(system, d.address)
    eq = system[var]
    if not isinstance(eq, Node):
        raise SchemaError(f"no decision at {d}")
    if eq.choice is not d.original:
        raise SchemaError(f"deviation {d} does not match the profile's choice {eq.choice}")
    kept, flipped = eq.child(d.original), eq.child(d.flipped)
    u_kept, u_flipped = _realised(system, kept.var), _realised(system, flipped.var)
    if u_kept is None or u_flipped is None:
        raise DivergentComparison(f"induced utility undefined below {var} for deviation {d}")
    mine = u_kept.shift(kept.offset)[eq.agent]
    theirs = u_flipped.shift(flipped.offset)[eq.agent]
    return mine.ge_everywhere(theirs, system.index_floors[var])


@dataclass(frozen=True)
class PrincipleReport:
    spe: bool
    all_dominated: bool
    witness: DeviationPath | None
    witness_var: str | None = None

    @property
    def agree(self) -> bool:
        return self.spe == self.all_dominated

    def as_dict(self) -> dict:
        return {
            "spe": self.spe,
            "all_dominated": self.all_dominated,
            "agree": self.agree,
            "witness": None if self.witness is None else self.witness.as_dict(),
            "witness_var": self.witness_var,
        }


def _shortest_addresses(system: EquationSystem) -> dict[str, tuple[Choice, ...]]:
    addresses = {system.root: ()}
    queue = deque([system.root])
    while queue:
        var = queue.popleft()
        for direction, ref in system.successors(var):
            if ref.var not in addresses:
                addresses[ref.var] = addresses[var] + (direction,)
                queue.append(ref.var)
    return addresses


def first_divergent(system: EquationSystem) -> str | None:
    """A reachable variable whose play never ends, if there is one."""
    for var in system.reachable():
        if not fixpoint.weakly_convergent(system, var):
            return var
    return None


def one_deviation_principle(system: EquationSystem) -> PrincipleReport:
    """Check SPE against dominance over all one-deviations.

    A deviation landing on a variable compares the same affine payoffs as
    any other deviation landing there, so one root flip per reachable
    decision variable covers every one-deviation of the infinite tree.
    """
    _profile(system)
    bad = first_divergent(system)
    if bad is not None:
        raise NotStronglyConvergent(bad)
    witness = witness_var = None
    for var, address in _shortest_addresses(system).items():
        eq = system[var]
        if isinstance(eq, Leaf):
            continue
        d = DeviationPath(address, eq.choice, eq.choice.other)
        if not dominates(system, d):
            witness, witness_var = d, var
            break
    return PrincipleReport(fixpoint.spe(system), witness is None, witness, witness_var)
