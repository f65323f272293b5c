"""Predicate coinduction as a checker.

To show that a local property ``phi`` holds at every subtree of every
``[[x]]``, it suffices to find a depth ``k`` such that ``phi`` holds on the
depth-``k`` unfolding of each variable no matter what the unknown frontier
turns out to be.  Unfoldings are evaluated in strong Kleene logic with the
frontier as UNKNOWN, so a TRUE verdict is a verdict for every frontier.

Certifying WC or SC checks WC on the unfoldings and concludes SC; certifying
PE or SPE checks PE and concludes SPE.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

from .schema import Affine, EquationSystem, Kind, Leaf, SchemaError, Utility, VarRef
from .unfold import PartialTree, TreeLeaf, TreeNode, Unknown

__all__ = [
    "Certificate",
    "ThreeValued",
    "certify",
    "eval3",
    "minimal_depth",
]


class ThreeValued(enum.Enum):
    FALSE = 0
    UNKNOWN = 1
    TRUE = 2

    @classmethod
    def of(cls, value: bool) -> "ThreeValued":
        return cls.TRUE if value else cls.FALSE

    def __and__(self, other: "ThreeValued") -> "ThreeValued":
        return ThreeValued(min(self.value, other.value))

    def __or__(self, other: "ThreeValued") -> "ThreeValued":
        return ThreeValued(max(self.value, other.value))

    def __invert__(self) -> "ThreeValued":
        return ThreeValued(2 - self.value)

    def implies(self, other: "ThreeValued") -> "ThreeValued":
        return ~self | other

    @classmethod
    def all(cls, values: Iterable["ThreeValued"]) -> "ThreeValued":
        result = cls.TRUE
        for v in values:
            result &= v
            if result is cls.FALSE:
                break
        return result

    @property
    def known(self) -> bool:
        return self is not ThreeValued.UNKNOWN

    def __str__(self) -> str:
        return self.name.capitalize()


T, F, U = ThreeValued.TRUE, ThreeValued.FALSE, ThreeValued.UNKNOWN

# predicate checked on unfoldings -> the property it certifies everywhere
_BASE = {"WC": "WC", "SC": "WC", "PE": "PE", "SPE": "PE"}
_CONCLUSION = {"WC": "SC", "PE": "SPE"}


def _induced(tree: PartialTree) -> Utility | None:
    while isinstance(tree, TreeNode):
        tree = tree.child(tree.choice)
    return tree.utility if isinstance(tree, TreeLeaf) else None


def _wc(tree: PartialTree) -> ThreeValued:
    return U if _induced(tree) is None else T


def _pe(tree: PartialTree, floor: int) -> ThreeValued:
    if isinstance(tree, Unknown):
        return U
    if isinstance(tree, TreeLeaf):
        return T
    chosen = _induced(tree.child(tree.choice))
    other = _induced(tree.child(tree.choice.other))
    if chosen is None or other is None:
        return U
    mine: Affine = chosen[tree.agent]
    theirs: Affine = other[tree.agent]
    # payoffs are in the unfolding root's index; this node sits at_offset deeper
    return ThreeValued.of(mine.ge_everywhere(theirs, floor))


def eval3(tree: PartialTree, predicate: str, index_floor: int = 0) -> ThreeValued:
    """Evaluate a predicate on a partial tree in strong Kleene logic.

    ``index_floor`` is the least index the unfolding's root can take; affine
    payoff comparisons are decided for every index from there on.
    """
    name = predicate.upper()
    if name == "WC":
        return _wc(tree)
    if name == "PE":
        return _pe(tree, index_floor)
    if name in ("SC", "SPE"):
        local = _wc if name == "SC" else (lambda t: _pe(t, index_floor))
        return _everywhere(tree, local, {})
    raise ValueError(f"unknown predicate {predicate!r}")


def _everywhere(tree: PartialTree, local, memo: dict[int, ThreeValued]) -> ThreeValued:
    # unfoldings share equal subtrees, so memoise on identity
    hit = memo.get(id(tree))
    if hit is not None:
        return hit
    if isinstance(tree, Unknown):
        value = U
    else:
        value = local(tree)
        if isinstance(tree, TreeNode) and value is not F:
            value &= _everywhere(tree.left, local, memo)
            if value is not F:
                value &= _everywhere(tree.right, local, memo)
    memo[id(tree)] = value
    return value


def _walk(system: EquationSystem, ref: VarRef, k: int) -> Utility | None:
    """Induced utility of the unfolding below a child reference, without building it.

    Mirrors :func:`unfold`: payoff constants are free, each decision costs one
    unit of ``k``, and running out means the frontier was reached.
    """
    offset = ref.offset
    var = ref.var
    while True:
        eq = system[var]
        if isinstance(eq, Leaf):
            return eq.utility.shift(offset)
        if k == 0:
            return None
        k -= 1
        offset += eq.chosen.offset
        var = eq.chosen.var


def _root_verdict(system: EquationSystem, var: str, base: str, k: int, floor: int) -> ThreeValued:
    """``eval3(unfold(system, var, k), base, floor)`` for WC or PE, computed lazily."""
    eq = system[var]
    if base == "WC":
        return U if _walk(system, VarRef(var), k) is None else T
    if isinstance(eq, Leaf):
        return T
    # a child reference sits one decision below the root
    chosen = _walk(system, eq.chosen, k - 1)
    other = _walk(system, eq.other, k - 1)
    if chosen is None or other is None:
        return U
    return ThreeValued.of(chosen[eq.agent].ge_everywhere(other[eq.agent], floor))


@dataclass(frozen=True)
class Certificate:
    predicate: str
    depth: int
    per_variable: dict[str, ThreeValued] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return all(v is T for v in self.per_variable.values())

    @property
    def conclusion(self) -> str:
        """The property established at every ``[[x]]`` when certified."""
        return _CONCLUSION[_BASE[self.predicate]]

    @property
    def verdict(self) -> str:
        return "Certified" if self.certified else "NotCertified"

    @property
    def reason(self) -> tuple[str, ThreeValued] | None:
        """First variable (in equation order) that blocks certification."""
        for var, value in self.per_variable.items():
            if value is not T:
                return var, value
        return None


def certify(system: EquationSystem, predicate: str, k: int) -> Certificate:
    """Try to establish the boxed predicate for every variable at depth ``k``."""
    name = predicate.upper()
    if name not in _BASE:
        raise ValueError(f"unknown predicate {predicate!r}")
    if system.kind is not Kind.PROFILE:
        raise SchemaError("expected a profile system")
    if k < 1:
        raise ValueError("depth must be at least 1")
    system.require_valid()
    base = _BASE[name]
    floors = system.index_floors
    per_variable = {x: _root_verdict(system, x, base, k, floors[x]) for x in system.equations}
    return Certificate(name, k, per_variable)


def minimal_depth(system: EquationSystem, predicate: str, k_max: int = 16) -> int | None:
    for k in range(1, k_max + 1):
        if certify(system, predicate, k).certified:
            return k
    return None
