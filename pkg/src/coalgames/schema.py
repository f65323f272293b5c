"""Equation systems for games and strategy profiles.

A system is a finite map from variable names to right-hand sides.  Each
right-hand side is either a :class:`Leaf` carrying a utility vector or a
:class:`Node` owned by an agent with a left and a right successor.  Profile
nodes additionally carry the chosen direction.

Indexed systems describe families ``X_n`` over one natural-number index.
Every reference to a successor carries an offset ``d`` meaning "the same
variable family at index ``n + d``", and every payoff is affine in ``n``.
Leaf variables behave as named constants: they are substituted in place
wherever a node refers to them.
"""

from __future__ import annotations

import enum
import heapq
import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Affine",
    "Choice",
    "EquationSystem",
    "InvalidSystem",
    "Kind",
    "Leaf",
    "Node",
    "SchemaError",
    "UnknownVariable",
    "Utility",
    "ValidationReport",
    "VarRef",
    "as_fraction",
    "bisimilar",
    "project",
    "validate",
]


class SchemaError(Exception):
    """Base class for errors raised on malformed or misused systems."""


class UnknownVariable(SchemaError, KeyError):
    def __str__(self) -> str:
        return f"unresolved variable {self.args[0]}"


class InvalidSystem(SchemaError):
    def __init__(self, report: "ValidationReport"):
        super().__init__("; ".join(report.defects))
        self.report = report


class Choice(enum.Enum):
    LEFT = "l"
    RIGHT = "r"

    @property
    def other(self) -> "Choice":
        return Choice.RIGHT if self is Choice.LEFT else Choice.LEFT

    def __str__(self) -> str:
        return self.value


class Kind(enum.Enum):
    GAME = "game"
    PROFILE = "profile"


def as_fraction(value: Union[int, str, Fraction]) -> Fraction:
    """Coerce ``value`` to a Fraction, rejecting floats and zero denominators."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact rational {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"not a rational literal: {value!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in {value!r}") from None
    raise TypeError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True)
class Affine:
    """The affine function ``n -> const + slope * n`` with exact coefficients."""

    const: Fraction
    slope: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "const", as_fraction(self.const))
        object.__setattr__(self, "slope", as_fraction(self.slope))

    def at(self, n: int) -> Fraction:
        return self.const + self.slope * n

    def shift(self, offset: int) -> "Affine":
        """Re-express in terms of an index that is ``offset`` smaller."""
        if not offset:
            return self
        return Affine(self.const + self.slope * offset, self.slope)

    def ge_everywhere(self, other: "Affine", start: int, strict: bool = False) -> bool:
        """Decide ``self(n) >= other(n)`` (``>`` if strict) for every integer n >= start."""
        return self.violation(other, start, strict) is None

    def violation(self, other: "Affine", start: int, strict: bool = False) -> int | None:
        """Smallest-ish index n >= start where the comparison fails, or None."""
        gap_const = self.const - other.const
        gap_slope = self.slope - other.slope
        holds_at_start = gap_const + gap_slope * start
        if (holds_at_start <= 0) if strict else (holds_at_start < 0):
            return start
        if gap_slope >= 0:
            return None
        # gap is strictly decreasing and crosses zero at `root`
        root = -gap_const / gap_slope
        n = math.ceil(root) if strict else math.floor(root) + 1
        return max(start, n)

    def __str__(self) -> str:
        if self.slope == 0:
            return str(self.const)
        if self.slope == 1:
            term = "n"
        elif self.slope == -1:
            term = "-n"
        else:
            term = f"{self.slope}n"
        if self.const == 0:
            return term
        if term.startswith("-"):
            return f"{self.const} - {term[1:]}"
        return f"{self.const} + {term}"


@dataclass(frozen=True)
class Utility:
    """A payoff for every agent; entries are stored sorted by agent id."""

    entries: tuple[tuple[str, Affine], ...]

    @classmethod
    def of(cls, payoffs: Mapping[str, Union[Affine, int, str, Fraction, tuple]]) -> "Utility":
        items = []
        for agent, value in payoffs.items():
            if isinstance(value, Affine):
                items.append((agent, value))
            elif isinstance(value, tuple):
                items.append((agent, Affine(*value)))
            else:
                items.append((agent, Affine(value)))
        return cls(tuple(sorted(items)))

    def __getitem__(self, agent: str) -> Affine:
        for name, value in self.entries:
            if name == agent:
                return value
        raise KeyError(agent)

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def shift(self, offset: int) -> "Utility":
        if not offset:
            return self
        return Utility(tuple((a, f.shift(offset)) for a, f in self.entries))

    def at(self, n: int) -> dict[str, Fraction]:
        return {a: f.at(n) for a, f in self.entries}

    def __str__(self) -> str:
        return ", ".join(f"{a}: {f}" for a, f in self.entries)


@dataclass(frozen=True)
class VarRef:
    var: str
    offset: int = 0

    def __str__(self) -> str:
        return self.var if not self.offset else f"{self.var}+{self.offset}"


@dataclass(frozen=True)
class Leaf:
    utility: Utility


@dataclass(frozen=True)
class Node:
    agent: str
    left: VarRef
    right: VarRef
    choice: Choice | None = None

    def child(self, direction: Choice) -> VarRef:
        return self.left if direction is Choice.LEFT else self.right

    @property
    def chosen(self) -> VarRef:
        assert self.choice is not None
        return self.child(self.choice)

    @property
    def other(self) -> VarRef:
        assert self.choice is not None
        return self.child(self.choice.other)


Equation = Union[Leaf, Node]


@dataclass(frozen=True, eq=False)
class EquationSystem:
    """A finite corecursive presentation of a game or a strategy profile.

    ``root_index`` is the value of the index at the root variable; it is
    always 0 for unindexed systems.
    """

    agents: tuple[str, ...]
    kind: Kind
    equations: Mapping[str, Equation]
    root: str
    indexed: bool = False
    root_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "equations", dict(self.equations))

    def __getitem__(self, var: str) -> Equation:
        try:
            return self.equations[var]
        except KeyError:
            raise UnknownVariable(var) from None

    def __contains__(self, var: str) -> bool:
        return var in self.equations

    def __len__(self) -> int:
        return len(self.equations)

    @property
    def nodes(self) -> list[str]:
        """Decision variables, i.e. the ones that are not payoff constants."""
        return [x for x, eq in self.equations.items() if isinstance(eq, Node)]

    def with_root(self, var: str, index: int | None = None) -> "EquationSystem":
        self[var]
        return replace(self, root=var, root_index=self.root_index if index is None else index)

    def successors(self, var: str) -> Iterator[tuple[Choice, VarRef]]:
        eq = self[var]
        if isinstance(eq, Node):
            yield Choice.LEFT, eq.left
            yield Choice.RIGHT, eq.right

    def reachable(self, start: str | None = None) -> list[str]:
        """Variables reachable from ``start`` through either child, in BFS order."""
        start = self.root if start is None else start
        self[start]
        seen = {start}
        order = [start]
        queue = deque([start])
        while queue:
            for _, ref in self.successors(queue.popleft()):
                if ref.var not in seen and ref.var in self.equations:
                    seen.add(ref.var)
                    order.append(ref.var)
                    queue.append(ref.var)
        return order

    @cached_property
    def index_floors(self) -> dict[str, int]:
        """Minimum index at which each variable is reached from the root.

        Unreachable variables are assigned the root index.
        """
        floors = {x: self.root_index for x in self.equations}
        if self.root not in self.equations:
            return floors
        dist = {self.root: 0}
        heap = [(0, self.root)]
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist[x]:
                continue
            for _, ref in self.successors(x):
                nd = d + ref.offset
                if ref.var in self.equations and nd < dist.get(ref.var, nd + 1):
                    dist[ref.var] = nd
                    heapq.heappush(heap, (nd, ref.var))
        for x, d in dist.items():
            floors[x] = self.root_index + d
        return floors

    @cached_property
    def report(self) -> "ValidationReport":
        return validate(self)

    def require_valid(self) -> "EquationSystem":
        if not self.report.ok:
            raise InvalidSystem(self.report)
        return self

    def renamed(self, mapping: Mapping[str, str]) -> "EquationSystem":
        """Consistently rename variables; names missing from ``mapping`` are kept."""

        def ref(r: VarRef) -> VarRef:
            return VarRef(mapping.get(r.var, r.var), r.offset)

        equations = {}
        for x, eq in self.equations.items():
            if isinstance(eq, Node):
                eq = replace(eq, left=ref(eq.left), right=ref(eq.right))
            equations[mapping.get(x, x)] = eq
        return replace(self, equations=equations, root=mapping.get(self.root, self.root))

    def normalized(self) -> "EquationSystem":
        """Same family with every payoff pre-shifted so the root index becomes 0."""
        if not self.root_index:
            return self
        shift = self.root_index
        equations = {
            x: Leaf(eq.utility.shift(shift)) if isinstance(eq, Leaf) else eq
            for x, eq in self.equations.items()
        }
        return replace(self, equations=equations, root_index=0)


@dataclass(frozen=True)
class ValidationReport:
    defects: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.defects

    def __bool__(self) -> bool:
        return self.ok


def _utility_defects(var: str, utility: Utility, system: EquationSystem) -> Iterable[str]:
    names = utility.agents
    if len(set(names)) != len(names):
        yield f"{var}: duplicate agent in utility"
    for agent in system.agents:
        if agent not in names:
            yield f"{var}: utility has no entry for agent {agent}"
    for agent in names:
        if agent not in system.agents:
            yield f"{var}: utility names unknown agent {agent}"
    if not system.indexed:
        for agent, f in utility.entries:
            if f.slope != 0:
                yield f"{var}: nonzero slope for agent {agent} in unindexed system"


def validate(system: EquationSystem) -> ValidationReport:
    """Collect every invariant violation of ``system`` as a human-readable defect."""
    defects: list[str] = []
    if not system.agents:
        defects.append("agent set is empty")
    if any(not a for a in system.agents):
        defects.append("empty agent id")
    if len(set(system.agents)) != len(system.agents):
        defects.append("duplicate agent ids")
    if not system.equations:
        defects.append("no equations")
    if system.root not in system.equations:
        defects.append(f"root: unresolved variable {system.root}")
    if system.root_index < 0:
        defects.append("root: negative index")
    if not system.indexed and system.root_index:
        defects.append("root: nonzero index in unindexed system")
    for var, eq in system.equations.items():
        if not var:
            defects.append("empty variable name")
        if isinstance(eq, Leaf):
            defects.extend(_utility_defects(var, eq.utility, system))
            continue
        if not isinstance(eq, Node):
            defects.append(f"{var}: not an equation: {eq!r}")
            continue
        if eq.agent not in system.agents:
            defects.append(f"{var}: unknown agent {eq.agent}")
        if system.kind is Kind.PROFILE and eq.choice is None:
            defects.append(f"{var}: profile node without a choice")
        if system.kind is Kind.GAME and eq.choice is not None:
            defects.append(f"{var}: game node carries a choice")
        for side, ref in (("left", eq.left), ("right", eq.right)):
            if ref.var not in system.equations:
                defects.append(f"{var}.{side}: unresolved variable {ref.var}")
            if ref.offset < 0:
                defects.append(f"{var}.{side}: negative offset")
            elif ref.offset and not system.indexed:
                defects.append(f"{var}.{side}: nonzero offset in unindexed system")
    return ValidationReport(tuple(defects))


def project(profile: EquationSystem) -> EquationSystem:
    """Forget the choices of a profile, giving the underlying game."""
    if profile.kind is not Kind.PROFILE:
        raise SchemaError("project expects a profile system")
    equations = {
        x: replace(eq, choice=None) if isinstance(eq, Node) else eq
        for x, eq in profile.equations.items()
    }
    return replace(profile, kind=Kind.GAME, equations=equations)


def _compatible(a: Equation, b: Equation) -> bool:
    if isinstance(a, Leaf) or isinstance(b, Leaf):
        return isinstance(a, Leaf) and isinstance(b, Leaf) and a.utility == b.utility
    return (
        a.agent == b.agent
        and a.choice == b.choice
        and a.left.offset == b.left.offset
        and a.right.offset == b.right.offset
    )


def bisimilar(a: EquationSystem, b: EquationSystem) -> bool:
    """Decide whether the roots of ``a`` and ``b`` denote the same tree family.

    Both systems are deterministic (one successor per direction), so the
    candidate relation is exactly the set of state pairs reachable in
    lock-step from the roots; the roots are bisimilar iff every such pair is
    locally compatible.  Payoffs are compared as affine forms after moving
    each root index to 0, and successor offsets must agree.
    """
    if a.kind is not b.kind:
        raise SchemaError(f"cannot compare a {a.kind.value} with a {b.kind.value}")
    a, b = a.normalized(), b.normalized()
    start = (a.root, b.root)
    seen = {start}
    stack = [start]
    while stack:
        x, y = stack.pop()
        ex, ey = a[x], b[y]
        if not _compatible(ex, ey):
            return False
        if isinstance(ex, Node):
            for pair in ((ex.left.var, ey.left.var), (ex.right.var, ey.right.var)):
                if pair not in seen:
                    seen.add(pair)
                    stack.append(pair)
    return True
