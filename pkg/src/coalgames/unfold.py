"""Finite unfoldings of equation systems.

``unfold(system, x, k)`` substitutes the equations into themselves ``k``
times starting from ``x``.  Whatever is still a variable after that is
replaced by :data:`UNKNOWN`: it stands for an arbitrary, unconstrained
subtree.  Payoff constants are substituted immediately and never consume
depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .schema import Choice, EquationSystem, Leaf, Node, Utility, VarRef

__all__ = [
    "UNKNOWN",
    "PartialTree",
    "TreeLeaf",
    "TreeNode",
    "Unknown",
    "forget_choices",
    "to_dot",
    "unfold",
]


class Unknown:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "?"


UNKNOWN = Unknown()


@dataclass(frozen=True)
class TreeLeaf:
    """Payoff leaf; ``utility`` is already expressed in the tree root's index."""

    utility: Utility
    at_offset: int = 0

    def __repr__(self) -> str:
        return f"[{self.utility}]"


@dataclass(frozen=True)
class TreeNode:
    agent: str
    choice: Choice | None
    left: "PartialTree"
    right: "PartialTree"
    at_offset: int = 0

    def child(self, direction: Choice) -> "PartialTree":
        return self.left if direction is Choice.LEFT else self.right

    def __repr__(self) -> str:
        head = self.agent if self.choice is None else f"{self.agent}, {self.choice}"
        return f"<{head}, {self.left!r}, {self.right!r}>"


PartialTree = Union[TreeLeaf, TreeNode, Unknown]


def unfold(system: EquationSystem, start: str | VarRef | None = None, k: int = 1) -> PartialTree:
    """Depth-``k`` unfolding of ``start`` (default: the root) with an unknown frontier."""
    if k < 0:
        raise ValueError("depth must be nonnegative")
    if start is None:
        start = system.root
    offset = 0
    if isinstance(start, VarRef):
        start, offset = start.var, start.offset
    system[start]
    return _Unfolder(system, offset).tree(start, k, offset)


class _Unfolder:
    """One unfolding; equal (variable, depth, offset) positions share a subtree."""

    def __init__(self, system: EquationSystem, base: int):
        self.system = system
        self.base = base
        self.cache: dict[tuple[str, int, int], PartialTree] = {}

    def tree(self, var: str, k: int, offset: int) -> PartialTree:
        if k == 0:
            return UNKNOWN
        key = (var, k, offset)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        eq = self.system[var]
        if isinstance(eq, Leaf):
            out: PartialTree = TreeLeaf(eq.utility.shift(offset), offset - self.base)
        else:
            out = TreeNode(
                eq.agent,
                eq.choice,
                self.child(eq.left, k, offset),
                self.child(eq.right, k, offset),
                offset - self.base,
            )
        self.cache[key] = out
        return out

    def child(self, ref: VarRef, k: int, offset: int) -> PartialTree:
        eq = self.system[ref.var]
        total = offset + ref.offset
        if isinstance(eq, Leaf):
            return TreeLeaf(eq.utility.shift(total), total - self.base)
        return self.tree(ref.var, k - 1, total)


def forget_choices(tree: PartialTree) -> PartialTree:
    if isinstance(tree, TreeNode):
        return TreeNode(tree.agent, None, forget_choices(tree.left), forget_choices(tree.right), tree.at_offset)
    return tree


def iter_nodes(tree: PartialTree, address: tuple[Choice, ...] = ()) -> Iterator[tuple[tuple[Choice, ...], PartialTree]]:
    """Preorder walk yielding ``(address, subtree)`` for every position."""
    yield address, tree
    if isinstance(tree, TreeNode):
        yield from iter_nodes(tree.left, address + (Choice.LEFT,))
        yield from iter_nodes(tree.right, address + (Choice.RIGHT,))


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(tree: PartialTree, name: str = "unfolding") -> str:
    """Render a partial tree as a Graphviz digraph.

    Decision nodes are circles labelled ``agent`` or ``agent:choice``,
    payoffs are boxes, and the unknown frontier is a dashed diamond ``?``.
    Output is deterministic: nodes are numbered in preorder.
    """
    lines = [f"digraph {_quote(name)} {{"]
    counter = 0

    def emit(t: PartialTree) -> str:
        nonlocal counter
        ident = f"n{counter}"
        counter += 1
        if isinstance(t, Unknown):
            lines.append(f'  {ident} [label="?", shape=diamond, style=dashed];')
        elif isinstance(t, TreeLeaf):
            lines.append(f"  {ident} [label={_quote(str(t.utility))}, shape=box];")
        else:
            label = t.agent if t.choice is None else f"{t.agent}:{t.choice}"
            lines.append(f"  {ident} [label={_quote(label)}, shape=circle];")
            for direction in (Choice.LEFT, Choice.RIGHT):
                child = emit(t.child(direction))
                style = ", style=bold" if t.choice is direction else ""
                lines.append(f'  {ident} -> {child} [label="{direction}"{style}];')
        return ident

    emit(tree)
    lines.append("}")
    return "\n".join(lines) + "\n"
