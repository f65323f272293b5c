"""Convergence, induced utilities and equilibrium predicates on schemas.

Everything here works on the finite variable set.  An indexed variable
``x`` stands for the whole family ``x_n``; a predicate holds at ``x`` when
it holds at every member reachable from the root, i.e. for every
``n >= system.index_floors[x]``.

Weak convergence is a least fixpoint and is decided by walking the chosen
path.  Strong convergence and subgame perfection are greatest fixpoints
and are computed by pruning the variable set until it is stable.
:func:`box` evaluates the same properties through the "holds at every
reachable variable" reading instead, so the two routes can be compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .schema import Affine, EquationSystem, Kind, Leaf, Node, SchemaError, Utility, VarRef

__all__ = [
    "DIVERGENT",
    "PREDICATES",
    "PEViolation",
    "box",
    "induced_utility",
    "pe",
    "pe_violation",
    "spe",
    "spe_violation",
    "strongly_convergent",
    "weakly_convergent",
]


class _Divergent:
    def __repr__(self) -> str:
        return "Divergent"

    def __bool__(self) -> bool:
        return False


DIVERGENT = _Divergent()


def _state(system: EquationSystem, state: str | VarRef | None) -> str:
    if system.kind is not Kind.PROFILE:
        raise SchemaError("expected a profile system")
    system.require_valid()
    if state is None:
        return system.root
    var = state.var if isinstance(state, VarRef) else state
    system[var]
    return var


def weakly_convergent(system: EquationSystem, state: str | VarRef | None = None) -> bool:
    """Whether following the chosen moves from ``state`` reaches a payoff.

    Branching never depends on the index, so revisiting a variable means the
    play cycles forever.
    """
    var = _state(system, state)
    seen = set()
    while True:
        eq = system[var]
        if isinstance(eq, Leaf):
            return True
        if var in seen:
            return False
        seen.add(var)
        var = eq.chosen.var


def _wc_table(system: EquationSystem) -> dict[str, bool]:
    # least fixpoint: start from the payoffs and add nodes whose chosen child converges
    converged = {x for x, eq in system.equations.items() if isinstance(eq, Leaf)}
    changed = True
    while changed:
        changed = False
        for x, eq in system.equations.items():
            if x not in converged and eq.chosen.var in converged:
                converged.add(x)
                changed = True
    return {x: x in converged for x in system.equations}


def _greatest(system: EquationSystem, local: Callable[[str], bool]) -> set[str]:
    """Largest set of variables satisfying ``local`` and closed under successors."""
    alive = set(system.equations)
    changed = True
    while changed:
        changed = False
        for x in list(alive):
            eq = system[x]
            if not local(x) or (
                isinstance(eq, Node) and (eq.left.var not in alive or eq.right.var not in alive)
            ):
                alive.discard(x)
                changed = True
    return alive


def _sc_set(system: EquationSystem) -> set[str]:
    wc = _wc_table(system)
    return _greatest(system, wc.__getitem__)


def strongly_convergent(system: EquationSystem, state: str | VarRef | None = None) -> bool:
    var = _state(system, state)
    return var in _sc_set(system)


def _induced_table(system: EquationSystem) -> dict[str, Utility | _Divergent]:
    """Induced utility of every variable, as a function of that variable's index."""
    table: dict[str, Utility | _Divergent] = {}
    for start in system.equations:
        if start in table:
            continue
        path: list[tuple[str, int]] = []
        on_path = set()
        var = start
        result: Utility | _Divergent
        while True:
            if var in table:
                result = table[var]
                break
            eq = system[var]
            if isinstance(eq, Leaf):
                result = eq.utility
                table[var] = result
                break
            if var in on_path:
                result = DIVERGENT
                break
            on_path.add(var)
            path.append((var, eq.chosen.offset))
            var = eq.chosen.var
        for var, offset in reversed(path):
            if result is not DIVERGENT:
                result = result.shift(offset)
            table[var] = result
    return table


def induced_utility(system: EquationSystem, state: str | VarRef | None = None) -> Utility | _Divergent:
    """Payoff reached by the realised play from ``state``, or :data:`DIVERGENT`.

    Payoffs are affine in the index of ``state``: the leaf's form is shifted
    by the total offset accumulated along the play.
    """
    var = _state(system, state)
    total = 0
    seen = set()
    while True:
        eq = system[var]
        if isinstance(eq, Leaf):
            return eq.utility.shift(total)
        if var in seen:
            return DIVERGENT
        seen.add(var)
        total += eq.chosen.offset
        var = eq.chosen.var


@dataclass(frozen=True)
class PEViolation:
    """Why the local equilibrium condition fails at ``var``.

    ``index`` is a concrete index where the mover strictly prefers the
    other move; it is None when the failure is non-convergence.
    """

    var: str
    agent: str | None
    reason: str
    chosen: Affine | None = None
    alternative: Affine | None = None
    index: int | None = None

    def __str__(self) -> str:
        if self.index is None:
            return f"{self.var}: {self.reason}"
        return (
            f"{self.var}: {self.agent} gets {self.chosen} from the chosen move but "
            f"{self.alternative} from the other, e.g. at n={self.index}"
        )


def _compare(
    system: EquationSystem, var: str, induced: dict[str, Utility | _Divergent]
) -> PEViolation | None:
    eq = system[var]
    if isinstance(eq, Leaf):
        return None
    chosen, other = eq.chosen, eq.other
    u_chosen, u_other = induced[chosen.var], induced[other.var]
    if u_chosen is DIVERGENT or u_other is DIVERGENT:
        return PEViolation(var, eq.agent, "a successor does not converge")
    mine = u_chosen.shift(chosen.offset)[eq.agent]
    theirs = u_other.shift(other.offset)[eq.agent]
    n = mine.violation(theirs, system.index_floors[var])
    if n is None:
        return None
    return PEViolation(var, eq.agent, "deviation is profitable", mine, theirs, n)


def pe_violation(system: EquationSystem, state: str | VarRef | None = None) -> PEViolation | None:
    var = _state(system, state)
    if var not in _sc_set(system):
        return PEViolation(var, None, "not strongly convergent")
    return _compare(system, var, _induced_table(system))


def pe(system: EquationSystem, state: str | VarRef | None = None) -> bool:
    """The mover at ``state`` cannot gain by switching only the root move.

    Requires strong convergence at ``state``.  The comparison must hold for
    every index the variable can take, which is decided exactly on the
    affine payoffs.
    """
    return pe_violation(system, state) is None


def _spe_set(system: EquationSystem) -> set[str]:
    wc = _wc_table(system)
    induced = _induced_table(system)

    def local(x: str) -> bool:
        eq = system[x]
        if isinstance(eq, Leaf):
            return True
        return wc[eq.left.var] and wc[eq.right.var] and _compare(system, x, induced) is None

    return _greatest(system, local)


def spe(system: EquationSystem, state: str | VarRef | None = None) -> bool:
    """Subgame perfection: PE at every variable reachable from ``state``."""
    var = _state(system, state)
    return var in _spe_set(system)


def spe_violation(system: EquationSystem, state: str | VarRef | None = None) -> PEViolation | None:
    """First reachable variable (BFS order) where PE fails, if any."""
    var = _state(system, state)
    sc = _sc_set(system)
    induced = _induced_table(system)
    for x in system.reachable(var):
        if x not in sc:
            return PEViolation(x, None, "not strongly convergent")
        found = _compare(system, x, induced)
        if found is not None:
            return found
    return None


PREDICATES: dict[str, Callable[[EquationSystem, str], bool]] = {
    "WC": weakly_convergent,
    "SC": strongly_convergent,
    "PE": pe,
}


def box(system: EquationSystem, state: str | VarRef | None, predicate: str) -> bool:
    """Whether ``predicate`` holds at every variable reachable from ``state``."""
    try:
        check = PREDICATES[predicate.upper()]
    except KeyError:
        raise ValueError(f"unknown predicate {predicate!r}; expected one of WC, SC, PE") from None
    var = _state(system, state)
    return all(check(system, x) for x in system.reachable(var))
