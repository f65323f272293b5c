"""Reading and writing schema documents.

A document is a JSON object::

    {
      "agents": ["A", "B"],
      "kind": "profile",                       # or "game"
      "indexed": true,                         # default false
      "root": {"var": "AsBc", "index": 0},     # index defaults to 0
      "parameters": {"r": "1/2"},              # optional
      "variables": {
        "AsBc": {"agent": "A", "choice": "l",
                 "left": {"var": "v", "offset": 0},
                 "right": {"var": "BcAs", "offset": 0}},
        "v": {"leaf": {"A": {"const": "0", "slope": "-1"},
                       "B": {"const": "r", "slope": "-1"}}}
      }
    }

Rationals are integers or strings ``"p/q"``.  Inside ``const``/``slope`` a
string may also name a parameter, optionally negated (``"-r"``).  Unknown
keys are rejected.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .schema import Affine, Choice, EquationSystem, Kind, Leaf, Node, Utility, VarRef, as_fraction

__all__ = ["DocumentError", "bundled", "dumps", "load", "loads", "parse", "to_document"]

_NAME = re.compile(r"^-?[A-Za-z_][A-Za-z0-9_]*$")


class DocumentError(ValueError):
    pass


def _keys(obj: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise DocumentError(f"{where}: expected an object")
    missing = required - obj.keys()
    if missing:
        raise DocumentError(f"{where}: missing {', '.join(sorted(missing))}")
    extra = obj.keys() - required - optional
    if extra:
        raise DocumentError(f"{where}: unknown field {', '.join(sorted(extra))}")
    return obj


def _rational(value: Any, where: str, params: Mapping[str, Fraction] | None = None) -> Fraction:
    if isinstance(value, str) and params is not None and _NAME.match(value.strip()):
        text = value.strip()
        sign, name = (-1, text[1:]) if text.startswith("-") else (1, text)
        if name not in params:
            raise DocumentError(f"{where}: unknown parameter {name}")
        return sign * params[name]
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise DocumentError(f"{where}: rationals must be integers or \"p/q\" strings")
    try:
        return as_fraction(value)
    except (ValueError, TypeError) as exc:
        raise DocumentError(f"{where}: {exc}") from None


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise DocumentError(f"{where}: expected a nonnegative integer")
    return value


def _ref(obj: Any, where: str) -> VarRef:
    obj = _keys(obj, where, {"var"}, {"offset"})
    if not isinstance(obj["var"], str):
        raise DocumentError(f"{where}.var: expected a string")
    return VarRef(obj["var"], _int(obj.get("offset", 0), f"{where}.offset"))


def parse(doc: Any, overrides: Mapping[str, Any] | None = None) -> EquationSystem:
    """Build an :class:`EquationSystem` from a decoded document.

    ``overrides`` replaces document parameters before substitution.
    """
    doc = _keys(doc, "document", {"agents", "kind", "root", "variables"}, {"indexed", "parameters"})
    agents = doc["agents"]
    if not isinstance(agents, list) or not all(isinstance(a, str) for a in agents):
        raise DocumentError("agents: expected a list of strings")
    try:
        kind = Kind(doc["kind"])
    except ValueError:
        raise DocumentError("kind: expected \"game\" or \"profile\"") from None
    indexed = doc.get("indexed", False)
    if not isinstance(indexed, bool):
        raise DocumentError("indexed: expected a boolean")

    raw_params = dict(doc.get("parameters", {}) or {})
    if not isinstance(doc.get("parameters", {}), dict):
        raise DocumentError("parameters: expected an object")
    for name, value in (overrides or {}).items():
        if name not in raw_params:
            raise DocumentError(f"parameters: document declares no parameter {name}")
        raw_params[name] = value
    params = {}
    for name, value in raw_params.items():
        if not _NAME.match(name) or name.startswith("-"):
            raise DocumentError(f"parameters: bad name {name!r}")
        params[name] = _rational(value, f"parameters.{name}")

    root = _keys(doc["root"], "root", {"var"}, {"index"})
    if not isinstance(root["var"], str):
        raise DocumentError("root.var: expected a string")
    root_index = _int(root.get("index", 0), "root.index")

    variables = doc["variables"]
    if not isinstance(variables, dict):
        raise DocumentError("variables: expected an object")
    equations = {}
    for var, body in variables.items():
        where = f"variables.{var}"
        if isinstance(body, dict) and "leaf" in body:
            body = _keys(body, where, {"leaf"})
            leaf = body["leaf"]
            if not isinstance(leaf, dict):
                raise DocumentError(f"{where}.leaf: expected an object")
            payoffs = {}
            for agent, entry in leaf.items():
                at = f"{where}.leaf.{agent}"
                entry = _keys(entry, at, {"const"}, {"slope"})
                payoffs[agent] = Affine(
                    _rational(entry["const"], f"{at}.const", params),
                    _rational(entry.get("slope", 0), f"{at}.slope", params),
                )
            equations[var] = Leaf(Utility.of(payoffs))
            continue
        optional = {"choice"} if kind is Kind.PROFILE else set()
        body = _keys(body, where, {"agent", "left", "right"}, optional)
        choice = None
        if "choice" in body:
            try:
                choice = Choice(body["choice"])
            except ValueError:
                raise DocumentError(f"{where}.choice: expected \"l\" or \"r\"") from None
        if not isinstance(body["agent"], str):
            raise DocumentError(f"{where}.agent: expected a string")
        equations[var] = Node(
            body["agent"], _ref(body["left"], f"{where}.left"), _ref(body["right"], f"{where}.right"), choice
        )
    return EquationSystem(tuple(agents), kind, equations, root["var"], indexed, root_index)


def loads(text: str, overrides: Mapping[str, Any] | None = None) -> EquationSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from None
    return parse(doc, overrides)


def bundled(name: str) -> str:
    """Text of a bundled example schema such as ``dollar_asbc``."""
    resource = resources.files("coalgames") / "data" / f"{name}.json"
    if not resource.is_file():
        raise DocumentError(f"no bundled schema named {name}")
    return resource.read_text(encoding="utf-8")


def bundled_names() -> list[str]:
    folder = resources.files("coalgames") / "data"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load(path: str | Path, overrides: Mapping[str, Any] | None = None) -> EquationSystem:
    """Load a schema file; ``@name`` refers to a bundled example."""
    text_path = str(path)
    if text_path.startswith("@"):
        return loads(bundled(text_path[1:]), overrides)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, overrides)


def _rat(value: Fraction) -> str:
    return str(value)


def to_document(system: EquationSystem) -> dict:
    variables = {}
    for var, eq in system.equations.items():
        if isinstance(eq, Leaf):
            variables[var] = {
                "leaf": {
                    agent: {"const": _rat(f.const), "slope": _rat(f.slope)} for agent, f in eq.utility.entries
                }
            }
        else:
            body = {
                "agent": eq.agent,
                "left": {"var": eq.left.var, "offset": eq.left.offset},
                "right": {"var": eq.right.var, "offset": eq.right.offset},
            }
            if eq.choice is not None:
                body["choice"] = eq.choice.value
            variables[var] = body
    return {
        "agents": list(system.agents),
        "kind": system.kind.value,
        "indexed": system.indexed,
        "root": {"var": system.root, "index": system.root_index},
        "variables": variables,
    }


def dumps(system: EquationSystem) -> str:
    return json.dumps(to_document(system), indent=2) + "\n"
