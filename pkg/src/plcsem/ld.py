"""Ladder Diagram: series/parallel contact networks driving coils."""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum

from .core import (
    Environment,
    VarDecl,
    VarKind,
    VarType,
    decl_to_json,
    decl_types,
    decls_from_json,
)
from .errors import InvalidCoil, NonBooleanContact, PlcSyntaxError, UndeclaredVariable


@dataclass(frozen=True)
class Contact:
    var: str
    negated: bool = False


@dataclass(frozen=True)
class Series:
    children: tuple[Network, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("Series needs at least two children")


@dataclass(frozen=True)
class Parallel:
    children: tuple[Network, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("Parallel needs at least two children")


Network = Contact | Series | Parallel


class CoilMode(Enum):
    NORMAL = "NORMAL"
    NEGATED = "NEGATED"
    SET = "SET"
    RESET = "RESET"


@dataclass(frozen=True)
class Coil:
    var: str
    mode: CoilMode = CoilMode.NORMAL


@dataclass(frozen=True)
class Rung:
    network: Network
    coils: tuple[Coil, ...]

    def __post_init__(self):
        object.__setattr__(self, "coils", tuple(self.coils))
        if not self.coils:
            raise ValueError("a rung drives at least one coil")


@dataclass(frozen=True)
class LdProgram:
    decls: tuple[VarDecl, ...]
    rungs: tuple[Rung, ...]

    def __post_init__(self):
        object.__setattr__(self, "decls", tuple(self.decls))
        object.__setattr__(self, "rungs", tuple(self.rungs))
        validate(self)


def contacts(net: Network) -> Iterable[Contact]:
    if isinstance(net, Contact):
        yield net
    else:
        for child in net.children:
            yield from contacts(child)


def composites(net: Network) -> int:
    if isinstance(net, Contact):
        return 0
    return 1 + sum(composites(c) for c in net.children)


def validate(prog: LdProgram) -> None:
    decls = {d.name: d for d in prog.decls}
    decl_types(prog.decls)
    for rung in prog.rungs:
        for c in contacts(rung.network):
            d = decls.get(c.var)
            if d is None:
                raise UndeclaredVariable(c.var)
            if d.ty is not VarType.BOOL:
                raise NonBooleanContact(f"contact on {d.ty.value} variable {c.var!r}")
        for coil in rung.coils:
            d = decls.get(coil.var)
            if d is None:
                raise UndeclaredVariable(coil.var)
            if d.ty is not VarType.BOOL or d.kind is VarKind.INPUT:
                raise InvalidCoil(f"coil {coil.var!r} must be a BOOL output or local")


def flatten(net: Network) -> Network:
    """Merge nested nodes of the same kind; collapse singleton nodes."""
    if isinstance(net, Contact):
        return net
    kind = type(net)
    kids: list[Network] = []
    for child in net.children:
        child = flatten(child)
        if type(child) is kind:
            kids.extend(child.children)
        else:
            kids.append(child)
    return kids[0] if len(kids) == 1 else kind(tuple(kids))


# -- semantics ----------------------------------------------------------------

def eval_network(net: Network, env) -> bool:
    if type(net) is Contact:
        v = env[net.var]
        return not v if net.negated else v
    if type(net) is Series:
        return all(eval_network(c, env) for c in net.children)
    return any(eval_network(c, env) for c in net.children)


def _apply_coils(coils, power: bool, values: dict) -> None:
    for coil in coils:
        mode = coil.mode
        if mode is CoilMode.NORMAL:
            values[coil.var] = power
        elif mode is CoilMode.NEGATED:
            values[coil.var] = not power
        elif power:
            values[coil.var] = mode is CoilMode.SET


def eval_rung(rung: Rung, env: Environment) -> Environment:
    values = env.as_dict()
    _apply_coils(rung.coils, eval_network(rung.network, values), values)
    return Environment._trusted(env.types, values)


def eval_ld(prog: LdProgram, env: Environment) -> Environment:
    # rungs see earlier rungs' coil writes; one dict threads through the fold
    values = env.as_dict()
    for rung in prog.rungs:
        _apply_coils(rung.coils, eval_network(rung.network, values), values)
    return Environment._trusted(env.types, values)


# -- .ld.json document ----------------------------------------------------------

def network_to_json(net: Network) -> dict:
    if isinstance(net, Contact):
        return {"kind": "contact", "var": net.var, "negated": net.negated}
    kind = "series" if isinstance(net, Series) else "parallel"
    return {"kind": kind, "children": [network_to_json(c) for c in net.children]}


def network_from_json(obj: object) -> Network:
    if not isinstance(obj, dict):
        raise PlcSyntaxError(f"network node must be an object: {obj!r}")
    kind = obj.get("kind")
    if kind == "contact":
        var = obj.get("var")
        if not isinstance(var, str):
            raise PlcSyntaxError("contact needs a string 'var'")
        negated = obj.get("negated", False)
        if not isinstance(negated, bool):
            raise PlcSyntaxError("contact 'negated' must be a boolean")
        return Contact(var, negated)
    if kind in ("series", "parallel"):
        kids = obj.get("children")
        if not isinstance(kids, list) or not kids:
            raise PlcSyntaxError(f"{kind} needs a nonempty 'children' list")
        nodes = [network_from_json(k) for k in kids]
        if len(nodes) == 1:
            return nodes[0]
        return (Series if kind == "series" else Parallel)(tuple(nodes))
    raise PlcSyntaxError(f"unknown network kind {kind!r}")


def ld_to_json(prog: LdProgram) -> dict:
    return {
        "decls": [decl_to_json(d) for d in prog.decls],
        "rungs": [
            {
                "network": network_to_json(r.network),
                "coils": [{"var": c.var, "mode": c.mode.value} for c in r.coils],
            }
            for r in prog.rungs
        ],
    }


def ld_from_json(doc: object) -> LdProgram:
    if not isinstance(doc, dict):
        raise PlcSyntaxError("LD document must be an object")
    decls = decls_from_json(doc.get("decls", []))
    rungs = []
    for i, r in enumerate(doc.get("rungs", [])):
        if not isinstance(r, dict) or "network" not in r:
            raise PlcSyntaxError(f"rung {i} needs a 'network'")
        coils = []
        for c in r.get("coils", []):
            try:
                coils.append(Coil(c["var"], CoilMode(str(c.get("mode", "NORMAL")).upper())))
            except (KeyError, TypeError, ValueError):
                raise PlcSyntaxError(f"rung {i}: bad coil {c!r}") from None
        if not coils:
            raise PlcSyntaxError(f"rung {i} has no coils")
        rungs.append(Rung(network_from_json(r["network"]), tuple(coils)))
    return LdProgram(decls, tuple(rungs))


def parse_ld(document: str) -> LdProgram:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise PlcSyntaxError(exc.msg, exc.lineno) from None
    return ld_from_json(doc)


def format_ld(prog: LdProgram) -> str:
    return json.dumps(ld_to_json(prog), indent=2) + "\n"
