"""Value model, variable declarations and environments.

Values are plain Python ``bool`` (BOOL) and ``int`` (INT, 32-bit two's
complement).  Because ``bool`` subclasses ``int`` every type test here uses
``type(v) is ...`` rather than ``isinstance``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import DuplicateDeclaration, PlcSyntaxError, TypeMismatch, UndeclaredVariable

Value = Union[bool, int]

INT_MIN = -(2**31)
INT_MAX = 2**31 - 1

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def wrap32(n: int) -> int:
    return ((n - INT_MIN) & 0xFFFFFFFF) + INT_MIN


class VarType(Enum):
    BOOL = "BOOL"
    INT = "INT"

    def default(self) -> Value:
        return False if self is VarType.BOOL else 0

    def accepts(self, value: object) -> bool:
        if self is VarType.BOOL:
            return type(value) is bool
        return type(value) is int and INT_MIN <= value <= INT_MAX


class VarKind(Enum):
    INPUT = "INPUT"
    OUTPUT = "OUTPUT"
    LOCAL = "LOCAL"


def type_of(value: Value) -> VarType:
    if type(value) is bool:
        return VarType.BOOL
    if type(value) is int:
        return VarType.INT
    raise TypeError(f"not a PLC value: {value!r}")


@dataclass(frozen=True)
class VarDecl:
    name: str
    ty: VarType
    kind: VarKind = VarKind.LOCAL
    init: Value | None = None

    def __post_init__(self):
        if not IDENT_RE.fullmatch(self.name):
            raise PlcSyntaxError(f"bad identifier {self.name!r}")
        if self.init is not None and not self.ty.accepts(self.init):
            raise TypeMismatch(self.name, f"initial value {self.init!r} is not {self.ty.value}")

    @property
    def initial_value(self) -> Value:
        return self.ty.default() if self.init is None else self.init


class Environment(Mapping):
    """Immutable total map from declared variable names to values.

    Reading an undeclared name raises :class:`UndeclaredVariable`; writes
    return a new environment and are type checked against the declaration.
    """

    __slots__ = ("_types", "_values", "_hash")

    def __init__(self, types: Mapping[str, VarType], values: Mapping[str, Value]):
        self._types = types
        self._values = dict(values)
        self._hash = None

    @classmethod
    def _trusted(cls, types, values: dict) -> Environment:
        env = cls.__new__(cls)
        env._types = types
        env._values = values
        env._hash = None
        return env

    @property
    def types(self) -> Mapping[str, VarType]:
        return self._types

    def __getitem__(self, name: str) -> Value:
        try:
            return self._values[name]
        except KeyError:
            raise UndeclaredVariable(name) from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, name: object) -> bool:
        return name in self._values

    def get(self, name, default=None):
        return self._values.get(name, default)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Environment):
            return self._values == other._values
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._values.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={format_literal(v)}" for k, v in sorted(self._values.items()))
        return f"Environment({body})"

    def read(self, name: str) -> Value:
        return self[name]

    def write(self, name: str, value: Value) -> Environment:
        check_write(self._types, name, value)
        values = dict(self._values)
        values[name] = value
        return Environment._trusted(self._types, values)

    def update(self, assignments: Mapping[str, Value]) -> Environment:
        values = dict(self._values)
        for name, value in assignments.items():
            check_write(self._types, name, value)
            values[name] = value
        return Environment._trusted(self._types, values)

    def as_dict(self) -> dict[str, Value]:
        return dict(self._values)


def check_write(types: Mapping[str, VarType], name: str, value: Value) -> None:
    ty = types.get(name)
    if ty is None:
        raise UndeclaredVariable(name)
    if not ty.accepts(value):
        raise TypeMismatch(name, f"cannot store {format_literal(value)} in {ty.value}")


def decl_types(decls: Iterable[VarDecl]) -> dict[str, VarType]:
    types: dict[str, VarType] = {}
    for d in decls:
        if d.name in types:
            raise DuplicateDeclaration(d.name)
        types[d.name] = d.ty
    return types


def init_env(decls: Iterable[VarDecl]) -> Environment:
    decls = list(decls)
    types = decl_types(decls)
    return Environment._trusted(types, {d.name: d.initial_value for d in decls})


def read(env: Environment, name: str) -> Value:
    return env.read(name)


def write(env: Environment, name: str, value: Value) -> Environment:
    return env.write(name, value)


# -- literals and the textual declaration block ------------------------------

def parse_literal(text: str) -> Value:
    t = text.strip()
    if t.upper() == "TRUE":
        return True
    if t.upper() == "FALSE":
        return False
    if re.fullmatch(r"[+-]?\d+", t):
        n = int(t)
        if not INT_MIN <= n <= INT_MAX:
            raise PlcSyntaxError(f"integer literal {t} out of 32-bit range")
        return n
    raise PlcSyntaxError(f"bad literal {text!r}")


def format_literal(value: Value) -> str:
    if type(value) is bool:
        return "TRUE" if value else "FALSE"
    return str(value)


_BLOCK_KINDS = {"VAR": VarKind.LOCAL, "VAR_INPUT": VarKind.INPUT, "VAR_OUTPUT": VarKind.OUTPUT}
_KIND_BLOCKS = {v: k for k, v in _BLOCK_KINDS.items()}
_DECL_RE = re.compile(
    r"(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*:\s*(?P<ty>[A-Za-z]+)\s*(?::=\s*(?P<init>\S+?))?\s*"
)
_BLOCK_HEAD_RE = re.compile(r"\s*\b(VAR_INPUT|VAR_OUTPUT|VAR)\b")


def parse_decl_blocks(text: str, line_offset: int = 1) -> tuple[list[VarDecl], int]:
    """Parse leading ``VAR``/``VAR_INPUT``/``VAR_OUTPUT`` ... ``END_VAR`` blocks.

    Returns the declarations and the character offset where the blocks end.
    Entries are ``name : TYPE [:= literal]`` separated by ``;`` or newlines.
    """
    decls: list[VarDecl] = []
    seen: set[str] = set()
    pos = 0
    while True:
        m = _BLOCK_HEAD_RE.match(text, pos)
        if not m:
            break
        kind = _BLOCK_KINDS[m.group(1)]
        end = re.compile(r"\bEND_VAR\b").search(text, m.end())
        if end is None:
            raise PlcSyntaxError(f"{m.group(1)} without END_VAR", line_offset + text.count("\n", 0, m.start(1)))
        start = m.end()
        for piece in re.finditer(r"[^;\n]+", text[start:end.start()]):
            entry = piece.group().strip()
            if not entry:
                continue
            line = line_offset + text.count("\n", 0, start + piece.start())
            dm = _DECL_RE.fullmatch(entry)
            if not dm:
                raise PlcSyntaxError(f"bad declaration {entry!r}", line)
            try:
                ty = VarType(dm["ty"].upper())
            except ValueError:
                raise PlcSyntaxError(f"unknown type {dm['ty']!r}", line) from None
            init = parse_literal(dm["init"]) if dm["init"] else None
            name = dm["name"]
            if name in seen:
                raise DuplicateDeclaration(name, line)
            seen.add(name)
            try:
                decls.append(VarDecl(name, ty, kind, init))
            except TypeMismatch as exc:
                exc.line = line
                raise
        pos = end.end()
    return decls, pos


def format_decl_blocks(decls: Iterable[VarDecl]) -> str:
    """Inverse of :func:`parse_decl_blocks`; consecutive same-kind decls share a block."""
    lines: list[str] = []
    current: VarKind | None = None
    for d in decls:
        if d.kind is not current:
            if current is not None:
                lines.append("END_VAR")
            lines.append(_KIND_BLOCKS[d.kind])
            current = d.kind
        init = f" := {format_literal(d.init)}" if d.init is not None else ""
        lines.append(f"    {d.name} : {d.ty.value}{init};")
    if current is not None:
        lines.append("END_VAR")
    return "\n".join(lines)


# -- JSON form used by the .ld.json and .sfc.json documents -------------------

def decl_to_json(d: VarDecl) -> dict:
    out = {"name": d.name, "type": d.ty.value, "kind": d.kind.value}
    if d.init is not None:
        out["init"] = d.init
    return out


def decl_from_json(obj: object) -> VarDecl:
    if not isinstance(obj, dict) or "name" not in obj or "type" not in obj:
        raise PlcSyntaxError(f"declaration must be an object with name and type: {obj!r}")
    try:
        ty = VarType(str(obj["type"]).upper())
        kind = VarKind(str(obj.get("kind", "LOCAL")).upper())
    except ValueError as exc:
        raise PlcSyntaxError(str(exc)) from None
    init = obj.get("init")
    if isinstance(init, str):
        init = parse_literal(init)
    return VarDecl(str(obj["name"]), ty, kind, init)


def decls_from_json(items: object) -> tuple[VarDecl, ...]:
    if not isinstance(items, list):
        raise PlcSyntaxError("decls must be a list")
    decls = tuple(decl_from_json(o) for o in items)
    decl_types(decls)
    return decls


def inputs_of(decls: Iterable[VarDecl]) -> list[VarDecl]:
    return [d for d in decls if d.kind is VarKind.INPUT]
