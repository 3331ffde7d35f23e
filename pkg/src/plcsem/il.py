"""Instruction List: AST, text parser/printer and the accumulator machine.

The machine state is the current result ``cr``, the environment, the program
counter and a stack of deferred operations opened by the ``OP(`` form.
:func:`step_il` applies exactly one instruction; :func:`run_il` iterates it
until the program counter falls off the end (or ``RET``).
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum

from .core import (
    IDENT_RE,
    Environment,
    Value,
    VarDecl,
    check_write,
    decl_types,
    format_decl_blocks,
    format_literal,
    parse_decl_blocks,
    parse_literal,
    wrap32,
)
from .errors import (
    DivisionByZero,
    FuelExhausted,
    PlcSyntaxError,
    PlcTypeError,
    UnboundLabel,
    UnbalancedParen,
    UndeclaredVariable,
    UnknownOpcode,
)

DEFAULT_FUEL = 10**6


class Op(Enum):
    LD = "LD"
    LDN = "LDN"
    ST = "ST"
    STN = "STN"
    S = "S"
    R = "R"
    AND = "AND"
    ANDN = "ANDN"
    OR = "OR"
    ORN = "ORN"
    XOR = "XOR"
    XORN = "XORN"
    NOT = "NOT"
    ADD = "ADD"
    SUB = "SUB"
    MUL = "MUL"
    DIV = "DIV"
    GT = "GT"
    GE = "GE"
    EQ = "EQ"
    NE = "NE"
    LE = "LE"
    LT = "LT"
    JMP = "JMP"
    JMPC = "JMPC"
    JMPCN = "JMPCN"
    RET = "RET"
    NOP = "NOP"
    CLOSE = ")"


LOGIC = frozenset({Op.AND, Op.ANDN, Op.OR, Op.ORN, Op.XOR, Op.XORN})
ARITH = frozenset({Op.ADD, Op.SUB, Op.MUL, Op.DIV})
COMPARE = frozenset({Op.GT, Op.GE, Op.EQ, Op.NE, Op.LE, Op.LT})
PAREN_OPS = LOGIC | ARITH | COMPARE
JUMPS = frozenset({Op.JMP, Op.JMPC, Op.JMPCN})
STORES = frozenset({Op.ST, Op.STN, Op.S, Op.R})
NO_OPERAND = frozenset({Op.NOT, Op.RET, Op.NOP, Op.CLOSE})

# N-suffixed opcodes -> (base opcode, negate operand)
_BASE = {
    Op.LDN: (Op.LD, True),
    Op.STN: (Op.ST, True),
    Op.ANDN: (Op.AND, True),
    Op.ORN: (Op.OR, True),
    Op.XORN: (Op.XOR, True),
}
NEGATED = {base: neg for neg, (base, _) in _BASE.items()}


def split_negation(op: Op) -> tuple[Op, bool]:
    return _BASE.get(op, (op, False))


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class Const:
    value: Value

    # Const(True) must differ from Const(1)
    def __eq__(self, other):
        if not isinstance(other, Const):
            return NotImplemented
        return type(self.value) is type(other.value) and self.value == other.value

    def __hash__(self):
        return hash((type(self.value), self.value))

    def __str__(self) -> str:
        return format_literal(self.value)


Operand = Var | Const


@dataclass(frozen=True)
class Instr:
    """One IL instruction.

    ``operand`` is a :class:`Var` or :class:`Const` for data instructions and
    a label name (``str``) for jumps.  ``paren`` marks the deferred ``OP(`` form;
    the matching ``)`` is a separate instruction with ``op=Op.CLOSE``.
    """

    op: Op
    operand: Operand | str | None = None
    paren: bool = False

    def __post_init__(self):
        op, arg = self.op, self.operand
        if self.paren and op not in PAREN_OPS:
            raise PlcSyntaxError(f"{op.value} has no '(' form")
        if op in NO_OPERAND:
            ok = arg is None
        elif op in JUMPS:
            ok = isinstance(arg, str)
        elif op in STORES:
            ok = isinstance(arg, Var)
        elif self.paren:
            ok = arg is None or isinstance(arg, (Var, Const))
        else:
            ok = isinstance(arg, (Var, Const))
        if not ok:
            raise PlcSyntaxError(f"bad operand {arg!r} for {op.value}")

    def __str__(self) -> str:
        if self.op is Op.CLOSE:
            return ")"
        text = self.op.value + ("(" if self.paren else "")
        if self.operand is not None:
            text += f" {self.operand}"
        return text


@dataclass(frozen=True)
class ILProgram:
    decls: tuple[VarDecl, ...]
    instrs: tuple[Instr, ...]
    labels: Mapping[str, int] = field(default_factory=dict)
    lines: tuple[int, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "decls", tuple(self.decls))
        object.__setattr__(self, "instrs", tuple(self.instrs))
        object.__setattr__(self, "labels", dict(self.labels))
        decl_types(self.decls)
        _check_structure(self.instrs, self.labels, self.lines)

    @property
    def label_index(self) -> Mapping[str, int]:
        return self.labels

    def labelled(self) -> list[tuple[str | None, Instr]]:
        """The program as (label, instruction) pairs; extra labels are dropped."""
        first: dict[int, str] = {}
        for name, idx in self.labels.items():
            first.setdefault(idx, name)
        return [(first.get(i), ins) for i, ins in enumerate(self.instrs)]

    def referenced_vars(self) -> set[str]:
        return {ins.operand.name for ins in self.instrs if isinstance(ins.operand, Var)}

    def check_declared(self) -> None:
        names = {d.name for d in self.decls}
        for i, ins in enumerate(self.instrs):
            if isinstance(ins.operand, Var) and ins.operand.name not in names:
                raise UndeclaredVariable(ins.operand.name, self.lines[i] if self.lines else None)


def _check_structure(instrs, labels, lines) -> None:
    def line(i):
        return lines[i] if lines and i < len(lines) else None

    n = len(instrs)
    depth = 0
    opens: list[int] = []
    depths = []
    for i, ins in enumerate(instrs):
        depths.append(depth)
        if ins.paren:
            opens.append(i)
            depth += 1
        elif ins.op is Op.CLOSE:
            if not opens:
                raise UnbalancedParen("')' without matching '('", line(i))
            opens.pop()
            depth -= 1
        if (ins.op in JUMPS or ins.op is Op.RET) and depths[i]:
            raise PlcSyntaxError(f"{ins.op.value} inside a parenthesised expression", line(i))
    if opens:
        raise UnbalancedParen("unclosed '('", line(opens[-1]))
    depths.append(0)
    for name, idx in labels.items():
        if not IDENT_RE.fullmatch(name):
            raise PlcSyntaxError(f"bad label {name!r}")
        if not 0 <= idx <= n:
            raise PlcSyntaxError(f"label {name!r} points outside the program")
        if depths[idx]:
            raise PlcSyntaxError(f"label {name!r} inside a parenthesised expression", line(idx))
    for i, ins in enumerate(instrs):
        if ins.op in JUMPS and ins.operand not in labels:
            raise UnboundLabel(f"no label {ins.operand!r}", line(i))


# -- text format --------------------------------------------------------------

_COMMENT_RE = re.compile(r"\(\*.*?\*\)", re.DOTALL)
_LABEL_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:(?!=)\s*(.*)$")
_INSTR_RE = re.compile(r"([A-Za-z]+)\s*(\()?\s*(.*?)\s*$")


def _strip_comments(text: str) -> str:
    out = _COMMENT_RE.sub(lambda m: " " + "\n" * m.group().count("\n"), text)
    if "(*" in out:
        raise PlcSyntaxError("unterminated comment", out[: out.index("(*")].count("\n") + 1)
    return out


def _parse_operand(text: str, line: int) -> Operand:
    if IDENT_RE.fullmatch(text) and text.upper() not in ("TRUE", "FALSE"):
        return Var(text)
    try:
        return Const(parse_literal(text))
    except PlcSyntaxError as exc:
        exc.line = line
        raise


def parse_il(text: str, decls: Iterable[VarDecl] | None = None) -> ILProgram:
    """Parse ``.il`` source.

    When ``decls`` is given (SFC action bodies) the text must not carry its
    own ``VAR`` block and the program shares those declarations.
    """
    text = _strip_comments(text)
    own, pos = parse_decl_blocks(text)
    if decls is not None:
        if own:
            raise PlcSyntaxError("action bodies cannot declare variables", 1)
        own = list(decls)
    first_line = text.count("\n", 0, pos) + 1
    body = text[pos:]

    instrs: list[Instr] = []
    lines: list[int] = []
    labels: dict[str, int] = {}
    for offset, raw in enumerate(body.split("\n")):
        lineno = first_line + offset
        rest = raw.strip()
        while rest:
            m = _LABEL_RE.match(rest)
            if not m:
                break
            name = m.group(1)
            if name in labels:
                raise PlcSyntaxError(f"duplicate label {name!r}", lineno)
            labels[name] = len(instrs)
            rest = m.group(2).strip()
        if not rest:
            continue
        if rest == ")":
            instrs.append(Instr(Op.CLOSE))
            lines.append(lineno)
            continue
        m = _INSTR_RE.fullmatch(rest)
        if not m:
            raise PlcSyntaxError(f"cannot parse {rest!r}", lineno)
        word, paren, arg = m.group(1).upper(), bool(m.group(2)), m.group(3)
        try:
            op = Op(word)
        except ValueError:
            raise UnknownOpcode(f"unknown opcode {m.group(1)!r}", lineno) from None
        operand: Operand | str | None = None
        if arg:
            if op in JUMPS:
                if not IDENT_RE.fullmatch(arg):
                    raise PlcSyntaxError(f"bad label {arg!r}", lineno)
                operand = arg
            else:
                operand = _parse_operand(arg, lineno)
        try:
            instrs.append(Instr(op, operand, paren))
        except PlcSyntaxError as exc:
            exc.line = lineno
            raise
        lines.append(lineno)
    return ILProgram(tuple(own), tuple(instrs), labels, tuple(lines))


def format_il(prog: ILProgram, with_decls: bool = True) -> str:
    out: list[str] = []
    if with_decls and prog.decls:
        out.append(format_decl_blocks(prog.decls))
    at: dict[int, list[str]] = {}
    for name, idx in prog.labels.items():
        at.setdefault(idx, []).append(name)
    n = len(prog.instrs)
    for i in range(n + 1):
        names = at.get(i, [])
        if i == n:
            out.extend(f"{name}:" for name in names)
            break
        ins = str(prog.instrs[i])
        if len(names) == 1:
            out.append(f"{names[0]}: {ins}")
            continue
        out.extend(f"{name}:" for name in names)
        out.append(ins)
    return "\n".join(out) + "\n"


# -- semantics ----------------------------------------------------------------

@dataclass(frozen=True)
class ILState:
    cr: Value
    env: Environment
    pc: int = 0
    defer: tuple[tuple[Op, bool, Value], ...] = ()

    def halted(self, prog: ILProgram) -> bool:
        return self.pc >= len(prog.instrs)


def initial_state(env: Environment) -> ILState:
    return ILState(False, env, 0, ())


def _as_bool(v: Value, what: str) -> bool:
    if type(v) is not bool:
        raise PlcTypeError(f"{what} needs BOOL, got {format_literal(v)}")
    return v


def _as_int(v: Value, what: str) -> int:
    if type(v) is not int:
        raise PlcTypeError(f"{what} needs INT, got {format_literal(v)}")
    return v


def _div(a: int, b: int) -> int:
    if b == 0:
        raise DivisionByZero(f"{a} / 0")
    q = abs(a) // abs(b)
    return wrap32(q if (a < 0) == (b < 0) else -q)


def _combine(op: Op, neg: bool, left: Value, right: Value) -> Value:
    name = op.value
    if op in LOGIC:
        a = _as_bool(left, name)
        b = _as_bool(right, name)
        if neg:
            b = not b
        if op is Op.AND:
            return a and b
        if op is Op.OR:
            return a or b
        return a != b
    if op in ARITH:
        a = _as_int(left, name)
        b = _as_int(right, name)
        if op is Op.ADD:
            return wrap32(a + b)
        if op is Op.SUB:
            return wrap32(a - b)
        if op is Op.MUL:
            return wrap32(a * b)
        return _div(a, b)
    # comparison
    if type(left) is not type(right):
        raise PlcTypeError(f"{name} on mixed BOOL/INT operands")
    if op is Op.EQ:
        return left == right
    if op is Op.NE:
        return left != right
    a = _as_int(left, name)
    b = _as_int(right, name)
    if op is Op.GT:
        return a > b
    if op is Op.GE:
        return a >= b
    if op is Op.LE:
        return a <= b
    return a < b


class _Machine:
    """Mutable working copy of an :class:`ILState` used while executing."""

    __slots__ = ("prog", "types", "cr", "values", "pc", "defer")

    def __init__(self, prog: ILProgram, cr, env: Environment, pc: int, defer):
        self.prog = prog
        self.types = env.types
        self.cr = cr
        self.values = env.as_dict()
        self.pc = pc
        self.defer = list(defer)

    def fetch(self, operand) -> Value:
        if type(operand) is Var:
            try:
                return self.values[operand.name]
            except KeyError:
                raise UndeclaredVariable(operand.name) from None
        return operand.value

    def store(self, name: str, value: Value) -> None:
        check_write(self.types, name, value)
        self.values[name] = value

    def step(self) -> None:
        ins = self.prog.instrs[self.pc]
        op = ins.op
        nxt = self.pc + 1
        base, neg = _BASE.get(op, (op, False))
        if ins.paren:
            self.defer.append((base, neg, self.cr))
            if ins.operand is not None:
                self.cr = self.fetch(ins.operand)
        elif op is Op.CLOSE:
            dop, dneg, saved = self.defer.pop()
            self.cr = _combine(dop, dneg, saved, self.cr)
        elif base is Op.LD:
            v = self.fetch(ins.operand)
            self.cr = (not _as_bool(v, "LDN")) if neg else v
        elif base is Op.ST:
            v = (not _as_bool(self.cr, "STN")) if neg else self.cr
            self.store(ins.operand.name, v)
        elif op is Op.S or op is Op.R:
            name = ins.operand.name
            check_write(self.types, name, False)
            if _as_bool(self.cr, op.value):
                self.values[name] = op is Op.S
        elif base in PAREN_OPS:
            self.cr = _combine(base, neg, self.cr, self.fetch(ins.operand))
        elif op is Op.NOT:
            self.cr = not _as_bool(self.cr, "NOT")
        elif op is Op.JMP:
            nxt = self.prog.labels[ins.operand]
        elif op is Op.JMPC:
            if _as_bool(self.cr, "JMPC"):
                nxt = self.prog.labels[ins.operand]
        elif op is Op.JMPCN:
            if not _as_bool(self.cr, "JMPCN"):
                nxt = self.prog.labels[ins.operand]
        elif op is Op.RET:
            nxt = len(self.prog.instrs)
        # NOP falls through
        self.pc = nxt

    def env(self) -> Environment:
        return Environment._trusted(self.types, self.values)


def step_il(prog: ILProgram, st: ILState) -> ILState:
    if st.halted(prog):
        raise ValueError("step_il on a halted state")
    m = _Machine(prog, st.cr, st.env, st.pc, st.defer)
    m.step()
    return ILState(m.cr, m.env(), m.pc, tuple(m.defer))


def run_il_state(prog: ILProgram, env: Environment, fuel: int = DEFAULT_FUEL) -> ILState:
    """Run to completion and return the final machine state."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    m = _Machine(prog, False, env, 0, ())
    n = len(prog.instrs)
    steps = 0
    while m.pc < n:
        if steps == fuel:
            raise FuelExhausted(fuel)
        m.step()
        steps += 1
    return ILState(m.cr, m.env(), m.pc, tuple(m.defer))


def run_il(prog: ILProgram, env: Environment, fuel: int = DEFAULT_FUEL) -> Environment:
    return run_il_state(prog, env, fuel).env
