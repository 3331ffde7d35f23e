"""LD to IL compilation and translation validation.

A network compiles to a jump-free IL fragment leaving its value in ``cr``.
The first child of a series/parallel node extends the running chain; later
composite children are wrapped in ``AND(`` / ``OR(`` ... ``)``.
:func:`check_equivalence` compares both semantics on whole environments.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .core import Environment, VarType, init_env
from .errors import DeclarationMismatch, PlcError
from .il import ILProgram, Instr, Op, Var, run_il
from .ld import CoilMode, Contact, LdProgram, Network, Rung, Series, eval_ld

_STORE = {
    CoilMode.NORMAL: Op.ST,
    CoilMode.NEGATED: Op.STN,
    CoilMode.SET: Op.S,
    CoilMode.RESET: Op.R,
}


def compile_network(net: Network) -> list[Instr]:
    return _load(net)


def _load(net: Network) -> list[Instr]:
    if isinstance(net, Contact):
        return [Instr(Op.LDN if net.negated else Op.LD, Var(net.var))]
    op = Op.AND if isinstance(net, Series) else Op.OR
    out = _load(net.children[0])
    for child in net.children[1:]:
        out.extend(_combine(op, child))
    return out


def _combine(op: Op, child: Network) -> list[Instr]:
    if isinstance(child, Contact):
        neg = {Op.AND: Op.ANDN, Op.OR: Op.ORN}[op]
        return [Instr(neg if child.negated else op, Var(child.var))]
    inner = _load(child)
    head = inner[0]
    if head.op is Op.LD:
        return [Instr(op, head.operand, paren=True), *inner[1:], Instr(Op.CLOSE)]
    return [Instr(op, None, paren=True), *inner, Instr(Op.CLOSE)]


def compile_rung(rung: Rung) -> list[Instr]:
    code = compile_network(rung.network)
    code.extend(Instr(_STORE[c.mode], Var(c.var)) for c in rung.coils)
    return code


def compile_ld(prog: LdProgram) -> ILProgram:
    instrs: list[Instr] = []
    for rung in prog.rungs:
        instrs.extend(compile_rung(rung))
    return ILProgram(prog.decls, tuple(instrs))


# -- translation validation ------------------------------------------------------

EXHAUSTIVE_LIMIT = 20


@dataclass(frozen=True)
class Exhaustive:
    pass


@dataclass(frozen=True)
class RandomMode:
    n: int
    seed: int = 0


@dataclass(frozen=True)
class Equivalent:
    environments: int

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class NotEquivalent:
    """``il_result`` is the IL exception when the IL side failed to run."""

    witness: Environment
    ld_result: Environment
    il_result: Environment | PlcError

    def __bool__(self) -> bool:
        return False


def _bool_vars(decls) -> list[str]:
    return sorted(d.name for d in decls if d.ty is VarType.BOOL)


def enumerate_envs(decls) -> list[Environment]:
    """All BOOL assignments in lexicographic order (names sorted, FALSE < TRUE).

    INT variables keep their initial values.
    """
    base = init_env(decls)
    names = _bool_vars(decls)
    if len(names) > EXHAUSTIVE_LIMIT:
        raise ValueError(f"{len(names)} BOOL variables exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}")
    return [base.update(dict(zip(names, bits))) for bits in itertools.product((False, True), repeat=len(names))]


def random_envs(decls, n: int, seed: int) -> list[Environment]:
    rng = random.Random(seed)
    base = init_env(decls)
    names = _bool_vars(decls)
    return [base.update({v: rng.random() < 0.5 for v in names}) for _ in range(n)]


def compare_on(ld: LdProgram, il: ILProgram, env: Environment) -> tuple[Environment, Environment | PlcError] | None:
    """Run both programs on ``env``; ``None`` when they agree."""
    expected = eval_ld(ld, env)
    try:
        got: Environment | PlcError = run_il(il, env)
    except PlcError as exc:
        got = exc
    if isinstance(got, Environment) and got == expected:
        return None
    return expected, got


def check_equivalence(ld: LdProgram, il: ILProgram, mode=Exhaustive()) -> Equivalent | NotEquivalent:
    if list(ld.decls) != list(il.decls):
        raise DeclarationMismatch("LD and IL programs declare different variables")
    if isinstance(mode, RandomMode):
        envs = random_envs(ld.decls, mode.n, mode.seed)
    elif isinstance(mode, Exhaustive) or mode == "exhaustive":
        envs = enumerate_envs(ld.decls)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for env in envs:
        diff = compare_on(ld, il, env)
        if diff is not None:
            return NotEquivalent(env, *diff)
    return Equivalent(len(envs))


