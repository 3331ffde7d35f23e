"""Program generators and mutation operators shared by the tests."""

from __future__ import annotations

import random

from plcsem.core import VarDecl, VarKind, VarType
from plcsem.il import ILProgram, Instr, Op, Var, Const

INT_VARS = ("x", "y", "z")
_OPS = {"+": Op.ADD, "-": Op.SUB, "*": Op.MUL, "/": Op.DIV}


def random_expr(rng: random.Random, depth: int):
    if depth <= 1 or rng.random() < 0.25:
        if rng.random() < 0.4:
            return ("var", rng.choice(INT_VARS))
        r = rng.random()
        if r < 0.1:
            return ("const", rng.choice([2**31 - 1, -(2**31), 65536, -65536]))
        return ("const", rng.randint(-20, 20))
    return (rng.choice("+-*/"), random_expr(rng, depth - 1), random_expr(rng, depth - 1))


def _leaf_operand(expr):
    return Var(expr[1]) if expr[0] == "var" else Const(expr[1])


def expr_to_il(expr, rng: random.Random) -> list[Instr]:
    """Left operands extend the running chain; composite right operands use ``OP(``."""
    if expr[0] in ("var", "const"):
        return [Instr(Op.LD, _leaf_operand(expr))]
    op = _OPS[expr[0]]
    code = expr_to_il(expr[1], rng)
    right = expr[2]
    if right[0] in ("var", "const"):
        code.append(Instr(op, _leaf_operand(right)))
        return code
    inner = expr_to_il(right, rng)
    if rng.random() < 0.5:
        code.append(Instr(op, inner[0].operand, paren=True))
        code.extend(inner[1:])
    else:
        code.append(Instr(op, None, paren=True))
        code.extend(inner)
    code.append(Instr(Op.CLOSE))
    return code


EXPR_DECLS = (
    VarDecl("x", VarType.INT, VarKind.INPUT),
    VarDecl("y", VarType.INT, VarKind.INPUT),
    VarDecl("z", VarType.INT, VarKind.INPUT),
    VarDecl("r", VarType.INT, VarKind.OUTPUT),
)


def expr_program(expr, rng: random.Random) -> ILProgram:
    return ILProgram(EXPR_DECLS, tuple(expr_to_il(expr, rng) + [Instr(Op.ST, Var("r"))]))


# -- mutation operators -----------------------------------------------------------------

_FLIP = {Op.AND: Op.OR, Op.OR: Op.AND, Op.ANDN: Op.ORN, Op.ORN: Op.ANDN}
_NEG = {
    Op.LD: Op.LDN, Op.LDN: Op.LD, Op.ST: Op.STN, Op.STN: Op.ST,
    Op.AND: Op.ANDN, Op.ANDN: Op.AND, Op.OR: Op.ORN, Op.ORN: Op.OR,
}


def mutants(prog: ILProgram, writable: list[str]) -> list[tuple[str, ILProgram]]:
    """Every single-instruction mutant: AND/OR flip, negation flip, store-target swap."""
    out = []
    instrs = list(prog.instrs)
    for i, ins in enumerate(instrs):
        variants = []
        if ins.op in _FLIP:
            variants.append(("flip", Instr(_FLIP[ins.op], ins.operand, ins.paren)))
        if ins.op in _NEG:
            variants.append(("negate", Instr(_NEG[ins.op], ins.operand, ins.paren)))
        if ins.op in (Op.ST, Op.STN, Op.S, Op.R):
            for other in writable:
                if other != ins.operand.name:
                    variants.append(("retarget", Instr(ins.op, Var(other))))
        for kind, new in variants:
            mutated = instrs[:i] + [new] + instrs[i + 1:]
            out.append((f"{kind}@{i}", ILProgram(prog.decls, tuple(mutated))))
    return out


# -- random systems with oracle successors ---------------------------------------------


def _initial_env(decls) -> dict:
    return {d.name: (d.init if d.init is not None else False) for d in decls}


def oracle_model(sys):
    """(initial, successor, input vectors, violates-factory) over oracle-side states.

    Oracle states are plain hashable tuples built from the declarations, so
    nothing here goes through the package's interpreters.
    """
    from plcsem.checker import IlSys, LdSys
    from oracles import bool_assignments, eval_guard_ref, ref_ld_scan, ref_run_bool_il, ref_sfc_scan

    decls = sys.decls
    vectors = list(bool_assignments([d.name for d in decls if d.kind is VarKind.INPUT]))
    env0 = _initial_env(decls)

    if isinstance(sys, (LdSys, IlSys)):
        if isinstance(sys, LdSys):
            def run(env):
                return ref_ld_scan(sys.program, env)
        else:
            def run(env):
                return ref_run_bool_il(sys.program.instrs, env)

        def succ(s, inp):
            return tuple(sorted(run({**dict(s), **inp}).items()))

        def violates(prop):
            return lambda s: not eval_guard_ref(prop.invariant, dict(s))

        return tuple(sorted(env0.items())), succ, vectors, violates

    model = sys.model
    init_step = next(s.id for s in model.steps if s.initial)

    def succ(s, inp):
        env, active, latched, just = s
        active, env, latched, just = ref_sfc_scan(model, active, {**dict(env), **inp}, latched, just)
        return tuple(sorted(env.items())), active, latched, just

    def violates(prop):
        return lambda s: not eval_guard_ref(prop.invariant, dict(s[0]), s[1])

    init = (tuple(sorted(env0.items())), frozenset({init_step}), frozenset(), frozenset())
    return init, succ, vectors, violates


def random_system(rng: random.Random, kind: str):
    """A random BOOL system of at most 10 variables (steps count as variables) and a property."""
    from plcsem.checker import IlSys, LdSys, SfcSys
    from plcsem.generate import random_ld, random_property, random_sfc
    from plcsem.ld2il import compile_ld

    if kind == "ld":
        prog = random_ld(rng, max_vars=10, max_depth=3, max_rungs=4, n_inputs=rng.randint(1, 3))
        sys = LdSys(prog)
    elif kind == "il":
        prog = compile_ld(random_ld(rng, max_vars=10, max_depth=3, max_rungs=4, n_inputs=rng.randint(1, 3)))
        writable = [d.name for d in prog.decls if d.kind is not VarKind.INPUT]
        muts = mutants(prog, writable)
        if muts and rng.random() < 0.5:
            prog = rng.choice(muts)[1]
        sys = IlSys(prog)
    else:
        sys = SfcSys(random_sfc(rng, max_steps=4, max_vars=6))
    steps = [s.id for s in sys.model.steps] if kind == "sfc" else []
    return sys, random_property(rng, sys.decls, steps)
