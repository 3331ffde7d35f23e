"""Seeded random generators for LD programs, SFC charts and properties.

Used by the test suite and by ``scripts/make_corpus.py``.  Every generator
takes a ``random.Random`` so runs are reproducible from a seed.
"""

from __future__ import annotations

import random

from .checker import Property
from .core import VarDecl, VarKind, VarType
from .il import parse_il
from .ld import Coil, CoilMode, Contact, LdProgram, Network, Parallel, Rung, Series
from .sfc import (
    FALSE,
    TRUE,
    And,
    GuardExpr,
    Not,
    Or,
    SfcAction,
    SfcModel,
    Step,
    StepActive,
    Transition,
    VarAtom,
)


def bool_decls(rng: random.Random, n_vars: int, n_inputs: int) -> tuple[VarDecl, ...]:
    decls = []
    for i in range(n_vars):
        if i < n_inputs:
            decls.append(VarDecl(f"i{i}", VarType.BOOL, VarKind.INPUT))
        elif rng.random() < 0.5:
            decls.append(VarDecl(f"q{i}", VarType.BOOL, VarKind.OUTPUT))
        else:
            init = True if rng.random() < 0.2 else None
            decls.append(VarDecl(f"m{i}", VarType.BOOL, VarKind.LOCAL, init))
    return tuple(decls)


def random_network(rng: random.Random, names: list[str], depth: int) -> Network:
    if depth <= 1 or rng.random() < 0.35:
        return Contact(rng.choice(names), rng.random() < 0.3)
    kind = rng.choice((Series, Parallel))
    return kind(tuple(random_network(rng, names, depth - 1) for _ in range(rng.randint(2, 3))))


def random_ld(
    rng: random.Random,
    max_vars: int = 8,
    max_depth: int = 4,
    max_rungs: int = 5,
    n_inputs: int | None = None,
) -> LdProgram:
    n_vars = rng.randint(2, max_vars)
    if n_inputs is None:
        n_inputs = rng.randint(1, n_vars - 1)
    n_inputs = min(n_inputs, n_vars - 1)
    decls = bool_decls(rng, n_vars, n_inputs)
    names = [d.name for d in decls]
    writable = [d.name for d in decls if d.kind is not VarKind.INPUT]
    rungs = []
    for _ in range(rng.randint(1, max_rungs)):
        net = random_network(rng, names, rng.randint(1, max_depth))
        coils = tuple(
            Coil(rng.choice(writable), rng.choice(list(CoilMode))) for _ in range(rng.randint(1, 2))
        )
        rungs.append(Rung(net, coils))
    return LdProgram(decls, tuple(rungs))


def random_guard(rng: random.Random, names: list[str], steps: list[str] = (), depth: int = 3) -> GuardExpr:
    if depth <= 1 or rng.random() < 0.3:
        r = rng.random()
        if steps and r < 0.3:
            return StepActive(rng.choice(steps))
        if r > 0.95:
            return rng.choice((TRUE, FALSE))
        return VarAtom(rng.choice(names))
    r = rng.random()
    if r < 0.25:
        return Not(random_guard(rng, names, steps, depth - 1))
    node = And if r < 0.65 else Or
    return node(random_guard(rng, names, steps, depth - 1), random_guard(rng, names, steps, depth - 1))


def random_property(rng: random.Random, decls, steps: list[str] = ()) -> Property:
    state = [d.name for d in decls if d.kind is not VarKind.INPUT] or [d.name for d in decls]
    a, b = rng.sample(state, 2) if len(state) >= 2 else (state[0], state[0])
    shape = rng.random()
    if shape < 0.35:
        inv: GuardExpr = Not(And(VarAtom(a), VarAtom(b)))
    elif shape < 0.55:
        inv = Not(VarAtom(a))
    elif shape < 0.7 and steps:
        inv = Or(Not(StepActive(rng.choice(list(steps)))), Not(VarAtom(a)))
    else:
        inv = random_guard(rng, state, list(steps), 3)
    return Property("random", inv)


def _random_body(rng: random.Random, names: list[str], writable: list[str]) -> str:
    lines = [f"{rng.choice(['LD', 'LDN'])} {rng.choice(names)}"]
    for _ in range(rng.randint(0, 2)):
        lines.append(f"{rng.choice(['AND', 'OR', 'ANDN', 'ORN', 'XOR'])} {rng.choice(names)}")
    lines.append(f"{rng.choice(['ST', 'STN', 'S', 'R'])} {rng.choice(writable)}")
    return "\n".join(lines) + "\n"


def random_sfc(rng: random.Random, max_steps: int = 4, max_vars: int = 6) -> SfcModel:
    n_steps = rng.randint(2, max_steps)
    n_vars = rng.randint(2, max_vars)
    decls = bool_decls(rng, n_vars, rng.randint(1, max(1, n_vars - 1)))
    names = [d.name for d in decls]
    inputs = [d.name for d in decls if d.kind is VarKind.INPUT]
    writable = [d.name for d in decls if d.kind is not VarKind.INPUT]
    step_ids = [f"S{i}" for i in range(n_steps)]
    actions = tuple(
        SfcAction(f"a{i}", parse_il(_random_body(rng, names, writable), decls)) for i in range(rng.randint(1, 3))
    )
    steps = []
    for i, sid in enumerate(step_ids):
        assoc = tuple(
            (rng.choice("NNNSRP"), rng.choice(actions).id) for _ in range(rng.randint(0, 2))
        )
        steps.append(Step(sid, i == 0, assoc))
    transitions = []
    for i in range(rng.randint(n_steps - 1, n_steps + 2)):
        src = {step_ids[i % n_steps]}
        if rng.random() < 0.15:
            src.add(rng.choice(step_ids))
        tgt = {rng.choice(step_ids)}
        if rng.random() < 0.15:
            tgt.add(rng.choice(step_ids))
        guard = random_guard(rng, inputs + writable, step_ids, 2)
        transitions.append(Transition(f"t{i}", frozenset(src), frozenset(tgt), guard, i))
    return SfcModel(decls, tuple(steps), tuple(transitions), actions)
