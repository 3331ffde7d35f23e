"""Scan-cycle simulation and explicit-state safety checking.

A system is an IL program, an LD program or an SFC.  One scan writes a fresh
input assignment into the environment and executes the program once.
:func:`check_bounded` explores every input assignment breadth first, so a
returned counterexample is a shortest one.  :func:`check_inductive` checks
the one-step induction obligation over an enumerated state space.

A :class:`Trace` always starts with the initial state under empty inputs;
each later entry is one scan.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .core import Environment, Value, VarKind, VarType, decl_types, format_literal, init_env
from .errors import DomainError, InputMismatch, PlcError, PlcSyntaxError, StateExplosion
from .il import DEFAULT_FUEL, ILProgram, run_il
from .ld import LdProgram, eval_ld
from .sfc import (
    GuardExpr,
    Qualifier,
    SfcModel,
    SfcState,
    check_guard,
    eval_expr,
    evolve,
    guard_from_json,
    guard_to_json,
    initial_sfc_state,
)

DEFAULT_MAX_STATES = 10**6
DEFAULT_DEPTH = 1000


@dataclass(frozen=True)
class IlSys:
    program: ILProgram
    fuel: int = DEFAULT_FUEL

    @property
    def decls(self):
        return self.program.decls


@dataclass(frozen=True)
class LdSys:
    program: LdProgram

    @property
    def decls(self):
        return self.program.decls


@dataclass(frozen=True)
class SfcSys:
    model: SfcModel
    fuel: int = DEFAULT_FUEL

    @property
    def decls(self):
        return self.model.decls


System = IlSys | LdSys | SfcSys


@dataclass(frozen=True)
class SysState:
    env: Environment
    sfc: SfcState | None = None

    @property
    def active(self) -> frozenset[str]:
        return self.sfc.active if self.sfc is not None else frozenset()


def input_names(sys: System) -> list[str]:
    return sorted(d.name for d in sys.decls if d.kind is VarKind.INPUT)


def initial_state(sys: System) -> SysState:
    if isinstance(sys, SfcSys):
        st = initial_sfc_state(sys.model)
        return SysState(st.env, st)
    return SysState(init_env(sys.decls))


def scan_cycle(sys: System, inputs: Mapping[str, Value], st: SysState) -> SysState:
    expected = input_names(sys)
    if sorted(inputs) != expected:
        raise InputMismatch(f"inputs {sorted(inputs)} do not match INPUT variables {expected}")
    env = st.env.update(inputs)
    if isinstance(sys, LdSys):
        return SysState(eval_ld(sys.program, env))
    if isinstance(sys, IlSys):
        return SysState(run_il(sys.program, env, sys.fuel))
    pre = SfcState(st.sfc.active, env, st.sfc.latched, st.sfc.just_activated)
    post = evolve(sys.model, pre, sys.fuel)
    return SysState(post.env, post)


def simulate(sys: System, inputs: Iterable[Mapping[str, Value]], st: SysState | None = None) -> Trace:
    st = initial_state(sys) if st is None else st
    steps = [TraceStep({}, st)]
    for inp in inputs:
        st = scan_cycle(sys, inp, st)
        steps.append(TraceStep(dict(inp), st))
    return Trace(tuple(steps))


# -- properties ---------------------------------------------------------------------


@dataclass(frozen=True)
class Property:
    name: str
    invariant: GuardExpr

    def holds(self, st: SysState) -> bool:
        return eval_expr(self.invariant, st.env, st.active)


def check_property(sys: System, prop: Property) -> None:
    steps = sys.model.step_index if isinstance(sys, SfcSys) else ()
    check_guard(prop.invariant, sys.decls, steps)


def property_to_json(prop: Property) -> dict:
    return {"name": prop.name, "invariant": guard_to_json(prop.invariant)}


def property_from_json(obj) -> Property:
    if not isinstance(obj, dict) or "invariant" not in obj:
        raise PlcSyntaxError("property must be an object with an 'invariant'")
    return Property(str(obj.get("name", "property")), guard_from_json(obj["invariant"]))


def parse_property(text: str) -> Property:
    try:
        return property_from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise PlcSyntaxError(exc.msg, exc.lineno) from None


# -- traces and verdicts -----------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    inputs: Mapping[str, Value]
    state: SysState


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...]

    @property
    def cycles(self) -> int:
        return len(self.steps) - 1

    @property
    def final(self) -> SysState:
        return self.steps[-1].state


@dataclass(frozen=True)
class HoldsWithinBound:
    """``exhausted`` is set when the whole reachable set was explored."""

    states_visited: int
    depth_reached: int
    exhausted: bool = False


@dataclass(frozen=True)
class Counterexample:
    trace: Trace


@dataclass(frozen=True)
class Inductive:
    states_checked: int


@dataclass(frozen=True)
class NotInductive:
    """``inputs`` is None when the initial state itself violates the property."""

    witness: SysState
    inputs: Mapping[str, Value] | None
    successor: SysState | None = None

    @property
    def reason(self) -> str:
        return "base" if self.inputs is None else "step"


@dataclass(frozen=True)
class Confirmed:
    pass


@dataclass(frozen=True)
class Refuted:
    index: int
    expected: object
    got: object


# -- bounded reachability -------------------------------------------------------------


def input_vectors(sys: System, domain="all-bool") -> list[dict[str, Value]]:
    """Input assignments in lexicographic order (names sorted, FALSE < TRUE)."""
    names = input_names(sys)
    if domain == "all-bool":
        types = {d.name: d.ty for d in sys.decls}
        ints = [n for n in names if types[n] is not VarType.BOOL]
        if ints:
            raise DomainError(f"all-bool input domain with non-BOOL inputs: {', '.join(ints)}")
        return [dict(zip(names, bits)) for bits in itertools.product((False, True), repeat=len(names))]
    return [dict(v) for v in domain]


def _trace_to(parent: dict, st: SysState) -> Trace:
    steps = []
    while True:
        link = parent[st]
        if link is None:
            steps.append(TraceStep({}, st))
            break
        prev, inp = link
        steps.append(TraceStep(inp, st))
        st = prev
    return Trace(tuple(reversed(steps)))


def check_bounded(
    sys: System,
    prop: Property,
    depth: int = DEFAULT_DEPTH,
    input_domain="all-bool",
    max_states: int = DEFAULT_MAX_STATES,
) -> HoldsWithinBound | Counterexample:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    check_property(sys, prop)
    vectors = input_vectors(sys, input_domain)
    init = initial_state(sys)
    parent: dict[SysState, tuple[SysState, dict] | None] = {init: None}
    if not prop.holds(init):
        return Counterexample(_trace_to(parent, init))
    frontier = [init]
    level = 0
    while frontier and level < depth:
        level += 1
        nxt = []
        for st in frontier:
            for inp in vectors:
                succ = scan_cycle(sys, inp, st)
                if succ in parent:
                    continue
                parent[succ] = (st, inp)
                if len(parent) > max_states:
                    raise StateExplosion(max_states)
                if not prop.holds(succ):
                    return Counterexample(_trace_to(parent, succ))
                nxt.append(succ)
        frontier = nxt
    return HoldsWithinBound(len(parent), level, exhausted=not frontier)


# -- inductive invariant ----------------------------------------------------------------


def _conflict_free_subsets(ts: Sequence, used: frozenset = frozenset()):
    if not ts:
        yield ()
        return
    head, rest = ts[0], ts[1:]
    yield from _conflict_free_subsets(rest, used)
    if not head.sources & used:
        for tail in _conflict_free_subsets(rest, used | head.sources):
            yield (head, *tail)


def structural_step_sets(model: SfcModel, max_sets: int = DEFAULT_MAX_STATES) -> list[frozenset[str]]:
    """Active-step sets reachable when every guard may be either true or false.

    Any conflict-free set of source-enabled transitions may fire, which
    over-approximates the guarded evolution rule.
    """
    start = frozenset({model.initial_step})
    seen = {start}
    todo = [start]
    while todo:
        active = todo.pop()
        cands = [t for t in model.transitions if t.sources <= active]
        for chosen in _conflict_free_subsets(cands):
            src = frozenset().union(*(t.sources for t in chosen))
            tgt = frozenset().union(*(t.targets for t in chosen))
            nxt = (active - src) | tgt
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_sets:
                    raise StateExplosion(max_sets)
                todo.append(nxt)
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def all_step_sets(model: SfcModel) -> list[frozenset[str]]:
    ids = model.step_ids()
    return [
        frozenset(c) for k in range(1, len(ids) + 1) for c in itertools.combinations(ids, k)
    ]


def _latchable(model: SfcModel) -> list[str]:
    return sorted({a for s in model.steps for q, a in s.actions if q is Qualifier.S})


def check_inductive(
    sys: System,
    prop: Property,
    max_states: int = DEFAULT_MAX_STATES,
    step_sets: str = "structural",
) -> Inductive | NotInductive:
    check_property(sys, prop)
    non_bool = [d.name for d in sys.decls if d.ty is not VarType.BOOL]
    if non_bool:
        raise DomainError(f"inductive checking needs BOOL-only systems; INT: {', '.join(non_bool)}")
    init = initial_state(sys)
    if not prop.holds(init):
        return NotInductive(init, None)

    inputs = input_vectors(sys)
    state_vars = sorted(d.name for d in sys.decls if d.kind is not VarKind.INPUT)
    if isinstance(sys, SfcSys):
        if step_sets == "structural":
            sets = structural_step_sets(sys.model, max_states)
        elif step_sets == "all":
            sets = all_step_sets(sys.model)
        else:
            raise ValueError(f"unknown step_sets {step_sets!r}")
        latchable = _latchable(sys.model)
        latch_sets = [
            frozenset(c) for k in range(len(latchable) + 1) for c in itertools.combinations(latchable, k)
        ]
    else:
        sets, latch_sets = [None], [None]

    total = 2 ** len(state_vars) * len(inputs) * len(sets) * len(latch_sets)
    if total > max_states:
        raise StateExplosion(max_states)

    types = decl_types(sys.decls)
    checked = 0
    for bits in itertools.product((False, True), repeat=len(state_vars)):
        core = dict(zip(state_vars, bits))
        for active in sets:
            for latched in latch_sets:
                # successors ignore the pre-state's input values, so one
                # property-satisfying representative per core is enough
                witness = None
                for pre_in in inputs:
                    checked += 1
                    env = Environment._trusted(types, {**core, **pre_in})
                    st = _make_state(env, active, latched)
                    if witness is None and prop.holds(st):
                        witness = st
                if witness is None:
                    continue
                for inp in inputs:
                    succ = scan_cycle(sys, inp, witness)
                    if not prop.holds(succ):
                        return NotInductive(witness, inp, succ)
    return Inductive(checked)


def _make_state(env: Environment, active, latched) -> SysState:
    if active is None:
        return SysState(env)
    return SysState(env, SfcState(active, env, latched, frozenset()))


# -- replay ------------------------------------------------------------------------------


def replay(sys: System, prop: Property, trace: Trace) -> Confirmed | Refuted:
    if not trace.steps:
        raise ValueError("cannot replay an empty trace")
    st = initial_state(sys)
    if trace.steps[0].state != st:
        return Refuted(0, trace.steps[0].state, st)
    for i, step in enumerate(trace.steps[1:], start=1):
        try:
            st = scan_cycle(sys, step.inputs, st)
        except PlcError as exc:
            return Refuted(i, step.state, exc)
        if st != step.state:
            return Refuted(i, step.state, st)
    if prop.holds(st):
        return Refuted(len(trace.steps) - 1, "property violated", "property holds")
    return Confirmed()


# -- rendering ---------------------------------------------------------------------------


def state_to_json(st: SysState) -> dict:
    out: dict = {"env": st.env.as_dict()}
    if st.sfc is not None:
        out["active"] = sorted(st.sfc.active)
        out["latched"] = sorted(st.sfc.latched)
    return out


def trace_to_json(trace: Trace) -> list[dict]:
    return [{"cycle": i, "inputs": dict(s.inputs), "state": state_to_json(s.state)} for i, s in enumerate(trace.steps)]


def verdict_to_json(v) -> dict:
    if isinstance(v, HoldsWithinBound):
        return {
            "verdict": "HoldsWithinBound",
            "states_visited": v.states_visited,
            "depth_reached": v.depth_reached,
            "exhausted": v.exhausted,
        }
    if isinstance(v, Counterexample):
        return {"verdict": "Counterexample", "cycles": v.trace.cycles, "trace": trace_to_json(v.trace)}
    if isinstance(v, Inductive):
        return {"verdict": "Inductive", "states_checked": v.states_checked}
    if isinstance(v, NotInductive):
        out = {"verdict": "NotInductive", "reason": v.reason, "witness": state_to_json(v.witness)}
        if v.inputs is not None:
            out["inputs"] = dict(v.inputs)
            out["successor"] = state_to_json(v.successor)
        return out
    raise TypeError(f"not a checker verdict: {v!r}")


def format_trace(sys: System, trace: Trace) -> str:
    ins = input_names(sys)
    others = sorted(d.name for d in sys.decls if d.kind is not VarKind.INPUT)
    header = ["cycle", *ins, *others]
    sfc = isinstance(sys, SfcSys)
    if sfc:
        header.append("active")
    rows = []
    for i, step in enumerate(trace.steps):
        row = [str(i)]
        row += [format_literal(step.inputs[n]) if n in step.inputs else "-" for n in ins]
        row += [format_literal(step.state.env[n]) for n in others]
        if sfc:
            row.append(",".join(sorted(step.state.active)))
        rows.append(row)
    widths = [max(len(r[c]) for r in [header, *rows]) for c in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in [header, *rows]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
