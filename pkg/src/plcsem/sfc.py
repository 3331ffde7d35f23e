"""Sequential Function Charts: model, ``.sfc.json`` ingestion and evolution.

One call to :func:`evolve` is one scan of the chart: the enabled transitions
are computed against the pre-scan state, a maximal conflict-free subset is
chosen greedily in (priority, id) order and fired simultaneously, then the
action bodies (IL fragments) run on the shared environment.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum

from .core import Environment, VarDecl, VarType, decl_to_json, decls_from_json, init_env
from .errors import (
    AmbiguousPriority,
    DanglingReference,
    DuplicateId,
    MultipleInitialSteps,
    NoInitialStep,
    NonBooleanContact,
    PlcSyntaxError,
    UndeclaredVariable,
)
from .il import DEFAULT_FUEL, JUMPS, ILProgram, format_il, parse_il, run_il

# -- guard expressions (also the property language of the checker) -------------


@dataclass(frozen=True)
class VarAtom:
    name: str


@dataclass(frozen=True)
class StepActive:
    step: str


@dataclass(frozen=True)
class Not:
    arg: GuardExpr


@dataclass(frozen=True)
class And:
    left: GuardExpr
    right: GuardExpr


@dataclass(frozen=True)
class Or:
    left: GuardExpr
    right: GuardExpr


@dataclass(frozen=True)
class ConstTrue:
    pass


@dataclass(frozen=True)
class ConstFalse:
    pass


GuardExpr = VarAtom | StepActive | Not | And | Or | ConstTrue | ConstFalse
TRUE = ConstTrue()
FALSE = ConstFalse()


def implies(a: GuardExpr, b: GuardExpr) -> GuardExpr:
    return Or(Not(a), b)


def eval_expr(g: GuardExpr, env, active) -> bool:
    t = type(g)
    if t is VarAtom:
        return env[g.name]
    if t is StepActive:
        return g.step in active
    if t is Not:
        return not eval_expr(g.arg, env, active)
    if t is And:
        return eval_expr(g.left, env, active) and eval_expr(g.right, env, active)
    if t is Or:
        return eval_expr(g.left, env, active) or eval_expr(g.right, env, active)
    return t is ConstTrue


def eval_guard(g: GuardExpr, st) -> bool:
    """Evaluate against anything with ``env`` and ``active`` attributes."""
    return eval_expr(g, st.env, st.active)


def guard_atoms(g: GuardExpr) -> tuple[set[str], set[str]]:
    """(variable names, step ids) referenced by ``g``."""
    names: set[str] = set()
    steps: set[str] = set()
    todo = [g]
    while todo:
        e = todo.pop()
        if isinstance(e, VarAtom):
            names.add(e.name)
        elif isinstance(e, StepActive):
            steps.add(e.step)
        elif isinstance(e, Not):
            todo.append(e.arg)
        elif isinstance(e, (And, Or)):
            todo += [e.left, e.right]
    return names, steps


def check_guard(g: GuardExpr, decls: Iterable[VarDecl], steps: Iterable[str]) -> None:
    types = {d.name: d.ty for d in decls}
    step_ids = set(steps)
    names, refs = guard_atoms(g)
    for n in sorted(names):
        if n not in types:
            raise UndeclaredVariable(n)
        if types[n] is not VarType.BOOL:
            raise NonBooleanContact(f"guard atom {n!r} is {types[n].value}")
    for s in sorted(refs):
        if s not in step_ids:
            raise DanglingReference(s, "is not a step")


def guard_to_json(g: GuardExpr):
    if isinstance(g, ConstTrue):
        return True
    if isinstance(g, ConstFalse):
        return False
    if isinstance(g, VarAtom):
        return {"var": g.name}
    if isinstance(g, StepActive):
        return {"active": g.step}
    if isinstance(g, Not):
        return {"not": guard_to_json(g.arg)}
    key = "and" if isinstance(g, And) else "or"
    return {key: [guard_to_json(g.left), guard_to_json(g.right)]}


def guard_from_json(obj) -> GuardExpr:
    if obj is True:
        return TRUE
    if obj is False:
        return FALSE
    if not isinstance(obj, dict) or len(obj) != 1:
        raise PlcSyntaxError(f"bad guard expression {obj!r}")
    (key, arg), = obj.items()
    if key == "var" and isinstance(arg, str):
        return VarAtom(arg)
    if key == "active" and isinstance(arg, str):
        return StepActive(arg)
    if key == "not":
        return Not(guard_from_json(arg))
    if key in ("and", "or") and isinstance(arg, list) and len(arg) >= 2:
        node = And if key == "and" else Or
        parts = [guard_from_json(a) for a in arg]
        acc = parts[0]
        for p in parts[1:]:
            acc = node(acc, p)
        return acc
    raise PlcSyntaxError(f"bad guard expression {obj!r}")


def format_guard(g: GuardExpr) -> str:
    if isinstance(g, ConstTrue):
        return "TRUE"
    if isinstance(g, ConstFalse):
        return "FALSE"
    if isinstance(g, VarAtom):
        return g.name
    if isinstance(g, StepActive):
        return f"{g.step}.X"
    if isinstance(g, Not):
        return f"NOT {format_guard(g.arg)}"
    op = "AND" if isinstance(g, And) else "OR"
    return f"({format_guard(g.left)} {op} {format_guard(g.right)})"


# -- model ------------------------------------------------------------------------


class Qualifier(Enum):
    N = "N"
    S = "S"
    R = "R"
    P = "P"


@dataclass(frozen=True)
class Step:
    id: str
    initial: bool = False
    actions: tuple[tuple[Qualifier, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple((Qualifier(q), a) for q, a in self.actions))


@dataclass(frozen=True)
class Transition:
    id: str
    sources: frozenset[str]
    targets: frozenset[str]
    guard: GuardExpr = TRUE
    priority: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sources", frozenset(self.sources))
        object.__setattr__(self, "targets", frozenset(self.targets))
        if not self.sources or not self.targets:
            raise PlcSyntaxError(f"transition {self.id!r} needs sources and targets")


@dataclass(frozen=True)
class SfcAction:
    id: str
    body: ILProgram


@dataclass(frozen=True)
class SfcModel:
    decls: tuple[VarDecl, ...]
    steps: tuple[Step, ...]
    transitions: tuple[Transition, ...]
    actions: tuple[SfcAction, ...]
    step_index: Mapping[str, Step] = field(init=False, compare=False, repr=False)
    action_index: Mapping[str, SfcAction] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        for name in ("decls", "steps", "transitions", "actions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "step_index", {s.id: s for s in self.steps})
        object.__setattr__(self, "action_index", {a.id: a for a in self.actions})
        validate(self)

    @property
    def initial_step(self) -> str:
        return next(s.id for s in self.steps if s.initial)

    def step_ids(self) -> list[str]:
        return sorted(self.step_index)


def validate(m: SfcModel) -> None:
    for kind, items in (("step", m.steps), ("transition", m.transitions), ("action", m.actions)):
        seen = set()
        for item in items:
            if item.id in seen:
                raise DuplicateId(f"duplicate {kind} id {item.id!r}")
            seen.add(item.id)
    initial = [s.id for s in m.steps if s.initial]
    if not initial:
        raise NoInitialStep("no step is marked initial")
    if len(initial) > 1:
        raise MultipleInitialSteps(f"initial steps: {', '.join(initial)}")
    for s in m.steps:
        for _, a in s.actions:
            if a not in m.action_index:
                raise DanglingReference(a, f"is not an action (step {s.id!r})")
    claimed: dict[tuple[str, int], str] = {}
    for t in sorted(m.transitions, key=lambda t: t.id):
        for ref in sorted(t.sources | t.targets):
            if ref not in m.step_index:
                raise DanglingReference(ref, f"is not a step (transition {t.id!r})")
        check_guard(t.guard, m.decls, m.step_index)
        for src in sorted(t.sources):
            other = claimed.setdefault((src, t.priority), t.id)
            if other != t.id:
                raise AmbiguousPriority(
                    f"transitions {other!r} and {t.id!r} leave step {src!r} with priority {t.priority}"
                )
    for a in m.actions:
        if list(a.body.decls) != list(m.decls):
            raise PlcSyntaxError(f"action {a.id!r} must share the chart declarations")
        if any(ins.op in JUMPS for ins in a.body.instrs):
            raise PlcSyntaxError(f"action {a.id!r} contains a jump")
        a.body.check_declared()


# -- state and evolution --------------------------------------------------------


@dataclass(frozen=True)
class SfcState:
    active: frozenset[str]
    env: Environment
    latched: frozenset[str] = frozenset()
    just_activated: frozenset[str] = frozenset()


def initial_sfc_state(m: SfcModel, env: Environment | None = None) -> SfcState:
    """The chart before its first scan.

    The initial step is active but not counted as just activated, so its
    P-qualified actions only run when the step is re-entered.
    """
    return SfcState(frozenset({m.initial_step}), init_env(m.decls) if env is None else env)


def enabled_transitions(m: SfcModel, st: SfcState) -> list[Transition]:
    out = [t for t in m.transitions if t.sources <= st.active and eval_expr(t.guard, st.env, st.active)]
    out.sort(key=lambda t: (t.priority, t.id))
    return out


def select_firing(enabled: Iterable[Transition]) -> list[Transition]:
    consumed: set[str] = set()
    chosen = []
    for t in enabled:
        if t.sources & consumed:
            continue
        chosen.append(t)
        consumed |= t.sources
    return chosen


def fire(st: SfcState, chosen: Iterable[Transition]) -> SfcState:
    sources: set[str] = set()
    targets: set[str] = set()
    for t in chosen:
        sources |= t.sources
        targets |= t.targets
    remaining = st.active - sources
    active = remaining | targets
    return SfcState(active, st.env, st.latched, frozenset(targets - remaining))


def execute_actions(m: SfcModel, st: SfcState, fuel: int = DEFAULT_FUEL) -> SfcState:
    env = st.env
    latched = set(st.latched)
    for sid in sorted(st.active):
        for qual, aid in m.step_index[sid].actions:
            if qual is Qualifier.N:
                env = run_il(m.action_index[aid].body, env, fuel)
            elif qual is Qualifier.S:
                latched.add(aid)
            elif qual is Qualifier.R:
                latched.discard(aid)
            elif sid in st.just_activated:
                env = run_il(m.action_index[aid].body, env, fuel)
    for aid in sorted(latched):
        env = run_il(m.action_index[aid].body, env, fuel)
    return SfcState(st.active, env, frozenset(latched), st.just_activated)


def evolve(m: SfcModel, st: SfcState, fuel: int = DEFAULT_FUEL) -> SfcState:
    fired = fire(st, select_firing(enabled_transitions(m, st)))
    return execute_actions(m, fired, fuel)


# -- .sfc.json document ---------------------------------------------------------


def sfc_to_json(m: SfcModel) -> dict:
    return {
        "decls": [decl_to_json(d) for d in m.decls],
        "steps": [
            {
                "id": s.id,
                "initial": s.initial,
                "actions": [{"qualifier": q.value, "action": a} for q, a in s.actions],
            }
            for s in m.steps
        ],
        "transitions": [
            {
                "id": t.id,
                "sources": sorted(t.sources),
                "targets": sorted(t.targets),
                "guard": guard_to_json(t.guard),
                "priority": t.priority,
            }
            for t in m.transitions
        ],
        "actions": [{"id": a.id, "il": format_il(a.body, with_decls=False)} for a in m.actions],
    }


def _field(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise PlcSyntaxError(f"{where}: missing {key!r}")
    val = obj[key]
    if not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
        raise PlcSyntaxError(f"{where}: {key!r} has the wrong type")
    return val


def sfc_from_json(doc) -> SfcModel:
    if not isinstance(doc, dict):
        raise PlcSyntaxError("SFC document must be an object")
    decls = decls_from_json(doc.get("decls", []))
    steps = []
    for s in doc.get("steps", []):
        sid = _field(s, "id", str, "step")
        acts = []
        for a in s.get("actions", []):
            try:
                acts.append((Qualifier(_field(a, "qualifier", str, sid)), _field(a, "action", str, sid)))
            except ValueError:
                raise PlcSyntaxError(f"step {sid!r}: unknown qualifier {a.get('qualifier')!r}") from None
        initial = s.get("initial", False)
        if not isinstance(initial, bool):
            raise PlcSyntaxError(f"step {sid!r}: 'initial' must be a boolean")
        steps.append(Step(sid, initial, tuple(acts)))
    transitions = []
    for t in doc.get("transitions", []):
        tid = _field(t, "id", str, "transition")
        priority = t.get("priority", 0)
        if type(priority) is not int:
            raise PlcSyntaxError(f"{tid}: 'priority' must be an integer")
        transitions.append(
            Transition(
                tid,
                frozenset(_field(t, "sources", list, tid)),
                frozenset(_field(t, "targets", list, tid)),
                guard_from_json(t.get("guard", True)),
                priority,
            )
        )
    actions = []
    for a in doc.get("actions", []):
        aid = _field(a, "id", str, "action")
        actions.append(SfcAction(aid, parse_il(_field(a, "il", str, aid), decls)))
    return SfcModel(decls, tuple(steps), tuple(transitions), tuple(actions))


def load_sfc(document: str) -> SfcModel:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise PlcSyntaxError(exc.msg, exc.lineno) from None
    return sfc_from_json(doc)


def format_sfc(m: SfcModel) -> str:
    return json.dumps(sfc_to_json(m), indent=2) + "\n"
