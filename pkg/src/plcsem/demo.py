"""Synthetic interlocked two-actuator demonstrator.

This is a stand-in example, not a model of any real plant.  Two motors are
driven from parallel branches of one chart; each branch toggles between a
wait step and a run step.  Mutual exclusion of the motors rests entirely on
the transition guards: A may start only while B is not running, B only while
A is not running and A is not being requested, and a running motor yields
when the other branch is found running.

``buggy=True`` drops the ``NOT reqA`` term from B's start guard, so both
motors start together when both requests arrive in the same scan.
"""

from __future__ import annotations

from .checker import Property
from .core import VarDecl, VarKind, VarType
from .sfc import And, Not, Or, SfcAction, SfcModel, StepActive, Step, Transition, VarAtom, format_sfc
from .il import parse_il

MUTEX = Property("motors_mutually_exclusive", Not(And(VarAtom("motorA"), VarAtom("motorB"))))

DECLS = (
    VarDecl("reqA", VarType.BOOL, VarKind.INPUT),
    VarDecl("reqB", VarType.BOOL, VarKind.INPUT),
    VarDecl("stopA", VarType.BOOL, VarKind.INPUT),
    VarDecl("stopB", VarType.BOOL, VarKind.INPUT),
    VarDecl("motorA", VarType.BOOL, VarKind.OUTPUT),
    VarDecl("motorB", VarType.BOOL, VarKind.OUTPUT),
)

_BODIES = {
    "all_off": "LD FALSE\nST motorA\nST motorB\n",
    "a_on": "LD TRUE\nST motorA\n",
    "a_off": "LD FALSE\nST motorA\n",
    "b_on": "LD TRUE\nST motorB\n",
    "b_off": "LD FALSE\nST motorB\n",
}


def interlock(buggy: bool = False) -> SfcModel:
    req_a, req_b = VarAtom("reqA"), VarAtom("reqB")
    b_start = And(req_b, Not(StepActive("RunA")))
    if not buggy:
        b_start = And(And(req_b, Not(req_a)), Not(StepActive("RunA")))
    steps = (
        Step("Init", True, (("N", "all_off"),)),
        Step("WaitA", False, (("N", "a_off"),)),
        Step("RunA", False, (("N", "a_on"),)),
        Step("WaitB", False, (("N", "b_off"),)),
        Step("RunB", False, (("N", "b_on"),)),
    )
    transitions = (
        Transition("start", {"Init"}, {"WaitA", "WaitB"}),
        Transition("a_start", {"WaitA"}, {"RunA"}, And(req_a, Not(StepActive("RunB")))),
        Transition("a_stop", {"RunA"}, {"WaitA"}, Or(VarAtom("stopA"), StepActive("RunB"))),
        Transition("b_start", {"WaitB"}, {"RunB"}, b_start),
        Transition("b_stop", {"RunB"}, {"WaitB"}, Or(VarAtom("stopB"), StepActive("RunA"))),
    )
    actions = tuple(SfcAction(aid, parse_il(body, DECLS)) for aid, body in _BODIES.items())
    return SfcModel(DECLS, steps, transitions, actions)


if __name__ == "__main__":
    print(format_sfc(interlock()), end="")
