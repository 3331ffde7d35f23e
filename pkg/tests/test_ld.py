import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plcsem.core import VarDecl, VarKind, VarType, init_env
from plcsem.errors import InvalidCoil, NonBooleanContact, PlcSyntaxError, UndeclaredVariable
from plcsem.generate import random_ld, random_network
from plcsem.ld import (
    Coil,
    CoilMode,
    Contact,
    LdProgram,
    Parallel,
    Rung,
    Series,
    eval_ld,
    eval_network,
    eval_rung,
    flatten,
    format_ld,
    parse_ld,
)

from oracles import bool_assignments, eval_formula, network_formula

A, B, C = Contact("A"), Contact("B"), Contact("C")
DECLS = (
    VarDecl("A", VarType.BOOL, VarKind.INPUT),
    VarDecl("B", VarType.BOOL, VarKind.OUTPUT),
    VarDecl("C", VarType.BOOL, VarKind.OUTPUT),
)


def env_of(**values):
    return init_env(DECLS).update(values)


def doc(rungs, decls=None):
    decls = decls or [
        {"name": "A", "type": "BOOL", "kind": "INPUT"},
        {"name": "B", "type": "BOOL", "kind": "OUTPUT"},
    ]
    return json.dumps({"decls": decls, "rungs": rungs})


def test_parse_single_rung():
    prog = parse_ld(doc([{"network": {"kind": "contact", "var": "A"}, "coils": [{"var": "B"}]}]))
    assert prog.rungs == (Rung(Contact("A", False), (Coil("B", CoilMode.NORMAL),)),)


def test_parse_series_no_nc():
    net = {"kind": "series", "children": [
        {"kind": "contact", "var": "A"}, {"kind": "contact", "var": "B", "negated": True}]}
    prog = parse_ld(doc([{"network": net, "coils": [{"var": "B"}]}]))
    assert prog.rungs[0].network == Series((Contact("A", False), Contact("B", True)))


def test_parse_flattens_singletons():
    net = {"kind": "parallel", "children": [{"kind": "series", "children": [{"kind": "contact", "var": "A"}]}]}
    prog = parse_ld(doc([{"network": net, "coils": [{"var": "B"}]}]))
    assert prog.rungs[0].network == Contact("A")


def test_parse_undeclared_contact():
    with pytest.raises(UndeclaredVariable) as exc:
        parse_ld(doc([{"network": {"kind": "contact", "var": "Q"}, "coils": [{"var": "B"}]}]))
    assert exc.value.name == "Q"


def test_parse_int_contact():
    decls = [{"name": "A", "type": "INT"}, {"name": "B", "type": "BOOL", "kind": "OUTPUT"}]
    with pytest.raises(NonBooleanContact):
        parse_ld(doc([{"network": {"kind": "contact", "var": "A"}, "coils": [{"var": "B"}]}], decls))


def test_coil_on_input_rejected():
    with pytest.raises(InvalidCoil):
        parse_ld(doc([{"network": {"kind": "contact", "var": "B"}, "coils": [{"var": "A"}]}]))


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        json.dumps([]),
        doc([{"coils": [{"var": "B"}]}]),
        doc([{"network": {"kind": "wire"}, "coils": [{"var": "B"}]}]),
        doc([{"network": {"kind": "series", "children": []}, "coils": [{"var": "B"}]}]),
        doc([{"network": {"kind": "contact", "var": "A"}, "coils": []}]),
        doc([{"network": {"kind": "contact", "var": "A"}, "coils": [{"var": "B", "mode": "TOGGLE"}]}]),
    ],
)
def test_parse_syntax_errors(text):
    with pytest.raises(PlcSyntaxError):
        parse_ld(text)


def test_contact():
    assert eval_network(Contact("A"), env_of(A=True)) is True
    assert eval_network(Contact("A", True), env_of(A=True)) is False


def test_series_truth_table():
    net = Series((A, Contact("B", True)))
    for env in bool_assignments("AB"):
        assert eval_network(net, env_of(**env)) == (env["A"] and not env["B"])


def test_parallel_of_series_truth_table():
    net = Parallel((Series((A, B)), C))
    for env in bool_assignments("ABC"):
        assert eval_network(net, env_of(**env)) == ((env["A"] and env["B"]) or env["C"])


def test_rung_normal_coil():
    assert eval_rung(Rung(A, (Coil("B"),)), env_of(A=True))["B"] is True


def test_rung_set_latches():
    assert eval_rung(Rung(A, (Coil("B", CoilMode.SET),)), env_of(A=False, B=True))["B"] is True


def test_rung_reset():
    rung = Rung(A, (Coil("B", CoilMode.RESET),))
    assert eval_rung(rung, env_of(A=True, B=True))["B"] is False
    assert eval_rung(rung, env_of(A=False, B=True))["B"] is True


def test_rung_two_coils():
    out = eval_rung(Rung(A, (Coil("B"), Coil("C", CoilMode.NEGATED))), env_of(A=True))
    assert (out["B"], out["C"]) == (True, False)


def test_same_coil_twice_left_to_right():
    out = eval_rung(Rung(A, (Coil("B"), Coil("B", CoilMode.NEGATED))), env_of(A=True))
    assert out["B"] is False


def test_rung_order_matters():
    r1 = Rung(A, (Coil("B"),))
    r2 = Rung(B, (Coil("C"),))
    out = eval_ld(LdProgram(DECLS, (r1, r2)), env_of(A=True))
    assert (out["B"], out["C"]) == (True, True)
    out = eval_ld(LdProgram(DECLS, (r2, r1)), env_of(A=True, B=False))
    assert (out["B"], out["C"]) == (True, False)


def test_empty_program_identity():
    env = env_of(A=True, C=True)
    assert eval_ld(LdProgram(DECLS, ()), env) == env


def test_networks_match_formula_oracle():
    rng = random.Random(7)
    names = [f"v{i}" for i in range(8)]
    decls = [VarDecl(n, VarType.BOOL) for n in names]
    base = init_env(decls)
    for _ in range(1000):
        k = rng.randint(1, 8)
        net = random_network(rng, names[:k], rng.randint(1, 4))
        formula = network_formula(net)
        for env in bool_assignments(names[:k]):
            full = base.update(env)
            assert eval_network(net, full) == eval_formula(formula, full)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_flatten_invariance(seed):
    rng = random.Random(seed)
    names = ["a", "b", "c", "d"]
    decls = [VarDecl(n, VarType.BOOL) for n in names]
    net = random_network(rng, names, 5)
    flat = flatten(net)
    for env in bool_assignments(names):
        full = init_env(decls).update(env)
        assert eval_network(net, full) == eval_network(flat, full)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_rung_touches_only_coils(seed):
    rng = random.Random(seed)
    prog = random_ld(rng, max_rungs=1)
    rung = prog.rungs[0]
    coil_vars = {c.var for c in rung.coils}
    start = init_env(prog.decls).update({d.name: rng.random() < 0.5 for d in prog.decls})
    out = eval_rung(rung, start)
    for name in start:
        if name not in coil_vars:
            assert out[name] == start[name]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_ld_roundtrip(seed):
    prog = random_ld(random.Random(seed))
    assert parse_ld(format_ld(prog)) == prog
