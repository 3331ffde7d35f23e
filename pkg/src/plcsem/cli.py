"""Command-line front end.

Exit codes: 0 success / property holds / programs equivalent, 1 counterexample
or non-equivalence, 2 usage, parse or semantic error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import checker
from .core import VarKind, VarType, format_literal, parse_literal
from .errors import PlcError
from .il import DEFAULT_FUEL, format_il, parse_il
from .ld import format_ld, parse_ld
from .ld2il import Equivalent, Exhaustive, RandomMode, check_equivalence, compile_ld
from .sfc import format_sfc, load_sfc

FORMATS = ("il", "ld", "sfc")


class UsageError(Exception):
    pass


def detect_format(path: str, override: str | None) -> str:
    if override:
        return override
    name = Path(path).name
    if name.endswith(".ld.json"):
        return "ld"
    if name.endswith(".sfc.json"):
        return "sfc"
    if name.endswith(".il"):
        return "il"
    raise UsageError(f"cannot tell the format of {path!r}; use --format")


def load(path: str, fmt: str | None = None):
    fmt = detect_format(path, fmt)
    text = Path(path).read_text()
    if fmt == "il":
        prog = parse_il(text)
        prog.check_declared()
        return fmt, prog
    if fmt == "ld":
        return fmt, parse_ld(text)
    return fmt, load_sfc(text)


def pretty(fmt: str, prog) -> str:
    return {"il": format_il, "ld": format_ld, "sfc": format_sfc}[fmt](prog)


def make_system(fmt: str, prog, fuel: int) -> checker.System:
    if fmt == "il":
        return checker.IlSys(prog, fuel)
    if fmt == "ld":
        return checker.LdSys(prog)
    return checker.SfcSys(prog, fuel)


def parse_assignments(text: str | None, sys_: checker.System) -> dict:
    """``k=v,k=v`` over INPUT variables; unmentioned inputs keep their initial value."""
    decls = {d.name: d for d in sys_.decls if d.kind is VarKind.INPUT}
    values = {name: d.initial_value for name, d in decls.items()}
    if not text:
        return values
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise UsageError(f"bad input assignment {item!r}; expected name=value")
        name, raw = (s.strip() for s in item.split("=", 1))
        if name not in decls:
            raise UsageError(f"{name!r} is not an INPUT variable")
        value = _coerce(raw, decls[name].ty)
        values[name] = value
    return values


def _coerce(raw, ty: VarType):
    if isinstance(raw, str):
        if ty is VarType.BOOL and raw in ("0", "1"):
            return raw == "1"
        value = parse_literal(raw)
    else:
        value = raw
    if not ty.accepts(value):
        raise UsageError(f"{raw!r} is not a {ty.value} value")
    return value


def _write_json(path: str | None, payload) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")


# -- subcommands ------------------------------------------------------------------------


def cmd_parse(args) -> int:
    fmt, prog = load(args.file, args.format)
    sys.stdout.write(pretty(fmt, prog))
    return 0


def cmd_run(args) -> int:
    fmt, prog = load(args.file, args.format)
    system = make_system(fmt, prog, args.fuel)
    inputs = parse_assignments(args.inputs, system)
    post = checker.scan_cycle(system, inputs, checker.initial_state(system))
    outputs = {d.name: post.env[d.name] for d in system.decls if d.kind is VarKind.OUTPUT}
    for name, value in outputs.items():
        print(f"{name}={format_literal(value)}")
    if post.sfc is not None:
        print(f"active={','.join(sorted(post.active))}")
    _write_json(args.json_out, checker.state_to_json(post))
    return 0


def cmd_translate(args) -> int:
    fmt, prog = load(args.file, args.format or "ld")
    if fmt != "ld":
        raise UsageError("translate expects an LD program")
    text = format_il(compile_ld(prog))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_equiv(args) -> int:
    _, ld = load(args.ld, "ld")
    _, il = load(args.il, "il")
    if args.random is not None:
        seed = 0 if args.seed is None else args.seed
        print(f"seed: {seed}")
        mode = RandomMode(args.random, seed)
    else:
        mode = Exhaustive()
    verdict = check_equivalence(ld, il, mode)
    if isinstance(verdict, Equivalent):
        print(f"Equivalent ({verdict.environments} environments)")
        _write_json(args.json_out, {"verdict": "Equivalent", "environments": verdict.environments})
        return 0
    print("NotEquivalent")
    names = sorted(verdict.witness)
    il_res = verdict.il_result
    rows = [("variable", "witness", "ld", "il")]
    for n in names:
        got = il_res[n] if not isinstance(il_res, Exception) else None
        rows.append(
            (n, format_literal(verdict.witness[n]), format_literal(verdict.ld_result[n]),
             format_literal(got) if got is not None else "error")
        )
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    if isinstance(il_res, Exception):
        print(f"IL error: {il_res}")
    _write_json(
        args.json_out,
        {
            "verdict": "NotEquivalent",
            "witness": verdict.witness.as_dict(),
            "ld_result": verdict.ld_result.as_dict(),
            "il_result": str(il_res) if isinstance(il_res, Exception) else il_res.as_dict(),
        },
    )
    return 1


def cmd_simulate(args) -> int:
    fmt, prog = load(args.file, args.format)
    system = make_system(fmt, prog, args.fuel)
    types = {d.name: d.ty for d in system.decls}
    if args.inputs_file:
        raw = json.loads(Path(args.inputs_file).read_text())
        if not isinstance(raw, list) or not all(isinstance(r, dict) for r in raw):
            raise UsageError("inputs file must be a JSON list of objects")
        cycles = len(raw) if args.cycles is None else args.cycles
        if cycles > len(raw):
            raise UsageError(f"--cycles {cycles} exceeds the {len(raw)} input rows")
        rows = []
        for r in raw[:cycles]:
            base = parse_assignments(None, system)
            for k, v in r.items():
                if k not in base:
                    raise UsageError(f"{k!r} is not an INPUT variable")
                base[k] = _coerce(v, types[k])
            rows.append(base)
    else:
        seed = 0 if args.seed is None else args.seed
        print(f"seed: {seed}")
        rng = random.Random(seed)
        names = checker.input_names(system)
        bad = [n for n in names if types[n] is not VarType.BOOL]
        if bad:
            raise UsageError(f"random inputs need BOOL inputs; give --inputs-file for {', '.join(bad)}")
        rows = [{n: rng.random() < 0.5 for n in names} for _ in range(args.cycles or 10)]
    trace = checker.simulate(system, rows)
    print(checker.format_trace(system, trace))
    _write_json(args.json_out, checker.trace_to_json(trace))
    return 0


def cmd_check(args) -> int:
    fmt, prog = load(args.file, args.format)
    system = make_system(fmt, prog, args.fuel)
    prop = checker.parse_property(Path(args.prop).read_text())
    if args.inductive:
        verdict = checker.check_inductive(system, prop, args.max_states)
    else:
        verdict = checker.check_bounded(system, prop, args.depth, max_states=args.max_states)
    _write_json(args.json_out, {"property": prop.name, **checker.verdict_to_json(verdict)})
    if isinstance(verdict, checker.HoldsWithinBound):
        extent = "reachable set exhausted" if verdict.exhausted else f"depth {verdict.depth_reached}"
        print(f"{prop.name}: HoldsWithinBound ({verdict.states_visited} states, {extent})")
        return 0
    if isinstance(verdict, checker.Inductive):
        print(f"{prop.name}: Inductive ({verdict.states_checked} states checked)")
        return 0
    if isinstance(verdict, checker.Counterexample):
        print(f"{prop.name}: Counterexample ({verdict.trace.cycles} cycles)")
        print(checker.format_trace(system, verdict.trace))
        return 1
    print(f"{prop.name}: NotInductive ({verdict.reason})")
    steps = [checker.TraceStep({}, verdict.witness)]
    if verdict.inputs is not None:
        steps.append(checker.TraceStep(verdict.inputs, verdict.successor))
    print(checker.format_trace(system, checker.Trace(tuple(steps))))
    return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plcsem", description="PLC program semantics toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fuel=True):
        p.add_argument("--format", choices=FORMATS, help="override extension-based format detection")
        if fuel:
            p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="IL step budget per execution")
        p.add_argument("--json-out", metavar="PATH", help="also write a structured JSON result")

    p = sub.add_parser("parse", help="validate and pretty-print a program")
    p.add_argument("file")
    p.add_argument("--format", choices=FORMATS)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("run", help="run one scan cycle and print the outputs")
    p.add_argument("file")
    p.add_argument("--inputs", help="k=v,k=v assignment of INPUT variables")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("translate", help="compile an LD program to IL")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=FORMATS)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("equiv", help="check an IL program against an LD program")
    p.add_argument("ld")
    p.add_argument("il")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exhaustive", action="store_true", help="enumerate every BOOL assignment (default)")
    group.add_argument("--random", type=int, metavar="N", help="sample N random assignments")
    p.add_argument("--seed", type=int)
    p.add_argument("--json-out", metavar="PATH")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("simulate", help="run several scan cycles and print a trace table")
    p.add_argument("file")
    p.add_argument("--cycles", type=int)
    p.add_argument("--inputs-file", help="JSON list of per-cycle input objects")
    p.add_argument("--seed", type=int, help="seed for random inputs when no inputs file is given")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="check a safety property")
    p.add_argument("file")
    p.add_argument("--prop", required=True)
    p.add_argument("--depth", type=int, default=checker.DEFAULT_DEPTH)
    p.add_argument("--inductive", action="store_true", help="check one-step inductiveness instead")
    p.add_argument("--max-states", type=int, default=checker.DEFAULT_MAX_STATES)
    common(p)
    p.set_defaults(func=cmd_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PlcError, UsageError) as exc:
        print(str(exc) if isinstance(exc, PlcError) else f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
