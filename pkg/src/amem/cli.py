"""Command-line front end.

Exit codes: 0 accept/success, 1 reject, 2 usage or parse error,
3 invalid or non-confluent, 4 bound exceeded.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from .analysis import predict
from .core import (
    SourceError, ValidationError, dump_trace, parse_multiset, parse_system, serialize_system,
)
from .families import (
    BUILTIN_PROGRAMS, Circuit, CircuitError, Family, FamilyError, build_family, compile_semiuniform,
    eval_circuit, load_family, load_program, synthesize_circuit, uniform_to_ctt, uniform_to_dtt,
    uniform_to_m,
)
from .machines import CyclicMachine, ProgramError
from .semantics import BoundExceeded, Mode, Outcome, Verdict, explore, run

EXIT_ACCEPT, EXIT_REJECT, EXIT_USAGE, EXIT_INVALID, EXIT_BOUND = 0, 1, 2, 3, 4

MODES = [m.value for m in Mode]


def verdict_code(v: Verdict) -> int:
    return {"accept": EXIT_ACCEPT, "reject": EXIT_REJECT,
            "bound-exceeded": EXIT_BOUND}.get(v.kind, EXIT_INVALID)


def outcome_code(o: Outcome) -> int:
    return {Outcome.CONFLUENT_ACCEPT: EXIT_ACCEPT, Outcome.CONFLUENT_REJECT: EXIT_REJECT,
            Outcome.BOUND_EXCEEDED: EXIT_BOUND}.get(o, EXIT_INVALID)


def _load_system(path: str):
    return parse_system(Path(path).read_text())


def _input(word: str | None):
    return parse_multiset(word) if word else None


def cmd_simulate(args) -> int:
    system = _load_system(args.file)
    res = run(system, _input(args.word), args.mode, args.seed, args.max_steps, trace=bool(args.trace))
    if args.trace:
        body = {"verdict": str(res.verdict), "steps": res.steps,
                "trace": json.loads(dump_trace(res.trace))}
        Path(args.trace).write_text(json.dumps(body, indent=1) + "\n")
    print(f"{res.verdict}\nsteps: {res.steps}")
    return verdict_code(res.verdict)


def cmd_explore(args) -> int:
    system = _load_system(args.file)
    res = explore(system, _input(args.word), args.mode, args.max_configs)
    print(res.summary())
    return outcome_code(res.outcome)


def cmd_analyze(args) -> int:
    system = _load_system(args.file)
    if Mode(args.mode) is Mode.RECOGNISER:
        print("analyze supports recogniser1 and acknowledger modes; use explore for recogniser",
              file=sys.stderr)
        return EXIT_USAGE
    pred = predict(system, _input(args.word), args.mode)
    print(pred.table())
    return verdict_code(pred.verdict)


def cmd_compile_tm(args) -> int:
    prog = load_program(args.program)
    system = compile_semiuniform(prog, args.input)
    text = serialize_system(system, "permissible" if args.permissible else "compact")
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}: {len(system.objects)} objects, {len(system.rules)} rules")
    return EXIT_ACCEPT


def _family_from_args(ref: str, args) -> Family:
    if ref.endswith(".json") or Path(ref).is_file():
        fam = load_family(ref)
    else:
        params = {k: v for k, v in (("program", getattr(args, "program", None)),
                                    ("r", getattr(args, "r", None)),
                                    ("bound", getattr(args, "bound", None))) if v}
        fam = build_family(ref, params)
    if getattr(args, "mode", None):
        fam.mode = Mode(args.mode)
    return fam


def _words_up_to(n: int):
    for k in range(1, n + 1):
        for bits in itertools.product("01", repeat=k):
            yield "".join(bits)


def cmd_family(args) -> int:
    fam = _family_from_args(args.builder, args)
    if args.word is not None:
        res = fam.explore(args.word, args.max_configs)
        print(f"{res.verdict}")
        return outcome_code(res.outcome)
    worst = EXIT_ACCEPT
    print(f"{'word':<{max(args.all_up_to, 4)}}  verdict")
    for w in _words_up_to(args.all_up_to):
        res = fam.explore(w, args.max_configs)
        print(f"{w:<{max(args.all_up_to, 4)}}  {res.verdict}")
        code = outcome_code(res.outcome)
        if code > EXIT_REJECT:
            worst = max(worst, code)
    return worst


def cmd_circuit(args) -> int:
    if args.action == "synth":
        if args.n is None or args.output is None:
            print("circuit synth needs -n and -o", file=sys.stderr)
            return EXIT_USAGE
        fam = _family_from_args(args.target, args)
        c = synthesize_circuit(fam, args.n)
        Path(args.output).write_text(c.to_text())
        print(f"wrote {args.output}: {len(c.gates)} gates, depth after encoder "
              f"{c.depth_after_encoder()}")
        return EXIT_ACCEPT
    if args.word is None:
        print("circuit eval needs --word", file=sys.stderr)
        return EXIT_USAGE
    c = Circuit.from_text(Path(args.target).read_text())
    bit = eval_circuit(c, args.word)
    print(bit)
    return EXIT_ACCEPT if bit else EXIT_REJECT


def cmd_reduce(args) -> int:
    fam = _family_from_args(args.family, args)
    fn = {"dtt": uniform_to_dtt, "ctt": uniform_to_ctt, "m": uniform_to_m}[args.kind]
    out = fn(fam, args.word)
    print(out.report())
    return verdict_code(out.verdict)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amem", description="Active membrane systems toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add_word(sp):
        sp.add_argument("--word", help="input multiset for the input membrane, e.g. 'a*2, b'")
        sp.add_argument("--mode", choices=MODES, default=Mode.RECOGNISER1.value)

    s = sub.add_parser("simulate", help="run one seeded computation")
    s.add_argument("file")
    add_word(s)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-steps", type=int, default=10_000)
    s.add_argument("--trace", metavar="OUT", help="write the trace as JSON")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("explore", help="explore every computation")
    s.add_argument("file")
    add_word(s)
    s.add_argument("--max-configs", type=int, default=100_000)
    s.set_defaults(func=cmd_explore)

    s = sub.add_parser("analyze", help="predict the verdict from the dependency graph")
    s.add_argument("file")
    add_word(s)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("compile-tm", help="compile a register program on one input")
    s.add_argument("program", help=f"program file or builtin:{{{','.join(BUILTIN_PROGRAMS)}}}")
    s.add_argument("--input", required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--permissible", action="store_true", help="write multisets with explicit repeats")
    s.set_defaults(func=cmd_compile_tm)

    def add_family_params(sp):
        sp.add_argument("--program")
        sp.add_argument("--r")
        sp.add_argument("--bound")

    s = sub.add_parser("family", help="evaluate a family on words")
    s.add_argument("builder", help="parity, from-tm, m-family, dtt-family or a descriptor .json")
    add_family_params(s)
    s.add_argument("--mode", choices=MODES)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--word")
    g.add_argument("--all-up-to", type=int, metavar="N")
    s.add_argument("--max-configs", type=int, default=100_000)
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("circuit", help="synthesize or evaluate circuits")
    s.add_argument("action", choices=["synth", "eval"])
    s.add_argument("target", help="family (synth) or circuit file (eval)")
    add_family_params(s)
    s.add_argument("-n", type=int)
    s.add_argument("-o", "--output")
    s.add_argument("--word")
    s.set_defaults(func=cmd_circuit)

    s = sub.add_parser("reduce", help="read a truth-table reduction off a uniform family")
    s.add_argument("kind", choices=["dtt", "ctt", "m"])
    s.add_argument("family")
    add_family_params(s)
    s.add_argument("--word", required=True)
    s.set_defaults(func=cmd_reduce)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_ACCEPT
    try:
        return args.func(args)
    except BoundExceeded as exc:
        print(f"BoundExceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except CyclicMachine as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SourceError, ValidationError, ProgramError, FamilyError, CircuitError,
            ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
