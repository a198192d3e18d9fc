"""``quil`` command-line front end.

Exit status: 0 on success, 1 for parse/link/validation errors (including a
missing input file), 2 for runtime errors such as an exhausted budget.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from . import memory as memlib
from .analysis import (RewriteError, RewriteRule, RoutingError, Topology, build_cfg, export_json,
                       format_schedule, parallelize, rewrite_gates, route)
from .generators import gen_bell, gen_qft
from .program import ExpansionError, LinkError, expand_circuits, link
from .qvm import ExecutionError, Machine, MachineOptions, WaitResult, run_shots
from .syntax import ast
from .syntax.includes import FileIncludeLoader
from .syntax.parser import ParseError, parse_program
from .syntax.printer import print_program

log = logging.getLogger("quilvm")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class _Invalid(Exception):
    pass


def _read_source(args) -> tuple[str, str, FileIncludeLoader]:
    if args.file == "-":
        text = sys.stdin.read()
        return text, "<stdin>", FileIncludeLoader(os.getcwd(), args.include_path)
    if not os.path.isfile(args.file):
        raise _Invalid(f"{args.file}: file not found")
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    path = os.path.realpath(args.file)
    return text, path, FileIncludeLoader(os.path.dirname(path), args.include_path)


def _parse(args):
    text, source, loader = _read_source(args)
    return parse_program(text, loader, source=source)


def _gate_env(args):
    return {} if args.no_stdgates else None


def _link(args, flat):
    exe = link(flat, _gate_env(args), strict=args.strict_unitary)
    for d in exe.diagnostics:
        print(str(d), file=sys.stderr)
    return exe


def _parse_segment(text: str) -> ast.Segment:
    body = text.strip().strip("[]")
    if "-" in body:
        lo, hi = body.split("-", 1)
        return ast.Segment(int(lo), int(hi))
    return ast.Segment(int(body), int(body))


def _interactive_handler(mem):
    """Prompt for memory edits: ``ADDR BIT`` or ``[lo-hi] VALUE``; blank resumes, ``abort`` stops."""
    print("WAIT: edit memory as 'ADDR BIT' or '[lo-hi] VALUE'; empty line resumes, 'abort' stops",
          file=sys.stderr)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            return WaitResult.RESUME
        if line == "abort":
            return WaitResult.ABORT
        target, _, value = line.partition(" ")
        try:
            if target.startswith("["):
                seg = _parse_segment(target)
                if seg.width == 1:
                    mem[seg.low] = int(value)
                else:
                    memlib.write_segment(mem, seg, complex(value.replace("i", "j")))
            else:
                mem[int(target)] = int(value)
        except (ValueError, IndexError) as exc:
            print(f"could not apply {line!r}: {exc}", file=sys.stderr)
    return WaitResult.RESUME


def _options(args, exe) -> MachineOptions:
    handler = _interactive_handler if args.wait_mode == "interactive" else None
    return MachineOptions(
        n_qubits=args.qubits, memory_bits=args.memory_bits, seed=args.seed,
        strict_unitary=args.strict_unitary, wait_handler=handler,
        wait_mode=args.wait_mode if args.wait_mode != "interactive" else "ignore",
        budget=args.budget,
    )


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# commands -----------------------------------------------------------------

def cmd_parse(args):
    p = _parse(args)
    flat = expand_circuits(p)
    _link(args, flat)
    _emit(args, print_program(flat if args.flat else p))


def cmd_json(args):
    _emit(args, export_json(_parse(args)))


def cmd_run(args):
    exe = _link(args, expand_circuits(_parse(args)))
    try:
        m = Machine(exe, _options(args, exe))
    except ValueError as exc:
        raise _Invalid(str(exc))
    m.run()
    out = []
    if args.dump_state:
        out.append(m.psi.dump())
    n = exe.memory_bits if args.show_bits is None else args.show_bits
    out.append("".join(f"{a}\t{int(m.memory[a])}\n" for a in range(min(n, m.memory.shape[0]))))
    _emit(args, "".join(out))


def cmd_shots(args):
    exe = _link(args, expand_circuits(_parse(args)))
    if args.observe:
        observed = [_parse_segment(s) for s in args.observe]
    elif exe.memory_bits:
        observed = [ast.Segment(0, exe.memory_bits - 1)]
    else:
        observed = []
    options = _options(args, exe)
    try:
        Machine(exe, options)
    except ValueError as exc:
        raise _Invalid(str(exc))
    counts = run_shots(exe, args.shots, args.seed, observed, options)

    def key(item):
        return tuple(int(b, 2) if b else 0 for b in item[0])

    lines = [f"{' '.join(k)}\t{v}\n" for k, v in sorted(counts.items(), key=key)]
    _emit(args, "".join(lines))


def cmd_cfg(args):
    flat = expand_circuits(_parse(args))
    _link(args, flat)
    _emit(args, build_cfg(flat).to_dot())


def cmd_compile(args):
    p = _parse(args)
    flat = expand_circuits(p)
    rules = [RewriteRule.from_string(r) for r in args.rule]
    if rules:
        flat = rewrite_gates(flat, rules, {} if args.no_stdgates else None)
    if args.topology:
        flat = route(flat, Topology.from_string(args.topology))
    _link(args, flat)
    _emit(args, print_program(flat) if not args.instructions_only else
          print_program(type(flat)(gates={}, instructions=flat.instructions)))


def cmd_parallelize(args):
    flat = expand_circuits(_parse(args))
    _link(args, flat)
    cfg = build_cfg(flat)
    out = []
    for b in cfg.blocks:
        sched = parallelize(b)
        out.append(f"# block {b.id}\n")
        out.append(format_schedule(sched))
        for name, t in sorted(sched.gate_times.items()):
            out.append(f"# gate_time {name} {t}\n")
    _emit(args, "".join(out))


def cmd_gen_qft(args):
    _emit(args, gen_qft(args.n, symbolic=args.symbolic))


def cmd_gen_bell(args):
    try:
        _emit(args, gen_bell(args.m, args.n))
    except ValueError as exc:
        raise _Invalid(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write output to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    prog = argparse.ArgumentParser(add_help=False)
    prog.add_argument("file", help="Quil source file, or - for standard input")
    prog.add_argument("-I", "--include-path", action="append", default=[],
                      help="extra directory searched by INCLUDE (before QUILPATH)")
    prog.add_argument("--no-stdgates", action="store_true",
                      help="do not resolve gates against the standard library implicitly")
    prog.add_argument("--strict-unitary", action="store_true",
                      help="treat non-unitary gate matrices as errors")

    machine = argparse.ArgumentParser(add_help=False)
    machine.add_argument("--seed", type=int, default=None)
    machine.add_argument("--qubits", type=int, default=None)
    machine.add_argument("--memory-bits", type=int, default=None)
    machine.add_argument("--wait-mode", choices=["ignore", "fail", "interactive"], default="ignore")
    machine.add_argument("--budget", type=int, default=10_000_000)

    parser = argparse.ArgumentParser(prog="quil", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common, prog], help="validate and print canonical Quil")
    p.add_argument("--flat", action="store_true", help="print after circuit expansion")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("json", parents=[common, prog], help="export the JSON interchange format")
    p.set_defaults(func=cmd_json)

    p = sub.add_parser("run", parents=[common, prog, machine], help="execute once")
    p.add_argument("--dump-state", action="store_true", help="print the final amplitudes")
    p.add_argument("--show-bits", type=int, default=None,
                   help="number of memory bits to print (default: those the program references)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("shots", parents=[common, prog, machine], help="histogram over many runs")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--observe", action="append", default=[],
                   help="memory segment to tally, e.g. [0-1]; repeatable")
    p.set_defaults(func=cmd_shots)

    p = sub.add_parser("cfg", parents=[common, prog], help="control flow graph as DOT")
    p.set_defaults(func=cmd_cfg)

    p = sub.add_parser("compile", parents=[common, prog], help="rewrite gates and route")
    p.add_argument("--rule", action="append", default=[],
                   help='rewrite rule, e.g. "RX(%%t) q -> H q; RZ(%%t) q; H q"')
    p.add_argument("--topology", help='"line:N" or an edge list like "0-1,1-2"')
    p.add_argument("--instructions-only", action="store_true", help="omit gate definitions")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("parallelize", parents=[common, prog], help="per-block parallel schedules")
    p.set_defaults(func=cmd_parallelize)

    p = sub.add_parser("gen-qft", parents=[common], help="emit a QFT program")
    p.add_argument("n", type=int)
    p.add_argument("--symbolic", action="store_true", help="write angles as pi/2^k expressions")
    p.set_defaults(func=cmd_gen_qft)

    p = sub.add_parser("gen-bell", parents=[common], help="emit the BELL circuit and one use of it")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_gen_bell)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except (_Invalid, ParseError, ExpansionError, LinkError, RewriteError, RoutingError) as exc:
        msg = str(exc)
        print(msg if isinstance(exc, LinkError) else f"error: {msg}", file=sys.stderr)
        return EXIT_INVALID
    except (ExecutionError, memlib.SegmentError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
