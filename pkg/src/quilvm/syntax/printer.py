"""Canonical text output for parsed programs."""
from __future__ import annotations

from . import ast
from .expr import format_expression


def format_parameter(p: ast.Parameter) -> str:
    if isinstance(p, ast.Segment):
        return f"[{p.low}]" if p.low == p.high else f"[{p.low}-{p.high}]"
    return format_expression(p)


def format_argument(a) -> str:
    if isinstance(a, ast.Qubit):
        return str(a.index)
    if isinstance(a, ast.Address):
        return f"[{a.index}]"
    if isinstance(a, ast.Formal):
        return a.name
    raise TypeError(f"not an argument: {a!r}")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_instruction(ins: ast.Instruction) -> str:
    if isinstance(ins, (ast.GateApplication, ast.CircuitApplication)):
        head = ins.name
        if ins.params:
            head += "(" + ", ".join(format_parameter(p) for p in ins.params) + ")"
        return " ".join([head, *(format_argument(a) for a in ins.args)])
    if isinstance(ins, ast.Measure):
        parts = ["MEASURE", format_argument(ins.qubit)]
        if ins.address is not None:
            parts.append(format_argument(ins.address))
        return " ".join(parts)
    if isinstance(ins, ast.Label):
        return f"LABEL @{ins.name}"
    if isinstance(ins, ast.Jump):
        return f"JUMP @{ins.label}"
    if isinstance(ins, ast.JumpWhen):
        return f"JUMP-WHEN @{ins.label} {format_argument(ins.address)}"
    if isinstance(ins, ast.JumpUnless):
        return f"JUMP-UNLESS @{ins.label} {format_argument(ins.address)}"
    if isinstance(ins, ast.Reset):
        return "RESET"
    if isinstance(ins, ast.Wait):
        return "WAIT"
    if isinstance(ins, ast.Halt):
        return "HALT"
    if isinstance(ins, ast.Nop):
        return "NOP"
    if isinstance(ins, ast.ClassicalUnary):
        return f"{ins.kind} {format_argument(ins.address)}"
    if isinstance(ins, ast.ClassicalBinary):
        return f"{ins.kind} {format_argument(ins.left)} {format_argument(ins.right)}"
    if isinstance(ins, ast.Pragma):
        text = "PRAGMA " + " ".join(ins.words)
        if ins.text is not None:
            text += " " + _quote(ins.text)
        return text
    raise TypeError(f"not an instruction: {ins!r}")


def _params_header(params) -> str:
    return "(" + ", ".join("%" + p for p in params) + ")" if params else ""


def format_gate_definition(g: ast.GateDefinition) -> str:
    lines = [f"DEFGATE {g.name}{_params_header(g.params)}:"]
    for row in g.matrix:
        lines.append("    " + ", ".join(format_expression(e) for e in row))
    return "\n".join(lines)


def format_circuit_definition(c: ast.CircuitDefinition) -> str:
    header = f"DEFCIRCUIT {c.name}{_params_header(c.params)}"
    if c.args:
        header += " " + " ".join(c.args)
    lines = [header + ":"]
    lines.extend("    " + format_instruction(b) for b in c.body)
    return "\n".join(lines)


def print_program(p) -> str:
    """Definitions first, then one instruction per line. Empty program prints as ``""``."""
    chunks = [format_gate_definition(g) for g in p.gates.values()]
    chunks += [format_circuit_definition(c) for c in getattr(p, "circuits", {}).values()]
    out = "\n\n".join(chunks)
    if chunks:
        out += "\n\n"
    out += "".join(format_instruction(i) + "\n" for i in p.instructions)
    return out
