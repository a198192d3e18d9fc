"""JSON interchange format for parsed programs.

Gate applications with no definition in the program are tagged
``unresolved_application``; those with one are ``application``. Other
instructions use ``measure``, ``label``, ``jump``, ``jump_when``,
``jump_unless``, ``reset``, ``wait``, ``halt``, ``nop``, ``classical_unary``,
``classical_binary``, ``pragma`` and ``circuit_application``.
"""
from __future__ import annotations

import json

from ..syntax import ast
from ..syntax.expr import format_expression


def _arg(a):
    if isinstance(a, ast.Qubit):
        return ["qubit", a.index]
    if isinstance(a, ast.Address):
        return ["address", a.index]
    if isinstance(a, ast.Formal):
        return ["formal", a.name]
    raise TypeError(a)


def _param(p):
    if isinstance(p, ast.Segment):
        return ["segment", p.low, p.high]
    return ["expression", format_expression(p)]


def instruction_to_json(ins, defined: set[str]) -> dict:
    if isinstance(ins, ast.GateApplication):
        return {
            "type": "application" if ins.name in defined else "unresolved_application",
            "operator": ins.name,
            "arguments": [_arg(a) for a in ins.args],
            "parameters": [_param(p) for p in ins.params] if ins.params else None,
        }
    if isinstance(ins, ast.CircuitApplication):
        return {
            "type": "circuit_application",
            "operator": ins.name,
            "arguments": [_arg(a) for a in ins.args],
            "parameters": [_param(p) for p in ins.params] if ins.params else None,
        }
    if isinstance(ins, ast.Measure):
        return {"type": "measure", "qubit": _arg(ins.qubit),
                "address": _arg(ins.address) if ins.address is not None else None}
    if isinstance(ins, ast.Label):
        return {"type": "label", "label": ins.name}
    if isinstance(ins, ast.Jump):
        return {"type": "jump", "label": ins.label}
    if isinstance(ins, ast.JumpWhen):
        return {"type": "jump_when", "label": ins.label, "address": _arg(ins.address)}
    if isinstance(ins, ast.JumpUnless):
        return {"type": "jump_unless", "label": ins.label, "address": _arg(ins.address)}
    if isinstance(ins, ast.ClassicalUnary):
        return {"type": "classical_unary", "operator": ins.kind, "arguments": [_arg(ins.address)]}
    if isinstance(ins, ast.ClassicalBinary):
        return {"type": "classical_binary", "operator": ins.kind,
                "arguments": [_arg(ins.left), _arg(ins.right)]}
    if isinstance(ins, ast.Pragma):
        return {"type": "pragma", "identifiers": list(ins.words), "string": ins.text}
    for cls, tag in ((ast.Reset, "reset"), (ast.Wait, "wait"), (ast.Halt, "halt"), (ast.Nop, "nop")):
        if isinstance(ins, cls):
            return {"type": tag}
    raise TypeError(f"cannot export {ins!r}")


def program_to_json(p) -> dict:
    defined = set(p.gates) | set(getattr(p, "circuits", {}))
    return {
        "type": "parsed_program",
        "executable_program": [instruction_to_json(i, defined) for i in p.instructions],
    }


def export_json(p) -> str:
    return json.dumps(program_to_json(p), indent=2) + "\n"
