"""Greedy parallelization of basic blocks.

Grouping uses qubit (and, for measurements, address) disjointness as the
commutation test. That is sound but conservative: ``Z 0`` and ``CNOT 0 1``
commute yet land in separate groups.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..syntax import ast

BARRIER = "parallelization_barrier"


@dataclass
class ParallelSchedule:
    groups: list[list] = field(default_factory=list)
    gate_times: dict[str, str] = field(default_factory=dict)

    def instructions(self) -> list:
        return [ins for g in self.groups for ins in g]


def _solitary(ins) -> bool:
    return isinstance(ins, (*ast.JUMPS, ast.Reset, ast.Wait, ast.Halt, ast.ClassicalUnary,
                            ast.ClassicalBinary)) or ast.is_dynamic(ins)


def _footprint(ins) -> tuple[set, set]:
    if isinstance(ins, ast.Measure):
        addrs = set(ast.addresses_of(ins))
        return set(ast.qubits_of(ins)), addrs
    return set(ast.qubits_of(ins)), set()


def parallelize(block) -> ParallelSchedule:
    """Split a basic block into ordered groups of mutually disjoint instructions.

    Labels, NOP and PRAGMA close the current group without joining one;
    ``PRAGMA gate_time NAME "duration"`` is recorded in ``gate_times``.
    Jumps, RESET, WAIT, HALT, classical instructions and dynamic-parameter
    gates each get a group of their own.
    """
    instructions = getattr(block, "instructions", block)
    sched = ParallelSchedule()
    current: list = []
    used_q: set = set()
    used_a: set = set()

    def close():
        nonlocal current, used_q, used_a
        if current:
            sched.groups.append(current)
        current, used_q, used_a = [], set(), set()

    for ins in instructions:
        if isinstance(ins, ast.Pragma):
            if ins.words[:1] == ("gate_time",) and len(ins.words) == 2 and ins.text is not None:
                sched.gate_times[ins.words[1]] = ins.text
            close()
            continue
        if isinstance(ins, (ast.Label, ast.Nop)):
            close()
            continue
        if _solitary(ins):
            close()
            sched.groups.append([ins])
            continue
        qs, addrs = _footprint(ins)
        if qs & used_q or addrs & used_a:
            close()
        current.append(ins)
        used_q |= qs
        used_a |= addrs
    close()
    return sched


def format_schedule(sched: ParallelSchedule) -> str:
    from ..syntax.printer import format_instruction

    lines = []
    for g in sched.groups:
        if len(g) == 1:
            lines.append(format_instruction(g[0]))
        else:
            lines.append("{ " + "; ".join(format_instruction(i) for i in g) + " }")
    return "\n".join(lines) + ("\n" if lines else "")
