"""Circuit expansion and linking of parsed programs into executable form."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import linalg
from .syntax import ast
from .syntax.expr import ExpressionError, Number, Param, evaluate, params_of, substitute


class ExpansionError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"{line}: {message}" if line is not None else message)


@dataclass
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: Optional[int] = None

    def __str__(self):
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{self.severity}: {where}{self.message}"


class LinkError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


@dataclass
class FlatProgram:
    """Instructions with every circuit application expanded away."""
    gates: dict[str, ast.GateDefinition] = field(default_factory=dict)
    instructions: list = field(default_factory=list)

    @property
    def circuits(self) -> dict:
        return {}


# Expansion ------------------------------------------------------------------

def _check_recursion(circuits: Mapping[str, ast.CircuitDefinition]):
    state: dict[str, int] = {}

    def visit(name: str, path: list[str]):
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            cycle = " -> ".join(path[path.index(name):] + [name])
            raise ExpansionError(f"recursive circuit: {cycle}", circuits[name].line)
        state[name] = 1
        for ins in circuits[name].body:
            if isinstance(ins, ast.CircuitApplication) and ins.name in circuits:
                visit(ins.name, path + [name])
        state[name] = 2

    for name in circuits:
        visit(name, [])


class _Expander:
    def __init__(self, circuits: Mapping[str, ast.CircuitDefinition], used_labels: set[str]):
        self.circuits = circuits
        self.used = set(used_labels)
        self.counter = itertools.count(1)
        self.local_labels = {
            name: {b.name for b in c.body if isinstance(b, ast.Label)} for name, c in circuits.items()
        }
        self.all_local = set().union(*self.local_labels.values()) if circuits else set()

    def fresh(self, name: str) -> str:
        while True:
            candidate = f"{name}_{next(self.counter)}"
            if candidate not in self.used:
                self.used.add(candidate)
                return candidate

    def expand(self, app: ast.CircuitApplication) -> list:
        circ = self.circuits.get(app.name)
        if circ is None:
            raise ExpansionError(f"undefined circuit {app.name!r}", app.line)
        if len(app.params) != len(circ.params) or len(app.args) != len(circ.args):
            raise ExpansionError(
                f"circuit {app.name} expects {len(circ.params)} parameter(s) and {len(circ.args)} "
                f"argument(s), got {len(app.params)} and {len(app.args)}", app.line)
        params: dict[str, object] = {}
        for formal, actual in zip(circ.params, app.params):
            if isinstance(actual, ast.Segment):
                params[formal] = actual
            else:
                try:
                    params[formal] = Number(evaluate(actual))
                except ExpressionError as exc:
                    raise ExpansionError(str(exc), app.line) from None
        args = dict(zip(circ.args, app.args))
        local = self.local_labels[circ.name]
        renames = {lbl: self.fresh(lbl) for lbl in sorted(local)}
        out = []
        for ins in circ.body:
            ins = self._substitute(ins, params, args, renames, circ.name, app.line)
            if isinstance(ins, ast.CircuitApplication):
                out.extend(self.expand(ins))
            else:
                out.append(ins)
        return out

    def _target(self, label: str, renames: dict, circ: str, line) -> str:
        if label in renames:
            return renames[label]
        if label in self.all_local:
            raise ExpansionError(f"jump from circuit {circ} into another circuit's label @{label}", line)
        return label

    def _arg(self, a, args: dict, line):
        if isinstance(a, ast.Formal):
            if a.name not in args:
                raise ExpansionError(f"unbound formal argument {a.name!r}", line)
            return args[a.name]
        return a

    def _param(self, p, params: dict, line):
        if isinstance(p, ast.Segment):
            return p
        if isinstance(p, Param) and isinstance(params.get(p.name), ast.Segment):
            return params[p.name]
        if any(isinstance(params.get(n), ast.Segment) for n in params_of(p)):
            raise ExpansionError("a memory-segment parameter can only be passed through unchanged", line)
        return substitute(p, {k: v for k, v in params.items() if not isinstance(v, ast.Segment)})

    def _substitute(self, ins, params, args, renames, circ, call_line):
        line = call_line
        if isinstance(ins, (ast.GateApplication, ast.CircuitApplication)):
            return type(ins)(ins.name, tuple(self._param(p, params, line) for p in ins.params),
                             tuple(self._arg(a, args, line) for a in ins.args), line=line)
        if isinstance(ins, ast.Measure):
            addr = self._arg(ins.address, args, line) if ins.address is not None else None
            return ast.Measure(self._arg(ins.qubit, args, line), addr, line=line)
        if isinstance(ins, ast.Label):
            return ast.Label(renames[ins.name], line=line)
        if isinstance(ins, ast.Jump):
            return ast.Jump(self._target(ins.label, renames, circ, line), line=line)
        if isinstance(ins, (ast.JumpWhen, ast.JumpUnless)):
            return type(ins)(self._target(ins.label, renames, circ, line),
                             self._arg(ins.address, args, line), line=line)
        if isinstance(ins, ast.ClassicalUnary):
            return ast.ClassicalUnary(ins.kind, self._arg(ins.address, args, line), line=line)
        if isinstance(ins, ast.ClassicalBinary):
            return ast.ClassicalBinary(ins.kind, self._arg(ins.left, args, line),
                                       self._arg(ins.right, args, line), line=line)
        return ins


def expand_circuits(p) -> FlatProgram:
    """Replace every circuit application by its body with formals substituted.

    Labels declared in a circuit body get a fresh ``<name>_<n>`` per expansion.
    """
    circuits = getattr(p, "circuits", {}) or {}
    _check_recursion(circuits)
    top_labels = [i.name for i in p.instructions if isinstance(i, ast.Label)]
    expander = _Expander(circuits, set(top_labels))
    out = []
    for ins in p.instructions:
        if isinstance(ins, ast.CircuitApplication):
            out.extend(expander.expand(ins))
            continue
        if isinstance(ins, ast.JUMPS) and ins.label not in top_labels and ins.label in expander.all_local:
            raise ExpansionError(f"cannot jump into a circuit body (@{ins.label})", ins.line)
        out.append(ins)
    seen: set[str] = set()
    for ins in out:
        if isinstance(ins, ast.Label):
            if ins.name in seen:
                raise ExpansionError(f"label @{ins.name} declared more than once", ins.line)
            seen.add(ins.name)
    return FlatProgram(gates=dict(p.gates), instructions=out)


# Linking --------------------------------------------------------------------

class GateOp:
    __slots__ = ("name", "qubits", "matrix", "definition", "params", "unitary", "line")

    def __init__(self, name, qubits, matrix, definition, params, unitary, line):
        self.name = name
        self.qubits = qubits
        self.matrix = matrix          # None for dynamic (parametric) applications
        self.definition = definition
        self.params = params          # complex values or Segments
        self.unitary = unitary
        self.line = line

    @property
    def dynamic(self) -> bool:
        return self.matrix is None

    def __repr__(self):
        return f"GateOp({self.name}, {self.qubits}, dynamic={self.dynamic})"


class MeasureOp:
    __slots__ = ("qubit", "address", "line")

    def __init__(self, qubit, address, line):
        self.qubit = qubit
        self.address = address
        self.line = line


class JumpOp:
    __slots__ = ("target", "when", "address", "line")

    def __init__(self, target, when, address, line):
        self.target = target
        self.when = when  # None: unconditional; 1: JUMP-WHEN; 0: JUMP-UNLESS
        self.address = address
        self.line = line


class ClassicalOp:
    __slots__ = ("kind", "a", "b", "line")

    def __init__(self, kind, a, b, line):
        self.kind = kind
        self.a = a
        self.b = b
        self.line = line


class SimpleOp:
    """RESET, WAIT, HALT, NOP and the non-executing LABEL / PRAGMA."""
    __slots__ = ("kind", "line")

    def __init__(self, kind, line):
        self.kind = kind
        self.line = line


class UnresolvedOp:
    __slots__ = ("name", "line")

    def __init__(self, name, line):
        self.name = name
        self.line = line


@dataclass
class ExecutableProgram:
    instructions: list
    ops: list
    labels: dict[str, int]
    n_qubits: int
    memory_bits: int
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def __len__(self):
        return len(self.ops)


def gate_matrix(defn: ast.GateDefinition, values) -> np.ndarray:
    """Evaluate a definition's matrix entries at the given parameter values."""
    bindings = dict(zip(defn.params, values))
    n = defn.dimension
    out = np.empty((n, n), dtype=complex)
    for r, row in enumerate(defn.matrix):
        for c, e in enumerate(row):
            out[r, c] = evaluate(e, bindings)
    return out


def _definitions(gate_env):
    if gate_env is None:
        from .stdgates import standard_definitions
        return standard_definitions()
    return gate_env


def link(f, gate_env: Mapping[str, ast.GateDefinition] | None = None, *, strict: bool = False,
         analysis: bool = False) -> ExecutableProgram:
    """Resolve labels and gates of a flat program.

    ``gate_env`` defaults to the standard gate library; definitions in ``f``
    take precedence. Raises :class:`LinkError` carrying all diagnostics if any
    has severity ``error``.
    """
    env = _definitions(gate_env)
    diags: list[Diagnostic] = []
    labels: dict[str, int] = {}
    for idx, ins in enumerate(f.instructions):
        if isinstance(ins, ast.Label):
            if ins.name in labels:
                diags.append(Diagnostic("error", f"label @{ins.name} declared more than once", ins.line))
            labels[ins.name] = idx

    ops = []
    max_qubit = -1
    max_addr = -1
    cache: dict = {}

    def err(msg, line):
        diags.append(Diagnostic("error", msg, line))

    def address(ref, line):
        nonlocal max_addr
        if not isinstance(ref, ast.Address):
            err(f"expected a concrete address, got {ref!r}", line)
            return 0
        max_addr = max(max_addr, ref.index)
        return ref.index

    for ins in f.instructions:
        line = ins.line
        if isinstance(ins, ast.GateApplication):
            defn = f.gates.get(ins.name) or env.get(ins.name)
            qubits = []
            for a in ins.args:
                if isinstance(a, ast.Qubit):
                    qubits.append(a.index)
                else:
                    err(f"{ins.name}: gate arguments must be qubits, got {a!r}", line)
            qubits = tuple(qubits)
            if qubits:
                max_qubit = max(max_qubit, *qubits)
            for p in ins.params:
                if isinstance(p, ast.Segment):
                    max_addr = max(max_addr, p.high)
            if defn is None:
                if analysis:
                    diags.append(Diagnostic("warning", f"unresolved application of {ins.name}", line))
                else:
                    err(f"undefined gate {ins.name!r}", line)
                ops.append(UnresolvedOp(ins.name, line))
                continue
            if len(ins.params) != len(defn.params):
                err(f"{ins.name} takes {len(defn.params)} parameter(s), got {len(ins.params)}", line)
                ops.append(UnresolvedOp(ins.name, line))
                continue
            if len(qubits) != defn.n_qubits:
                err(f"{ins.name} acts on {defn.n_qubits} qubit(s), got {len(ins.args)} argument(s)", line)
                ops.append(UnresolvedOp(ins.name, line))
                continue
            if len(set(qubits)) != len(qubits):
                err(f"{ins.name}: repeated qubit argument in {qubits}", line)
                ops.append(UnresolvedOp(ins.name, line))
                continue
            values = []
            for p in ins.params:
                if isinstance(p, ast.Segment):
                    if p.width not in (64, 128):
                        err(f"parameter segment [{p.low}-{p.high}] must be 64 or 128 bits wide", line)
                    values.append(p)
                    continue
                try:
                    values.append(evaluate(p))
                except ExpressionError as exc:
                    err(str(exc), line)
                    values.append(0j)
            if any(isinstance(v, ast.Segment) for v in values):
                ops.append(GateOp(ins.name, qubits, None, defn, tuple(values), None, line))
                continue
            key = (ins.name, tuple(values), id(defn))
            if key not in cache:
                try:
                    m = gate_matrix(defn, values)
                except ExpressionError as exc:
                    err(f"{ins.name}: {exc}", line)
                    ops.append(UnresolvedOp(ins.name, line))
                    continue
                ok = linalg.check_unitary(m, linalg.UNITARY_TOL)
                cache[key] = (m, ok)
            m, ok = cache[key]
            if not ok:
                msg = f"{ins.name} matrix is not unitary within {linalg.UNITARY_TOL}"
                diags.append(Diagnostic("error" if strict else "warning", msg, line))
            ops.append(GateOp(ins.name, qubits, m, defn, tuple(values), ok, line))
        elif isinstance(ins, ast.CircuitApplication):
            err(f"circuit application {ins.name} must be expanded before linking", line)
        elif isinstance(ins, ast.Measure):
            if not isinstance(ins.qubit, ast.Qubit):
                err(f"MEASURE needs a qubit, got {ins.qubit!r}", line)
                q = 0
            else:
                q = ins.qubit.index
                max_qubit = max(max_qubit, q)
            addr = address(ins.address, line) if ins.address is not None else None
            ops.append(MeasureOp(q, addr, line))
        elif isinstance(ins, ast.JUMPS):
            target = labels.get(ins.label)
            if target is None:
                err(f"undefined label @{ins.label}", line)
                target = 0
            if isinstance(ins, ast.Jump):
                ops.append(JumpOp(target, None, None, line))
            else:
                when = 1 if isinstance(ins, ast.JumpWhen) else 0
                ops.append(JumpOp(target, when, address(ins.address, line), line))
        elif isinstance(ins, ast.ClassicalUnary):
            ops.append(ClassicalOp(ins.kind, address(ins.address, line), None, line))
        elif isinstance(ins, ast.ClassicalBinary):
            ops.append(ClassicalOp(ins.kind, address(ins.left, line), address(ins.right, line), line))
        elif isinstance(ins, ast.Reset):
            ops.append(SimpleOp("RESET", line))
        elif isinstance(ins, ast.Wait):
            ops.append(SimpleOp("WAIT", line))
        elif isinstance(ins, ast.Halt):
            ops.append(SimpleOp("HALT", line))
        elif isinstance(ins, ast.Nop):
            ops.append(SimpleOp("NOP", line))
        elif isinstance(ins, ast.Label):
            ops.append(SimpleOp("LABEL", line))
        elif isinstance(ins, ast.Pragma):
            ops.append(SimpleOp("PRAGMA", line))
        else:
            err(f"cannot link {ins!r}", line)

    if any(d.severity == "error" for d in diags):
        raise LinkError(diags)
    return ExecutableProgram(
        instructions=list(f.instructions), ops=ops, labels=labels,
        n_qubits=max_qubit + 1, memory_bits=max_addr + 1, diagnostics=diags,
    )


def load(p, gate_env=None, *, strict: bool = False) -> ExecutableProgram:
    """``link(expand_circuits(p))`` in one call."""
    return link(expand_circuits(p), gate_env, strict=strict)
