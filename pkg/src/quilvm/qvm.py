"""Quantum virtual machine: executes linked programs on a state vector and bit memory.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``. Shot ``i``
of a multi-shot run with seed ``s`` uses ``SeedSequence([s, i])``. One uniform
draw ``u`` in ``[0, 1)`` is consumed per measurement; the outcome is 0 iff
``u < p0``.
"""
from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import linalg
from .memory import DEFAULT_MEMORY_BITS, SegmentError, new_memory, read_segment, read_word_bits
from .program import (ClassicalOp, ExecutableProgram, GateOp, JumpOp, MeasureOp, SimpleOp,
                      UnresolvedOp, gate_matrix)
from .syntax.ast import Segment

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000_000
PROBABILITY_FLOOR = 1e-15


class Status(enum.Enum):
    RUNNING = "running"
    HALTED = "halted"
    WAITING = "waiting"


class WaitResult(enum.Enum):
    RESUME = "resume"
    ABORT = "abort"


class ExecutionError(RuntimeError):
    def __init__(self, message: str, pc: Optional[int] = None, line: Optional[int] = None):
        self.pc = pc
        self.line = line
        where = []
        if pc is not None:
            where.append(f"pc={pc}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class BudgetExhausted(ExecutionError):
    pass


class WaitAborted(ExecutionError):
    pass


WaitHandler = Callable[[np.ndarray], "WaitResult | bool | None"]


@dataclass
class MachineOptions:
    n_qubits: Optional[int] = None
    memory_bits: Optional[int] = None
    seed: Optional[int] = None
    strict_unitary: bool = False
    wait_handler: Optional[WaitHandler] = None
    wait_mode: str = "ignore"  # ignore | fail; used when no handler is given
    budget: int = DEFAULT_BUDGET
    check_norm: bool = True


def fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy) & (2 ** 64 - 1)


def make_rng(seed: Optional[int], shot: Optional[int] = None) -> np.random.Generator:
    if seed is None:
        seed = fresh_seed()
    entropy = seed if shot is None else [seed, shot]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


class Machine:
    """Mutable machine state: ``psi``, ``memory``, the linked program and ``pc``."""

    def __init__(self, program: ExecutableProgram, options: MachineOptions | None = None,
                 rng: np.random.Generator | None = None):
        options = options or MachineOptions()
        nq = program.n_qubits if options.n_qubits is None else options.n_qubits
        if nq < program.n_qubits:
            raise ValueError(f"program needs {program.n_qubits} qubits, override gives {nq}")
        if options.memory_bits is None:
            nc = max(DEFAULT_MEMORY_BITS, program.memory_bits)
        else:
            nc = options.memory_bits
            if nc < program.memory_bits:
                raise ValueError(f"program needs {program.memory_bits} memory bits, override gives {nc}")
        self.program = program
        self.options = options
        self.psi = linalg.StateVector(nq)
        self.memory = new_memory(nc)
        self.pc = 0
        self.steps = 0
        self.rng = rng if rng is not None else make_rng(options.seed)
        self.outcomes: list[int] = []

    @property
    def n_qubits(self) -> int:
        return self.psi.n_qubits

    @property
    def halted(self) -> bool:
        return self.pc >= len(self.program.ops)

    # primitives -----------------------------------------------------------

    def measure(self, qubit: int, address: Optional[int] = None) -> int:
        if address is not None and not 0 <= address < self.memory.shape[0]:
            raise ExecutionError(f"address {address} out of range", self.pc)
        p0, p1 = self.psi.probabilities(qubit)
        if p0 < PROBABILITY_FLOOR and p1 < PROBABILITY_FLOOR:
            raise ExecutionError("measurement probabilities vanished; state corrupted", self.pc)
        u = self.rng.random()
        outcome = 0 if u < p0 else 1
        self.psi.collapse(qubit, outcome, p0 if outcome == 0 else p1)
        if address is not None:
            self.memory[address] = outcome
        self.outcomes.append(outcome)
        return outcome

    def exec_classical(self, kind: str, a: int, b: Optional[int] = None):
        mem = self.memory
        n = mem.shape[0]
        if not 0 <= a < n or (b is not None and not 0 <= b < n):
            raise ExecutionError(f"classical address out of range for {n} bits", self.pc)
        if kind == "FALSE":
            mem[a] = 0
        elif kind == "TRUE":
            mem[a] = 1
        elif kind == "NOT":
            mem[a] = 1 - mem[a]
        elif kind == "AND":
            mem[b] = mem[a] * mem[b]
        elif kind == "OR":
            mem[b] = 1 - (1 - mem[a]) * (1 - mem[b])
        elif kind == "MOVE":
            mem[b] = mem[a]
        elif kind == "EXCHANGE":
            mem[a], mem[b] = mem[b], mem[a]
        else:
            raise ExecutionError(f"unknown classical instruction {kind}", self.pc)

    def _dynamic_matrix(self, op: GateOp) -> tuple[np.ndarray, bool]:
        values = []
        for p in op.params:
            if isinstance(p, Segment):
                try:
                    values.append(read_segment(self.memory, p))
                except SegmentError as exc:
                    raise ExecutionError(str(exc), self.pc, op.line) from None
            else:
                values.append(p)
        m = gate_matrix(op.definition, values)
        if not linalg.check_unitary(m, linalg.UNITARY_TOL):
            if self.options.strict_unitary:
                raise ExecutionError(f"{op.name} evaluated to a non-unitary matrix", self.pc, op.line)
            log.warning("%s evaluated to a non-unitary matrix at pc=%d", op.name, self.pc)
            return m, False
        return m, True

    def _wait(self) -> bool:
        handler = self.options.wait_handler
        if handler is None:
            if self.options.wait_mode == "fail":
                raise WaitAborted("WAIT reached with no handler", self.pc)
            return True
        result = handler(self.memory)
        if result is WaitResult.ABORT:
            raise WaitAborted("WAIT aborted by handler", self.pc)
        # False pauses the machine at the WAIT; run() may be called again to retry
        return result is None or result is True or result is WaitResult.RESUME

    # stepping -------------------------------------------------------------

    def step(self) -> Status:
        ops = self.program.ops
        if self.pc >= len(ops):
            return Status.HALTED
        op = ops[self.pc]
        nxt = self.pc + 1
        if isinstance(op, GateOp):
            if op.matrix is None:
                m, ok = self._dynamic_matrix(op)
            else:
                m, ok = op.matrix, op.unitary
            self.psi.apply(m, op.qubits, check_norm=ok and self.options.check_norm)
        elif isinstance(op, MeasureOp):
            self.measure(op.qubit, op.address)
        elif isinstance(op, JumpOp):
            if op.when is None:
                nxt = op.target
            else:
                if not 0 <= op.address < self.memory.shape[0]:
                    raise ExecutionError(f"address {op.address} out of range", self.pc, op.line)
                if int(self.memory[op.address]) == op.when:
                    nxt = op.target
        elif isinstance(op, ClassicalOp):
            self.exec_classical(op.kind, op.a, op.b)
        elif isinstance(op, SimpleOp):
            kind = op.kind
            if kind == "HALT":
                nxt = len(ops)
            elif kind == "RESET":
                self.psi.reset()
            elif kind == "WAIT":
                if not self._wait():
                    return Status.WAITING
        elif isinstance(op, UnresolvedOp):
            raise ExecutionError(f"cannot execute unresolved gate {op.name}", self.pc, op.line)
        else:
            raise ExecutionError(f"unknown operation {op!r}", self.pc)
        self.pc = nxt
        self.steps += 1
        return Status.HALTED if self.pc >= len(ops) else Status.RUNNING

    def run(self, budget: Optional[int] = None) -> "Machine":
        """Step until halted or until a WAIT handler aborts."""
        budget = self.options.budget if budget is None else budget
        count = 0
        while self.pc < len(self.program.ops):
            if count >= budget:
                raise BudgetExhausted(f"instruction budget of {budget} exhausted", self.pc)
            status = self.step()
            count += 1
            if status is Status.WAITING:
                break
        return self


def load_machine(program: ExecutableProgram, options: MachineOptions | None = None, **kwargs) -> Machine:
    if kwargs:
        base = options or MachineOptions()
        options = MachineOptions(**{**base.__dict__, **kwargs})
    return Machine(program, options)


def run(program: ExecutableProgram, **kwargs) -> Machine:
    return load_machine(program, **kwargs).run()


def run_shots(program: ExecutableProgram, shots: int, seed: Optional[int] = None,
              observed: Sequence[Segment] = (), options: MachineOptions | None = None) -> Counter:
    """Run ``shots`` fresh machines and tally the observed segments' final bits.

    Keys are tuples of MSB-first bit strings, one per observed segment.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    options = options or MachineOptions()
    if seed is None:
        seed = fresh_seed()
    counts: Counter = Counter()
    for i in range(shots):
        m = Machine(program, options, rng=make_rng(seed, i))
        m.run()
        counts[tuple(read_word_bits(m.memory, s) for s in observed)] += 1
    return counts
