"""Syntax tree for Quil programs.

Source line numbers are carried on every instruction but excluded from
equality, so a program and its printed-then-reparsed copy compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .expr import Expression


@dataclass(frozen=True)
class Qubit:
    index: int


@dataclass(frozen=True)
class Address:
    index: int


@dataclass(frozen=True)
class Formal:
    """A circuit formal argument standing in for a qubit or an address."""
    name: str


@dataclass(frozen=True)
class Segment:
    """Inclusive range of classical addresses ``[low-high]``."""
    low: int
    high: int

    def __post_init__(self):
        if self.low < 0 or self.high < self.low:
            raise ValueError(f"invalid memory segment [{self.low}-{self.high}]")

    @property
    def width(self) -> int:
        return self.high - self.low + 1


Argument = Union[Qubit, Address, Formal]
Parameter = Union[Expression, Segment]
AddressRef = Union[Address, Formal]


@dataclass(frozen=True)
class GateApplication:
    name: str
    params: tuple[Parameter, ...]
    args: tuple[Argument, ...]
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class CircuitApplication:
    name: str
    params: tuple[Parameter, ...]
    args: tuple[Argument, ...]
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Measure:
    qubit: Union[Qubit, Formal]
    address: Optional[AddressRef] = None
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Label:
    name: str
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Jump:
    label: str
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class JumpWhen:
    label: str
    address: AddressRef
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class JumpUnless:
    label: str
    address: AddressRef
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Reset:
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Wait:
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Halt:
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Nop:
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class ClassicalUnary:
    kind: str  # FALSE | TRUE | NOT
    address: AddressRef
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class ClassicalBinary:
    kind: str  # AND | OR | MOVE | EXCHANGE
    left: AddressRef
    right: AddressRef
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Pragma:
    words: tuple[str, ...]
    text: Optional[str] = None
    line: Optional[int] = field(default=None, compare=False)


Instruction = Union[
    GateApplication, CircuitApplication, Measure, Label, Jump, JumpWhen, JumpUnless,
    Reset, Wait, Halt, Nop, ClassicalUnary, ClassicalBinary, Pragma,
]

UNARY_KINDS = ("FALSE", "TRUE", "NOT")
BINARY_KINDS = ("AND", "OR", "MOVE", "EXCHANGE")
JUMPS = (Jump, JumpWhen, JumpUnless)


@dataclass(frozen=True)
class GateDefinition:
    name: str
    params: tuple[str, ...]
    matrix: tuple[tuple[Expression, ...], ...]
    line: Optional[int] = field(default=None, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    @property
    def n_qubits(self) -> int:
        return self.dimension.bit_length() - 1


@dataclass(frozen=True)
class CircuitDefinition:
    name: str
    params: tuple[str, ...]
    args: tuple[str, ...]
    body: tuple[Instruction, ...]
    line: Optional[int] = field(default=None, compare=False)


@dataclass
class ParsedProgram:
    gates: dict[str, GateDefinition] = field(default_factory=dict)
    circuits: dict[str, CircuitDefinition] = field(default_factory=dict)
    instructions: list[Instruction] = field(default_factory=list)


def qubits_of(instr: Instruction) -> tuple[int, ...]:
    """Concrete qubit indices an instruction acts on (formals are skipped)."""
    if isinstance(instr, (GateApplication, CircuitApplication)):
        return tuple(a.index for a in instr.args if isinstance(a, Qubit))
    if isinstance(instr, Measure) and isinstance(instr.qubit, Qubit):
        return (instr.qubit.index,)
    return ()


def addresses_of(instr: Instruction) -> tuple[int, ...]:
    """Concrete classical addresses an instruction reads or writes, segments expanded."""
    out: list[int] = []
    refs: list = []
    if isinstance(instr, (GateApplication, CircuitApplication)):
        refs = list(instr.args)
        for p in instr.params:
            if isinstance(p, Segment):
                out.extend(range(p.low, p.high + 1))
    elif isinstance(instr, Measure):
        refs = [instr.address]
    elif isinstance(instr, (JumpWhen, JumpUnless, ClassicalUnary)):
        refs = [instr.address]
    elif isinstance(instr, ClassicalBinary):
        refs = [instr.left, instr.right]
    out.extend(r.index for r in refs if isinstance(r, Address))
    return tuple(out)


def is_dynamic(instr: Instruction) -> bool:
    return isinstance(instr, GateApplication) and any(isinstance(p, Segment) for p in instr.params)
