"""Quil parser, quantum virtual machine, and compilation passes."""
from .linalg import StateVector, apply_gate, check_unitary, kronecker, lift_gate
from .memory import read_segment, write_segment
from .program import (Diagnostic, ExecutableProgram, ExpansionError, FlatProgram, LinkError,
                      expand_circuits, link, load)
from .qvm import Machine, MachineOptions, Status, WaitResult, load_machine, run, run_shots
from .stdgates import standard_gate_matrix, stdgates_source
from .syntax import ParseError, eval_expression, parse_file, parse_program, print_program

__version__ = "0.1.0"
