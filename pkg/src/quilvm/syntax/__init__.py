from .ast import *  # noqa: F401,F403
from .ast import ParsedProgram, GateDefinition, CircuitDefinition, Segment
from .expr import Expression, ExpressionError, evaluate, format_expression, parse_expression
from .includes import FileIncludeLoader, IncludeNotFound, default_loader, mapping_loader
from .parser import ParseError, parse_file, parse_instruction, parse_program
from .printer import format_instruction, print_program


def eval_expression(expr, bindings=None) -> complex:
    if isinstance(expr, str):
        expr = parse_expression(expr)
    return evaluate(expr, bindings)
