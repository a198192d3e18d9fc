import math

import pytest
from hypothesis import given, settings, strategies as st

from quilvm.stdgates import stdgates_source
from quilvm.syntax import ast
from quilvm.syntax.expr import evaluate
from quilvm.syntax.includes import mapping_loader
from quilvm.syntax.parser import ParseError, parse_file, parse_instruction, parse_program
from quilvm.syntax.printer import print_program

from conftest import BELL, CFG_EXAMPLE, CLEAR_CIRCUIT, XOR_CIRCUIT


def test_bell_listing():
    p = parse_program(BELL)
    assert not p.gates and not p.circuits
    assert p.instructions == [
        ast.GateApplication("H", (), (ast.Qubit(0),)),
        ast.GateApplication("CNOT", (), (ast.Qubit(0), ast.Qubit(1))),
    ]
    assert [i.line for i in p.instructions] == [1, 2]


def test_empty_program():
    p = parse_program("")
    assert p.instructions == [] and p.gates == {} and p.circuits == {}
    assert print_program(p) == ""


def test_hadamard_definition():
    p = parse_program("DEFGATE HADAMARD:\n    1/sqrt(2), 1/sqrt(2)\n    1/sqrt(2), -1/sqrt(2)")
    assert p.instructions == []
    g = p.gates["HADAMARD"]
    assert g.dimension == 2 and g.n_qubits == 1 and g.params == ()
    vals = [[evaluate(e) for e in row] for row in g.matrix]
    s = 1 / math.sqrt(2)
    assert vals == [[pytest.approx(s), pytest.approx(s)], [pytest.approx(s), pytest.approx(-s)]]


def test_parametric_definition_and_use():
    p = parse_program("DEFGATE RX(%theta):\n    cos(%theta/2), -i*sin(%theta/2)\n"
                      "    -i*sin(%theta/2), cos(%theta/2)\nRX(pi/2) 3\n")
    assert p.gates["RX"].params == ("theta",)
    (app,) = p.instructions
    assert app.args == (ast.Qubit(3),) and len(app.params) == 1


def test_all_instruction_kinds():
    text = ("MEASURE 7 [8]\nMEASURE 0\nLABEL @a\nJUMP @a\nJUMP-WHEN @a [1]\nJUMP-UNLESS @a [2]\n"
            "RESET\nWAIT\nHALT\nNOP\nFALSE [0]\nTRUE [1]\nNOT [2]\nAND [0] [1]\nOR [0] [1]\n"
            "MOVE [0] [1]\nEXCHANGE [0] [1]\nPRAGMA gate_time H \"50 ns\"\nPNAME([8-71]) 1 0 4\n")
    p = parse_program(text)
    kinds = [type(i).__name__ for i in p.instructions]
    assert kinds == ["Measure", "Measure", "Label", "Jump", "JumpWhen", "JumpUnless", "Reset",
                     "Wait", "Halt", "Nop", "ClassicalUnary", "ClassicalUnary", "ClassicalUnary",
                     "ClassicalBinary", "ClassicalBinary", "ClassicalBinary", "ClassicalBinary",
                     "Pragma", "GateApplication"]
    assert p.instructions[-1].params == (ast.Segment(8, 71),)
    assert p.instructions[17] == ast.Pragma(("gate_time", "H"), "50 ns")
    assert parse_program(print_program(p)).instructions == p.instructions


def test_comments_and_blank_lines():
    p = parse_program("# header\n\nH 0   # trailing\n   \n")
    assert len(p.instructions) == 1 and p.instructions[0].line == 3


def test_paper_examples_parse():
    for text in (CFG_EXAMPLE, XOR_CIRCUIT + "XOR [0] [1] [2]\n", CLEAR_CIRCUIT + "CLEAR 0 [5]\n"):
        p = parse_program(text)
        assert parse_program(print_program(p)).instructions == p.instructions


def test_circuit_application_is_classified():
    p = parse_program("DEFCIRCUIT BELL Qm Qn:\n    H Qm\n    CNOT Qm Qn\n\nBELL 0 1\n")
    assert isinstance(p.instructions[0], ast.CircuitApplication)
    assert p.circuits["BELL"].args == ("Qm", "Qn")


def test_stdgates_roundtrip():
    p = parse_program(stdgates_source())
    assert len(p.gates) == 21
    again = parse_program(print_program(p))
    assert again.gates == p.gates


@pytest.mark.parametrize("text, line", [
    ("H 0\nHalt\n", 2),                                # keywords are case sensitive
    ("H 0\nmeasure 0 [0]\n", 2),
    ("DEFGATE G:\n  1, 0\n  0, 1\n", 2),               # two-space indent
    ("DEFGATE G:\n     1, 0\n     0, 1\n", 2),         # five-space indent
    ("DEFGATE G:\n    1, 0\n    0\n", 3),              # ragged matrix
    ("DEFGATE G:\n    1, 0, 0\n    0, 1, 0\n    0, 0, 1\n", 1),
    ("DEFGATE G:\n    1, 0\n    0, 1\n\nDEFCIRCUIT G:\n    NOP\n", 5),  # 3x3 is not a power of two
    ("H 0\nH -1\n", 2),
    ("H 0\nMEASURE 0 [x]\n", 2),
    ("JUMP-WHEN @a\n", 1),
    ("LABEL a\n", 1),
    ("H(1,) 0\n", 1),
    ("DEFGATE X:\n    0, 1\n    1, 0\nDEFGATE X:\n    0, 1\n    1, 0\n", 4),
    ("RX(%theta) 0\n", 1),                             # formal outside a definition
    ("DEFCIRCUIT C a:\n    H b\n", 2),                 # unknown formal
    ("MEASURE 0 [3-2]\n", 1),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as info:
        parse_program(text)
    assert info.value.line == line


def test_include_stdgates_embedded():
    p = parse_program('INCLUDE "stdgates.quil"\nH 0\n')
    assert "H" in p.gates and "CNOT" in p.gates
    assert len(p.instructions) == 1


def test_include_twice_is_harmless():
    p = parse_program('INCLUDE "stdgates.quil"\nINCLUDE "stdgates.quil"\nH 0\n')
    assert len(p.gates) == 21


def test_include_mapping_and_instructions():
    loader = mapping_loader({"lib.quil": "DEFCIRCUIT B q:\n    H q\nX 1\n"})
    p = parse_program('INCLUDE "lib.quil"\nB 0\n', loader)
    assert "B" in p.circuits
    assert [type(i).__name__ for i in p.instructions] == ["GateApplication", "CircuitApplication"]


def test_include_cycle_detected():
    loader = mapping_loader({"a.quil": 'INCLUDE "b.quil"\n', "b.quil": 'INCLUDE "a.quil"\n'})
    with pytest.raises(ParseError, match="cycl"):
        parse_program('INCLUDE "a.quil"\n', loader)


def test_include_conflicting_definition():
    loader = mapping_loader({"lib.quil": "DEFGATE H:\n    1, 0\n    0, 1\n"})
    with pytest.raises(ParseError):
        parse_program('INCLUDE "stdgates.quil"\nINCLUDE "lib.quil"\n', loader)


def test_missing_include():
    with pytest.raises(ParseError):
        parse_program('INCLUDE "nope.quil"\n', mapping_loader({}, fallback_to_stdgates=False))


def test_file_includes(tmp_path, monkeypatch):
    lib = tmp_path / "lib"
    lib.mkdir()
    (lib / "gates.quil").write_text("DEFGATE MYX:\n    0, 1\n    1, 0\n")
    main = tmp_path / "main.quil"
    main.write_text('INCLUDE "gates.quil"\nMYX 0\n')
    with pytest.raises(ParseError):
        parse_file(str(main), use_env=False)
    assert "MYX" in parse_file(str(main), search_path=[str(lib)], use_env=False).gates
    monkeypatch.setenv("QUILPATH", str(lib))
    assert "MYX" in parse_file(str(main)).gates
    # the including file's directory is searched first
    (tmp_path / "gates.quil").write_text("DEFGATE MYY:\n    0, 1\n    1, 0\n")
    assert "MYY" in parse_file(str(main)).gates


def test_parse_instruction_with_formals():
    ins = parse_instruction("RX(%t) q", params=("t",), args=("q",))
    assert ins.args == (ast.Formal("q"),)


# property: printing any generated flat program and reparsing yields the same AST
qubits = st.integers(0, 20).map(ast.Qubit)
addresses = st.integers(0, 200).map(ast.Address)
labels = st.sampled_from(["a", "b", "loop-1", "_x"])
instructions = st.one_of(
    st.builds(lambda q: ast.GateApplication("H", (), (q,)), qubits),
    st.builds(lambda a, b: ast.GateApplication("CNOT", (), (a, b)), qubits, qubits),
    st.builds(ast.Measure, qubits, st.none() | addresses),
    st.builds(ast.Label, labels),
    st.builds(ast.Jump, labels),
    st.builds(ast.JumpWhen, labels, addresses),
    st.builds(ast.JumpUnless, labels, addresses),
    st.builds(ast.ClassicalUnary, st.sampled_from(ast.UNARY_KINDS), addresses),
    st.builds(ast.ClassicalBinary, st.sampled_from(ast.BINARY_KINDS), addresses, addresses),
    st.just(ast.Reset()), st.just(ast.Halt()), st.just(ast.Nop()), st.just(ast.Wait()),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(instructions, max_size=15))
def test_print_parse_roundtrip(instrs):
    p = ast.ParsedProgram(instructions=list(instrs))
    assert parse_program(print_program(p)).instructions == p.instructions
