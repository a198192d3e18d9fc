import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quilvm.memory import SegmentError, new_memory, read_segment, read_word_bits, write_segment
from quilvm.program import ExpansionError, LinkError, expand_circuits, link, load
from quilvm.syntax import ast
from quilvm.syntax.parser import parse_program
from quilvm.syntax.printer import print_program

from conftest import BELL, CLEAR_CIRCUIT, XOR_CIRCUIT

BELL_CIRCUIT = "DEFCIRCUIT BELL Qm Qn:\n    H Qm\n    CNOT Qm Qn\n\n"


def flat(text):
    return expand_circuits(parse_program(text))


def bits_of(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


# circuit expansion ----------------------------------------------------------

def test_bell_circuit_expands_to_listing():
    assert flat(BELL_CIRCUIT + "BELL 0 1\n").instructions == parse_program(BELL).instructions


def test_flat_input_unchanged():
    text = "H 0\nMEASURE 0 [0]\nLABEL @x\nJUMP-WHEN @x [0]\n"
    assert flat(text).instructions == parse_program(text).instructions


def test_clear_twice_gets_disjoint_labels():
    f = flat(CLEAR_CIRCUIT + "CLEAR 0 [0]\nCLEAR 1 [1]\n")
    labels = [i.name for i in f.instructions if isinstance(i, ast.Label)]
    assert len(labels) == 2 and len(set(labels)) == 2
    assert all(lbl.startswith("end_") for lbl in labels)
    jumps = [i.label for i in f.instructions if isinstance(i, ast.JumpUnless)]
    assert jumps == labels
    link(f)


def test_fresh_labels_avoid_user_labels():
    f = flat(CLEAR_CIRCUIT + "LABEL @end_1\nCLEAR 0 [0]\n")
    labels = [i.name for i in f.instructions if isinstance(i, ast.Label)]
    assert len(set(labels)) == 2


def test_parameters_substituted_by_value():
    text = ("DEFCIRCUIT ROT(%a) q:\n    RX(%a/2) q\n    RZ(%a) q\n\nROT(pi) 3\n")
    f = flat(text)
    rx, rz = f.instructions
    assert rx.args == (ast.Qubit(3),)
    from quilvm.syntax.expr import evaluate
    assert evaluate(rx.params[0]) == pytest.approx(math.pi / 2)
    assert evaluate(rz.params[0]) == pytest.approx(math.pi)


def test_nested_circuits():
    text = BELL_CIRCUIT + "DEFCIRCUIT TWO a b c:\n    BELL a b\n    BELL b c\n\nTWO 2 0 1\n"
    assert print_program(flat(text)) == "H 2\nCNOT 2 0\nH 0\nCNOT 0 1\n"


def test_segment_parameter_passes_through():
    text = "DEFCIRCUIT R(%t) q:\n    RZ(%t) q\n\nR([0-63]) 0\n"
    (ins,) = flat(text).instructions
    assert ins.params == (ast.Segment(0, 63),)


def test_segment_parameter_inside_expression_rejected():
    with pytest.raises(ExpansionError):
        flat("DEFCIRCUIT R(%t) q:\n    RZ(%t/2) q\n\nR([0-63]) 0\n")


def test_recursive_circuit_rejected():
    with pytest.raises(ExpansionError):
        flat("DEFCIRCUIT A q:\n    B q\n\nDEFCIRCUIT B q:\n    A q\n\nA 0\n")


def test_arity_mismatch():
    with pytest.raises(ExpansionError):
        flat(BELL_CIRCUIT + "BELL 0\n")


def test_circuit_label_scoping():
    foo = "DEFCIRCUIT FOO:\n    LABEL @FOO_A\n    JUMP @GLOBAL\n    JUMP @FOO_A\n\n"
    bar = "DEFCIRCUIT BAR:\n    LABEL @BAR_A\n    JUMP @FOO_A\n\n"
    ok = flat(foo + "LABEL @GLOBAL\nFOO\n")
    assert sum(isinstance(i, ast.Label) for i in ok.instructions) == 2
    with pytest.raises(ExpansionError):
        flat(foo + bar + "LABEL @GLOBAL\nFOO\nBAR\n")
    with pytest.raises(ExpansionError):
        flat(foo + "LABEL @GLOBAL\nFOO\nJUMP @FOO_A\n")


def test_duplicate_top_level_labels():
    with pytest.raises(ExpansionError):
        flat("LABEL @a\nLABEL @a\n")


# linking --------------------------------------------------------------------

def test_link_bell():
    exe = load(parse_program(BELL))
    assert exe.n_qubits == 2 and exe.memory_bits == 0
    assert [op.name for op in exe.ops] == ["H", "CNOT"]
    assert all(not op.dynamic for op in exe.ops)


def test_link_address_bound():
    exe = load(parse_program("MEASURE 0 [100]\n"))
    assert exe.memory_bits == 101


def test_link_dangling_label():
    with pytest.raises(LinkError) as info:
        load(parse_program("JUMP @nowhere\n"))
    assert "nowhere" in str(info.value)
    assert info.value.diagnostics[0].line == 1


def test_link_undefined_gate_and_arity():
    with pytest.raises(LinkError) as info:
        load(parse_program("H 0\nFOO 1\nCNOT 0\nRX 0\nCNOT 1 1\n"))
    assert [d.line for d in info.value.diagnostics] == [2, 3, 4, 5]


def test_link_without_stdgates():
    with pytest.raises(LinkError):
        load(parse_program(BELL), gate_env={})


def test_dynamic_parameter_application():
    text = "DEFGATE PNAME(%a):\n" + "".join(
        "    " + ", ".join("%a" if r == c and r == 0 else ("1" if r == c else "0") for c in range(8)) + "\n"
        for r in range(8)) + "PNAME([8-71]) 1 0 4\n"
    exe = load(parse_program(text))
    (op,) = exe.ops
    assert op.dynamic and op.params == (ast.Segment(8, 71),)
    assert op.qubits == (1, 0, 4)
    assert exe.memory_bits == 72 and exe.n_qubits == 5


def test_non_unitary_warning_and_strict():
    text = "DEFGATE BAD:\n    1, 0\n    0, 2\nBAD 0\n"
    exe = load(parse_program(text))
    assert [d.severity for d in exe.diagnostics] == ["warning"]
    with pytest.raises(LinkError):
        load(parse_program(text), strict=True)


def test_program_definitions_shadow_library():
    exe = load(parse_program("DEFGATE H:\n    0, 1\n    1, 0\nH 0\n"))
    assert np.allclose(exe.ops[0].matrix, [[0, 1], [1, 0]])


# memory segments -------------------------------------------------------------

def test_zero_and_one():
    m = new_memory(128)
    assert read_segment(m, ast.Segment(0, 63)) == 0.0
    word = 0x3FF0000000000000
    for k in range(64):
        m[k] = (word >> k) & 1
    assert read_segment(m, ast.Segment(0, 63)) == 1.0
    assert read_word_bits(m, ast.Segment(0, 63)) == format(word, "064b")


def test_write_zero_clears_bits():
    m = np.ones(64, dtype=np.uint8)
    write_segment(m, ast.Segment(0, 63), 0.0)
    assert not m.any()


def test_paper_angle_roundtrip():
    m = new_memory(64)
    write_segment(m, ast.Segment(0, 63), 0.00724195969993)
    assert read_segment(m, ast.Segment(0, 63)) == 0.00724195969993


def test_msb_is_high_address():
    m = new_memory(64)
    write_segment(m, ast.Segment(0, 63), -0.0)
    assert m[63] == 1 and m[:63].sum() == 0


def test_complex_split():
    m = new_memory(200)
    write_segment(m, ast.Segment(10, 137), 1 + 2j)
    assert read_segment(m, ast.Segment(10, 73)) == 1.0
    assert read_segment(m, ast.Segment(74, 137)) == 2.0
    assert read_segment(m, ast.Segment(10, 137)) == 1 + 2j


def test_nan_and_signed_zero_bits():
    m = new_memory(64)
    seg = ast.Segment(0, 63)
    write_segment(m, seg, float("nan"))
    assert math.isnan(read_segment(m, seg))
    write_segment(m, seg, -0.0)
    assert bits_of(read_segment(m, seg)) == bits_of(-0.0)


@pytest.mark.parametrize("seg", [ast.Segment(0, 31), ast.Segment(0, 65), ast.Segment(10, 73)])
def test_bad_segments(seg):
    with pytest.raises(SegmentError):
        read_segment(new_memory(64), seg)


def test_seeded_random_doubles_roundtrip():
    rng = np.random.default_rng(7)
    words = rng.integers(0, 2 ** 63, size=1000, dtype=np.uint64) * 2 + rng.integers(0, 2, 1000).astype(np.uint64)
    m = new_memory(64)
    seg = ast.Segment(0, 63)
    for w in words:
        x = struct.unpack("<d", struct.pack("<Q", int(w)))[0]
        if not math.isfinite(x):
            continue
        write_segment(m, seg, x)
        assert bits_of(read_segment(m, seg)) == int(w)


@settings(max_examples=300, deadline=None)
@given(st.floats(allow_nan=False), st.integers(0, 100))
def test_roundtrip_property(x, offset):
    m = new_memory(300)
    seg = ast.Segment(offset, offset + 63)
    write_segment(m, seg, x)
    assert bits_of(read_segment(m, seg)) == bits_of(x)
    assert m[:offset].sum() == 0 and m[offset + 64:].sum() == 0


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(allow_nan=False, allow_infinity=True))
def test_complex_roundtrip_property(z):
    m = new_memory(128)
    write_segment(m, ast.Segment(0, 127), z)
    got = read_segment(m, ast.Segment(0, 127))
    assert bits_of(got.real) == bits_of(z.real) and bits_of(got.imag) == bits_of(z.imag)


def test_xor_and_clear_link():
    for text in (XOR_CIRCUIT + "XOR [0] [1] [2]\n", CLEAR_CIRCUIT + "CLEAR 0 [5]\n"):
        load(parse_program(text))
