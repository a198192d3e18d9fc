"""Line-based parser for Quil source text."""
from __future__ import annotations

import re
from typing import Optional

from . import ast
from .expr import Expression, ExpressionError, parse_expression, params_of
from .includes import IncludeLoader, IncludeNotFound, default_loader

IDENT = r"[A-Za-z_][A-Za-z0-9_\-]*"
_IDENT_RE = re.compile(IDENT + r"$")
_INT_RE = re.compile(r"\d+$")
_ADDR_RE = re.compile(r"\[(\d+)\]$")
_SEG_RE = re.compile(r"\[\s*(\d+)\s*(?:-\s*(\d+)\s*)?\]$")
_LABEL_RE = re.compile(r"@(" + IDENT + r")$")

KEYWORDS = frozenset({
    "DEFGATE", "DEFCIRCUIT", "MEASURE", "LABEL", "JUMP", "JUMP-WHEN", "JUMP-UNLESS",
    "RESET", "WAIT", "HALT", "NOP", "PRAGMA", "INCLUDE", *ast.UNARY_KINDS, *ast.BINARY_KINDS,
})


class ParseError(ValueError):
    """Syntax or static-semantics error; ``line`` is 1-based within ``source``."""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class _Scope:
    """What names are legal in the current line: circuit formals and gate/circuit parameters."""

    def __init__(self, params=(), args=()):
        self.params = frozenset(params)
        self.args = frozenset(args)


_TOP = _Scope()


def _strip_comment(line: str) -> str:
    in_str = False
    escaped = False
    for i, ch in enumerate(line):
        if in_str:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch == "#":
            return line[:i]
    return line


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` at parenthesis depth zero."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _matching_paren(text: str, start: int) -> int:
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return i
    return -1


class _LineParser:
    def __init__(self, source: Optional[str]):
        self.source = source

    def error(self, msg: str, line: int) -> ParseError:
        return ParseError(msg, line, self.source)

    # pieces ---------------------------------------------------------------

    def expression(self, text: str, scope: _Scope, line: int) -> Expression:
        try:
            expr = parse_expression(text)
        except ExpressionError as exc:
            raise self.error(str(exc), line) from None
        unknown = params_of(expr) - scope.params
        if unknown:
            names = ", ".join("%" + n for n in sorted(unknown))
            raise self.error(f"undeclared parameter {names}", line)
        return expr

    def parameter(self, text: str, scope: _Scope, line: int) -> ast.Parameter:
        text = text.strip()
        if text.startswith("["):
            m = _SEG_RE.match(text)
            if not m:
                raise self.error(f"malformed memory segment {text!r}", line)
            low = int(m.group(1))
            high = int(m.group(2)) if m.group(2) is not None else low
            if high < low:
                raise self.error(f"memory segment [{low}-{high}] has low > high", line)
            return ast.Segment(low, high)
        if not text:
            raise self.error("empty parameter", line)
        return self.expression(text, scope, line)

    def qubit(self, tok: str, scope: _Scope, line: int):
        if _INT_RE.match(tok):
            return ast.Qubit(int(tok))
        if _IDENT_RE.match(tok):
            if tok in scope.args:
                return ast.Formal(tok)
            raise self.error(f"unknown formal argument {tok!r}", line)
        raise self.error(f"expected a qubit, got {tok!r}", line)

    def address(self, tok: str, scope: _Scope, line: int):
        m = _ADDR_RE.match(tok)
        if m:
            return ast.Address(int(m.group(1)))
        if _IDENT_RE.match(tok) and tok in scope.args:
            return ast.Formal(tok)
        raise self.error(f"expected a classical address, got {tok!r}", line)

    def argument(self, tok: str, scope: _Scope, line: int):
        if tok.startswith("["):
            return self.address(tok, scope, line)
        return self.qubit(tok, scope, line)

    def label(self, tok: str, line: int) -> str:
        m = _LABEL_RE.match(tok)
        if not m:
            raise self.error(f"malformed label {tok!r}", line)
        return m.group(1)

    def name(self, tok: str, line: int) -> str:
        if not _IDENT_RE.match(tok):
            raise self.error(f"invalid identifier {tok!r}", line)
        if tok.upper() in KEYWORDS:
            raise self.error(f"{tok!r} is a reserved keyword", line)
        return tok

    # instructions ---------------------------------------------------------

    def instruction(self, text: str, scope: _Scope, line: int) -> ast.Instruction:
        text = text.strip()
        head = re.match(r"[^\s(]+", text)
        if head is None:
            raise self.error(f"cannot parse {text!r}", line)
        word = head.group()
        rest = text[head.end():]
        toks = rest.split()

        def arity(n: int):
            if len(toks) != n:
                raise self.error(f"{word} takes {n} argument(s), got {len(toks)}", line)

        if word.upper() in KEYWORDS and word != word.upper():
            raise self.error(f"keywords are uppercase: {word!r}", line)
        if word == "MEASURE":
            if len(toks) not in (1, 2):
                raise self.error("MEASURE takes a qubit and an optional address", line)
            q = self.qubit(toks[0], scope, line)
            addr = self.address(toks[1], scope, line) if len(toks) == 2 else None
            return ast.Measure(q, addr, line=line)
        if word == "LABEL":
            arity(1)
            return ast.Label(self.label(toks[0], line), line=line)
        if word == "JUMP":
            arity(1)
            return ast.Jump(self.label(toks[0], line), line=line)
        if word in ("JUMP-WHEN", "JUMP-UNLESS"):
            arity(2)
            cls = ast.JumpWhen if word == "JUMP-WHEN" else ast.JumpUnless
            return cls(self.label(toks[0], line), self.address(toks[1], scope, line), line=line)
        if word in ("RESET", "WAIT", "HALT", "NOP"):
            arity(0)
            return {"RESET": ast.Reset, "WAIT": ast.Wait, "HALT": ast.Halt, "NOP": ast.Nop}[word](line=line)
        if word in ast.UNARY_KINDS:
            arity(1)
            return ast.ClassicalUnary(word, self.address(toks[0], scope, line), line=line)
        if word in ast.BINARY_KINDS:
            arity(2)
            return ast.ClassicalBinary(word, self.address(toks[0], scope, line),
                                       self.address(toks[1], scope, line), line=line)
        if word == "PRAGMA":
            return self.pragma(rest, line)
        if word in ("DEFGATE", "DEFCIRCUIT", "INCLUDE"):
            raise self.error(f"{word} is not allowed here", line)
        return self.application(text, scope, line)

    def pragma(self, rest: str, line: int) -> ast.Pragma:
        m = re.match(r'\s*((?:[^\s"]+\s*)+?)\s*("(?:[^"\\]|\\.)*")?\s*$', rest)
        if not m or not m.group(1):
            raise self.error("PRAGMA needs at least one identifier", line)
        words = tuple(m.group(1).split())
        for w in words:
            if not _IDENT_RE.match(w):
                raise self.error(f"invalid PRAGMA identifier {w!r}", line)
        text = None
        if m.group(2) is not None:
            text = re.sub(r"\\(.)", r"\1", m.group(2)[1:-1])
        return ast.Pragma(words, text, line=line)

    def application(self, text: str, scope: _Scope, line: int) -> ast.GateApplication:
        m = re.match(IDENT, text)
        if m is None:
            raise self.error(f"cannot parse {text!r}", line)
        name = self.name(m.group(), line)
        pos = m.end()
        params: tuple = ()
        if pos < len(text) and text[pos] == "(":
            close = _matching_paren(text, pos)
            if close < 0:
                raise self.error("unbalanced parentheses in parameter list", line)
            inner = text[pos + 1:close]
            params = tuple(self.parameter(p, scope, line) for p in _split_top(inner))
            pos = close + 1
        elif pos < len(text) and not text[pos].isspace():
            raise self.error(f"cannot parse {text!r}", line)
        args = tuple(self.argument(t, scope, line) for t in text[pos:].split())
        return ast.GateApplication(name, params, args, line=line)


_DEFGATE_RE = re.compile(r"DEFGATE\s+(" + IDENT + r")\s*(?:\((.*)\))?\s*:\s*$")
_DEFCIRC_RE = re.compile(r"DEFCIRCUIT\s+(" + IDENT + r")\s*(?:\((.*?)\))?((?:\s+" + IDENT + r")*)\s*:\s*$")
_INCLUDE_RE = re.compile(r'INCLUDE\s+"((?:[^"\\]|\\.)*)"\s*$')


def _formal_params(text: Optional[str], lp: _LineParser, line: int) -> tuple[str, ...]:
    if text is None or not text.strip():
        return ()
    names = []
    for part in text.split(","):
        part = part.strip()
        if not re.match(r"%[A-Za-z_][A-Za-z0-9_]*$", part):
            raise lp.error(f"malformed formal parameter {part!r}", line)
        names.append(part[1:])
    if len(set(names)) != len(names):
        raise lp.error("duplicate formal parameter", line)
    return tuple(names)


class _Unit:
    """Result of parsing one file: definitions with their origins plus instruction code."""

    def __init__(self):
        self.gates: dict[str, ast.GateDefinition] = {}
        self.circuits: dict[str, ast.CircuitDefinition] = {}
        self.origins: dict[str, str] = {}
        self.instructions: list = []

    def define(self, defn, origin: str, err: ParseError, included: bool = False):
        name = defn.name
        if name in self.origins:
            existing = self.gates.get(name) or self.circuits.get(name)
            if included and self.origins[name] == origin and existing == defn:
                return  # same library included twice
            raise err
        self.origins[name] = origin
        target = self.gates if isinstance(defn, ast.GateDefinition) else self.circuits
        target[name] = defn

    def merge(self, other: "_Unit", lp: _LineParser, line: int):
        for defn in [*other.gates.values(), *other.circuits.values()]:
            self.define(defn, other.origins[defn.name],
                        lp.error(f"duplicate definition of {defn.name!r} via INCLUDE", line),
                        included=True)
        self.instructions.extend(other.instructions)


def _body_lines(lines: list[str], start: int):
    """Yield (lineno, content) for the indented body starting at index ``start``."""
    i = start
    while i < len(lines):
        raw = lines[i]
        content = _strip_comment(raw).rstrip()
        if not content.strip():
            i += 1
            continue
        if not raw[:1].isspace():
            break
        yield i + 1, raw
        i += 1
    return


def _check_indent(raw: str, lp: _LineParser, lineno: int) -> str:
    if not raw.startswith("    ") or raw[4:5].isspace() or "\t" in raw[:4]:
        raise lp.error("definition bodies must be indented by exactly four spaces", lineno)
    return _strip_comment(raw[4:]).rstrip()


def _parse_unit(text: str, origin: str, loader: IncludeLoader, stack: tuple[str, ...]) -> _Unit:
    lp = _LineParser(origin)
    unit = _Unit()
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        raw = lines[i]
        content = _strip_comment(raw).rstrip()
        if not content.strip():
            i += 1
            continue
        if raw[:1].isspace():
            raise lp.error("unexpected indentation outside a definition body", lineno)

        if content.startswith("DEFGATE") and (len(content) == 7 or content[7].isspace()):
            m = _DEFGATE_RE.match(content)
            if not m:
                raise lp.error("malformed DEFGATE header", lineno)
            name = lp.name(m.group(1), lineno)
            params = _formal_params(m.group(2), lp, lineno)
            scope = _Scope(params=params)
            rows = []
            row_lines = []
            consumed = i + 1
            for body_no, body_raw in _body_lines(lines, i + 1):
                row_text = _check_indent(body_raw, lp, body_no)
                rows.append(tuple(lp.expression(e, scope, body_no) for e in _split_top(row_text)))
                row_lines.append(body_no)
                consumed = body_no
            n = len(rows)
            for r, r_line in zip(rows, row_lines):
                if len(r) != n:
                    raise lp.error(f"gate {name} matrix is not square: row has {len(r)} entries, "
                                   f"expected {n}", r_line)
            if n < 2 or n & (n - 1):
                raise lp.error(f"gate {name} matrix dimension {n} is not a power of two >= 2", lineno)
            unit.define(ast.GateDefinition(name, params, tuple(rows), line=lineno), origin,
                        lp.error(f"duplicate definition of {name!r}", lineno))
            i = consumed
            continue

        if content.startswith("DEFCIRCUIT") and (len(content) == 10 or content[10].isspace()):
            m = _DEFCIRC_RE.match(content)
            if not m:
                raise lp.error("malformed DEFCIRCUIT header", lineno)
            name = lp.name(m.group(1), lineno)
            params = _formal_params(m.group(2), lp, lineno)
            args = tuple(m.group(3).split())
            for a in args:
                lp.name(a, lineno)
            if len(set(args)) != len(args):
                raise lp.error("duplicate formal argument", lineno)
            scope = _Scope(params=params, args=args)
            body = []
            consumed = i + 1
            for body_no, body_raw in _body_lines(lines, i + 1):
                body.append(lp.instruction(_check_indent(body_raw, lp, body_no), scope, body_no))
                consumed = body_no
            labels = [b.name for b in body if isinstance(b, ast.Label)]
            if len(set(labels)) != len(labels):
                raise lp.error(f"circuit {name} declares a label more than once", lineno)
            unit.define(ast.CircuitDefinition(name, params, args, tuple(body), line=lineno), origin,
                        lp.error(f"duplicate definition of {name!r}", lineno))
            i = consumed
            continue

        if content.startswith("INCLUDE") and (len(content) == 7 or content[7].isspace()):
            m = _INCLUDE_RE.match(content)
            if not m:
                raise lp.error('malformed INCLUDE; expected INCLUDE "file"', lineno)
            fname = re.sub(r"\\(.)", r"\1", m.group(1))
            try:
                child_origin, child_text = loader(fname, origin)
            except IncludeNotFound:
                raise lp.error(f"include file not found: {fname!r}", lineno) from None
            if child_origin in stack:
                raise lp.error(f"include cycle through {fname!r}", lineno)
            child = _parse_unit(child_text, child_origin, loader, stack + (child_origin,))
            unit.merge(child, lp, lineno)
            i += 1
            continue

        unit.instructions.append(lp.instruction(content, _TOP, lineno))
        i += 1
    return unit


def _classify(instr, circuits):
    if isinstance(instr, ast.GateApplication) and instr.name in circuits:
        return ast.CircuitApplication(instr.name, instr.params, instr.args, line=instr.line)
    return instr


def parse_program(text: str, include_loader: IncludeLoader | None = None,
                  source: str = "<input>") -> ast.ParsedProgram:
    """Parse Quil text, resolving INCLUDEs through ``include_loader``.

    Applications naming a circuit definition become ``CircuitApplication``
    nodes; everything else stays a ``GateApplication`` until linking.
    """
    loader = include_loader or default_loader
    unit = _parse_unit(text, source, loader, (source,))
    circuits = {
        name: ast.CircuitDefinition(c.name, c.params, c.args,
                                    tuple(_classify(b, unit.circuits) for b in c.body), line=c.line)
        for name, c in unit.circuits.items()
    }
    instructions = [_classify(ins, circuits) for ins in unit.instructions]
    return ast.ParsedProgram(gates=dict(unit.gates), circuits=circuits, instructions=instructions)


def parse_file(path: str, search_path=(), use_env: bool = True) -> ast.ParsedProgram:
    import os
    from .includes import FileIncludeLoader

    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    real = os.path.realpath(path)
    loader = FileIncludeLoader(os.path.dirname(real), search_path, use_env=use_env)
    return parse_program(text, loader, source=real)


def parse_instruction(text: str, params=(), args=(), line: int | None = None) -> ast.Instruction:
    """Parse one instruction line, allowing the given formal parameters and arguments."""
    return _LineParser("<instruction>").instruction(text, _Scope(params, args), line or 1)
