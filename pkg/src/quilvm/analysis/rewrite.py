"""Gate rewriting (a concatmap over the instruction list) and topology routing."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..program import FlatProgram
from ..syntax import ast
from ..syntax.expr import Param, params_of, substitute
from ..syntax.parser import ParseError, parse_instruction


class RewriteError(ValueError):
    pass


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    """``pattern`` is a gate application over formal arguments whose parameters are bare
    ``%variables``; ``replacement`` may use only those arguments and variables."""
    pattern: ast.GateApplication
    replacement: tuple[ast.GateApplication, ...]

    def __post_init__(self):
        for p in self.pattern.params:
            if not isinstance(p, Param):
                raise RewriteError("rule parameters must be bare %variables")
        for a in self.pattern.args:
            if not isinstance(a, ast.Formal):
                raise RewriteError("rule arguments must be formal names")
        variables = {p.name for p in self.pattern.params}
        formals = {a.name for a in self.pattern.args}
        for ins in self.replacement:
            if not isinstance(ins, ast.GateApplication):
                raise RewriteError("replacements must be gate applications")
            for a in ins.args:
                if isinstance(a, ast.Formal) and a.name not in formals:
                    raise RewriteError(f"replacement uses unmatched argument {a.name!r}")
            for p in ins.params:
                if not isinstance(p, ast.Segment) and params_of(p) - variables:
                    raise RewriteError("replacement uses unmatched parameter")

    @classmethod
    def parse(cls, pattern: str, replacement: Iterable[str]) -> "RewriteRule":
        """Build a rule from Quil text, e.g. ``("RX(%t) q", ["H q", "RZ(%t) q", "H q"])``."""
        try:
            head = parse_instruction(pattern, params=_names(pattern, "%"), args=_bare_words(pattern))
            scope_p = tuple(p.name for p in head.params if isinstance(p, Param))
            scope_a = tuple(a.name for a in head.args if isinstance(a, ast.Formal))
            body = tuple(parse_instruction(r.strip(), params=scope_p, args=scope_a) for r in replacement)
        except ParseError as exc:
            raise RewriteError(f"bad rewrite rule: {exc}") from None
        return cls(head, body)

    @classmethod
    def from_string(cls, text: str) -> "RewriteRule":
        """``"RX(%t) q -> H q; RZ(%t) q; H q"``"""
        if "->" not in text:
            raise RewriteError(f"rule {text!r} needs '->'")
        lhs, rhs = text.split("->", 1)
        return cls.parse(lhs.strip(), [r for r in rhs.split(";") if r.strip()])

    def match(self, ins) -> dict | None:
        pat = self.pattern
        if not isinstance(ins, ast.GateApplication) or ins.name != pat.name:
            return None
        if len(ins.args) != len(pat.args) or len(ins.params) != len(pat.params):
            return None
        binding = {a.name: actual for a, actual in zip(pat.args, ins.args)}
        binding.update({p.name: actual for p, actual in zip(pat.params, ins.params)})
        return binding

    def expand(self, binding: dict, line=None) -> list[ast.GateApplication]:
        out = []
        for tmpl in self.replacement:
            args = tuple(binding[a.name] if isinstance(a, ast.Formal) else a for a in tmpl.args)
            params = tuple(_bind_param(p, binding) for p in tmpl.params)
            out.append(ast.GateApplication(tmpl.name, params, args, line=line))
        return out


def _names(text: str, sigil: str) -> tuple[str, ...]:
    import re
    return tuple(re.findall(re.escape(sigil) + r"([A-Za-z_][A-Za-z0-9_]*)", text))


def _bare_words(text: str) -> tuple[str, ...]:
    rest = text.split(")", 1)[1] if "(" in text.split()[0] else text.split(None, 1)[-1]
    return tuple(w for w in rest.split() if not w.isdigit() and not w.startswith("["))


def _bind_param(p, binding):
    if isinstance(p, ast.Segment):
        return p
    if isinstance(p, Param) and isinstance(binding.get(p.name), ast.Segment):
        return binding[p.name]
    if any(isinstance(binding.get(n), ast.Segment) for n in params_of(p)):
        raise RewriteError("a memory-segment parameter can only be passed through unchanged")
    return substitute(p, {k: v for k, v in binding.items() if not isinstance(v, (ast.Segment, ast.Qubit, ast.Address))})


def rewrite_gates(f, rules: Sequence[RewriteRule], gate_env: Mapping | None = None) -> FlatProgram:
    """Replace each instruction matched by a rule (first match wins) with its expansion."""
    if gate_env is None:
        from ..stdgates import standard_definitions
        gate_env = standard_definitions()
    for rule in rules:
        for ins in rule.replacement:
            if ins.name not in f.gates and ins.name not in gate_env:
                raise RewriteError(f"replacement gate {ins.name!r} is not defined")
    out = []
    for ins in f.instructions:
        for rule in rules:
            binding = rule.match(ins)
            if binding is not None:
                out.extend(rule.expand(binding, ins.line))
                break
        else:
            out.append(ins)
    return FlatProgram(gates=dict(f.gates), instructions=out)


# Routing ------------------------------------------------------------------

@dataclass(frozen=True)
class Topology:
    n_qubits: int
    edges: frozenset

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            if a == b or not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
                raise RoutingError(f"invalid topology edge {a}-{b}")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def line(cls, n: int) -> "Topology":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def from_string(cls, text: str) -> "Topology":
        """``"line:3"`` or an edge list such as ``"0-1,1-2"``."""
        text = text.strip()
        if text.startswith("line:"):
            return cls.line(int(text[5:]))
        edges = []
        for part in text.split(","):
            a, b = part.strip().split("-")
            edges.append((int(a), int(b)))
        n = 1 + max(max(e) for e in edges)
        return cls(n, frozenset(edges))

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbors(self, q: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == q} | {a for a, b in self.edges if b == q})

    def connected(self) -> bool:
        if self.n_qubits <= 1:
            return True
        seen = {0}
        todo = [0]
        while todo:
            for nb in self.neighbors(todo.pop()):
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return len(seen) == self.n_qubits

    def shortest_path(self, a: int, b: int) -> list[int]:
        """Breadth-first path from ``a`` to ``b``; neighbors visited in ascending order."""
        parent = {a: None}
        queue = deque([a])
        while queue:
            q = queue.popleft()
            if q == b:
                break
            for nb in self.neighbors(q):
                if nb not in parent:
                    parent[nb] = q
                    queue.append(nb)
        if b not in parent:
            raise RoutingError(f"no path between qubits {a} and {b}")
        path = [b]
        while path[-1] != a:
            path.append(parent[path[-1]])
        return path[::-1]

    def induces_connected(self, qubits: Sequence[int]) -> bool:
        qs = set(qubits)
        start = next(iter(qs))
        seen = {start}
        todo = [start]
        while todo:
            for nb in self.neighbors(todo.pop()):
                if nb in qs and nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return seen == qs


def _swap(a: int, b: int, line) -> ast.GateApplication:
    return ast.GateApplication("SWAP", (), (ast.Qubit(min(a, b)), ast.Qubit(max(a, b))), line=line)


def route(f, topo: Topology) -> FlatProgram:
    """Make every two-qubit application act on adjacent qubits by inserting SWAP chains.

    A gate on non-adjacent ``(a, b)`` becomes: SWAPs carrying ``a`` along a
    shortest path to a neighbor of ``b``, the gate there, then the SWAPs undone.
    """
    if not topo.connected():
        raise RoutingError("topology is not connected")
    out = []
    for ins in f.instructions:
        qubits = ast.qubits_of(ins)
        for q in qubits:
            if q >= topo.n_qubits:
                raise RoutingError(f"qubit {q} is outside the {topo.n_qubits}-qubit topology")
        if not isinstance(ins, ast.GateApplication) or len(qubits) < 2:
            out.append(ins)
            continue
        if len(qubits) > 2:
            if not topo.induces_connected(qubits):
                raise RoutingError(f"{ins.name} acts on {len(qubits)} non-adjacent qubits; unsupported")
            out.append(ins)
            continue
        a, b = qubits
        if topo.adjacent(a, b):
            out.append(ins)
            continue
        path = topo.shortest_path(a, b)
        chain = [_swap(path[i], path[i + 1], ins.line) for i in range(len(path) - 2)]
        moved = ast.GateApplication(ins.name, ins.params, (ast.Qubit(path[-2]), ast.Qubit(b)), line=ins.line)
        out.extend(chain)
        out.append(moved)
        out.extend(reversed(chain))
    return FlatProgram(gates=dict(f.gates), instructions=out)
