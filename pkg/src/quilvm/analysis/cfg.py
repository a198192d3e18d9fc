"""Control flow graphs over flat programs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..syntax import ast
from ..syntax.printer import format_instruction

UNCONDITIONAL = "unconditional"
TAKEN = "branch-taken"
FALLTHROUGH = "fallthrough"


@dataclass
class BasicBlock:
    id: int
    start: int  # index of first instruction
    stop: int   # one past the last instruction
    instructions: list

    @property
    def terminator(self):
        return self.instructions[-1] if self.instructions else None


@dataclass
class ControlFlowGraph:
    blocks: list[BasicBlock] = field(default_factory=list)
    edges: list[tuple[int, int, str]] = field(default_factory=list)
    entry: Optional[int] = None

    def successors(self, block_id: int) -> list[tuple[int, str]]:
        return [(dst, kind) for src, dst, kind in self.edges if src == block_id]

    def to_dot(self) -> str:
        lines = ["digraph cfg {", "  node [shape=box, fontname=monospace];"]
        for b in self.blocks:
            body = "\\l".join(format_instruction(i).replace('"', '\\"') for i in b.instructions)
            lines.append(f'  b{b.id} [label="{body}\\l"];')
        for src, dst, kind in self.edges:
            lines.append(f'  b{src} -> b{dst} [label="{kind}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _ends_block(ins) -> bool:
    return isinstance(ins, (*ast.JUMPS, ast.Halt))


def build_cfg(f) -> ControlFlowGraph:
    """Split at labels (leaders) and after jumps/HALT; wire up control transfers."""
    instrs = list(f.instructions)
    if not instrs:
        return ControlFlowGraph()
    leaders = {0}
    for i, ins in enumerate(instrs):
        if isinstance(ins, ast.Label):
            leaders.add(i)
        if _ends_block(ins) and i + 1 < len(instrs):
            leaders.add(i + 1)
    starts = sorted(leaders)
    blocks = []
    for bid, start in enumerate(starts):
        stop = starts[bid + 1] if bid + 1 < len(starts) else len(instrs)
        blocks.append(BasicBlock(bid, start, stop, instrs[start:stop]))
    block_of_label = {
        b.instructions[0].name: b.id for b in blocks if isinstance(b.instructions[0], ast.Label)
    }
    edges = []
    for b in blocks:
        last = b.terminator
        nxt = b.id + 1 if b.id + 1 < len(blocks) else None
        if isinstance(last, ast.Jump):
            edges.append((b.id, block_of_label[last.label], UNCONDITIONAL))
        elif isinstance(last, (ast.JumpWhen, ast.JumpUnless)):
            edges.append((b.id, block_of_label[last.label], TAKEN))
            if nxt is not None:
                edges.append((b.id, nxt, FALLTHROUGH))
        elif isinstance(last, ast.Halt):
            pass
        elif nxt is not None:
            edges.append((b.id, nxt, FALLTHROUGH))
    return ControlFlowGraph(blocks, edges, 0)
