"""Rewrite RX into H RZ H, route onto a line and check the compiled program is equivalent."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from quilvm import expand_circuits, link, load_machine, parse_program, print_program
from quilvm.analysis import RewriteRule, Topology, parallelize, format_schedule, rewrite_gates, route
from quilvm.linalg import StateVector

SOURCE = """H 0
CNOT 0 3
RX(0.7) 2
SWAP 1 4
CPHASE(1.1) 4 0
RX(-2.5) 3
"""


@dataclass
class Config:
    n_qubits: int = 5
    trials: int = 20
    seed: int = 1


def final_state(flat, psi):
    m = load_machine(link(flat), n_qubits=int(np.log2(psi.size)), seed=0)
    m.psi = StateVector(m.n_qubits, psi.copy())
    m.run()
    return m.psi.amplitudes


def main(cfg: Config):
    original = expand_circuits(parse_program(SOURCE))
    rule = RewriteRule.from_string("RX(%t) q -> H q; RZ(%t) q; H q")
    compiled = route(rewrite_gates(original, [rule]), Topology.line(cfg.n_qubits))
    print(print_program(compiled), end="")
    print("# parallel schedule")
    print(format_schedule(parallelize(compiled.instructions)), end="")
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(cfg.trials):
        v = rng.normal(size=2 ** cfg.n_qubits) + 1j * rng.normal(size=2 ** cfg.n_qubits)
        v /= np.linalg.norm(v)
        worst = max(worst, float(np.max(np.abs(final_state(original, v) - final_state(compiled, v)))))
    print(f"# max state deviation over {cfg.trials} random inputs: {worst:.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=Config.trials)
    main(Config(trials=ap.parse_args().trials))
