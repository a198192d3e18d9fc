"""Histogram of the two-qubit random number program with a chi-square uniformity check."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from quilvm import load, parse_program, run_shots
from quilvm.syntax import ast

PROGRAM = "H 0\nH 1\nMEASURE 0 [0]\nMEASURE 1 [1]\n"


@dataclass
class Config:
    shots: int = 10000
    seed: int = 2024


def main(cfg: Config):
    exe = load(parse_program(PROGRAM))
    counts = run_shots(exe, cfg.shots, cfg.seed, observed=[ast.Segment(0, 1)])
    expected = cfg.shots / 4
    chi2 = 0.0
    print("value\tbits\tcount\tfreq")
    for value in range(4):
        bits = format(value, "02b")
        c = counts.get((bits,), 0)
        chi2 += (c - expected) ** 2 / expected
        print(f"{value}\t{bits}\t{c}\t{c / cfg.shots:.4f}")
    # 3 degrees of freedom; 7.81 is the 95% point
    print(f"chi2 = {chi2:.3f} (95% critical value 7.81)")
    return chi2


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shots", type=int, default=Config.shots)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    main(Config(a.shots, a.seed))
