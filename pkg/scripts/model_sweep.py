#!/usr/bin/env python3
"""Sweep random models through the checkers and report violations.

Usage: model_sweep.py [n_qb] [n_kripke]
"""

import sys
import time

from primal.cli import gen_kripke_model, gen_qb_model
from primal.semantics import check_kripke_model, check_qb_valuation

SIG = [("p", 0), ("q", 0), ("P", 1), ("R", 2)]


def main():
    n_qb = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
    n_kr = int(sys.argv[2]) if len(sys.argv) > 2 else 300
    t0 = time.time()
    bad = 0
    for seed in range(n_qb):
        m = gen_qb_model(seed, SIG, 1 + seed % 3)
        v = check_qb_valuation(m)
        if v:
            bad += 1
            print(f"qb seed {seed}: {v[0]}")
    print(f"{n_qb} quasi-boolean models, {bad} violations "
          f"({time.time() - t0:.1f}s)")
    t0 = time.time()
    bad = 0
    for seed in range(n_kr):
        m = gen_kripke_model(seed, SIG, 1 + seed % 4)
        v = check_kripke_model(m)
        if v:
            bad += 1
            print(f"kripke seed {seed}: {v[0]}")
    print(f"{n_kr} Kripke models, {bad} violations ({time.time() - t0:.1f}s)")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
