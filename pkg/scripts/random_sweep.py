"""Seeded sweep over random symmetric circuits: supports, orbits and root periods.

For each circuit the script rigidifies, computes all supports, and checks
the root period against m * maxSup^r and the orbit/support relation. A
summary and one JSON line per failing seed are printed.

    python scripts/random_sweep.py --count 200 --seed 0
"""

from __future__ import annotations

import argparse
import json
from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from modcirc.analysis import RandomCircuitConfig, orbit_support_consistency, random_symmetric_circuit, root_period_check
from modcirc.circuit import size, truth_table
from modcirc.groups import sym_generators
from modcirc.symmetry import all_supports, is_rigid, max_orbit, rigidify


@dataclass
class SweepConfig:
    count: int = 100
    seed: int = 0
    circuit: RandomCircuitConfig = RandomCircuitConfig()


def sweep(cfg: SweepConfig) -> dict:
    stats = Counter()
    max_sup_hist = Counter()
    slack = []
    failures = []
    for seed in range(cfg.seed, cfg.seed + cfg.count):
        raw = random_symmetric_circuit(seed, cfg.circuit)
        c = rigidify(raw)
        stats["rigid_before"] += is_rigid(raw)
        stats["gates_removed"] += len(raw.gates) - len(c.gates)
        problems = []
        if not np.array_equal(truth_table(raw), truth_table(c)) or size(c) > size(raw):
            problems.append("rigidify changed the function or grew")
        sups = all_supports(c)
        stats["non_unique_supports"] += sum(not r.unique for r in sups.values())
        root = root_period_check(c, sups)
        max_sup_hist[root.detail["max_sup"]] += 1
        slack.append(root.effective_period / root.bound)
        if not root.satisfied:
            problems.append(f"root period {root.effective_period} > {root.bound}")
        bad_k = orbit_support_consistency(c, max_orbit(c, sym_generators(c.arity)), sups)
        if bad_k:
            problems.append(f"orbit/support relation fails at k={bad_k}")
        if problems:
            failures.append({"seed": seed, "problems": problems})
    return {
        "config": asdict(cfg),
        "circuits": cfg.count,
        "failures": failures,
        "rigid_before": stats["rigid_before"],
        "gates_removed_by_rigidify": stats["gates_removed"],
        "non_unique_supports": stats["non_unique_supports"],
        "max_sup_histogram": dict(sorted(max_sup_hist.items())),
        "period_over_bound_max": round(max(slack), 4) if slack else None,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--max-depth", type=int, default=3)
    args = ap.parse_args()
    circ = RandomCircuitConfig(max_n=args.max_n, max_depth=args.max_depth)
    print(json.dumps(sweep(SweepConfig(args.count, args.seed, circ)), indent=1))


if __name__ == "__main__":
    main()
