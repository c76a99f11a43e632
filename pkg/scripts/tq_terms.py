"""Measured term counts of the t_{q^nu} expressions.

The orbit solve gives one coefficient per (subset size, constant) pair;
the materialised expression has binom(n, u) terms per nonzero pair. The
last column is log2(terms) / (q^nu * log2(n + 1)).

    python scripts/tq_terms.py --p 3 --q 2 --nu 1 2 3 --n 4 8 16 32
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field

from modcirc.construct import tq_scheme


@dataclass
class TermConfig:
    p: int = 3
    q: int = 2
    nus: list[int] = field(default_factory=lambda: [1, 2, 3])
    ns: list[int] = field(default_factory=lambda: [4, 8, 16, 32, 64])


def rows(cfg: TermConfig):
    for nu in cfg.nus:
        for n in cfg.ns:
            s = tq_scheme(cfg.p, cfg.q, nu, n)
            terms = s.term_count
            top = max((u for (u, _), _ in s.coeffs), default=0)
            ratio = math.log2(max(terms, 1)) / (cfg.q**nu * math.log2(n + 1))
            yield nu, n, len(s.coeffs), top, terms, ratio


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--nu", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--n", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    args = ap.parse_args()
    cfg = TermConfig(args.p, args.q, args.nu, args.n)
    print(f"t_(q^nu) with p={cfg.p}, q={cfg.q}")
    print(f"{'nu':>3} {'n':>4} {'orbits':>7} {'max |U|':>8} {'terms':>14} {'ratio':>7}")
    for nu, n, orbits, top, terms, ratio in rows(cfg):
        print(f"{nu:>3} {n:>4} {orbits:>7} {top:>8} {terms:>14} {ratio:>7.3f}")


if __name__ == "__main__":
    main()
