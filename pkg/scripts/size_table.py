"""Size of the depth-2 and nested AND_n circuits against the lower bounds.

Sizes come from the closed-form gate and wire counts, so large n is cheap.
Use --check to rebuild every circuit up to --check-max-n and compare.

    python scripts/size_table.py --m 6 --n 4 8 16 32 64 --check
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field

from modcirc.analysis import nested_size_lower_bound, optimal_branching, size_lower_bound
from modcirc.circuit import size
from modcirc.construct import and_depth2_size, build_and_depth2, build_and_nested
from modcirc.groups import BlockTree
from modcirc.numtheory import factorize


@dataclass
class SizeTableConfig:
    m: int = 6
    ns: list[int] = field(default_factory=lambda: [4, 8, 16, 32, 64])
    check: bool = False
    check_max_n: int = 16
    nested_depths: list[int] = field(default_factory=lambda: [2, 3])


def flat_rows(cfg: SizeTableConfig):
    r = factorize(cfg.m).r
    for n in cfg.ns:
        s = and_depth2_size(cfg.m, n)
        if cfg.check and n <= cfg.check_max_n:
            built = size(build_and_depth2(cfg.m, n))
            assert built == s, (n, built, s)
        k, lb = size_lower_bound(n, cfg.m)
        ratio = math.log2(s) / (n ** (1 / r) * math.log2(n))
        yield n, s, k, lb, ratio


def nested_rows(cfg: SizeTableConfig):
    for n in cfg.ns:
        for h in cfg.nested_depths:
            br = optimal_branching(n, h)
            if br is None:
                continue
            t = BlockTree(br)
            # one gadget per block; gadgets of the same arity have the same size
            est = sum(t.level_size(lvl) * (and_depth2_size(cfg.m, k) - k) for lvl, k in enumerate(br, start=1)) + n
            if cfg.check and n <= cfg.check_max_n:
                assert size(build_and_nested(cfg.m, t)) <= est
            yield n, h, br, est, nested_size_lower_bound(t, cfg.m)[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=6)
    ap.add_argument("--n", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--check", action="store_true")
    ap.add_argument("--check-max-n", type=int, default=16)
    args = ap.parse_args()
    cfg = SizeTableConfig(args.m, args.n, args.check, args.check_max_n)

    print(f"depth 2, m={cfg.m}")
    print(f"{'n':>4} {'size':>22} {'k':>3} {'lower bound':>22} {'log2 size / (n^(1/r) log2 n)':>30}")
    ratios = []
    for n, s, k, lb, ratio in flat_rows(cfg):
        ratios.append(ratio)
        print(f"{n:>4} {s:>22} {k:>3} {lb:>22} {ratio:>30.3f}")
    print(f"fitted K = {max(ratios):.3f}\n")

    print(f"nested, m={cfg.m} (size upper estimate, shared gates merge below it)")
    print(f"{'n':>4} {'h':>2} {'branching':>14} {'size <=':>22} {'nested bound':>14}")
    for n, h, br, est, lb in nested_rows(cfg):
        print(f"{n:>4} {h:>2} {','.join(map(str, br)):>14} {est:>22} {lb:>14}")


if __name__ == "__main__":
    main()
