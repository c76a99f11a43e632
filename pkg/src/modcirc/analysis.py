"""Period analysis of symmetric circuits, lower-bound calculators, random symmetric circuits.

Periods are taken on finite tables: l is a period of t when t[x] = t[x + l]
wherever both sides exist. A table with no period below its length reports
None; comparisons against a bound then use the table length.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, CircuitBuilder, Gate, all_assignments, max_exhaustive_n, prune
from .errors import PreconditionFailed, TooLarge, UnsupportedModulus
from .groups import Block, BlockTree, GeneratorSet, Permutation, leaves_under, orbit, sym_generators, tree_aut_generators
from .numtheory import factorize, integer_log, integer_root, support_period_bound
from .symmetry import (
    SupportReport,
    SwapCache,
    all_supports,
    blockwise_support,
    extend_to_automorphism,
    is_symmetric,
)

DEFAULT_SUPPORT_CAP = 6


@dataclass(frozen=True)
class WeightTable:
    values: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class PeriodReport:
    subject: str
    minimal_period: int | None
    bound: int
    satisfied: bool
    table_length: int
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def effective_period(self) -> int:
        """The minimal period, or the table length when no shorter period exists."""
        return self.table_length if self.minimal_period is None else self.minimal_period


def is_period(table: Sequence[int], ell: int) -> bool:
    return all(table[x] == table[x + ell] for x in range(len(table) - ell))


def minimal_period(table: WeightTable | Sequence[int]) -> int | None:
    t = table.values if isinstance(table, WeightTable) else tuple(table)
    return next((ell for ell in range(1, len(t)) if is_period(t, ell)), None)


def admissible_periods(m: int, s: int) -> list[int]:
    """1 and every m * prod p_i^c_i with c_i <= floor(log_p_i s), ascending."""
    primes = factorize(m).distinct
    caps = [integer_log(s, p) if s >= 1 else 0 for p in primes]
    out = {1}
    for exps in product(*(range(c + 1) for c in caps)):
        val = m
        for p, e in zip(primes, exps):
            val *= p**e
        out.add(val)
    return sorted(out)


def least_admissible_period(table: Sequence[int], m: int, s: int) -> int:
    """Smallest admissible l that is a period of the finite table (l >= len counts)."""
    for ell in admissible_periods(m, s):
        if is_period(table, ell):
            return ell
    raise AssertionError("the largest admissible length is at least m and always checked")


def weight_table(c: Circuit, check_symmetry: bool = True) -> WeightTable:
    """Root value at 1^w 0^(n-w) for w = 0..n."""
    if check_symmetry and not is_symmetric(c, sym_generators(max(c.arity, 1))):
        raise PreconditionFailed("weight tables need a Sym_n-symmetric circuit")
    n = c.arity
    rows = np.array([[1] * w + [0] * (n - w) for w in range(n + 1)], dtype=np.uint8).reshape(n + 1, n)
    vals, index = c.gate_values(rows)
    return WeightTable(tuple(int(v) for v in vals[:, index[c.root]]))


class GateTables:
    """All gate values over all 2^n assignments, indexed by the assignment's integer code."""

    def __init__(self, c: Circuit):
        if c.arity > max_exhaustive_n():
            raise TooLarge(f"arity {c.arity} exceeds exhaustive cap")
        self.c = c
        self.values, self.index = c.gate_values(all_assignments(c.arity))

    def code(self, ones: Iterable[int]) -> int:
        n = self.c.arity
        return sum(1 << (n - 1 - i) for i in ones)

    def value(self, g: int, ones: Iterable[int]) -> int:
        return int(self.values[self.code(ones), self.index[g]])


def restricted_tables(
    tables: GateTables, g: int, support: frozenset[int], rng: random.Random | None = None
) -> dict[tuple[int, ...], tuple[int, ...]]:
    """alpha -> unary table of g_alpha over the number of ones outside the support.

    Ones go to the smallest free indices. With ``rng`` set, every entry is
    also recomputed on a random filling and must agree.
    """
    n = tables.c.arity
    sup = sorted(support)
    free = [i for i in range(n) if i not in support]
    out = {}
    for alpha in product((0, 1), repeat=len(sup)):
        fixed = [i for i, a in zip(sup, alpha) if a]
        row = []
        for k in range(len(free) + 1):
            v = tables.value(g, fixed + free[:k])
            if rng is not None:
                alt = tables.value(g, fixed + rng.sample(free, k))
                if alt != v:
                    raise PreconditionFailed(f"gate {g} depends on the filling outside its support")
            row.append(v)
        out[alpha] = tuple(row)
    return out


class PeriodAnalysis:
    """Supports, maxSup and per-gate period reports for one rigid Sym_n-symmetric circuit."""

    def __init__(self, c: Circuit, supports: dict[int, SupportReport] | None = None, support_cap: int = DEFAULT_SUPPORT_CAP):
        self.c = c
        self.supports = supports if supports is not None else all_supports(c)
        self.max_sup = max((r.size for r in self.supports.values()), default=0)
        self.support_cap = support_cap
        self._tables: GateTables | None = None

    @property
    def tables(self) -> GateTables:
        if self._tables is None:
            self._tables = GateTables(self.c)
        return self._tables

    @property
    def bound(self) -> int:
        return support_period_bound(self.c.modulus, self.max_sup)

    def gate_report(self, g: int, rng: random.Random | None = None) -> PeriodReport:
        rep = self.supports[g]
        sup = rep.representative
        n, m = self.c.arity, self.c.modulus
        if len(sup) > self.support_cap:
            raise TooLarge(f"support of gate {g} has size {len(sup)} > cap {self.support_cap}")
        if n - len(sup) < 1:
            raise PreconditionFailed(f"gate {g} has no free variables outside its support")
        tabs = restricted_tables(self.tables, g, sup, rng)
        periods = {a: minimal_period(t) for a, t in tabs.items()}
        length = n - len(sup) + 1
        eff = max(length if p is None else p for p in periods.values())
        worst = max(periods.values(), key=lambda p: length if p is None else p)
        admissible = max(least_admissible_period(t, m, self.max_sup) for t in tabs.values())
        bound = self.bound
        return PeriodReport(
            subject=f"gate {g}",
            minimal_period=worst,
            bound=bound,
            satisfied=eff <= bound and admissible <= bound,
            table_length=length,
            detail={
                "support": sorted(sup),
                "support_unique": rep.unique,
                "admissible_period": admissible,
                "per_alpha": {"".join(map(str, a)): p for a, p in periods.items()},
            },
        )


def gate_period_report(c: Circuit, g: int, analysis: PeriodAnalysis | None = None) -> PeriodReport:
    return (analysis or PeriodAnalysis(c)).gate_report(g)


def root_bound(m: int, s: int) -> int:
    """m * s^r; a circuit always has s >= 1 once n >= 2, and s = 0 is read as 1."""
    return m * max(s, 1) ** factorize(m).r


def root_period_check(c: Circuit, supports: dict[int, SupportReport] | None = None) -> PeriodReport:
    table = weight_table(c)
    supports = supports if supports is not None else all_supports(c)
    s = max((r.size for r in supports.values()), default=0)
    per = minimal_period(table)
    bound = root_bound(c.modulus, s)
    length = len(table.values)
    eff = length if per is None else per
    return PeriodReport("root", per, bound, eff <= bound, length, {"max_sup": s, "weights": list(table.values)})


def and_support_threshold(n: int, m: int) -> int:
    """floor((n/m)^(1/r)): AND_n needs maxSup at least this."""
    return integer_root(n // m, factorize(m).r)


def is_and_table(table: WeightTable | Sequence[int]) -> bool:
    t = table.values if isinstance(table, WeightTable) else tuple(table)
    return t[-1] == 1 and not any(t[:-1])


def block_table(c: Circuit, block: Block, tree: BlockTree, outside: int) -> tuple[int, ...]:
    """Root value as the first j subtrees of the block are set to 1, j = 0..|B|."""
    inside = leaves_under(tree, block.members)
    base = [outside if i not in inside else 0 for i in range(c.arity)]
    rows = []
    for j in range(len(block.members) + 1):
        row = list(base)
        for i in leaves_under(tree, block.members[:j]):
            row[i] = 1
        rows.append(row)
    vals, index = c.gate_values(np.array(rows, dtype=np.uint8))
    return tuple(int(v) for v in vals[:, index[c.root]])


def block_period(
    c: Circuit,
    block: Block,
    tree: BlockTree,
    cache: SwapCache | None = None,
    check_symmetry: bool = True,
) -> PeriodReport:
    tree.check_block(block)
    if check_symmetry and not is_symmetric(c, tree_aut_generators(tree)):
        raise PreconditionFailed("block periods need an Aut(T)-symmetric circuit")
    cache = cache or SwapCache(c, tree)
    s = max(blockwise_support(c, g, block, tree, cache).size for g in c.gates)
    tables = {z: block_table(c, block, tree, z) for z in (0, 1)}
    periods = {z: minimal_period(t) for z, t in tables.items()}
    length = len(block.members) + 1
    eff = max(length if p is None else p for p in periods.values())
    worst = max(periods.values(), key=lambda p: length if p is None else p)
    bound = root_bound(c.modulus, s)
    return PeriodReport(
        f"block {block.parent}",
        worst,
        bound,
        eff <= bound,
        length,
        {"max_sup_block": s, "tables": {str(z): list(t) for z, t in tables.items()}},
    )


# lower bounds


def _require_composite(m: int) -> int:
    r = factorize(m).r
    if r < 2:
        raise UnsupportedModulus(f"m={m} is a prime power")
    return r


def size_lower_bound(n: int, m: int) -> tuple[int, int]:
    """(k, binom(n, k)) with k = floor((n/m)^(1/r))."""
    r = _require_composite(m)
    k = integer_root(n // m, r)
    return k, comb(n, k)


def size_lower_bound_ceiling(n: int, m: int) -> tuple[int, int]:
    """Ceiling variant: smallest k with m * k^r >= n."""
    r = _require_composite(m)
    k = integer_root(n // m, r)
    if m * k**r < n:
        k += 1
    return k, comb(n, k)


def nested_size_lower_bound(tree: BlockTree, m: int) -> tuple[int, int]:
    r = _require_composite(m)
    k_max = tree.k_max
    return k_max, comb(k_max, integer_root(k_max // m, r))


def factorizations(n: int, h: int) -> list[tuple[int, ...]]:
    """Ordered h-tuples of integers >= 2 with product n."""
    if h == 0:
        return [()] if n == 1 else []
    out = []
    for d in range(2, n + 1):
        if n % d == 0:
            out.extend((d,) + rest for rest in factorizations(n // d, h - 1))
    return out


def optimal_branching(n: int, h: int) -> tuple[int, ...] | None:
    """Factorization with the smallest k_max (ties broken lexicographically)."""
    fs = factorizations(n, h)
    return min(fs, key=lambda f: (max(f), f)) if fs else None


# random symmetric circuits


def template_orbit(
    c: Circuit,
    accept: Iterable[int],
    children: dict[int, int],
    gens: GeneratorSet | Iterable[Permutation],
    cap: int = 10_000,
) -> list[tuple[frozenset[int], dict[int, int]]]:
    """All images of a template gate under the automorphisms extending ``gens``."""
    autos = []
    for p in gens:
        a = extend_to_automorphism(c, p)
        if a is None:
            raise PreconditionFailed("template children are not closed under the group")
        autos.append(a)
    accept = frozenset(accept)
    start = frozenset((h, k) for h, k in children.items() if k)
    orb = orbit(start, autos, lambda a, s: frozenset((a(h), k) for h, k in s), cap)
    return [(accept, dict(s)) for s in sorted(orb, key=lambda s: sorted(s))]


def symmetrize_template(
    c: Circuit, accept: Iterable[int], children: dict[int, int], gens: GeneratorSet | Iterable[Permutation], cap: int = 10_000
) -> Circuit:
    """c extended by the whole orbit of the template gate (root left as in c)."""
    b = _builder_from(c)
    for acc, kids in template_orbit(c, accept, children, gens, cap):
        b.add_mod(acc, kids)
    return b.build(c.root, c.meta)


def _builder_from(c: Circuit) -> CircuitBuilder:
    b = CircuitBuilder(c.modulus, c.arity)
    ren = {c.input_gate[i]: i for i in range(c.arity)}
    for g in c.mod_gates:
        ren[g] = b.add_mod(c.gates[g].accept, {ren[h]: k for h, k in c.children[g]})
    return b


@dataclass(frozen=True)
class RandomCircuitConfig:
    modulus: int = 6
    min_n: int = 3
    max_n: int = 8
    max_depth: int = 3
    max_point_support: int = 3
    max_templates_per_layer: int = 2
    duplicate_prob: float = 0.3
    max_gates: int = 300


def random_symmetric_circuit(seed: int, config: RandomCircuitConfig = RandomCircuitConfig(), n: int | None = None) -> Circuit:
    """Seeded layered Sym_n-symmetric circuit.

    Each layer adds the orbits of a few template gates. A template reads a
    small set of inputs with arbitrary multiplicities plus whole orbits of
    earlier gates with one multiplicity each. The root reads whole orbits.
    With probability ``duplicate_prob`` one root-level orbit is cloned,
    which leaves the circuit symmetric but not hash-consed. Templates whose orbit
    would push the gate count past ``max_gates`` are skipped.
    """
    rng = random.Random(seed)
    m = config.modulus
    n = n if n is not None else rng.randint(config.min_n, config.max_n)
    gens = sym_generators(n)
    depth = rng.randint(1, config.max_depth)
    b = CircuitBuilder(m, n)
    orbits: list[list[int]] = [list(range(n))]
    smax = max(0, min(config.max_point_support, (n - 1) // 2))

    def random_accept():
        k = rng.randint(1, m - 1)
        return frozenset(rng.sample(range(m), k))

    for _ in range(depth - 1):
        cur = b.build(None)
        layer: list[list[int]] = []
        for _ in range(rng.randint(1, config.max_templates_per_layer)):
            if len(b.gates) >= config.max_gates:
                break
            kids: dict[int, int] = {}
            for i in rng.sample(range(n), rng.randint(1 if smax else 0, smax)):
                kids[i] = rng.randint(1, m - 1)
            for orb in orbits[1:]:
                if rng.random() < 0.5:
                    k = rng.randint(1, m - 1)
                    for g in orb:
                        kids[g] = k
            if rng.random() < 0.3:
                k = rng.randint(1, m - 1)
                for i in range(n):
                    kids[i] = kids.get(i, 0) + k
            kids = {h: k % m for h, k in kids.items() if k % m}
            before = set(b.gates)
            orb = template_orbit(cur, random_accept(), kids, gens)
            if len(b.gates) + len(orb) > config.max_gates:
                continue
            ids = [b.add_mod(acc, ch) for acc, ch in orb]
            new = sorted(set(ids) - before)
            if new:
                layer.append(new)
        orbits.extend(layer)

    root_kids: dict[int, int] = {}
    choices = orbits[1:] or [orbits[0]]
    chosen = [o for o in choices if rng.random() < 0.6] or [choices[-1]]
    for orb in chosen:
        k = rng.randint(1, m - 1)
        for g in orb:
            root_kids[g] = k
    c = b.build(None)
    gates, wires = dict(c.gates), dict(c.wires)
    if rng.random() < config.duplicate_prob and chosen[-1][0] >= n:
        orb = chosen[-1]
        base = max(gates) + 1
        clone = {g: base + i for i, g in enumerate(orb)}
        k_clone = root_kids[orb[0]] if rng.random() < 0.5 else rng.randint(1, m - 1)
        for g in orb:
            gates[clone[g]] = Gate(accept=gates[g].accept)
            for h, k in c.children[g]:
                wires[(h, clone[g])] = k
            root_kids[clone[g]] = k_clone
    root = max(gates) + 1
    gates[root] = Gate(accept=random_accept())
    for g, k in root_kids.items():
        wires[(g, root)] = k
    meta = {"construction": "random", "seed": seed}
    return prune(Circuit(m, n, gates, wires, root, meta))


def orbit_support_consistency(c: Circuit, max_orbit: int, supports: dict[int, SupportReport], strict: bool = True) -> list[int]:
    """Values k in [1, n/4] whose orbit hypothesis holds but some support reaches size k.

    ``strict`` requires maxOrb < binom(n, k); otherwise maxOrb <= binom(n, k).
    """
    n = c.arity
    s = max(r.size for r in supports.values())
    bad = []
    for k in range(1, n // 4 + 1):
        hyp = max_orbit < comb(n, k) if strict else max_orbit <= comb(n, k)
        if hyp and s >= k:
            bad.append(k)
    return bad
