"""Z_pq expressions, their depth-2 compilation, and the AND_n constructions.

A Z_pq expression is sum_k alpha_k * b(beta_k . x + c_k mod p) mod q where
b(0) = 0 and b(nonzero) = 1. The depth-2 AND circuit sums, for every prime
p_j of m, (m/p_j) * t_j(x) mod m, where t_j vanishes exactly when p_j^nu_j
divides the number of zero inputs.

t_j is built from subset forms b(sum_{i in U} x_i + c mod p) with one
coefficient per (|U|, c) orbit. The coefficients come from a linear solve
over GF(q) against the target weight function, so the expression is
symmetric by construction and takes values in {0, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, prod

import numpy as np

from .circuit import Circuit, CircuitBuilder, OpenCircuit, all_assignments, prune
from .errors import (
    ConstructionFailed,
    IncompatibleModulus,
    InvalidArgument,
    InvalidAssignment,
    UnsupportedModulus,
)
from .groups import BlockTree
from .numtheory import factorize, is_prime, solve_mod_prime

STRICT = "strict"
ORACLE_MAX_N = 10


@dataclass(frozen=True)
class ZpqTerm:
    alpha: int
    beta: tuple[int, ...]
    c: int


@dataclass(frozen=True)
class ZpqExpression:
    p: int
    q: int
    arity: int
    terms: tuple[ZpqTerm, ...] = ()
    symmetric: bool = False
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if not (is_prime(self.p) and is_prime(self.q)) or self.p == self.q:
            raise InvalidArgument(f"p={self.p}, q={self.q} must be distinct primes")
        if self.arity < 0:
            raise InvalidArgument("arity must be non-negative")
        for t in self.terms:
            if len(t.beta) != self.arity:
                raise InvalidArgument(f"term beta has length {len(t.beta)}, arity is {self.arity}")

    def aggregated(self) -> dict[tuple[tuple[int, ...], int], int]:
        """(beta mod p, c mod p) -> summed alpha mod q, zero sums dropped."""
        agg: dict[tuple[tuple[int, ...], int], int] = {}
        for t in self.terms:
            key = (tuple(b % self.p for b in t.beta), t.c % self.p)
            agg[key] = (agg.get(key, 0) + t.alpha) % self.q
        return {k: v for k, v in agg.items() if v}


def eval_zpq(e: ZpqExpression, bits) -> int:
    bits = tuple(int(b) for b in bits)
    if len(bits) != e.arity:
        raise InvalidAssignment(f"expected {e.arity} bits, got {len(bits)}")
    total = 0
    for t in e.terms:
        inner = (sum(b * x for b, x in zip(t.beta, bits)) + t.c) % e.p
        total += t.alpha * (inner != 0)
    return total % e.q


def eval_zpq_batch(e: ZpqExpression, assignments) -> np.ndarray:
    a = np.asarray(assignments, dtype=np.int64)
    out = np.zeros(len(a), dtype=np.int64)
    for (beta, c), alpha in e.aggregated().items():
        inner = (a @ np.array(beta, dtype=np.int64) + c) % e.p
        out += alpha * (inner != 0)
    return out % e.q


def is_symmetric_scheme(e: ZpqExpression) -> bool:
    """Whether aggregated coefficients are constant on Sym_n-orbits of (beta, c)."""
    agg = e.aggregated()
    orbits: dict[tuple, list[int]] = {}
    for (beta, c), alpha in agg.items():
        orbits.setdefault((tuple(sorted(beta)), c), []).append(alpha)
    for (beta, _), alphas in orbits.items():
        counts = [beta.count(v) for v in set(beta)]
        full = comb_multinomial(len(beta), counts)
        if len(alphas) != full or len(set(alphas)) != 1:
            return False
    return True


def comb_multinomial(n: int, parts: list[int]) -> int:
    out, rest = 1, n
    for k in parts:
        out *= comb(rest, k)
        rest -= k
    return out


def gate_accept(m: int, p: int, c: int) -> frozenset[int]:
    """Accepting set realising b(s + c mod p) on a sum scaled by m/p."""
    return frozenset((m // p) * t % m for t in range(p) if t != (-c) % p)


def compile_zpq(e: ZpqExpression, m: int) -> OpenCircuit:
    """Depth-2 circuit of output type q: one MOD_m gate per aggregated (beta, c)."""
    if m % e.p or m % e.q:
        raise IncompatibleModulus(f"p={e.p} and q={e.q} must both divide m={m}")
    b = CircuitBuilder(m, e.arity)
    outputs = []
    for (beta, c), alpha in sorted(e.aggregated().items()):
        kids = {i: (m // e.p) * v % m for i, v in enumerate(beta)}
        gid = b.add_mod(gate_accept(m, e.p, c), kids)
        outputs.append((gid, alpha))
    meta = {"construction": "zpq", "p": e.p, "q": e.q}
    return OpenCircuit(b.build(None), outputs, e.q, meta)


# t_{q^nu}


@dataclass(frozen=True)
class TqScheme:
    """Orbit coefficients of t_{q^nu}: alpha for each (subset size u, constant c).

    The expression is sum over (u, c) of alpha_{u,c} * sum_{|U| = u}
    b(sum_{i in U} x_i + c mod p), with (0, 1) the constant-1 term.
    """

    p: int
    q: int
    nu: int
    n: int
    coeffs: tuple[tuple[tuple[int, int], int], ...]
    mode: str = STRICT

    @property
    def modulus_power(self) -> int:
        return self.q**self.nu

    @property
    def term_count(self) -> int:
        return sum(comb(self.n, u) for (u, _), _ in self.coeffs)

    def target(self, w: int) -> int:
        return 0 if (self.n - w) % self.modulus_power == 0 else 1

    def value_at_weight(self, w: int) -> int:
        return sum(a * orbit_value(self.p, self.n, u, c, w) for (u, c), a in self.coeffs) % self.q


def orbit_value(p: int, n: int, u: int, c: int, w: int) -> int:
    """Number of u-subsets U with sum_{U} x + c nonzero mod p, at an input of weight w."""
    return sum(comb(w, j) * comb(n - w, u - j) for j in range(u + 1) if (j + c) % p)


def _check_primes(p: int, q: int):
    if not (is_prime(p) and is_prime(q)) or p == q:
        raise InvalidArgument(f"p={p}, q={q} must be distinct primes")


@lru_cache(maxsize=None)
def tq_scheme(p: int, q: int, nu: int, n: int) -> TqScheme:
    _check_primes(p, q)
    if nu < 1 or n < 1:
        raise InvalidArgument("nu and n must be >= 1")
    top = min(n, q**nu - 1)
    cols = [(0, 1)] + [(u, c) for u in range(1, top + 1) for c in range(p)]
    rows = [[orbit_value(p, n, u, c, w) % q for (u, c) in cols] for w in range(n + 1)]
    probe = TqScheme(p, q, nu, n, ())
    rhs = [probe.target(w) for w in range(n + 1)]
    sol = solve_mod_prime(rows, rhs, q)
    if sol is None:
        raise ConstructionFailed(f"no orbit solution for t_{{{q}^{nu}}} with p={p}, n={n}")
    scheme = TqScheme(p, q, nu, n, tuple((col, a) for col, a in zip(cols, sol) if a))
    if any(scheme.value_at_weight(w) != scheme.target(w) for w in range(n + 1)):
        raise ConstructionFailed("orbit solution fails the weight check")
    return scheme


def build_tq(p: int, q: int, nu: int, n: int) -> ZpqExpression:
    """Materialised t_{q^nu}: 0 when q^nu divides the number of zeros, else 1."""
    scheme = tq_scheme(p, q, nu, n)
    terms = []
    for (u, c), alpha in scheme.coeffs:
        for U in combinations(range(n), u):
            beta = tuple(1 if i in U else 0 for i in range(n))
            terms.append(ZpqTerm(alpha, beta, c))
    meta = {"construction": "tq", "nu": nu, "mode": scheme.mode, "term_count": len(terms)}
    e = ZpqExpression(p, q, n, tuple(terms), symmetric=True, meta=meta)
    if n <= ORACLE_MAX_N:
        _oracle_check_tq(e, scheme)
    return e


def _oracle_check_tq(e: ZpqExpression, scheme: TqScheme):
    table = all_assignments(e.arity)
    vals = eval_zpq_batch(e, table)
    zeros = e.arity - table.sum(axis=1).astype(np.int64)
    want = (zeros % scheme.modulus_power != 0).astype(np.int64)
    if not np.array_equal(vals, want):
        raise ConstructionFailed("t expression disagrees with the zero-count oracle")


# AND_n


def choose_nu(p: int, r: int, n: int) -> int:
    """Unique nu >= 1 with p^(r(nu-1)) <= n < p^(r nu)."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    nu = 1
    while p ** (r * nu) <= n:
        nu += 1
    assert p ** (r * (nu - 1)) <= n < p ** (r * nu)
    return nu


@dataclass(frozen=True)
class AndComponent:
    prime: int
    nu: int
    aux_prime: int
    scheme: TqScheme


def and_plan(m: int, n: int) -> tuple[AndComponent, ...]:
    fac = factorize(m)
    if fac.r < 2:
        raise UnsupportedModulus(f"m={m} is a prime power; AND_n needs two distinct primes")
    parts = []
    for pj in fac.distinct:
        nu = choose_nu(pj, fac.r, n)
        aux = min(p for p in fac.distinct if p != pj)
        parts.append(AndComponent(pj, nu, aux, tq_scheme(aux, pj, nu, n)))
    if prod(c.prime**c.nu for c in parts) <= n:
        raise ConstructionFailed("prod p_j^nu_j must exceed n")
    return tuple(parts)


def _orbit_top_mults(m: int, plan) -> dict[tuple[int, int, int], int]:
    """(aux prime, u, c) -> multiplicity into the top gate, summed over components."""
    top: dict[tuple[int, int, int], int] = {}
    for part in plan:
        for (u, c), alpha in part.scheme.coeffs:
            key = (part.aux_prime, u, c)
            top[key] = (top.get(key, 0) + (m // part.prime) * alpha) % m
    return {k: v for k, v in top.items() if v}


def _and_gadget(b: CircuitBuilder, inputs: list[int], plan) -> int:
    """Add a depth-2 AND over the given gates; returns the top gate id."""
    m = b.modulus
    top: dict[int, int] = {}
    for (p, u, c), mult in sorted(_orbit_top_mults(m, plan).items()):
        accept = gate_accept(m, p, c)
        for U in combinations(inputs, u):
            gid = b.add_mod(accept, {i: m // p for i in U})
            top[gid] = (top.get(gid, 0) + mult) % m
    return b.add_mod({0}, {g: k for g, k in top.items() if k})


def _plan_meta(plan) -> dict:
    return {
        "nu": [c.nu for c in plan],
        "primes": [c.prime for c in plan],
        "aux_primes": [c.aux_prime for c in plan],
        "tq_mode": STRICT,
    }


def build_and_depth2(m: int, n: int) -> Circuit:
    """Sym_n-symmetric depth-2 MOD_m circuit computing AND_n."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    plan = and_plan(m, n)
    b = CircuitBuilder(m, n)
    root = _and_gadget(b, list(range(n)), plan)
    meta = {"construction": "and2", "n": n, **_plan_meta(plan)}
    return prune(b.build(root, meta))


def build_and_nested(m: int, tree: BlockTree) -> Circuit:
    """Aut(T)-symmetric depth-2h circuit: one AND gadget per block, leaves upward."""
    plans = {k: and_plan(m, k) for k in set(tree.branching)}
    b = CircuitBuilder(m, tree.n)
    outs = list(range(tree.n))
    for lvl in range(1, tree.h + 1):
        k = tree.branching[lvl - 1]
        outs = [_and_gadget(b, outs[j * k : (j + 1) * k], plans[k]) for j in range(len(outs) // k)]
    meta = {
        "construction": "and_nested",
        "branching": list(tree.branching),
        "nu": {str(k): [c.nu for c in plans[k]] for k in sorted(plans)},
        "tq_mode": STRICT,
    }
    return prune(b.build(outs[0], meta))


def and_depth2_size(m: int, n: int) -> int:
    """size(build_and_depth2(m, n)) without materialising the circuit."""
    total = n + 1
    for (p, u, _), mult in _orbit_top_mults(m, and_plan(m, n)).items():
        total += comb(n, u) * (1 + u * (m // p) + mult)
    return total


def and_depth2_gate_count(m: int, n: int) -> int:
    return n + 1 + sum(comb(n, u) for (_, u, _) in _orbit_top_mults(m, and_plan(m, n)))
