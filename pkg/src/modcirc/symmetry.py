"""Circuit automorphisms, rigidity, rigidification, gate orbits and supports.

Automorphisms are found in two ways. A hash-consed circuit (no two mod
gates share accepting set and child map) admits at most one extension of
an input permutation, and it can be read off bottom-up. Anything else goes
through colour refinement on two copies of the circuit followed by
individualisation and backtracking.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable

import numpy as np

from .circuit import Circuit, CircuitBuilder, prune
from .errors import InvalidArgument, NotRigid, PreconditionFailed, SupportUndefined, TooLarge
from .groups import (
    Block,
    BlockTree,
    GeneratorSet,
    Node,
    Permutation,
    orbit,
    transposition,
)

DEFAULT_SEARCH_CAP = 20_000
EXHAUSTIVE_SUPPORT_CAP = 12


@dataclass(frozen=True)
class CircuitAutomorphism:
    perm: Permutation
    gate_map: dict[int, int] = field(hash=False)

    def __call__(self, g: int) -> int:
        return self.gate_map[g]

    def fixes(self, g: int) -> bool:
        return self.gate_map[g] == g

    def is_identity(self) -> bool:
        return all(a == b for a, b in self.gate_map.items())


# automorphism search


def _bottom_up(c: Circuit, input_image: dict[int, int]) -> dict[int, int] | None:
    """Unique extension on a hash-consed circuit, or None if it fails."""
    index = c.signature_index
    gmap = dict(input_image)
    for g in c.mod_gates:
        accept, kids = c.signatures[g]
        image = (accept, frozenset((gmap[h], k) for h, k in kids))
        target = index.get(image)
        if target is None:
            return None
        gmap[g] = target
    if c.root is not None and gmap[c.root] != c.root:
        return None
    return gmap


class _Search:
    """Colour refinement plus backtracking on two copies of one circuit.

    Copy A holds positions 0..N-1, copy B holds N..2N-1. A mapping found
    here sends the gate at A-position i to the gate at B-position j.
    Neighbour multisets are hashed by summing random 64-bit words, one per
    (colour, multiplicity); every mapping is verified before it is returned.
    """

    def __init__(self, c: Circuit, cap: int = DEFAULT_SEARCH_CAP):
        if len(c.gates) > cap:
            raise TooLarge(f"{len(c.gates)} gates exceeds automorphism search cap {cap}")
        self.c = c
        self.ids = sorted(c.gates)
        self.pos = {g: i for i, g in enumerate(self.ids)}
        self.N = N = len(self.ids)
        src = np.array([self.pos[a] for a, _ in c.wires], dtype=np.intp)
        dst = np.array([self.pos[b] for _, b in c.wires], dtype=np.intp)
        mults, self.mult_idx = np.unique(np.array(list(c.wires.values()), dtype=np.int64), return_inverse=True)
        self.mult_idx = np.concatenate([self.mult_idx, self.mult_idx]).astype(np.intp)
        self.n_mults = max(len(mults), 1)
        self.src = np.concatenate([src, src + N])
        self.dst = np.concatenate([dst, dst + N])

    def initial(self, a_label: dict[int, tuple], b_label: dict[int, tuple]) -> np.ndarray:
        """Colours from per-gate labels; gates without an explicit label get their kind."""
        keys = []
        for side in (a_label, b_label):
            for g in self.ids:
                gate = self.c.gates[g]
                if g in side:
                    keys.append((0,) + side[g])
                elif gate.is_input:
                    keys.append((1, gate.var))
                else:
                    keys.append((2, tuple(sorted(gate.accept)), g == self.c.root))
        return np.array(_relabel(keys), dtype=np.int64)

    def refine(self, colors: np.ndarray) -> np.ndarray:
        ncol = len(np.unique(colors))
        rng = np.random.default_rng(0x5EED)
        while True:
            words = rng.integers(0, 2**63, size=(2, ncol, self.n_mults), dtype=np.uint64)
            up = np.zeros(2 * self.N, dtype=np.uint64)
            down = np.zeros(2 * self.N, dtype=np.uint64)
            np.add.at(up, self.dst, words[0, colors[self.src], self.mult_idx])
            np.add.at(down, self.src, words[1, colors[self.dst], self.mult_idx])
            keys = np.stack([colors.astype(np.uint64), up, down], axis=1)
            _, colors = np.unique(keys, axis=0, return_inverse=True)
            colors = colors.reshape(-1).astype(np.int64)
            new = int(colors.max()) + 1 if len(colors) else 0
            if new == ncol:
                return colors
            ncol = new

    def search(self, colors: np.ndarray, accept) -> dict[int, int] | None:
        colors = self.refine(colors)
        N = self.N
        k = int(colors.max()) + 1
        count_a = np.bincount(colors[:N], minlength=k)
        if not np.array_equal(count_a, np.bincount(colors[N:], minlength=k)):
            return None
        if count_a.max() <= 1:
            where = np.empty(k, dtype=np.intp)
            where[colors[N:]] = np.arange(N)
            mapping = {self.ids[i]: self.ids[where[colors[i]]] for i in range(N)}
            return mapping if accept(mapping) else None
        sizes = np.where(count_a > 1, count_a, np.iinfo(np.int64).max)
        cell = int(np.argmin(sizes))
        a = int(np.flatnonzero(colors[:N] == cell)[0])
        for b in np.flatnonzero(colors[N:] == cell) + N:
            trial = colors.copy()
            trial[a] = trial[b] = k
            found = self.search(trial, accept)
            if found is not None:
                return found
        return None


def _relabel(keys: list) -> list[int]:
    table = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [table[k] for k in keys]


def _is_automorphism(c: Circuit, perm: Permutation, gmap: dict[int, int]) -> bool:
    if sorted(gmap.values()) != sorted(c.gates) or len(gmap) != len(c.gates):
        return False
    for g, gate in c.gates.items():
        img = c.gates[gmap[g]]
        if gate.is_input:
            if not img.is_input or img.var != perm(gate.var):
                return False
        elif img.is_input or img.accept != gate.accept:
            return False
    for (a, b), k in c.wires.items():
        if c.wires.get((gmap[a], gmap[b])) != k:
            return False
    if len(c.wires) != len({(gmap[a], gmap[b]) for a, b in c.wires}):
        return False
    return c.root is None or gmap[c.root] == c.root


def extend_to_automorphism(c: Circuit, perm: Permutation) -> CircuitAutomorphism | None:
    """Automorphism of c acting on inputs as ``perm`` (x_i -> x_perm(i)), or None."""
    if perm.degree != c.arity:
        raise InvalidArgument(f"permutation degree {perm.degree} != circuit arity {c.arity}")
    inputs = c.input_gate
    image = {inputs[i]: inputs[perm(i)] for i in range(c.arity)}
    if c.signature_index is not None:
        gmap = _bottom_up(c, image)
        return None if gmap is None else CircuitAutomorphism(perm, gmap)
    s = _Search(c)
    a_label = {inputs[i]: ("x", i) for i in range(c.arity)}
    b_label = {inputs[perm(i)]: ("x", i) for i in range(c.arity)}
    gmap = s.search(s.initial(a_label, b_label), lambda mp: _is_automorphism(c, perm, mp))
    return None if gmap is None else CircuitAutomorphism(perm, gmap)


def is_symmetric(c: Circuit, gens: GeneratorSet | Iterable[Permutation]) -> bool:
    return all(extend_to_automorphism(c, p) is not None for p in gens)


def is_rigid(c: Circuit) -> bool:
    """True iff the identity is the only automorphism fixing every input gate.

    The lowest gate moved by such an automorphism has all children fixed,
    so it shares its signature with its image. Without duplicate
    signatures the circuit is therefore rigid; otherwise each duplicate
    pair is tried as a forced image.
    """
    cached = c.__dict__.get("_rigid")
    if cached is not None:
        return cached
    result = _is_rigid(c)
    c.__dict__["_rigid"] = result
    return result


def _is_rigid(c: Circuit) -> bool:
    if c.signature_index is not None:
        return True
    return rigidity_witness(c) is None


def rigidity_witness(c: Circuit) -> CircuitAutomorphism | None:
    """A non-identity automorphism fixing every input gate, found by search, or None.

    Refinement with every input pinned gives a partition that any such
    automorphism preserves, so it suffices to force each pair of gates
    sharing a cell. No structural shortcut is taken.
    """
    ident = Permutation.identity(c.arity)
    s = _Search(c)
    pinned = {c.input_gate[i]: ("x", i) for i in range(c.arity)}
    colors = s.refine(s.initial(pinned, pinned))[: s.N]
    cells: dict[int, list[int]] = {}
    for i, col in enumerate(colors):
        cells.setdefault(int(col), []).append(s.ids[i])
    for members in cells.values():
        for g, h in combinations(members, 2):
            found = s.search(
                s.initial({**pinned, g: ("forced",)}, {**pinned, h: ("forced",)}),
                lambda mp: _is_automorphism(c, ident, mp),
            )
            if found is not None:
                return CircuitAutomorphism(ident, found)
    return None


def rigidify(c: Circuit) -> Circuit:
    """Merge mod gates with equal accepting set and child map, bottom-up.

    Parent multiplicities of merged gates add up and are reduced mod m;
    wires that vanish are dropped, and gates the root no longer reaches
    are pruned. The result is hash-consed, hence rigid.
    """
    m = c.modulus
    b = CircuitBuilder(m, c.arity)
    new = {c.input_gate[i]: i for i in range(c.arity)}
    for g in c.mod_gates:
        kids: dict[int, int] = {}
        for h, k in c.children[g]:
            kids[new[h]] = (kids.get(new[h], 0) + k) % m
        new[g] = b.add_mod(c.gates[g].accept, kids)
    out = b.build(None if c.root is None else new[c.root], c.meta)
    out = prune(out)
    return _compact(out)


def _compact(c: Circuit) -> Circuit:
    """Renumber gate ids densely in topological order (inputs first)."""
    order = c.input_gate + [g for g in c.mod_gates]
    ren = {g: i for i, g in enumerate(order)}
    if all(ren[g] == g for g in c.gates):
        return c
    gates = {ren[g]: c.gates[g] for g in c.gates}
    wires = {(ren[a], ren[b]): k for (a, b), k in c.wires.items()}
    root = None if c.root is None else ren[c.root]
    return Circuit(c.modulus, c.arity, gates, wires, root, c.meta)


def ensure_rigid(c: Circuit) -> tuple[Circuit, bool]:
    """Return c if rigid, else its rigidification with a warning."""
    if is_rigid(c):
        return c, False
    warnings.warn("circuit is not rigid; rigidifying before the query", stacklevel=2)
    return rigidify(c), True


def _require_rigid(c: Circuit):
    if not is_rigid(c):
        raise NotRigid("query needs a rigid circuit; call rigidify first")


def gate_orbit(c: Circuit, g: int, gens: GeneratorSet | Iterable[Permutation]) -> set[int]:
    _require_rigid(c)
    autos = []
    for p in gens:
        a = extend_to_automorphism(c, p)
        if a is None:
            raise PreconditionFailed(f"circuit is not symmetric under {p}")
        autos.append(a)
    return orbit(g, autos, lambda a, x: a(x))


def max_orbit(c: Circuit, gens: GeneratorSet) -> int:
    gens = list(gens)
    seen: set[int] = set()
    best = 0
    for g in c.gates:
        if g in seen:
            continue
        orb = gate_orbit(c, g, gens)
        seen |= orb
        best = max(best, len(orb))
    return best


# supports


class SupportMethod(Enum):
    GREEDY_TRANSPOSITION = "greedy_transposition"
    EXHAUSTIVE_SUBSETS = "exhaustive_subsets"


@dataclass(frozen=True)
class SupportReport:
    """Minimal support of one gate.

    ``support`` is None when several supports share the minimum size; they
    are then listed in ``candidates`` and ``unique`` is False. For block
    supports the elements are tree nodes instead of variable indices.
    """

    gate: int
    support: frozenset | None
    size: int
    unique: bool
    method: SupportMethod
    candidates: tuple[frozenset, ...] = ()
    block: Block | None = None

    @property
    def representative(self) -> frozenset:
        return self.support if self.support is not None else self.candidates[0]


class SwapCache:
    """Automorphisms induced by transpositions or sibling subtree swaps, computed once each."""

    def __init__(self, c: Circuit, tree: BlockTree | None = None):
        self.c = c
        self.tree = tree
        self._maps: dict[tuple, dict[int, int]] = {}

    def _get(self, key: tuple, perm_fn) -> dict[int, int]:
        if key not in self._maps:
            a = extend_to_automorphism(self.c, perm_fn())
            if a is None:
                raise PreconditionFailed(f"swap {key} does not extend to an automorphism")
            self._maps[key] = a.gate_map
        return self._maps[key]

    def transposition(self, a: int, b: int) -> dict[int, int]:
        a, b = min(a, b), max(a, b)
        return self._get(("t", a, b), lambda: transposition(self.c.arity, a, b))

    def subtree_swap(self, v: Node, w: Node) -> dict[int, int]:
        v, w = min(v, w), max(v, w)
        return self._get(("s", v, w), lambda: self.tree.subtree_swap(v, w))


def _chain_fixes(rest: list, g: int, swap) -> bool:
    return all(swap(a, b)[g] == g for a, b in zip(rest, rest[1:]))


def _support_search(universe: list, g: int, swap, exhaustive_cap: int) -> tuple:
    """Greedy descent, then exhaustive enumeration when the result is not provably unique."""

    def is_support(s: frozenset) -> bool:
        return _chain_fixes([x for x in universe if x not in s], g, swap)

    s = frozenset(universe)
    for x in universe:
        trial = s - {x}
        if is_support(trial):
            s = trial
    if 2 * len(s) < len(universe):
        return s, len(s), True, SupportMethod.GREEDY_TRANSPOSITION, (s,)
    if len(universe) > exhaustive_cap:
        raise SupportUndefined(
            f"greedy support of size {len(s)} is not below half of {len(universe)} "
            f"and exhaustive search is capped at {exhaustive_cap}"
        )
    for k in range(len(universe) + 1):
        found = tuple(frozenset(t) for t in combinations(universe, k) if is_support(frozenset(t)))
        if found:
            unique = len(found) == 1
            return (found[0] if unique else None), k, unique, SupportMethod.EXHAUSTIVE_SUBSETS, found
    raise AssertionError("the whole universe is always a support")


def minimal_support(
    c: Circuit, g: int, cache: SwapCache | None = None, exhaustive_cap: int = EXHAUSTIVE_SUPPORT_CAP
) -> SupportReport:
    """Minimal S with Stab^pointwise(S) inside Stab(g), for a rigid Sym_n-symmetric circuit."""
    _require_rigid(c)
    if g not in c.gates:
        raise InvalidArgument(f"no gate {g}")
    cache = cache or SwapCache(c)
    sup, k, unique, method, cands = _support_search(list(range(c.arity)), g, cache.transposition, exhaustive_cap)
    return SupportReport(g, sup, k, unique, method, cands)


def blockwise_support(
    c: Circuit,
    g: int,
    block: Block,
    tree: BlockTree,
    cache: SwapCache | None = None,
    exhaustive_cap: int = EXHAUSTIVE_SUPPORT_CAP,
) -> SupportReport:
    """Minimal S inside ``block`` whose pointwise stabiliser in Sym(block) fixes g."""
    _require_rigid(c)
    tree.check_block(block)
    if tree.n != c.arity:
        raise InvalidArgument("tree leaf count differs from circuit arity")
    cache = cache or SwapCache(c, tree)
    sup, k, unique, method, cands = _support_search(list(block.members), g, cache.subtree_swap, exhaustive_cap)
    return SupportReport(g, sup, k, unique, method, cands, block)


def all_supports(c: Circuit, exhaustive_cap: int = EXHAUSTIVE_SUPPORT_CAP) -> dict[int, SupportReport]:
    cache = SwapCache(c)
    return {g: minimal_support(c, g, cache, exhaustive_cap) for g in sorted(c.gates)}


def all_block_supports(
    c: Circuit, tree: BlockTree, exhaustive_cap: int = EXHAUSTIVE_SUPPORT_CAP
) -> dict[tuple[int, Node], SupportReport]:
    cache = SwapCache(c, tree)
    return {
        (g, b.parent): blockwise_support(c, g, b, tree, cache, exhaustive_cap)
        for b in tree.blocks
        for g in sorted(c.gates)
    }


def max_support(c: Circuit, reports: dict[int, SupportReport] | None = None) -> int:
    """maxSup(C): the largest minimal-support size over all gates."""
    reports = reports if reports is not None else all_supports(c)
    return max((r.size for r in reports.values()), default=0)


def max_block_support(
    c: Circuit, tree: BlockTree, reports: dict | None = None, block: Block | None = None
) -> int:
    """maxSup_B(C), over one block or over all blocks."""
    reports = reports if reports is not None else all_block_supports(c, tree)
    sizes = [r.size for r in reports.values() if block is None or r.block == block]
    return max(sizes, default=0)
