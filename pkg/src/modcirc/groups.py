"""Permutations, generating sets, orbits, and the block tree T_n^k.

Points are 0..n-1. Tree automorphisms are represented by the permutation
they induce on the leaves.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from math import prod
from typing import Callable, Hashable, Iterable, TypeVar

from .errors import InvalidArgument, InvalidBlock, TooLarge

T = TypeVar("T", bound=Hashable)

DEFAULT_CLOSURE_CAP = 10_000


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise InvalidArgument(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Iterable[int]) -> "Permutation":
        img = list(range(n))
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """(self * other)(i) = self(other(i))."""
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def apply_set(self, s: Iterable[int]) -> frozenset[int]:
        return frozenset(self.images[i] for i in s)

    def __repr__(self):
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(str(i) for i in c) + ")" for c in cyc)


class GroupKind(Enum):
    FULL_SYMMETRIC = "full_symmetric"
    TREE_AUTOMORPHISM = "tree_automorphism"
    POINTWISE_STABILIZER = "pointwise_stabilizer"
    BLOCK_SIBLING = "block_sibling"
    CUSTOM = "custom"


@dataclass(frozen=True)
class GeneratorSet:
    degree: int
    generators: tuple[Permutation, ...]
    kind: GroupKind = GroupKind.CUSTOM
    detail: object = None

    def __post_init__(self):
        for g in self.generators:
            if g.degree != self.degree:
                raise InvalidArgument("generator degree mismatch")

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)


def transposition(n: int, a: int, b: int) -> Permutation:
    return Permutation.from_cycles(n, (a, b))


def sym_generators(n: int) -> GeneratorSet:
    """{(0 1), (0 1 ... n-1)} for n >= 2, empty for n = 1."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    gens: tuple[Permutation, ...] = ()
    if n == 2:
        gens = (transposition(n, 0, 1),)
    elif n > 2:
        gens = (transposition(n, 0, 1), Permutation.from_cycles(n, range(n)))
    return GeneratorSet(n, gens, GroupKind.FULL_SYMMETRIC)


def pointwise_stabilizer_generators(n: int, fixed: Iterable[int]) -> GeneratorSet:
    fixed = frozenset(fixed)
    if any(not 0 <= i < n for i in fixed):
        raise InvalidArgument("fixed points out of range")
    rest = [i for i in range(n) if i not in fixed]
    gens = tuple(transposition(n, a, b) for a, b in zip(rest, rest[1:]))
    return GeneratorSet(n, gens, GroupKind.POINTWISE_STABILIZER, fixed)


def closure(gens: GeneratorSet, cap: int = DEFAULT_CLOSURE_CAP) -> set[Permutation]:
    """All group elements, by BFS over right multiplication with generators."""
    ident = Permutation.identity(gens.degree)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g * x
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise TooLarge(f"group closure exceeds {cap} elements")
                queue.append(y)
    return seen


def orbit(obj: T, gens: Iterable, action: Callable[[object, T], T], cap: int = DEFAULT_CLOSURE_CAP) -> set[T]:
    """Closure of {obj} under ``action(generator, x)``."""
    gens = list(gens)
    seen = {obj}
    queue = deque([obj])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = action(g, x)
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise TooLarge(f"orbit exceeds {cap} elements")
                queue.append(y)
    return seen


def act_on_point(p: Permutation, i: int) -> int:
    return p(i)


def act_on_set(p: Permutation, s: frozenset[int]) -> frozenset[int]:
    return p.apply_set(s)


def stabilizer(elements: Iterable[Permutation], obj, action) -> list[Permutation]:
    return [g for g in elements if action(g, obj) == obj]


# block trees

Node = tuple[int, int]  # (level, index within level)


@dataclass(frozen=True)
class Block:
    parent: Node
    members: tuple[Node, ...]


@dataclass(frozen=True)
class BlockTree:
    """Rooted tree with branching (k_1, ..., k_h); k_1 is the leaf-block size.

    Leaves are level-0 nodes (0, i) for variable i. Node (l, j) has
    children (l-1, j*k_l), ..., (l-1, (j+1)*k_l - 1).
    """

    branching: tuple[int, ...]

    def __post_init__(self):
        if not self.branching:
            raise InvalidArgument("a block tree needs at least one level")
        if any(k < 2 for k in self.branching):
            raise InvalidArgument("every branching factor must be >= 2")
        object.__setattr__(self, "branching", tuple(int(k) for k in self.branching))

    @classmethod
    def parse(cls, text: str) -> "BlockTree":
        """Parse the ``k1,k2,...,kh`` command-line syntax."""
        try:
            return cls(tuple(int(x) for x in text.split(",") if x.strip()))
        except ValueError as exc:
            raise InvalidArgument(f"bad branching string {text!r}") from exc

    @property
    def h(self) -> int:
        return len(self.branching)

    @property
    def n(self) -> int:
        return prod(self.branching)

    @property
    def k_max(self) -> int:
        return max(self.branching)

    @property
    def k_min(self) -> int:
        return min(self.branching)

    @property
    def meets_size_hypothesis(self) -> bool:
        """Whether every k_i > 8, as the lower-bound theorems assume."""
        return self.k_min > 8

    @property
    def root(self) -> Node:
        return (self.h, 0)

    def level_size(self, level: int) -> int:
        return self.n // prod(self.branching[:level])

    def nodes(self, level: int) -> list[Node]:
        return [(level, j) for j in range(self.level_size(level))]

    def is_node(self, v: Node) -> bool:
        lvl, j = v
        return 0 <= lvl <= self.h and 0 <= j < self.level_size(lvl)

    def parent(self, v: Node) -> Node | None:
        lvl, j = v
        if lvl == self.h:
            return None
        return (lvl + 1, j // self.branching[lvl])

    def node_children(self, v: Node) -> list[Node]:
        lvl, j = v
        if lvl == 0:
            return []
        k = self.branching[lvl - 1]
        return [(lvl - 1, j * k + t) for t in range(k)]

    def leaf_range(self, v: Node) -> range:
        lvl, j = v
        width = prod(self.branching[:lvl])
        return range(j * width, (j + 1) * width)

    def block_of(self, v: Node) -> Block:
        par = self.parent(v)
        if par is None:
            raise InvalidBlock("the root has no sibling block")
        return Block(par, tuple(self.node_children(par)))

    @cached_property
    def blocks(self) -> tuple[Block, ...]:
        out = []
        for lvl in range(1, self.h + 1):
            for v in self.nodes(lvl):
                out.append(Block(v, tuple(self.node_children(v))))
        return tuple(out)

    def check_block(self, b: Block) -> None:
        if not self.is_node(b.parent) or b.parent[0] == 0 or tuple(self.node_children(b.parent)) != tuple(b.members):
            raise InvalidBlock(f"{b} is not a block of {self.branching}")

    def subtree_swap(self, v: Node, w: Node) -> Permutation:
        """Leaf permutation exchanging the subtrees under siblings v and w, in positional order."""
        if self.parent(v) != self.parent(w) or v == w:
            raise InvalidArgument("subtree swaps need two distinct siblings")
        img = list(range(self.n))
        for a, b in zip(self.leaf_range(v), self.leaf_range(w)):
            img[a], img[b] = b, a
        return Permutation(tuple(img))


def leaves_under(t: BlockTree, nodes: Iterable[Node]) -> frozenset[int]:
    out: set[int] = set()
    for v in nodes:
        if not t.is_node(v):
            raise InvalidArgument(f"{v} is not a node")
        out.update(t.leaf_range(v))
    return frozenset(out)


def tree_aut_generators(t: BlockTree) -> GeneratorSet:
    gens = []
    for lvl in range(1, t.h + 1):
        for v in t.nodes(lvl):
            kids = t.node_children(v)
            gens.extend(t.subtree_swap(a, b) for a, b in zip(kids, kids[1:]))
    return GeneratorSet(t.n, tuple(gens), GroupKind.TREE_AUTOMORPHISM, t)


def block_sibling_generators(t: BlockTree, block: Block, fixed: Iterable[Node]) -> GeneratorSet:
    """Subtree swaps realising the pointwise stabiliser of ``fixed`` inside Sym(block)."""
    t.check_block(block)
    fixed = frozenset(fixed)
    if not fixed <= set(block.members):
        raise InvalidArgument("fixed nodes must lie in the block")
    rest = [v for v in block.members if v not in fixed]
    gens = tuple(t.subtree_swap(a, b) for a, b in zip(rest, rest[1:]))
    return GeneratorSet(t.n, gens, GroupKind.BLOCK_SIBLING, (block, fixed))


def tree_aut_order(branching: Iterable[int]) -> int:
    """|Aut(T)| for the iterated wreath product: k_1!^(#level-1 nodes) * ... * k_h!."""
    from math import factorial

    ks = tuple(branching)
    n = prod(ks)
    order = 1
    for lvl, k in enumerate(ks, start=1):
        order *= factorial(k) ** (n // prod(ks[:lvl]))
    return order
