"""MOD_m circuit IR: gate DAGs with weighted multi-edges.

Variables are indexed 0..n-1 throughout the Python API. Gate ids are
arbitrary ints. A multi-edge is a single wire record with a multiplicity.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidAssignment, MalformedCircuit, TooLarge

DEFAULT_MAX_N = 20


def max_exhaustive_n() -> int:
    """Cap on n for exhaustive truth tables; MODCIRC_MAX_N overrides it."""
    return int(os.environ.get("MODCIRC_MAX_N", DEFAULT_MAX_N))


@dataclass(frozen=True)
class Gate:
    """Either an input gate (``var`` set) or a MOD_m^R gate (``accept`` set)."""

    var: int | None = None
    accept: frozenset[int] | None = None

    def __post_init__(self):
        if (self.var is None) == (self.accept is None):
            raise MalformedCircuit("a gate is either an input or a mod gate")

    @property
    def is_input(self) -> bool:
        return self.var is not None

    @staticmethod
    def input(var: int) -> "Gate":
        return Gate(var=var)

    @staticmethod
    def mod(accept: Iterable[int]) -> "Gate":
        return Gate(accept=frozenset(accept))


class Circuit:
    """Immutable MOD_m circuit.

    ``root`` may be None for the body of an open circuit or a partially
    built layer. Derived structure (topological order, levels, evaluation
    plan) is computed lazily and cached.
    """

    def __init__(
        self,
        modulus: int,
        arity: int,
        gates: Mapping[int, Gate],
        wires: Mapping[tuple[int, int], int],
        root: int | None,
        meta: Mapping | None = None,
    ):
        self.modulus = modulus
        self.arity = arity
        self.gates = dict(gates)
        self.wires = {k: v for k, v in wires.items()}
        self.root = root
        self.meta = dict(meta or {})
        self._validate()

    def _validate(self):
        m, n = self.modulus, self.arity
        if m < 2:
            raise MalformedCircuit(f"modulus must be >= 2, got {m}")
        if n < 0:
            raise MalformedCircuit("arity must be non-negative")
        seen_vars = {}
        for gid, g in self.gates.items():
            if g.is_input:
                if not 0 <= g.var < n:
                    raise MalformedCircuit(f"gate {gid}: variable {g.var} out of range")
                if g.var in seen_vars:
                    raise MalformedCircuit(f"variable {g.var} has two input gates")
                seen_vars[g.var] = gid
            elif any(not 0 <= r < m for r in g.accept):
                raise MalformedCircuit(f"gate {gid}: accepting set not inside Z_{m}")
        if len(seen_vars) != n:
            raise MalformedCircuit("every variable needs exactly one input gate")
        for (a, b), mult in self.wires.items():
            if a not in self.gates or b not in self.gates:
                raise MalformedCircuit(f"wire {a}->{b} references a missing gate")
            if self.gates[b].is_input:
                raise MalformedCircuit(f"input gate {b} has an incoming wire")
            if not isinstance(mult, (int, np.integer)) or mult < 1:
                raise MalformedCircuit(f"wire {a}->{b} has multiplicity {mult}")
        if self.root is not None:
            if self.root not in self.gates:
                raise MalformedCircuit("root is not a gate")
            if self.gates[self.root].is_input:
                raise MalformedCircuit("root must be a mod gate")
        _ = self.topo_order  # raises on cycles

    # structural helpers

    @cached_property
    def children(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list[tuple[int, int]]] = {g: [] for g in self.gates}
        for (a, b), mult in sorted(self.wires.items()):
            out[b].append((a, mult))
        return out

    @cached_property
    def parents(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list[tuple[int, int]]] = {g: [] for g in self.gates}
        for (a, b), mult in sorted(self.wires.items()):
            out[a].append((b, mult))
        return out

    @cached_property
    def input_gate(self) -> list[int]:
        """input_gate[i] is the id of the gate labelled x_i."""
        out = [0] * self.arity
        for gid, g in self.gates.items():
            if g.is_input:
                out[g.var] = gid
        return out

    @cached_property
    def topo_order(self) -> list[int]:
        """Children before parents; ties broken by gate id."""
        indeg = {g: 0 for g in self.gates}
        for (_, b) in self.wires:
            indeg[b] += 1
        succ: dict[int, list[int]] = {g: [] for g in self.gates}
        for (a, b) in self.wires:
            succ[a].append(b)
        ready = [g for g, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            g = heapq.heappop(ready)
            order.append(g)
            for h in succ[g]:
                indeg[h] -= 1
                if indeg[h] == 0:
                    heapq.heappush(ready, h)
        if len(order) != len(self.gates):
            raise MalformedCircuit("wires contain a cycle")
        return order

    @cached_property
    def levels(self) -> dict[int, int]:
        """Inputs sit on level 0; a mod gate is one above its highest child (level 1 if childless)."""
        lv: dict[int, int] = {}
        for g in self.topo_order:
            if self.gates[g].is_input:
                lv[g] = 0
            else:
                lv[g] = 1 + max((lv[c] for c, _ in self.children[g]), default=0)
        return lv

    @cached_property
    def mod_gates(self) -> list[int]:
        return [g for g in self.topo_order if not self.gates[g].is_input]

    @cached_property
    def signatures(self) -> dict[int, tuple]:
        """Mod gate -> (accepting set, frozenset of (child, mult))."""
        return {
            g: (self.gates[g].accept, frozenset(self.children[g]))
            for g in self.mod_gates
        }

    @cached_property
    def signature_index(self) -> dict[tuple, int] | None:
        """Inverse of ``signatures``, or None when two mod gates share a signature."""
        index = {}
        for g, sig in self.signatures.items():
            if sig in index:
                return None
            index[sig] = g
        return index

    def structurally_equal(self, other: "Circuit") -> bool:
        return (
            self.modulus == other.modulus
            and self.arity == other.arity
            and self.gates == other.gates
            and self.wires == other.wires
            and self.root == other.root
        )

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.structurally_equal(other) and self.meta == other.meta

    __hash__ = object.__hash__

    def __repr__(self):
        return (
            f"Circuit(m={self.modulus}, n={self.arity}, gates={len(self.gates)}, "
            f"wires={len(self.wires)}, root={self.root})"
        )

    # evaluation

    @cached_property
    def _plan(self):
        index = {g: i for i, g in enumerate(self.topo_order)}
        steps = []
        for g in self.topo_order:
            gate = self.gates[g]
            if gate.is_input:
                steps.append((index[g], gate.var, None, None))
            else:
                kids = self.children[g]
                lut = np.zeros(self.modulus, dtype=bool)
                lut[list(gate.accept)] = True
                idx = np.array([index[c] for c, _ in kids], dtype=np.intp)
                mults = np.array([mult for _, mult in kids], dtype=np.int64)
                steps.append((index[g], None, (idx, mults), lut))
        return index, steps

    def gate_values(self, assignments) -> tuple[np.ndarray, dict[int, int]]:
        """Values of every gate on a batch of assignments.

        Returns ``(values, index)`` where ``values[k, index[g]]`` is the
        output of gate g on assignment k.
        """
        a = np.asarray(assignments, dtype=np.uint8)
        if a.ndim == 1:
            a = a[None, :]
        if a.shape[1] != self.arity:
            raise InvalidAssignment(f"expected {self.arity} bits, got {a.shape[1]}")
        index, steps = self._plan
        vals = np.zeros((a.shape[0], len(steps)), dtype=np.uint8)
        m = self.modulus
        for pos, var, kids, lut in steps:
            if var is not None:
                vals[:, pos] = a[:, var]
                continue
            idx, mults = kids
            if len(idx):
                s = vals[:, idx].astype(np.int64) @ mults
            else:
                s = np.zeros(a.shape[0], dtype=np.int64)
            vals[:, pos] = lut[s % m]
        return vals, index

    def gate_value(self, gate: int, bits) -> int:
        vals, index = self.gate_values(bits)
        return int(vals[0, index[gate]])


def check_assignment(c: Circuit, bits) -> tuple[int, ...]:
    bits = tuple(int(b) for b in bits)
    if len(bits) != c.arity:
        raise InvalidAssignment(f"expected {c.arity} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise InvalidAssignment("assignment bits must be 0 or 1")
    return bits


def evaluate(c: Circuit, bits) -> int:
    if c.root is None:
        raise MalformedCircuit("circuit has no root")
    return c.gate_value(c.root, check_assignment(c, bits))


@dataclass
class OpenCircuit:
    """Depth-2 style circuit whose outputs are summed modulo ``output_modulus``."""

    body: Circuit
    outputs: list[tuple[int, int]]
    output_modulus: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        q = self.output_modulus
        for g, mult in self.outputs:
            if g not in self.body.gates:
                raise MalformedCircuit(f"output gate {g} not in body")
            if not 1 <= mult < q:
                raise MalformedCircuit(f"output multiplicity {mult} not in [1, {q - 1}]")

    @property
    def arity(self) -> int:
        return self.body.arity


def evaluate_open(oc: OpenCircuit, bits) -> int:
    bits = check_assignment(oc.body, bits)
    return int(evaluate_open_batch(oc, np.array([bits]))[0])


def evaluate_open_batch(oc: OpenCircuit, assignments) -> np.ndarray:
    assignments = np.asarray(assignments, dtype=np.uint8)
    if not oc.outputs:
        return np.zeros(len(assignments), dtype=np.int64)
    vals, index = oc.body.gate_values(assignments)
    idx = np.array([index[g] for g, _ in oc.outputs], dtype=np.intp)
    mults = np.array([mult for _, mult in oc.outputs], dtype=np.int64)
    return (vals[:, idx].astype(np.int64) @ mults) % oc.output_modulus


def depth(c: Circuit | OpenCircuit) -> int:
    """Longest input-to-root path in edges; open circuits count their output layer."""
    if isinstance(c, OpenCircuit):
        if not c.outputs:
            return 0
        return 1 + max(c.body.levels[g] for g, _ in c.outputs)
    if c.root is None:
        return max(c.levels.values(), default=0)
    return c.levels[c.root]


def size(c: Circuit) -> int:
    """Gates plus wires, wires counted with multiplicity."""
    return len(c.gates) + sum(c.wires.values())


def normalize_multiplicities(c: Circuit) -> Circuit:
    m = c.modulus
    wires = {k: v % m for k, v in c.wires.items() if v % m}
    if wires == c.wires:
        return c
    return Circuit(m, c.arity, c.gates, wires, c.root, c.meta)


def prune(c: Circuit) -> Circuit:
    """Drop mod gates from which the root is unreachable. Inputs always stay."""
    if c.root is None:
        return c
    keep = {c.root}
    stack = [c.root]
    while stack:
        g = stack.pop()
        for h, _ in c.children[g]:
            if h not in keep:
                keep.add(h)
                stack.append(h)
    keep |= {g for g, gate in c.gates.items() if gate.is_input}
    if len(keep) == len(c.gates):
        return c
    gates = {g: c.gates[g] for g in c.gates if g in keep}
    wires = {k: v for k, v in c.wires.items() if k[0] in keep and k[1] in keep}
    return Circuit(c.modulus, c.arity, gates, wires, c.root, c.meta)


def all_assignments(n: int) -> np.ndarray:
    """All 2^n assignments in lexicographic order, x_0 most significant."""
    k = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((k[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def truth_table(c: Circuit, cap: int | None = None, chunk: int = 4096) -> np.ndarray:
    cap = max_exhaustive_n() if cap is None else cap
    if c.arity > cap:
        raise TooLarge(f"arity {c.arity} exceeds exhaustive cap {cap}")
    if c.root is None:
        raise MalformedCircuit("circuit has no root")
    table = all_assignments(c.arity)
    out = np.empty(len(table), dtype=np.uint8)
    for start in range(0, len(table), chunk):
        vals, index = c.gate_values(table[start : start + chunk])
        out[start : start + chunk] = vals[:, index[c.root]]
    return out


class CircuitBuilder:
    """Incremental construction with hash-consing of identical mod gates.

    Two mod gates with the same accepting set and the same child ->
    multiplicity map are never created twice; ``add_mod`` returns the
    existing id instead.
    """

    def __init__(self, modulus: int, arity: int):
        self.modulus = modulus
        self.arity = arity
        self.gates: dict[int, Gate] = {i: Gate.input(i) for i in range(arity)}
        self.wires: dict[tuple[int, int], int] = {}
        self._sig: dict[tuple, int] = {}
        self._next = arity

    @staticmethod
    def signature(accept, children: Mapping[int, int]) -> tuple:
        return (frozenset(accept), frozenset((h, k) for h, k in children.items() if k))

    def add_mod(self, accept: Iterable[int], children: Mapping[int, int]) -> int:
        sig = self.signature(accept, children)
        found = self._sig.get(sig)
        if found is not None:
            return found
        gid = self._next
        self._next += 1
        self.gates[gid] = Gate(accept=sig[0])
        for h, k in children.items():
            if k:
                self.wires[(h, gid)] = k
        self._sig[sig] = gid
        return gid

    def lookup(self, accept, children: Mapping[int, int]) -> int | None:
        return self._sig.get(self.signature(accept, children))

    def children_of(self, gid: int) -> dict[int, int]:
        return {a: k for (a, b), k in self.wires.items() if b == gid}

    def build(self, root: int | None, meta: Mapping | None = None) -> Circuit:
        return Circuit(self.modulus, self.arity, self.gates, self.wires, root, meta)
