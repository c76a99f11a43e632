import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import single_gate
from modcirc.analysis import random_symmetric_circuit
from modcirc.circuit import Circuit, Gate, size, truth_table
from modcirc.construct import build_and_depth2, build_and_nested
from modcirc.errors import InvalidArgument, NotRigid, SupportUndefined
from modcirc.groups import BlockTree, Permutation, sym_generators, transposition, tree_aut_generators
from modcirc.symmetry import (
    SupportMethod,
    SwapCache,
    _Search,
    _is_automorphism,
    all_supports,
    blockwise_support,
    ensure_rigid,
    extend_to_automorphism,
    gate_orbit,
    is_rigid,
    is_symmetric,
    max_orbit,
    minimal_support,
    rigidify,
    rigidity_witness,
)


def check_automorphism(c, perm, gmap):
    """Independent restatement of the automorphism conditions."""
    assert sorted(gmap) == sorted(c.gates) == sorted(gmap.values())
    for g, gate in c.gates.items():
        img = c.gates[gmap[g]]
        assert gate.is_input == img.is_input
        if gate.is_input:
            assert img.var == perm(gate.var)
        else:
            assert img.accept == gate.accept
    for a in c.gates:
        for b in c.gates:
            assert c.wires.get((a, b), 0) == c.wires.get((gmap[a], gmap[b]), 0)
    assert gmap[c.root] == c.root


def duplicated(m=6, root_accept=(2,)):
    """Two copies of the same gate over x0, x1, both read by the root."""
    gates = {0: Gate.input(0), 1: Gate.input(1), 2: Gate.mod({1}), 3: Gate.mod({1}), 4: Gate.mod(root_accept)}
    wires = {(0, 2): 1, (1, 2): 1, (0, 3): 1, (1, 3): 1, (2, 4): 1, (3, 4): 1}
    return Circuit(m, 2, gates, wires, 4)


def test_rigidity_witness():
    c = duplicated()
    w = rigidity_witness(c)
    assert w is not None and not w.is_identity() and w.perm.is_identity()
    assert w(2) == 3 and w(3) == 2
    check_automorphism(c, w.perm, w.gate_map)
    assert rigidity_witness(rigidify(c)) is None
    assert rigidity_witness(build_and_depth2(6, 5)) is None


def test_identity_extends_to_identity():
    for c in (build_and_depth2(6, 4), duplicated()):
        a = extend_to_automorphism(c, Permutation.identity(c.arity))
        assert a is not None
        check_automorphism(c, a.perm, a.gate_map)
    assert extend_to_automorphism(build_and_depth2(6, 4), Permutation.identity(4)).is_identity()


def test_and2_swap_extends():
    c = build_and_depth2(6, 2)
    p = transposition(2, 0, 1)
    a = extend_to_automorphism(c, p)
    assert a(c.input_gate[0]) == c.input_gate[1]
    check_automorphism(c, p, a.gate_map)


def test_unequal_multiplicities_not_symmetric():
    c = single_gate(6, 2, {0}, mults=[2, 1])
    assert extend_to_automorphism(c, transposition(2, 0, 1)) is None
    assert not is_symmetric(c, sym_generators(2))


def test_uniform_gate_symmetric():
    assert is_symmetric(single_gate(6, 5, {0, 3}), sym_generators(5))


def test_arity_mismatch():
    with pytest.raises(InvalidArgument):
        extend_to_automorphism(single_gate(6, 3, {0}), Permutation.identity(4))


def test_general_search_on_non_hash_consed():
    c = duplicated()
    assert c.signature_index is None
    a = extend_to_automorphism(c, transposition(2, 0, 1))
    check_automorphism(c, a.perm, a.gate_map)


@pytest.mark.parametrize("n", [3, 5, 6])
def test_search_agrees_with_bottom_up(n):
    c = build_and_depth2(6, n)
    for p in sym_generators(n):
        fast = extend_to_automorphism(c, p).gate_map
        s = _Search(c)
        inputs = c.input_gate
        slow = s.search(
            s.initial({inputs[i]: ("x", i) for i in range(n)}, {inputs[p(i)]: ("x", i) for i in range(n)}),
            lambda mp: _is_automorphism(c, p, mp),
        )
        assert slow == fast


def test_rigidity_examples():
    assert not is_rigid(duplicated())
    assert is_rigid(single_gate(6, 3, {0}))
    # same duplicate pair, but the root weights the copies differently
    c = duplicated()
    skew = Circuit(6, 2, c.gates, {**c.wires, (3, 4): 2}, 4)
    assert is_rigid(skew)


def test_rigidify_merges_duplicates():
    r = rigidify(duplicated())
    assert len(r.gates) == 4
    (inner,) = [g for g in r.mod_gates if g != r.root]
    assert r.wires[(inner, r.root)] == 2
    assert np.array_equal(truth_table(r), truth_table(duplicated()))


def test_rigidify_keeps_rigid_circuits():
    c = build_and_depth2(6, 5)
    r = rigidify(c)
    assert r.structurally_equal(c)


def test_rigidify_reduces_modulo_m():
    c = duplicated(m=2, root_accept=(0,))  # merged parent multiplicity 2 = 0 mod 2
    r = rigidify(c)
    assert r.wires.get((2, r.root)) is None
    assert np.array_equal(truth_table(r), truth_table(c))


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_rigidify_properties(seed):
    c = random_symmetric_circuit(seed)
    r = rigidify(c)
    assert is_rigid(r)
    assert np.array_equal(truth_table(r), truth_table(c))
    assert size(r) <= size(c)
    assert is_symmetric(r, sym_generators(c.arity))


def test_ensure_rigid_warns():
    with pytest.warns(UserWarning):
        r, changed = ensure_rigid(duplicated())
    assert changed and is_rigid(r)


def test_gate_orbits():
    c = build_and_depth2(6, 5)
    gens = sym_generators(5)
    assert gate_orbit(c, c.root, gens) == {c.root}
    assert gate_orbit(c, c.input_gate[2], gens) == set(c.input_gate)
    with pytest.raises(NotRigid):
        gate_orbit(duplicated(), 0, sym_generators(2))
    c6 = build_and_depth2(6, 6)
    assert max_orbit(c6, sym_generators(6)) <= len(c6.gates)


def test_support_examples():
    c = build_and_depth2(6, 7)
    rep = minimal_support(c, c.input_gate[3])
    assert rep.support == {3} and rep.unique
    assert rep.method is SupportMethod.GREEDY_TRANSPOSITION
    assert minimal_support(c, c.root).support == frozenset()
    assert minimal_support(single_gate(6, 4, {0}), 4).support == frozenset()


def test_non_unique_support():
    # u = 2 subset gates with n = 4 have two minimal supports of size 2
    c = build_and_depth2(6, 4)
    reps = all_supports(c)
    odd = [r for r in reps.values() if not r.unique]
    assert odd
    for r in odd:
        assert r.support is None
        assert r.method is SupportMethod.EXHAUSTIVE_SUBSETS
        assert len(r.candidates) == 2 and all(len(s) == r.size == 2 for s in r.candidates)
    with pytest.raises(SupportUndefined):
        minimal_support(c, odd[0].gate, exhaustive_cap=3)


def test_support_requires_rigid():
    with pytest.raises(NotRigid):
        minimal_support(duplicated(), 2)


def component_support(c, g):
    """Complement of the largest class of points whose transpositions fix g."""
    n = c.arity
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a in range(n):
        for b in range(a + 1, n):
            if extend_to_automorphism(c, transposition(n, a, b)).fixes(g):
                parent[find(a)] = find(b)
    comps = {}
    for x in range(n):
        comps.setdefault(find(x), set()).add(x)
    best = max(len(s) for s in comps.values())
    return {frozenset(set(range(n)) - s) for s in comps.values() if len(s) == best}


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_support_matches_component_oracle(seed):
    c = rigidify(random_symmetric_circuit(seed))
    for g, rep in all_supports(c).items():
        expected = component_support(c, g)
        if rep.unique:
            assert expected == {rep.support}
        else:
            assert expected == set(rep.candidates)


@pytest.mark.parametrize("n", [6, 8])
def test_support_moves_with_gates(n):
    c = build_and_depth2(6, n)
    reps = all_supports(c)
    rnd = random.Random(n)
    for _ in range(10):
        imgs = list(range(n))
        rnd.shuffle(imgs)
        p = Permutation(tuple(imgs))
        a = extend_to_automorphism(c, p)
        for g, rep in reps.items():
            moved = reps[a(g)]
            assert set(moved.candidates) == {p.apply_set(s) for s in rep.candidates}


def test_blockwise_support_examples():
    t = BlockTree((3, 3))
    c = build_and_nested(6, t)
    leaf_block = t.block_of((0, 0))
    rep = blockwise_support(c, c.input_gate[0], leaf_block, t)
    assert rep.support == {(0, 0)}
    other = t.block_of((0, 5))
    assert blockwise_support(c, c.input_gate[0], other, t).support == frozenset()
    cache = SwapCache(c, t)
    for b in t.blocks:
        assert blockwise_support(c, c.root, b, t, cache).support == frozenset()


@pytest.mark.parametrize("branching", [(2, 2), (3, 2), (2, 2, 2)])
def test_block_support_moves_with_gates(branching):
    from modcirc.groups import closure

    t = BlockTree(branching)
    c = build_and_nested(6, t)
    cache = SwapCache(c, t)
    elements = list(closure(tree_aut_generators(t)))
    rnd = random.Random(0)
    for p in rnd.sample(elements, min(8, len(elements))):
        a = extend_to_automorphism(c, p)
        for b in t.blocks:
            # the block whose leaf set is the image of b's leaf set
            leafsets = [frozenset(t.leaf_range(v)) for v in b.members]
            image = {p.apply_set(s) for s in leafsets}
            (pb,) = [x for x in t.blocks if {frozenset(t.leaf_range(v)) for v in x.members} == image]
            node_of = {frozenset(t.leaf_range(v)): v for v in pb.members}
            for g in rnd.sample(sorted(c.gates), 6):
                r = blockwise_support(c, g, b, t, cache)
                r2 = blockwise_support(c, a(g), pb, t, cache)
                moved = {frozenset(node_of[p.apply_set(frozenset(t.leaf_range(v)))] for v in s) for s in r.candidates}
                assert set(r2.candidates) == moved


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_semantics_equivariance(seed, rnd):
    c = rigidify(random_symmetric_circuit(seed))
    n = c.arity
    imgs = list(range(n))
    rnd.shuffle(imgs)
    p = Permutation(tuple(imgs))
    a = extend_to_automorphism(c, p)
    delta = [rnd.randint(0, 1) for _ in range(n)]
    moved = [0] * n
    for i in range(n):
        moved[p(i)] = delta[i]
    vals, idx = c.gate_values(np.array([delta, moved], dtype=np.uint8))
    for g in c.gates:
        assert vals[0, idx[g]] == vals[1, idx[a(g)]]
