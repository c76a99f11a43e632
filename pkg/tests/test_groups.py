import pytest
from hypothesis import given, strategies as st

from modcirc.errors import InvalidArgument, InvalidBlock, TooLarge
from modcirc.groups import (
    Block,
    BlockTree,
    Permutation,
    act_on_point,
    act_on_set,
    block_sibling_generators,
    closure,
    leaves_under,
    orbit,
    pointwise_stabilizer_generators,
    stabilizer,
    sym_generators,
    transposition,
    tree_aut_generators,
    tree_aut_order,
)


def perms(n):
    return st.permutations(range(n)).map(lambda p: Permutation(tuple(p)))


def test_permutation_rejects_non_bijection():
    with pytest.raises(InvalidArgument):
        Permutation((0, 0, 1))


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n))))
def test_group_laws(ps):
    a, b, c = ps
    assert (a * b) * c == a * (b * c)
    assert (a * a.inverse()).is_identity()
    assert (a * b)(0) == a(b(0))


def test_cycles():
    p = Permutation.from_cycles(5, (0, 2, 4))
    assert p.cycles() == [(0, 2, 4)]
    assert repr(p) == "(0 2 4)"


def test_sym_generators():
    assert list(sym_generators(1)) == []
    assert list(sym_generators(2)) == [transposition(2, 0, 1)]
    gens = list(sym_generators(3))
    assert gens == [transposition(3, 0, 1), Permutation.from_cycles(3, (0, 1, 2))]


@pytest.mark.parametrize("n, order", [(1, 1), (2, 2), (3, 6), (4, 24), (5, 120), (6, 720)])
def test_sym_generators_generate_everything(n, order):
    assert len(closure(sym_generators(n))) == order


def test_pointwise_stabilizer_generators():
    assert list(pointwise_stabilizer_generators(4, {0})) == [transposition(4, 1, 2), transposition(4, 2, 3)]
    assert list(pointwise_stabilizer_generators(4, {0, 1, 2, 3})) == []
    assert list(pointwise_stabilizer_generators(3, set())) == [transposition(3, 0, 1), transposition(3, 1, 2)]


def test_block_tree_structure():
    t = BlockTree((3, 2))
    assert t.n == 6 and t.h == 2
    assert t.nodes(1) == [(1, 0), (1, 1)]
    assert t.node_children((1, 1)) == [(0, 3), (0, 4), (0, 5)]
    assert t.parent((0, 4)) == (1, 1)
    assert t.parent(t.root) is None
    assert len(t.blocks) == 3
    assert not t.meets_size_hypothesis
    assert BlockTree((9, 10)).meets_size_hypothesis


@pytest.mark.parametrize("bad", [(), (1, 3), (3, 0)])
def test_block_tree_rejects(bad):
    with pytest.raises(InvalidArgument):
        BlockTree(bad)


def test_parse():
    assert BlockTree.parse("3,2").branching == (3, 2)
    with pytest.raises(InvalidArgument):
        BlockTree.parse("3,x")


def test_tree_generators_examples():
    assert list(tree_aut_generators(BlockTree((2,)))) == [transposition(2, 0, 1)]
    gens = set(tree_aut_generators(BlockTree((2, 2))))
    assert transposition(4, 0, 1) in gens
    assert transposition(4, 2, 3) in gens
    assert Permutation.from_cycles(4, (0, 2), (1, 3)) in gens


@pytest.mark.parametrize("branching", [(3,), (3, 2), (2, 2), (2, 3), (2, 2, 2), (4, 2), (2, 4), (3, 3)])
def test_tree_group_order(branching):
    expected = tree_aut_order(branching)
    if expected <= 10_000:
        assert len(closure(tree_aut_generators(BlockTree(branching)))) == expected


def test_tree_order_3_2():
    assert tree_aut_order((3, 2)) == 72
    assert len(closure(tree_aut_generators(BlockTree((3, 2))))) == 72


def _edges(t):
    return {(v, t.parent(v)) for lvl in range(t.h) for v in t.nodes(lvl)}


@pytest.mark.parametrize("branching", [(2, 2), (3, 2), (2, 3), (2, 2, 2)])
def test_tree_generators_preserve_blocks(branching):
    t = BlockTree(branching)
    leaf_sets = {lvl: {frozenset(t.leaf_range(v)) for v in t.nodes(lvl)} for lvl in range(t.h + 1)}
    for g in tree_aut_generators(t):
        for lvl, sets in leaf_sets.items():
            assert {g.apply_set(s) for s in sets} == sets


def test_block_sibling_generators():
    t = BlockTree((3, 2))
    leaf_block = t.block_of((0, 0))
    assert list(block_sibling_generators(t, leaf_block, set())) == [transposition(6, 0, 1), transposition(6, 1, 2)]
    t22 = BlockTree((2, 2))
    top = t22.block_of((1, 0))
    assert list(block_sibling_generators(t22, top, set())) == [Permutation.from_cycles(4, (0, 2), (1, 3))]
    assert list(block_sibling_generators(t22, top, set(top.members))) == []
    with pytest.raises(InvalidBlock):
        block_sibling_generators(t22, Block((1, 0), ((0, 0), (0, 2))), set())


def test_orbit_examples():
    gens = sym_generators(3)
    assert orbit(0, gens, act_on_point) == {0, 1, 2}
    two = orbit(frozenset({0, 1}), gens, act_on_set)
    assert two == {frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2})}
    with pytest.raises(TooLarge):
        orbit(frozenset({0, 1, 2}), sym_generators(8), act_on_set, cap=10)


@pytest.mark.parametrize(
    "gens, obj, action",
    [
        (sym_generators(4), 0, act_on_point),
        (sym_generators(5), frozenset({0, 3}), act_on_set),
        (tree_aut_generators(BlockTree((3, 2))), 4, act_on_point),
        (tree_aut_generators(BlockTree((2, 2, 2))), frozenset({0, 1, 5}), act_on_set),
        (pointwise_stabilizer_generators(5, {1}), frozenset({0, 1}), act_on_set),
    ],
)
def test_orbit_stabilizer(gens, obj, action):
    elements = closure(gens)
    assert len(orbit(obj, gens, action)) * len(stabilizer(elements, obj, action)) == len(elements)


def test_leaves_under():
    t = BlockTree((3, 2))
    assert leaves_under(t, [(1, 0)]) == {0, 1, 2}
    assert leaves_under(t, [t.root]) == set(range(6))
    assert leaves_under(t, [(0, 4)]) == {4}
    with pytest.raises(InvalidArgument):
        leaves_under(t, [(1, 5)])
