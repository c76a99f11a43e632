"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import json
import math
import random
import time
from functools import lru_cache

import numpy as np

from conftest import record
from modcirc.analysis import (
    PeriodAnalysis,
    admissible_periods,
    and_support_threshold,
    factorizations,
    is_and_table,
    nested_size_lower_bound,
    optimal_branching,
    random_symmetric_circuit,
    root_bound,
    root_period_check,
    size_lower_bound,
    weight_table,
)
from modcirc.circuit import all_assignments, depth, evaluate_open_batch, size, truth_table
from modcirc.cli import main
from modcirc.construct import (
    ZpqExpression,
    ZpqTerm,
    and_depth2_size,
    build_and_depth2,
    build_and_nested,
    compile_zpq,
    eval_zpq_batch,
)
from modcirc.groups import BlockTree, Permutation, sym_generators, tree_aut_generators
from modcirc.numtheory import binomial_period_bruteforce, binomial_period_formula
from modcirc.symmetry import all_supports, extend_to_automorphism, is_symmetric, rigidify, rigidity_witness

MODULI = (6, 10, 12, 15)
RANDOM_SEEDS = range(100)
NESTED = ((3, 3), (2, 2, 2), (4, 2), (2, 4))


@lru_cache(maxsize=None)
def and2(m, n):
    return build_and_depth2(m, n)


@lru_cache(maxsize=None)
def random_rigid(seed):
    raw = random_symmetric_circuit(seed)
    return raw, rigidify(raw)


@lru_cache(maxsize=None)
def supports_of(seed):
    return all_supports(random_rigid(seed)[1])


def is_and(c):
    tt = truth_table(c)
    return bool(tt[-1] == 1 and not tt[:-1].any())


def test_criterion_01_and2_correct(tmp_path, capsys):
    failures, slowest = [], 0.0
    for m in MODULI:
        for n in range(2, 13):
            path = tmp_path / f"and_{m}_{n}.json"
            start = time.perf_counter()
            built = main(["build", "and2", "--m", str(m), "--n", str(n), "-o", str(path)])
            capsys.readouterr()
            verified = main(["verify", "--circuit", str(path), "--mode", "exhaustive"])
            elapsed = time.perf_counter() - start
            rep = json.loads(capsys.readouterr().out)
            slowest = max(slowest, elapsed)
            if built != 0 or verified != 0 or not rep["results"]["passed"] or elapsed >= 30:
                failures.append((m, n, round(elapsed, 2)))
    ok = not failures
    record(1, ok, f"44 builds m in {MODULI}, n in 2..12 verified exhaustively; slowest {slowest:.2f}s; failures {failures}")
    assert ok, failures


def test_criterion_02_and2_shape():
    bad = []
    for m in MODULI:
        for n in range(2, 13):
            c = and2(m, n)
            if depth(c) != 2 or not is_symmetric(c, sym_generators(n)) or c.gates[c.root].accept != frozenset({0}):
                bad.append((m, n))
    ok = not bad
    record(2, ok, f"depth 2, Sym_n-symmetric, top accept {{0}} for all 44 circuits; violations {bad}")
    assert ok, bad


def test_criterion_03_nested():
    rows, ok = [], True
    for br in NESTED:
        t = BlockTree(br)
        c = build_and_nested(6, t)
        good = is_and(c) and depth(c) == 2 * t.h and is_symmetric(c, tree_aut_generators(t))
        ok &= good
        rows.append(f"{br}:n={t.n},depth={depth(c)},size={size(c)}")
    record(3, ok, "nested AND, exhaustive + depth 2h + Aut(T)-symmetric: " + "; ".join(rows))
    assert ok


def test_criterion_04_binomial_period():
    start = time.perf_counter()
    bad = []
    for m in MODULI:
        for x in range(1, 7):
            ell = binomial_period_formula(m, x)
            if binomial_period_bruteforce(m, x, 4 * ell) != ell:
                bad.append((m, x))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 5
    record(4, ok, f"24 (m, x) pairs, brute force over 4*l matches formula; {elapsed:.2f}s; mismatches {bad}")
    assert ok, bad


def test_criterion_05_gate_periods():
    details, ok = [], True
    for n in (6, 8, 10):
        c = and2(6, n)
        pa = PeriodAnalysis(c)
        allowed = set(admissible_periods(6, pa.max_sup))
        reports = [pa.gate_report(g, rng=random.Random(n)) for g in sorted(c.gates)]
        good = all(r.satisfied and r.detail["admissible_period"] in allowed for r in reports)
        ok &= good
        worst = max(r.effective_period for r in reports)
        forms = sorted({r.detail["admissible_period"] for r in reports})
        details.append(f"n={n}: maxSup={pa.max_sup}, q={pa.bound}, max period {worst}, periods of form {forms}")
    record(5, ok, "; ".join(details))
    assert ok


def test_criterion_06_root_periods():
    failures, and_count, max_ratio = [], 0, 0.0
    for seed in RANDOM_SEEDS:
        c = random_rigid(seed)[1]
        assert c.modulus == 6 and c.arity <= 8 and depth(c) <= 3
        rep = root_period_check(c, supports_of(seed))
        s = rep.detail["max_sup"]
        good = rep.satisfied and rep.effective_period <= 6 * max(s, 1) ** 2 == root_bound(6, s)
        if is_and_table(weight_table(c, check_symmetry=False)):
            and_count += 1
            good &= s >= and_support_threshold(c.arity, 6)
        max_ratio = max(max_ratio, rep.effective_period / rep.bound)
        if not good:
            failures.append(seed)
    ok = not failures
    record(6, ok, f"{len(RANDOM_SEEDS) - len(failures)}/100 random rigid circuits within m*maxSup^r; "
                  f"{and_count} computed AND; max period/bound {max_ratio:.3f}")
    assert ok, failures


def constructed_small():
    out = [and2(m, n) for m in MODULI for n in range(2, 11)]
    out += [build_and_nested(6, BlockTree(b)) for b in NESTED]
    return out


def test_criterion_07_rigidify():
    failures, non_rigid_inputs, total = [], 0, 0
    for c in [random_rigid(s)[0] for s in RANDOM_SEEDS] + constructed_small():
        total += 1
        r = rigidify(c)
        non_rigid_inputs += rigidity_witness(c) is not None
        if rigidity_witness(r) is not None or not np.array_equal(truth_table(r), truth_table(c)) or size(r) > size(c):
            failures.append(c.meta)
    ok = not failures
    record(7, ok, f"{total - len(failures)}/{total} circuits rigidified correctly "
                  f"({non_rigid_inputs} inputs were non-rigid); failures {failures}")
    assert ok


def random_perm(rng, n):
    imgs = list(range(n))
    rng.shuffle(imgs)
    return Permutation(tuple(imgs))


def test_criterion_08_equivariance():
    rng = random.Random(8)
    triples = pairs = bad_triples = bad_pairs = 0
    seeds = list(RANDOM_SEEDS)
    while triples < 1000:
        seed = seeds[triples % len(seeds)]
        c = random_rigid(seed)[1]
        n = c.arity
        p = random_perm(rng, n)
        a = extend_to_automorphism(c, p)
        delta = [rng.randint(0, 1) for _ in range(n)]
        moved = [0] * n
        for i in range(n):
            moved[p(i)] = delta[i]
        vals, idx = c.gate_values(np.array([delta, moved], dtype=np.uint8).reshape(2, n))
        triples += 1
        bad_triples += any(vals[0, idx[g]] != vals[1, idx[a(g)]] for g in c.gates)
    while pairs < 1000:
        seed = seeds[pairs % len(seeds)]
        c = random_rigid(seed)[1]
        reps = supports_of(seed)
        p = random_perm(rng, c.arity)
        a = extend_to_automorphism(c, p)
        g = rng.choice(sorted(c.gates))
        pairs += 1
        bad_pairs += set(reps[a(g)].candidates) != {p.apply_set(s) for s in reps[g].candidates}
    ok = bad_triples == 0 and bad_pairs == 0
    record(8, ok, f"semantics equivariance {triples - bad_triples}/{triples} triples; "
                  f"support movement {pairs - bad_pairs}/{pairs} pairs")
    assert ok


def test_criterion_09_bounds():
    flat = size_lower_bound(24, 6)
    nested = nested_size_lower_bound(BlockTree((24, 2)), 6)
    minimal = True
    for h in (2, 3, 4, 5, 6):
        for n in range(2, 65):
            fs = factorizations(n, h)
            if not fs:
                continue
            best = min(max(f) for f in fs)
            minimal &= max(optimal_branching(n, h)) == best
            minimal &= all(max(f) == best for f in fs if len(set(f)) == 1)
    ok = flat == (2, 276) and nested == (24, 276) and minimal
    record(9, ok, f"size_lower_bound(24,6)={flat}; nested (24,2)={nested}; equal branching minimal over n<=64, h<=6: {minimal}")
    assert ok


def random_expression(rng):
    p, q = rng.sample([2, 3, 5], 2)
    n = rng.randint(0, 8)
    terms = tuple(
        ZpqTerm(rng.randint(1, q - 1), tuple(rng.randrange(p) for _ in range(n)), rng.randrange(p))
        for _ in range(rng.randint(0, 8))
    )
    return ZpqExpression(p, q, n, terms), p * q


def test_criterion_10_compiler():
    rng = random.Random(10)
    bad, moduli = 0, set()
    for _ in range(500):
        e, m = random_expression(rng)
        moduli.add(m)
        a = all_assignments(e.arity)
        bad += not np.array_equal(evaluate_open_batch(compile_zpq(e, m), a), eval_zpq_batch(e, a))
    ok = bad == 0
    record(10, ok, f"{500 - bad}/500 random expressions agree on all inputs; moduli {sorted(moduli)}")
    assert ok


def test_criterion_11_size_scaling():
    ns = (4, 8, 16, 32, 64)
    sizes = {n: and_depth2_size(6, n) for n in ns}
    cross = all(size(and2(6, n)) == sizes[n] for n in ns if n <= 16)
    ratios = {n: math.log2(sizes[n]) / (math.sqrt(n) * math.log2(n)) for n in ns}
    K = max(ratios.values())
    below = all(size_lower_bound(n, 6)[1] <= sizes[n] for n in ns)
    ok = cross and below and all(r <= K for r in ratios.values())
    table = ", ".join(f"n={n}: size={sizes[n]} ratio={ratios[n]:.3f}" for n in ns)
    record(11, ok, f"K={K:.3f}; materialised sizes match up to n=16: {cross}; lower bound below size: {below}; {table}")
    assert ok
