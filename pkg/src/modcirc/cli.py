"""Command-line entry point: build, verify, analyze, bounds, export, sweep.

Every command prints a JSON run report on stdout. Exit codes: 0 when the
checked property holds, 1 when it is violated, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    PeriodAnalysis,
    and_support_threshold,
    block_period,
    is_and_table,
    nested_size_lower_bound,
    random_symmetric_circuit,
    root_period_check,
    size_lower_bound,
    size_lower_bound_ceiling,
    weight_table,
)
from .circuit import Circuit, depth, normalize_multiplicities, size, truth_table
from .construct import build_and_depth2, build_and_nested, build_tq
from .errors import ModCircError
from .groups import BlockTree, sym_generators, tree_aut_generators
from .serialize import dumps, load_circuit, save, to_dot
from .symmetry import (
    SwapCache,
    all_block_supports,
    all_supports,
    ensure_rigid,
    gate_orbit,
    is_rigid,
    is_symmetric,
    max_block_support,
    rigidify,
)

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 0


@dataclass
class RunReport:
    command: str
    parameters: dict
    results: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0
    seed: int | None = None
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, np.integer):
        return int(x)
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


def _size_fields(c: Circuit) -> dict:
    return {
        "size": size(c),
        "size_normalized": size(normalize_multiplicities(c)),
        "depth": depth(c),
        "gates": len(c.gates),
    }


def _gens(c: Circuit, blocks: BlockTree | None):
    if blocks is None:
        return sym_generators(c.arity)
    if blocks.n != c.arity:
        raise ModCircError(f"block tree has {blocks.n} leaves but the circuit has arity {c.arity}")
    return tree_aut_generators(blocks)


def _emit(obj, out: str | None, report: RunReport):
    if out:
        save(obj, out)
        report.results["output"] = out
    else:
        report.results["artifact"] = json.loads(dumps(obj))


# build


def cmd_build(args, report: RunReport) -> int:
    if args.kind == "and2":
        c = build_and_depth2(args.m, args.n)
    elif args.kind == "and-nested":
        c = build_and_nested(args.m, BlockTree.parse(args.blocks))
    else:
        e = build_tq(args.p, args.q, args.nu, args.n)
        report.results.update(terms=len(e.terms), mode=e.meta["mode"])
        _emit(e, args.output, report)
        return EXIT_OK
    report.results.update(_size_fields(c), meta=c.meta)
    _emit(c, args.output, report)
    return EXIT_OK


# verify


def _is_and_exhaustive(c: Circuit) -> bool:
    tt = truth_table(c)
    return bool(tt[-1] == 1 and not tt[:-1].any())


def cmd_verify(args, report: RunReport) -> int:
    c = load_circuit(args.circuit)
    n = c.arity
    if args.mode == "exhaustive":
        ok = _is_and_exhaustive(c)
        report.results.update(exhaustive=True, checked=2**n)
    elif args.mode == "weight":
        symmetric = is_symmetric(c, sym_generators(n))
        report.results["symmetric"] = symmetric
        if not symmetric:
            report.results.update(exhaustive=False, passed=False, reason="circuit is not Sym_n-symmetric")
            return EXIT_VIOLATED
        table = weight_table(c, check_symmetry=False)
        ok = is_and_table(table)
        report.results.update(exhaustive=True, weights=list(table.values))
    else:
        rng = random.Random(args.seed)
        report.seed = args.seed
        rows = [[1] * n]
        for _ in range(args.samples):
            bits = [rng.randint(0, 1) for _ in range(n)]
            if all(bits) and n:
                bits[rng.randrange(n)] = 0
            rows.append(bits)
        vals, index = c.gate_values(np.array(rows, dtype=np.uint8).reshape(len(rows), n))
        out = vals[:, index[c.root]]
        ok = bool(out[0] == 1 and not out[1:].any())
        report.results.update(exhaustive=False, checked=len(rows))
    report.results["passed"] = ok
    return EXIT_OK if ok else EXIT_VIOLATED


# analyze


def cmd_analyze(args, report: RunReport) -> int:
    c = load_circuit(args.circuit)
    blocks = BlockTree.parse(args.blocks) if args.blocks else None
    gens = _gens(c, blocks)
    res = report.results
    if args.what == "symmetry":
        ok = is_symmetric(c, gens)
        res.update(symmetric=ok, group="tree" if blocks else "full")
        return EXIT_OK if ok else EXIT_VIOLATED
    if args.what == "rigidity":
        ok = is_rigid(c)
        res["rigid"] = ok
        if not ok:
            res["rigidified"] = _size_fields(rigidify(c))
        return EXIT_OK if ok else EXIT_VIOLATED
    if not is_symmetric(c, gens):
        res.update(symmetric=False, error="circuit is not symmetric under the chosen group")
        return EXIT_VIOLATED
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        c, changed = ensure_rigid(c)
    res["rigidified"] = changed
    if caught:
        res["warnings"] = [str(w.message) for w in caught]
    if args.what == "orbits":
        seen, sizes = set(), []
        for g in sorted(c.gates):
            if g not in seen:
                orb = gate_orbit(c, g, gens)
                seen |= orb
                sizes.append(len(orb))
        res.update(orbits=len(sizes), max_orbit=max(sizes), orbit_sizes=sorted(sizes, reverse=True))
        return EXIT_OK
    if args.what == "supports":
        return _analyze_supports(c, blocks, res)
    return _analyze_period(c, blocks, args.gate, res)


def _support_json(r) -> dict:
    d = {"gate": r.gate, "size": r.size, "unique": r.unique, "method": r.method.value}
    d["support"] = None if r.support is None else sorted(r.support)
    if not r.unique:
        d["candidates"] = [sorted(s) for s in r.candidates]
    return d


def _computes_and(c: Circuit) -> bool:
    try:
        return _is_and_exhaustive(c)
    except ModCircError:
        return is_and_table(weight_table(c, check_symmetry=False))


def _analyze_supports(c: Circuit, blocks: BlockTree | None, res: dict) -> int:
    is_and = _computes_and(c)
    res["computes_and"] = is_and
    ok = True
    if blocks is None:
        reps = all_supports(c)
        s = max(r.size for r in reps.values())
        thr = and_support_threshold(c.arity, c.modulus)
        res.update(supports=[_support_json(r) for r in reps.values()], max_sup=s, and_threshold=thr)
        ok = not is_and or s >= thr
    else:
        reps = all_block_supports(c, blocks)
        per_block = {}
        for b in blocks.blocks:
            s = max_block_support(c, blocks, reps, b)
            thr = and_support_threshold(len(b.members), c.modulus)
            per_block[str(b.parent)] = {"max_sup_block": s, "and_threshold": thr}
            ok = ok and (not is_and or s >= thr)
        res.update(
            supports=[{**_support_json(r), "block": str(k[1])} for k, r in reps.items()],
            max_sup_block=per_block,
        )
    res["passed"] = ok
    return EXIT_OK if ok else EXIT_VIOLATED


def _analyze_period(c: Circuit, blocks: BlockTree | None, gate: int | None, res: dict) -> int:
    if blocks is not None:
        cache = SwapCache(c, blocks)
        reports = [block_period(c, b, blocks, cache, check_symmetry=False) for b in blocks.blocks]
        res["blocks"] = [_period_json(r) for r in reports]
        ok = all(r.satisfied for r in reports)
    else:
        supports = all_supports(c)
        root = root_period_check(c, supports)
        res["root"] = _period_json(root)
        ok = root.satisfied
        if gate is not None:
            g = PeriodAnalysis(c, supports).gate_report(gate)
            res["gate"] = _period_json(g)
            ok = ok and g.satisfied
    res["passed"] = ok
    return EXIT_OK if ok else EXIT_VIOLATED


def _period_json(r) -> dict:
    return {
        "subject": r.subject,
        "minimal_period": r.minimal_period,
        "bound": r.bound,
        "satisfied": r.satisfied,
        "table_length": r.table_length,
        **r.detail,
    }


# bounds, export, sweep


def cmd_bounds(args, report: RunReport) -> int:
    res = report.results
    k, b = size_lower_bound(args.n, args.m)
    kc, bc = size_lower_bound_ceiling(args.n, args.m)
    res["flat"] = {"k": k, "bound": b, "k_ceiling": kc, "bound_ceiling": bc}
    bound = b
    if args.blocks:
        t = BlockTree.parse(args.blocks)
        if t.n != args.n:
            raise ModCircError(f"--blocks has {t.n} leaves but --n is {args.n}")
        km, nb = nested_size_lower_bound(t, args.m)
        res["nested"] = {"k_max": km, "bound": nb, "meets_k_gt_8": t.meets_size_hypothesis}
        bound = nb
    if args.circuit:
        c = load_circuit(args.circuit)
        if c.arity != args.n:
            raise ModCircError(f"circuit arity {c.arity} differs from --n {args.n}")
        is_and = _computes_and(c)
        res["circuit"] = {**_size_fields(c), "computes_and": is_and, "bound_holds": size(c) >= bound}
        if is_and and size(c) < bound:
            return EXIT_VIOLATED
    return EXIT_OK


def cmd_export(args, report: RunReport) -> int:
    text = to_dot(load_circuit(args.circuit))
    if args.output:
        Path(args.output).write_text(text)
        report.results["output"] = args.output
    else:
        report.results["dot"] = text
    return EXIT_OK


def cmd_sweep(args, report: RunReport) -> int:
    report.seed = args.seed
    failures = []
    counts = {"rigid_input": 0, "and": 0}
    for i in range(args.count):
        seed = args.seed + i
        c = random_symmetric_circuit(seed)
        counts["rigid_input"] += is_rigid(c)
        rc = rigidify(c)
        problems = []
        if not is_rigid(rc):
            problems.append("rigidify: not rigid")
        if not np.array_equal(truth_table(rc), truth_table(c)):
            problems.append("rigidify: truth table changed")
        if size(rc) > size(c):
            problems.append("rigidify: size grew")
        supports = all_supports(rc)
        root = root_period_check(rc, supports)
        if not root.satisfied:
            problems.append(f"root period {root.effective_period} > {root.bound}")
        if is_and_table(weight_table(rc, check_symmetry=False)):
            counts["and"] += 1
            if root.detail["max_sup"] < and_support_threshold(c.arity, c.modulus):
                problems.append("AND with too small supports")
        if problems:
            failures.append({"seed": seed, "problems": problems})
    report.results.update(count=args.count, passed=args.count - len(failures), failures=failures, **counts)
    return EXIT_OK if not failures else EXIT_VIOLATED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modcirc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a circuit or expression")
    b.add_argument("kind", choices=["and2", "and-nested", "tq"])
    b.add_argument("--m", type=int, default=6)
    b.add_argument("--n", type=int)
    b.add_argument("--blocks", help="branching k1,...,kh with k1 the leaf-block size")
    b.add_argument("--p", type=int)
    b.add_argument("--q", type=int)
    b.add_argument("--nu", type=int, default=1)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="check that a circuit computes AND_n")
    v.add_argument("--circuit", required=True)
    v.add_argument("--function", choices=["and"], default="and")
    v.add_argument("--mode", choices=["exhaustive", "weight", "sample"], default="exhaustive")
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="symmetry, rigidity, supports, periods, orbits")
    a.add_argument("what", choices=["symmetry", "rigidity", "supports", "period", "orbits"])
    a.add_argument("--circuit", required=True)
    a.add_argument("--blocks")
    a.add_argument("--gate", type=int)
    a.set_defaults(func=cmd_analyze)

    bd = sub.add_parser("bounds", help="size lower bounds, optionally against a circuit")
    bd.add_argument("--m", type=int, default=6)
    bd.add_argument("--n", type=int, required=True)
    bd.add_argument("--blocks")
    bd.add_argument("--circuit")
    bd.set_defaults(func=cmd_bounds)

    e = sub.add_parser("export", help="export a circuit")
    e.add_argument("--format", choices=["dot"], default="dot")
    e.add_argument("--circuit", required=True)
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_export)

    s = sub.add_parser("sweep", help="random symmetric circuit property sweep")
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.set_defaults(func=cmd_sweep)
    return ap


def _check_build_args(args, ap):
    if args.command != "build":
        return
    need = {"and2": ["n"], "and-nested": ["blocks"], "tq": ["p", "q", "n"]}[args.kind]
    missing = [f"--{k}" for k in need if getattr(args, k) is None]
    if missing:
        ap.error(f"build {args.kind} needs {', '.join(missing)}")


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    _check_build_args(args, ap)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    report = RunReport(args.command, params)
    start = time.perf_counter()
    try:
        code = args.func(args, report)
    except (ModCircError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    report.elapsed_ms = round((time.perf_counter() - start) * 1000, 3)
    if args.command == "export" and not args.output:
        sys.stdout.write(report.results["dot"])
    else:
        print(report.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
