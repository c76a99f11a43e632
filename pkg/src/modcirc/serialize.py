"""JSON formats for circuits, open circuits and Z_pq expressions; DOT export.

The ``var`` field of input gates is 1-based in JSON and 0-based in memory.
"""

from __future__ import annotations

import json
from pathlib import Path

from .circuit import Circuit, Gate, OpenCircuit
from .construct import ZpqExpression, ZpqTerm
from .errors import InvalidArgument, MalformedCircuit


def circuit_to_dict(c: Circuit) -> dict:
    gates = []
    for gid in sorted(c.gates):
        g = c.gates[gid]
        if g.is_input:
            gates.append({"id": gid, "kind": "input", "var": g.var + 1})
        else:
            gates.append({"id": gid, "kind": "mod", "accept": sorted(g.accept)})
    d = {
        "modulus": c.modulus,
        "arity": c.arity,
        "gates": gates,
        "wires": [{"from": a, "to": b, "mult": k} for (a, b), k in sorted(c.wires.items())],
    }
    if c.root is not None:
        d["root"] = c.root
    if c.meta:
        d["meta"] = c.meta
    return d


def open_circuit_to_dict(oc: OpenCircuit) -> dict:
    d = circuit_to_dict(oc.body)
    d.pop("meta", None)
    d["outputs"] = [{"gate": g, "mult": k} for g, k in oc.outputs]
    d["output_modulus"] = oc.output_modulus
    if oc.meta:
        d["meta"] = oc.meta
    return d


def _int(d: dict, key: str) -> int:
    v = d.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise MalformedCircuit(f"field {key!r} must be an integer, got {v!r}")
    return v


def _body_from_dict(d: dict, root) -> Circuit:
    if not isinstance(d, dict):
        raise MalformedCircuit("circuit JSON must be an object")
    try:
        gates = {}
        for g in d["gates"]:
            gid = _int(g, "id")
            if gid in gates:
                raise MalformedCircuit(f"duplicate gate id {gid}")
            if g["kind"] == "input":
                gates[gid] = Gate.input(_int(g, "var") - 1)
            elif g["kind"] == "mod":
                gates[gid] = Gate.mod(int(r) for r in g["accept"])
            else:
                raise MalformedCircuit(f"unknown gate kind {g['kind']!r}")
        wires: dict[tuple[int, int], int] = {}
        for w in d["wires"]:
            key = (_int(w, "from"), _int(w, "to"))
            if key in wires:
                raise MalformedCircuit(f"two wire records for {key}")
            wires[key] = _int(w, "mult")
        return Circuit(_int(d, "modulus"), _int(d, "arity"), gates, wires, root, d.get("meta"))
    except (KeyError, TypeError) as exc:
        raise MalformedCircuit(f"bad circuit JSON: {exc}") from exc


def circuit_from_dict(d: dict) -> Circuit:
    if "outputs" in d:
        raise MalformedCircuit("this is an open circuit; use open_circuit_from_dict")
    if "root" not in d:
        raise MalformedCircuit("closed circuits need a root")
    return _body_from_dict(d, _int(d, "root"))


def open_circuit_from_dict(d: dict) -> OpenCircuit:
    body = _body_from_dict({**d, "meta": None}, None)
    try:
        outputs = [(_int(o, "gate"), _int(o, "mult")) for o in d["outputs"]]
    except (KeyError, TypeError) as exc:
        raise MalformedCircuit(f"bad outputs: {exc}") from exc
    return OpenCircuit(body, outputs, _int(d, "output_modulus"), d.get("meta") or {})


def expression_to_dict(e: ZpqExpression) -> dict:
    d = {
        "p": e.p,
        "q": e.q,
        "arity": e.arity,
        "terms": [{"alpha": t.alpha, "beta": list(t.beta), "c": t.c} for t in e.terms],
    }
    if e.meta:
        d["meta"] = e.meta
    return d


def expression_from_dict(d: dict) -> ZpqExpression:
    try:
        terms = tuple(ZpqTerm(int(t["alpha"]), tuple(int(b) for b in t["beta"]), int(t["c"])) for t in d["terms"])
        return ZpqExpression(int(d["p"]), int(d["q"]), int(d["arity"]), terms, meta=d.get("meta") or {})
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidArgument):
            raise
        raise InvalidArgument(f"bad expression JSON: {exc}") from exc


def dumps(obj) -> str:
    if isinstance(obj, Circuit):
        d = circuit_to_dict(obj)
    elif isinstance(obj, OpenCircuit):
        d = open_circuit_to_dict(obj)
    elif isinstance(obj, ZpqExpression):
        d = expression_to_dict(obj)
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    return json.dumps(d, indent=1)


def load(path: str | Path) -> Circuit | OpenCircuit | ZpqExpression:
    """Read any of the three JSON artifacts, dispatching on its keys."""
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedCircuit(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(d, dict) and "terms" in d:
        return expression_from_dict(d)
    if isinstance(d, dict) and "outputs" in d:
        return open_circuit_from_dict(d)
    return circuit_from_dict(d)


def load_circuit(path: str | Path) -> Circuit:
    c = load(path)
    if not isinstance(c, Circuit):
        raise MalformedCircuit(f"{path} does not hold a closed circuit")
    return c


def save(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def to_dot(c: Circuit) -> str:
    lines = ["digraph circuit {", "  rankdir=BT;"]
    for gid in sorted(c.gates):
        g = c.gates[gid]
        if g.is_input:
            label = f"x_{g.var + 1}"
            lines.append(f'  g{gid} [label="{label}", shape=box];')
        else:
            acc = ",".join(str(r) for r in sorted(g.accept))
            shape = "doublecircle" if gid == c.root else "ellipse"
            lines.append(f'  g{gid} [label="MOD_{c.modulus}^{{{acc}}}", shape={shape}];')
    for (a, b), k in sorted(c.wires.items()):
        lines.append(f'  g{a} -> g{b} [label="×{k}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
