"""Reading and writing spaces, embeddings and reports.

Structured documents are JSON, written as UTF-8 with a fixed key order.
Rationals are written as ``"p/q"`` strings (integers as ``"3"``) and floats
as their shortest round-trip decimal; infinity is the string ``"inf"``.
Every document carries ``schema_version`` and ``kind`` fields.
"""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .analysis import (
    COLIP_BOUND,
    DIST_BOUND,
    ENVELOPE_LOW,
    LIP_BOUND,
    CaseLedger,
    DistortionReport,
    EnvelopeVerdict,
    ModuliProfile,
)
from .blocks import BlockVector, make_operator
from .frechet import CoordVector
from .glue import Embedding, assign_shells
from .metric import InputError, MetricSpace, ball, from_graph
from .numeric import parse_number

SCHEMA_VERSION = 1


# --------------------------------------------------------------------------
# numbers and raw JSON
# --------------------------------------------------------------------------


def num_out(value) -> Any:
    """JSON form of one number (accepts Fraction, mpq, int or float)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, numbers.Rational):
        n, d = int(value.numerator), int(value.denominator)
        return str(n) if d == 1 else f"{n}/{d}"
    return float(value)


def num_in(value, exact: bool):
    if isinstance(value, str) and value.strip() in ("inf", "-inf"):
        return math.inf if value.strip() == "inf" else -math.inf
    if exact:
        try:
            return parse_number(value)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise InputError(f"not a number: {value!r}") from exc
    if isinstance(value, str):
        return float(parse_number(value))
    return float(value)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path: str | Path, doc: dict) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def _load_json(text: str, source: str) -> dict:
    try:
        # decimals become exact Fractions instead of binary floats
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{source}: expected a JSON object")
    return doc


def read_json(path: str | Path) -> dict:
    return _load_json(_read_text(path), str(path))


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _key(name) -> str:
    return str(name)


def _key_map(space: MetricSpace) -> dict:
    keys = [_key(p) for p in space.points]
    if len(set(keys)) != len(keys):
        raise InputError("point names must stay distinct when written as text")
    return {k: i for i, k in enumerate(keys)}


def arith_name(exact: bool) -> str:
    return "rational" if exact else "float"


# --------------------------------------------------------------------------
# metric spaces
# --------------------------------------------------------------------------


def space_to_doc(space: MetricSpace) -> dict:
    _key_map(space)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "metric_space",
        "arith": arith_name(space.exact),
        "basepoint": space.points[space.basepoint],
        "points": list(space.points),
        "distances": [[num_out(v) for v in row] for row in space.dist],
        "meta": {k: _plain(v) for k, v in space.meta.items()},
    }


def _plain(value):
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if isinstance(value, (float, numbers.Rational)):
        return num_out(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return str(value)


def _basepoint_index(points: list, basepoint, source: str) -> int:
    if basepoint is None:
        return 0
    if basepoint in points:
        return points.index(basepoint)
    keys = [_key(p) for p in points]
    if _key(basepoint) in keys:
        return keys.index(_key(basepoint))
    raise InputError(f"{source}: basepoint {basepoint!r} is not a point")


def space_from_doc(doc: dict, basepoint=None, source: str = "document") -> MetricSpace:
    """Metric-space document or weighted-graph document (``nodes``/``edges``)."""
    if "edges" in doc:
        return graph_from_doc(doc, basepoint, source)
    try:
        points = list(doc["points"])
        rows = doc["distances"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"{source}: a space needs 'points' and 'distances'") from exc
    bp = basepoint if basepoint is not None else doc.get("basepoint")
    idx = _basepoint_index(points, bp, source)
    if not isinstance(rows, list) or len(rows) != len(points) or any(
        not isinstance(r, list) or len(r) != len(points) for r in rows
    ):
        raise InputError(f"{source}: 'distances' must be a {len(points)}x{len(points)} table")
    table = [[num_in(v, True) for v in row] for row in rows]
    meta = doc.get("meta") or {}
    return MetricSpace.from_matrix(points, table, idx, exact=True, meta=meta)


def graph_from_doc(doc: dict, basepoint=None, source: str = "document") -> MetricSpace:
    nodes = doc.get("nodes")
    edges = doc.get("edges")
    if not isinstance(edges, list):
        raise InputError(f"{source}: 'edges' must be a list of [u, v, w]")
    parsed = []
    for e in edges:
        if not isinstance(e, list) or len(e) != 3:
            raise InputError(f"{source}: bad edge {e!r}; expected [u, v, w]")
        w = num_in(e[2], True)
        if w <= 0:
            raise InputError(f"{source}: edge {e!r} needs a positive weight")
        parsed.append((e[0], e[1], w))
    bp = basepoint if basepoint is not None else doc.get("basepoint")
    if bp is None:
        if nodes:
            bp = nodes[0]
        elif parsed:
            bp = parsed[0][0]
        else:
            raise InputError(f"{source}: empty graph")
    names = list(nodes) if nodes else [x for e in parsed for x in e[:2]]
    if bp not in names:
        matches = [n for n in names if _key(n) == _key(bp)]
        if not matches:
            raise InputError(f"{source}: basepoint {bp!r} is not a node")
        bp = matches[0]
    return from_graph(parsed, bp, nodes=nodes, exact=True)


def graph_to_doc(nodes: list, edges: Iterable, basepoint) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "graph",
        "basepoint": basepoint,
        "nodes": list(nodes),
        "edges": [[u, v, num_out(w)] for u, v, w in edges],
    }


def read_csv_space(text: str, basepoint=None, source: str = "matrix") -> MetricSpace:
    """Distance table with a header row of names and an optional label column."""
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{source}: empty CSV")
    header = [c.strip() for c in rows[0]]
    body = [[c.strip() for c in r] for r in rows[1:]]
    labelled = header[0] == "" or (body and all(len(r) == len(header) + 1 for r in body))
    names = header[1:] if header[0] == "" else header
    if labelled:
        labels = [r[0] for r in body]
        if labels != names:
            raise InputError(f"{source}: row labels do not match the header")
        body = [r[1:] for r in body]
    if len(body) != len(names) or any(len(r) != len(names) for r in body):
        raise InputError(f"{source}: expected a {len(names)}x{len(names)} table below the header")
    table = [[num_in(v, True) for v in row] for row in body]
    idx = _basepoint_index(names, basepoint, source)
    return MetricSpace.from_matrix(names, table, idx, exact=True)


def space_to_csv(space: MetricSpace) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([_key(p) for p in space.points])
    for row in space.dist:
        w.writerow([num_out(v) for v in row])
    return out.getvalue()


def read_space(path: str | Path, basepoint=None) -> MetricSpace:
    """Load a space from CSV (by extension) or a JSON space/graph document.

    Inputs are always parsed exactly; callers pick the arithmetic mode later.
    """
    text = _read_text(path)
    if str(path).lower().endswith(".csv"):
        return read_csv_space(text, basepoint, str(path))
    return space_from_doc(_load_json(text, str(path)), basepoint, str(path))


def write_space(path: str | Path, space: MetricSpace) -> None:
    if str(path).lower().endswith(".csv"):
        Path(path).write_text(space_to_csv(space), encoding="utf-8")
    else:
        write_json(path, space_to_doc(space))


# --------------------------------------------------------------------------
# block vectors and embeddings
# --------------------------------------------------------------------------


def block_vector_to_doc(space: MetricSpace, z: BlockVector) -> dict:
    return {
        "blocks": {
            str(n): {_key(space.points[s]): num_out(v) for s, v in zip(b.ball_points, b.values)}
            for n, b in z.blocks.items()
        }
    }


def block_vector_from_doc(space: MetricSpace, doc: dict) -> BlockVector:
    keys = _key_map(space)
    blocks = {}
    try:
        items = doc["blocks"].items()
    except (KeyError, AttributeError, TypeError) as exc:
        raise InputError("a block vector needs a 'blocks' object") from exc
    for n, coords in items:
        try:
            k = int(n)
            pts = tuple(keys[name] for name in coords)
        except (ValueError, KeyError) as exc:
            raise InputError(f"block {n!r}: unknown block index or point name") from exc
        expected = ball(space, k)
        if tuple(pts) != tuple(expected):
            raise InputError(f"block {k}: coordinates must be exactly the ball B_{k} in order")
        blocks[k] = CoordVector(pts, tuple(num_in(v, space.exact) for v in coords.values()))
    return BlockVector(blocks)


def embedding_to_doc(emb: Embedding) -> dict:
    space = emb.space
    names = [_key(p) for p in space.points]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "embedding",
        "arith": arith_name(space.exact),
        "scale": num_out(emb.scale),
        "basepoint": space.points[space.basepoint],
        "mode": emb.mode,
        "seed": emb.seed,
        "space": space_to_doc(space),
        "shells": {
            names[t]: {"n": n, "lambda": num_out(emb.shells.weight[t])}
            for t, n in sorted(emb.shells.shell.items())
        },
        "operators": {
            str(op.n): {"mode": op.kind, "seed": op.seed, "size": op.size}
            for op in emb.operators
        },
        "image": {names[t]: block_vector_to_doc(space, emb.image[t]) for t in range(space.size)},
    }


def embedding_from_doc(doc: dict, source: str = "embedding") -> tuple[Embedding, list]:
    """Rebuild an embedding with the stored image (not a recomputed one).

    Returns the embedding and a list of consistency problems between the
    stored shells/operators and the ones the stored space implies; the
    certifier then judges the stored image itself.
    """
    if doc.get("kind") != "embedding":
        raise InputError(f"{source}: not an embedding document")
    try:
        exact = doc["arith"] == "rational"
        space = space_from_doc(doc["space"], source=source).as_mode(exact)
        scale = num_in(doc["scale"], exact)
        ops_doc = doc["operators"]
        image_doc = doc["image"]
        shells_doc = doc["shells"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"{source}: missing field {exc}") from exc
    problems = []
    shells = assign_shells(space)
    ops = []
    try:
        for n in sorted(int(k) for k in ops_doc):
            spec = ops_doc[str(n)]
            size = len(ball(space, n))
            if spec.get("size") != size:
                problems.append(f"operator {n}: size {spec.get('size')} but B_{n} has {size} points")
            ops.append(make_operator(n, size, spec["mode"], spec.get("seed")))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"{source}: bad operator entry ({exc})") from exc
    if len(ops) != shells.top_block + 1 or any(op.n != k for k, op in enumerate(ops)):
        raise InputError(f"{source}: operators must cover blocks 0..{shells.top_block}")
    keys = _key_map(space)
    for t, n in shells.shell.items():
        got = shells_doc.get(_key(space.points[t]))
        if got is None or got.get("n") != n or num_in(got.get("lambda"), exact) != shells.weight[t]:
            problems.append(f"shell entry of {space.points[t]!r} disagrees with its norm")
    image = {}
    for name, vec in image_doc.items():
        if name not in keys:
            raise InputError(f"{source}: image of unknown point {name!r}")
        image[keys[name]] = block_vector_from_doc(space, vec)
    missing = [p for p, i in keys.items() if i not in image]
    if missing:
        raise InputError(f"{source}: no image for {missing[:5]}")
    emb = Embedding(space, tuple(ops), shells, image, scale, doc.get("mode"), doc.get("seed"))
    return emb, problems


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


def _names(space: MetricSpace, idx) -> list | None:
    return None if idx is None else [space.points[i] for i in idx]


def distortion_to_doc(space: MetricSpace, rep: DistortionReport, ok: bool) -> dict:
    return {
        "lip": num_out(rep.lip),
        "colip": num_out(rep.colip),
        "dist": num_out(rep.dist),
        "lip_witness": _names(space, rep.lip_witness),
        "colip_witness": _names(space, rep.colip_witness),
        "pair_count": rep.pair_count,
        "injective": rep.injective,
        "bounds": {"lip": LIP_BOUND, "colip": COLIP_BOUND, "dist": DIST_BOUND},
        "within_bounds": ok,
    }


def _check_doc(c) -> dict:
    return {"name": c.name, "lhs": num_out(c.lhs), "relation": c.relation, "rhs": num_out(c.rhs), "ok": c.ok}


def _pair_doc(space: MetricSpace, pc, with_checks: bool) -> dict:
    doc = {
        "t": space.points[pc.t],
        "t_prime": space.points[pc.s],
        "d": num_out(pc.d),
        "image_distance": num_out(pc.gap),
        "lip_case": pc.lip_case,
        "inv_case": pc.inv_case,
        "ok": pc.ok,
    }
    if with_checks:
        doc["checks"] = [_check_doc(c) for c in pc.checks]
    else:
        doc["failed_checks"] = [_check_doc(c) for c in pc.checks if not c.ok]
    return doc


#: failing pairs listed in a report when the full ledger is not requested
MAX_LISTED_FAILURES = 20


def ledger_to_doc(space: MetricSpace, ledger: CaseLedger, full: bool = False) -> dict:
    doc = {
        "ok": ledger.ok,
        "pair_count": ledger.pair_count,
        "checks_run": ledger.checks_run,
        "lip_cases": dict(ledger.lip_counts),
        "inv_cases": dict(ledger.inv_counts),
        "failure_count": len(ledger.failures),
        "failures": [_pair_doc(space, pc, False) for pc in ledger.failures[:MAX_LISTED_FAILURES]],
        "point_failures": [
            {"point": space.points[t], "block": k} for t, k in ledger.point_failures
        ],
    }
    if full:
        doc["ledger"] = [_pair_doc(space, pc, True) for pc in ledger.pairs]
    return doc


def envelope_to_doc(space: MetricSpace, env: EnvelopeVerdict) -> dict:
    pt = lambda i: None if i is None else space.points[i]  # noqa: E731
    return {
        "ok": env.ok,
        "low": num_out(ENVELOPE_LOW),
        "high": 1,
        "min_ratio": None if env.min_ratio is None else num_out(env.min_ratio),
        "max_ratio": None if env.max_ratio is None else num_out(env.max_ratio),
        "min_point": pt(env.min_point),
        "max_point": pt(env.max_point),
        "violations": [space.points[t] for t in env.violations],
    }


def moduli_to_doc(prof: ModuliProfile) -> dict:
    return {
        "ok": prof.ok,
        "empty_set_conventions": {"omega": 0, "rho": "inf"},
        "samples": [
            {"t": num_out(t), "omega": num_out(w), "rho": num_out(r)}
            for t, w, r in zip(prof.thresholds, prof.omega, prof.rho)
        ],
        "violations": [
            {"check": name, "t": num_out(a), "value": num_out(b)} for name, a, b in prof.violations
        ],
    }


def report_to_doc(
    emb: Embedding,
    rep: DistortionReport,
    within: bool,
    ledger: CaseLedger | None = None,
    envelope: EnvelopeVerdict | None = None,
    prof: ModuliProfile | None = None,
    full_ledger: bool = False,
    problems: list | None = None,
) -> dict:
    space = emb.space
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "report",
        "arith": arith_name(space.exact),
        "mode": emb.mode,
        "seed": emb.seed,
        "scale": num_out(emb.scale),
        "points": space.size,
        "distortion": distortion_to_doc(space, rep, within),
        "cases": None if ledger is None else ledger_to_doc(space, ledger, full_ledger),
        "envelope": None if envelope is None else envelope_to_doc(space, envelope),
        "moduli": None if prof is None else moduli_to_doc(prof),
    }
    if problems is not None:
        doc["consistency_problems"] = list(problems)
    return doc


PAIR_CSV_HEADER = ("t", "t_prime", "d", "image_distance", "lip_case", "inv_case", "lip_ok", "inv_ok", "ok")


def ledger_to_csv(space: MetricSpace, ledger: CaseLedger) -> str:
    """One row per unordered pair (needs a ledger built with ``keep=True``)."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(PAIR_CSV_HEADER)
    for pc in ledger.pairs:
        w.writerow([
            _key(space.points[pc.t]), _key(space.points[pc.s]), num_out(pc.d), num_out(pc.gap),
            pc.lip_case, pc.inv_case, int(pc.case_ok("lip")), int(pc.case_ok("inv")), int(pc.ok),
        ])
    return out.getvalue()
