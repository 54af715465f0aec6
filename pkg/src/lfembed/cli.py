"""Command-line front end.

Exit codes:

* 0: success, every checked bound holds
* 2: input error (unreadable file, bad parameters, malformed table)
* 3: the input is not a metric (the violating points are printed)
* 4: a distortion, envelope, moduli or case inequality failed
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .analysis import (
    certify_cases,
    default_thresholds,
    distortion,
    envelope_check,
    moduli,
)
from .blocks import OPERATOR_MODES, OperatorCertificationError, make_operators
from .formats import (
    arith_name,
    dumps,
    embedding_from_doc,
    embedding_to_doc,
    ledger_to_csv,
    num_in,
    num_out,
    read_json,
    read_space,
    report_to_doc,
    space_to_doc,
    write_json,
    write_space,
)
from .generators import FAMILIES, generate
from .glue import Embedding, embed
from .metric import (
    InputError,
    MetricSpace,
    MetricStructureError,
    amalgamate,
    geometry_profile,
    rescale_to_unit_gap,
    validate,
)
from .numeric import arith_for

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_METRIC = 3
EXIT_BOUND = 4

#: spaces up to this size default to rational arithmetic
AUTO_EXACT_LIMIT = 64


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


# --------------------------------------------------------------------------
# argument groups
# --------------------------------------------------------------------------


def _add_source(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("input (exactly one source)")
    src.add_argument("--input", "-i", help="distance CSV, graph JSON or space JSON")
    src.add_argument("--family", choices=FAMILIES, help="generate the input instead of reading it")
    src.add_argument("--dim", type=int, help="grid / uniform_points dimension")
    src.add_argument("--radius", type=int, help="grid radius")
    src.add_argument("-n", "--points", type=int, dest="n", help="number of points")
    src.add_argument("--p", type=str, help="random_graph edge probability")
    src.add_argument("--norm", choices=("l1", "linf", "l2"), default="l1", help="uniform_points norm")
    src.add_argument("--gen-seed", type=int, help="seed of a random family")
    p.add_argument("--basepoint", "-b", help="basepoint name (default: file value or first point)")
    p.add_argument(
        "--arith", choices=("auto", "rational", "float"), default="auto",
        help=f"auto = rational up to {AUTO_EXACT_LIMIT} points, float beyond",
    )


def _add_operators(p: argparse.ArgumentParser) -> None:
    p.add_argument("--operators", choices=OPERATOR_MODES, default="identity")
    p.add_argument("--seed", type=int, help="operator seed (required for random operators)")


def _add_checks(p: argparse.ArgumentParser) -> None:
    p.add_argument("--thresholds", help="comma-separated moduli thresholds (p/q allowed)")
    p.add_argument("--threshold-count", type=int, default=20, help="evenly spaced thresholds")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one run (the parsed arguments, validated)."""

    command: str
    input: str | None
    family: str | None
    gen_params: dict
    basepoint: str | None
    arith: str
    operators: str
    seed: int | None

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        source = getattr(args, "input", None)
        family = getattr(args, "family", None)
        if getattr(args, "embedding", None) is None and (source is None) == (family is None):
            raise CliError(EXIT_INPUT, "give exactly one of --input or --family")
        mode = getattr(args, "operators", "identity")
        seed = getattr(args, "seed", None)
        if mode == "random" and seed is None:
            raise CliError(EXIT_INPUT, "--operators random needs --seed")
        if mode != "random" and seed is not None:
            raise CliError(EXIT_INPUT, "--seed only applies to --operators random")
        params = {}
        if family:
            params = _family_params(args, family, getattr(args, "gen_seed", None))
        return cls(
            args.command, source, family, params, getattr(args, "basepoint", None),
            getattr(args, "arith", "auto"), mode, seed,
        )


def _family_params(args, family: str, seed) -> dict:
    need = {
        "grid": ("dim", "radius"),
        "random_graph": ("n", "p", "seed"),
        "random_tree": ("n", "seed"),
        "uniform_points": ("n", "seed"),
    }[family]
    params = {"dim": args.dim, "radius": args.radius, "n": args.n, "p": args.p, "seed": seed}
    missing = [k for k in need if params.get(k) is None]
    if missing:
        flags = ", ".join("--gen-seed" if k == "seed" else f"--{'points' if k == 'n' else k}" for k in missing)
        raise CliError(EXIT_INPUT, f"family {family} needs {flags}")
    out = {k: params[k] for k in need}
    if family == "uniform_points":
        out["dim"] = args.dim if args.dim is not None else 2
        out["norm"] = args.norm
    if family == "random_graph":
        try:
            out["p"] = float(num_in(args.p, True))
        except InputError as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
    return out


# --------------------------------------------------------------------------
# shared steps
# --------------------------------------------------------------------------


def _load(cfg: RunConfig) -> MetricSpace:
    try:
        if cfg.family:
            space = generate(cfg.family, True, **cfg.gen_params)
            if cfg.basepoint is not None:
                names = [str(p) for p in space.points]
                if cfg.basepoint not in names:
                    raise InputError(f"basepoint {cfg.basepoint!r} is not a point")
                space = space.with_basepoint(names.index(cfg.basepoint))
        else:
            space = read_space(cfg.input, cfg.basepoint)
    except (InputError, MetricStructureError, ValueError) as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    return space.as_mode(_choose_exact(cfg.arith, space.exact, space.size))


def _choose_exact(arith: str, rational_input: bool, size: int) -> bool:
    if arith == "rational":
        if not rational_input:
            raise CliError(EXIT_INPUT, "this input has irrational distances; use --arith float")
        return True
    if arith == "float":
        return False
    return rational_input and size <= AUTO_EXACT_LIMIT


def _validated(space: MetricSpace) -> MetricSpace:
    verdict = validate(space)
    if not verdict.ok:
        lines = [v.describe(space) for v in verdict.violations[:10]]
        more = len(verdict.violations) - len(lines)
        if more > 0:
            lines.append(f"... and {more} more")
        raise CliError(EXIT_METRIC, "not a metric:\n  " + "\n  ".join(lines))
    if space.size < 2:
        raise CliError(EXIT_INPUT, "need at least two points")
    return space


def _embed(cfg: RunConfig, space: MetricSpace) -> Embedding:
    scaled, scale = rescale_to_unit_gap(space)
    try:
        ops = make_operators(scaled, cfg.operators, cfg.seed)
    except OperatorCertificationError as exc:
        raise CliError(EXIT_BOUND, str(exc)) from exc
    return embed(scaled, ops, scale, cfg.operators, cfg.seed)


def _thresholds(args, emb: Embedding) -> tuple:
    if args.thresholds:
        try:
            vals = tuple(num_in(x, emb.space.exact) for x in args.thresholds.split(","))
        except InputError as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
        # thresholds are given in the input's units; the embedding is rescaled
        return tuple(v * emb.scale for v in vals)
    if args.threshold_count < 2:
        raise CliError(EXIT_INPUT, "--threshold-count must be at least 2")
    return default_thresholds(emb, args.threshold_count)


def _analyse(args, emb: Embedding, certify: bool, keep: bool):
    rep = distortion(emb)
    within = rep.within_bounds(arith_for(emb.space.exact))
    env = envelope_check(emb)
    try:
        prof = moduli(emb, _thresholds(args, emb))
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    ledger = certify_cases(emb, keep=keep) if certify else None
    return rep, within, env, prof, ledger


def _emit(doc: dict, path: str | None) -> None:
    if path:
        write_json(path, doc)
    else:
        sys.stdout.write(dumps(doc))


def _summary(rep, within, env, prof, ledger) -> list[str]:
    lines = [
        f"lip {num_out(rep.lip)}  colip {num_out(rep.colip)}  dist {num_out(rep.dist)}"
        f"  (bounds 9, 24, 216: {'ok' if within else 'VIOLATED'})",
        f"envelope {'ok' if env.ok else 'VIOLATED'}; moduli {'ok' if prof.ok else 'VIOLATED'}",
    ]
    if ledger is not None:
        lines.append(
            f"cases: {ledger.pair_count} pairs, {ledger.checks_run} checks, "
            f"{len(ledger.failures)} failing pairs, {len(ledger.point_failures)} inconsistent images"
        )
    return lines


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_embed(args) -> int:
    cfg = RunConfig.from_args(args)
    space = _validated(_load(cfg))
    emb = _embed(cfg, space)
    rep, within, env, prof, ledger = _analyse(args, emb, args.certify, args.full_ledger is not None)
    if args.out_embedding:
        write_json(args.out_embedding, embedding_to_doc(emb))
    report = report_to_doc(emb, rep, within, ledger, env, prof)
    if args.out_report:
        write_json(args.out_report, report)
    if args.full_ledger:
        Path(args.full_ledger).write_text(ledger_to_csv(emb.space, ledger), encoding="utf-8")
    ok = within and env.ok and prof.ok and (ledger is None or ledger.ok)
    for line in _summary(rep, within, env, prof, ledger):
        _err(line)
    if not args.out_report:
        sys.stdout.write(dumps(report))
    return EXIT_OK if ok else EXIT_BOUND


def cmd_verify(args) -> int:
    problems = None
    if args.embedding:
        if args.input or args.family:
            raise CliError(EXIT_INPUT, "give either --embedding or an input source, not both")
        try:
            emb, problems = embedding_from_doc(read_json(args.embedding), args.embedding)
        except (InputError, MetricStructureError, ValueError) as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
        _validated(emb.space)
    else:
        cfg = RunConfig.from_args(args)
        emb = _embed(cfg, _validated(_load(cfg)))
    keep = args.full_ledger is not None or args.include_ledger
    rep, within, env, prof, ledger = _analyse(args, emb, True, keep)
    doc = report_to_doc(emb, rep, within, ledger, env, prof, args.include_ledger, problems)
    _emit(doc, args.out_report)
    if args.full_ledger:
        Path(args.full_ledger).write_text(ledger_to_csv(emb.space, ledger), encoding="utf-8")
    for line in _summary(rep, within, env, prof, ledger):
        _err(line)
    pts = emb.space.points
    for pc in ledger.failures[:5]:
        bad = next(c for c in pc.checks if not c.ok)
        _err(f"FAILED pair ({pts[pc.t]!r}, {pts[pc.s]!r}): {bad.name}: "
             f"{num_out(bad.lhs)} {bad.relation} {num_out(bad.rhs)} is false")
    for t, k in ledger.point_failures[:5]:
        _err(f"FAILED point {pts[t]!r}: stored block {k} differs from the construction")
    for msg in problems or []:
        _err(f"FAILED {msg}")
    ok = within and env.ok and prof.ok and ledger.ok and not problems
    return EXIT_OK if ok else EXIT_BOUND


def cmd_generate(args) -> int:
    params = _family_params(args, args.family, args.seed)
    try:
        space = generate(args.family, True, **params)
    except (InputError, ValueError) as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    if args.out:
        write_space(args.out, space)
    else:
        sys.stdout.write(dumps(space_to_doc(space)))
    _err(f"{args.family}: {space.size} points, basepoint {space.points[space.basepoint]!r}")
    return EXIT_OK


def cmd_amalgamate(args) -> int:
    parts = []
    for path in args.parts:
        try:
            part = read_space(path)
        except (InputError, MetricStructureError, ValueError) as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
        parts.append(_validated(part) if part.size > 1 else part)
    exact = _choose_exact(args.arith, all(p.exact for p in parts), sum(p.size for p in parts))
    am = amalgamate([p.as_mode(exact) for p in parts])
    verdict = validate(am.space)
    defects = am.isometry_defects()
    cert = {
        "schema_version": 1,
        "kind": "amalgam_certificate",
        "arith": arith_name(am.space.exact),
        "points": am.space.size,
        "basepoint": am.space.points[am.space.basepoint],
        "metric_valid": verdict.ok,
        "parts": [
            {"source": str(path), "points": part.size, "max_deviation": num_out(dev),
             "isometric": dev == 0}
            for path, part, dev in zip(args.parts, am.parts, defects)
        ],
    }
    if args.out:
        write_space(args.out, am.space)
    else:
        sys.stdout.write(dumps(space_to_doc(am.space)))
    if args.certificate:
        write_json(args.certificate, cert)
    else:
        _err(dumps(cert).rstrip())
    if not verdict.ok:
        raise CliError(EXIT_METRIC, "composite is not a metric: " + verdict.violations[0].describe(am.space))
    return EXIT_OK if all(d == 0 for d in defects) else EXIT_BOUND


def cmd_profile(args) -> int:
    cfg = RunConfig.from_args(args)
    space = _validated(_load(cfg))
    try:
        radii = [num_in(r, space.exact) for r in args.radii.split(",")]
        prof = geometry_profile(space, radii)
    except (InputError, ValueError) as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    doc = {
        "schema_version": 1,
        "kind": "geometry_profile",
        "arith": arith_name(space.exact),
        "points": space.size,
        "samples": [{"r": num_out(r), "max_ball": c} for r, c in zip(prof.radii, prof.counts)],
    }
    _emit(doc, args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lfembed",
        description="Embed finite metric spaces into a sup-sum of l-infinity blocks and certify the distortion.",
        epilog="exit codes: 0 ok, 2 input error, 3 not a metric, 4 bound violated",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a space and report its distortion")
    _add_source(p)
    _add_operators(p)
    _add_checks(p)
    p.add_argument("--out-embedding", "-e", help="write the embedding JSON here")
    p.add_argument("--out-report", "-r", help="write the report JSON here (default: stdout)")
    p.add_argument("--certify", action="store_true", help="also run the per-pair case certifier")
    p.add_argument("--full-ledger", metavar="CSV", help="per-pair CSV (implies --certify)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify", help="certify every pair of an embedding")
    p.add_argument("--embedding", "-E", help="embedding JSON written by 'embed'")
    _add_source(p)
    _add_operators(p)
    _add_checks(p)
    p.add_argument("--out-report", "-r", help="write the report JSON here (default: stdout)")
    p.add_argument("--full-ledger", metavar="CSV", help="per-pair CSV, one row per pair")
    p.add_argument("--include-ledger", action="store_true", help="put every pair's checks in the report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a space from a seeded family")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--dim", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("-n", "--points", type=int, dest="n")
    p.add_argument("--p", type=str)
    p.add_argument("--norm", choices=("l1", "linf", "l2"), default="l1")
    p.add_argument("--seed", type=int, help="seed of a random family")
    p.add_argument("--out", "-o", help="output file (.csv or .json; default: JSON on stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("amalgamate", help="glue pointed spaces into one far-apart union")
    p.add_argument("parts", nargs="+", help="part files (CSV or JSON), in order")
    p.add_argument("--arith", choices=("auto", "rational", "float"), default="auto")
    p.add_argument("--out", "-o", help="composite space file (default: JSON on stdout)")
    p.add_argument("--certificate", "-c", help="isometry certificate JSON (default: stderr)")
    p.set_defaults(func=cmd_amalgamate)

    p = sub.add_parser("profile", help="largest closed-ball sizes C(r)")
    _add_source(p)
    p.add_argument("--radii", required=True, help="comma-separated increasing radii")
    p.add_argument("--out", "-o", help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "full_ledger", None) and args.command == "embed":
        args.certify = True
    try:
        return args.func(args)
    except CliError as exc:
        _err(f"error: {exc}")
        return exc.code
    except BrokenPipeError:  # pragma: no cover
        return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
