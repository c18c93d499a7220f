"""Command-line driver.

Exit codes: 0 success / confirmed, 1 mathematical failure, 2 usage or I/O error.

    cayley-ci certify [PRESET] [--output cert.json] [--threads N] [--checkpoint ck.json]
    cayley-ci fingerprint [PRESET] [--vertex v5 ...] [--json out.json]
    cayley-ci verify-iso psi gamma1 gamma2 [--preset PRESET]
    cayley-ci export gamma1 --format edge-list --output gamma1.txt
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .certificate import verify_lemma_chain
from .errors import CayleyCIError, CheckpointError, ExpressionError, PresetError
from .fingerprints import mutual_table
from .polymap import verify_isomorphism
from .preset import Preset

THREADS_ENV = "CAYLEY_CI_THREADS"


class UsageError(Exception):
    pass


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{THREADS_ENV}={env!r} is not an integer") from None
    return 1


def _load(args) -> Preset:
    path = args.preset_pos or args.preset
    return Preset.load(path)


def cmd_certify(args) -> int:
    preset = _load(args)
    cert = verify_lemma_chain(preset, threads=_threads(args), checkpoint=args.checkpoint)
    if args.output:
        try:
            cert.write(args.output)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc}") from None
    for s in cert.stages:
        print(f"stage {s.index} {s.name:22s} {'pass' if s.passed else 'FAIL'}")
    print(f"conclusion: {cert.conclusion}")
    for s in cert.failed_stages:
        print(f"stage {s.index} ({s.name}) failed: {s.message}", file=sys.stderr)
    return 0 if cert.confirmed else 1


def _render_table(rows, names, width=6) -> str:
    """Two-line layout per row group: vertices, then counts per graph."""
    out = []
    chunk = 8
    for i in range(0, len(rows), chunk):
        part = rows[i : i + chunk]
        cols = [max(len(r.vertex), width) for r in part]
        out.append("v".ljust(8) + " | " + " | ".join(r.vertex.rjust(c) for r, c in zip(part, cols)))
        for gi, name in enumerate(names):
            out.append(f"# {name}".ljust(8) + " | " + " | ".join(str(r.counts[gi]).rjust(c) for r, c in zip(part, cols)))
        out.append("")
    return "\n".join(out).rstrip() + "\n"


def cmd_fingerprint(args) -> int:
    preset = _load(args)
    names = preset.chain.get("graphs", ["gamma1", "gamma2"])
    graphs = [preset.graph(n) for n in names]
    if args.vertex:
        for v in args.vertex:
            preset.vertex(v)  # raises ExpressionError on bad input
        expected = [(v, -1) for v in args.vertex]
    else:
        expected = [(r["vertex"], r["count"]) for r in preset.expected.get("mutual_counts", [])]
    rows = mutual_table(graphs, expected, strict=False)
    sys.stdout.write(_render_table(rows, names))
    ok = True
    if not args.vertex:
        bad = [r for r in rows if not r.ok]
        for r in bad:
            print(f"deviation at {r.vertex}: expected {r.expected}, got {list(r.counts)}", file=sys.stderr)
        ok = not bad
    if args.json:
        payload = [
            {"vertex": r.vertex, "counts": dict(zip(names, r.counts)), **({} if args.vertex else {"expected": r.expected})}
            for r in rows
        ]
        try:
            Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {args.json}: {exc}") from None
    return 0 if ok else 1


def cmd_verify_iso(args) -> int:
    preset = _load(args)
    for n in (args.src, args.dst):
        if n not in preset.graph_names:
            raise UsageError(f"unknown graph {n!r}; preset has {preset.graph_names}")
    if preset.is_directed(args.src) != preset.is_directed(args.dst):
        raise UsageError("cannot compare a graph with a digraph")
    if args.map not in preset.map_names:
        raise UsageError(f"unknown map {args.map!r}; preset has {preset.map_names}")
    rep = verify_isomorphism(preset.polymap(args.map), preset.graph(args.src), preset.graph(args.dst), threads=_threads(args))
    print(f"checked {rep.checked} ordered pairs, {rep.mismatch_count} mismatches: {rep.status}")
    if args.output:
        Path(args.output).write_text(json.dumps(rep.to_json(), indent=2) + "\n")
    return 0 if rep.is_isomorphism else 1


def cmd_export(args) -> int:
    preset = _load(args)
    if args.graph not in preset.graph_names:
        raise UsageError(f"unknown graph {args.graph!r}; preset has {preset.graph_names}")
    g = preset.graph(args.graph)
    try:
        out = open(args.output, "w") if args.output != "-" else sys.stdout
    except OSError as exc:
        raise UsageError(f"cannot write {args.output}: {exc}") from None
    try:
        write_graph(g, out, args.format)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def write_graph(g, fh, fmt: str) -> None:
    """Edge list (``"u v"`` per line) or adjacency JSON; vertices are base-p codes."""
    if fmt == "edge-list":
        edges = g.edges()
        step = 1 << 18
        for i in range(0, len(edges), step):
            block = edges[i : i + step]
            fh.write("\n".join(f"{u} {v}" for u, v in block.tolist()))
            fh.write("\n")
    elif fmt == "adjacency-json":
        heads = g.spec.add_codes(np.arange(g.order)[:, None], g.conn.array[None, :])
        heads.sort(axis=1)
        json.dump(
            {"order": g.order, "directed": g.directed, "adjacency": heads.tolist()},
            fh,
            separators=(",", ":"),
        )
        fh.write("\n")
    else:
        raise UsageError(f"unknown format {fmt!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cayley-ci", description="Cayley graph isomorphism certificates")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, positional_preset=True):
        if positional_preset:
            p.add_argument("preset_pos", nargs="?", metavar="PRESET", help="preset JSON (default: shipped z3_8_spiga.json)")
        else:
            p.set_defaults(preset_pos=None)
        p.add_argument("--preset", help="preset JSON (alternative to the positional argument)")
        p.add_argument("--threads", type=int, default=None, help=f"worker count (env {THREADS_ENV})")

    p = sub.add_parser("certify", help="run the full certificate pipeline")
    common(p)
    p.add_argument("--output", help="write the certificate JSON here")
    p.add_argument("--checkpoint", help="resume/record the automorphism search here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("fingerprint", help="mutual-neighbour counts with e")
    common(p)
    p.add_argument("--vertex", action="append", help="vertex expression, e.g. v2+v3-v4+v5 (repeatable)")
    p.add_argument("--json", help="also write the table as JSON")
    p.set_defaults(func=cmd_fingerprint)

    p = sub.add_parser("verify-iso", help="check that a polynomial map is an isomorphism")
    p.add_argument("map")
    p.add_argument("src")
    p.add_argument("dst")
    common(p, positional_preset=False)
    p.add_argument("--output", help="write the report JSON here")
    p.set_defaults(func=cmd_verify_iso)

    p = sub.add_parser("export", help="write a graph as an edge list or adjacency JSON")
    p.add_argument("graph")
    common(p, positional_preset=False)
    p.add_argument("--format", choices=["edge-list", "adjacency-json"], default="edge-list")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, PresetError, ExpressionError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CayleyCIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
