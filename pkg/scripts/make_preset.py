"""Regenerate src/cayley_ci/data/z3_8_spiga.json from readable expressions.

Each affine family is written as an offset plus one column expression per free
parameter (a, b, c, d in that order); the JSON stores the expanded matrix.

    python scripts/make_preset.py [--check]
"""
import argparse
import json
import sys
from pathlib import Path

from cayley_ci.group import GroupSpec, LinearMap

OUT = Path(__file__).resolve().parents[1] / "src" / "cayley_ci" / "data" / "z3_8_spiga.json"

G = GroupSpec.paper()

# block -> (offset, parameter columns)
AFFINE = {
    (1, 0, 0): ("w1", ["v1", "v2", "v5"]),
    (0, 1, 0): ("w2", ["v1", "v3", "v4", "v5"]),
    (0, 0, 1): ("w3", ["v2", "v3", "v4", "v5"]),
    (1, 1, 0): ("w1+w2", ["v1", "v2+v4", "v3", "v5"]),
    (1, 0, 1): ("w1+w3", ["v1+v3", "v2", "v4", "v5"]),
    (0, 1, 1): ("w2+w3", ["v1-v5", "v2-v5", "v3", "v4"]),
    (1, 1, 1): ("w1+w2+w3", ["v1-v5", "v2-v5", "v3+v5", "v4+v5"]),
    (2, 1, 1): ("2w1+w2+w3", ["v1-v5", "v2-v5", "v3-v5", "v4-v5"]),
    (1, 2, 1): ("w1+2w2+w3", ["v1+v5", "v2+v5", "v3-v5", "v4+v5"]),
    (1, 1, 2): ("w1+w2+2w3", ["v1+v5", "v2+v5", "v3+v5", "v4-v5"]),
}
S000 = ["v1-v5", "v2+v3-v4+v5", "v3-v4+v5", "v4+v5", "v5"]
T_SHIFTS = {(1, 1, 1): "v5", (2, 1, 1): "-v5", (1, 2, 1): "-v5", (1, 1, 2): "-v5"}

PSI = [
    ((1, 2, 0), "v1"),
    ((1, 0, 2), "v2"),
    ((0, 2, 1), "v3"),  # the generator on this term is the one missing from the pattern
    ((0, 1, 2), "v4"),
    ((1, 1, 1), "v5"),
]

TABLE = [
    ("v1-v5", 865), ("v2+v3-v4+v5", 163), ("v3-v4+v5", 487), ("v4+v5", 811),
    ("v5", 703), ("v2+v5", 702), ("v4", 650), ("v5-v4", 812),
    ("v1", 380), ("-v1-v5", 704), ("v3+v4+v5", 486), ("-v3-v5", 810),
    ("v2-v3-v4+v5", 648), ("-v2+v4-v5", 486),
]


def vec(expr):
    return list(G.parse(expr).coords)


def label(prefix, block):
    return f"{prefix}_{{{','.join(map(str, block))}}}"


def build():
    families = [{"label": label("S", (0, 0, 0)), "block": [0, 0, 0], "elements": [vec(x) for x in S000]}]
    for block, (offset, cols) in AFFINE.items():
        m = LinearMap.from_columns(G, [G.parse(c) for c in cols])
        families.append({
            "label": label("S", block),
            "block": list(block),
            "offset": vec(offset),
            "params": m.k,
            "matrix": [list(r) for r in m.matrix],
        })
    base = {"variant": "S", "drop": [], "extra": [], "directed": False}
    return {
        "name": "z3_8_spiga",
        "description": (
            "Connection sets S and T on Z_3^8 whose undirected Cayley graphs are isomorphic "
            "via a polynomial map but not via any group automorphism."
        ),
        "group": G.to_json(),
        "families": families,
        "variants": {
            "S": {"prefix": "S", "shifts": {}},
            "T": {
                "prefix": "T",
                "shifts": {",".join(map(str, b)): vec(t) for b, t in T_SHIFTS.items()},
                "note": "T_{i,j,k} = S_{i,j,k} for every other block, including (0,0,0) and all of 0<=i,j,k<=1 except (1,1,1)",
            },
        },
        "graphs": {
            "gamma1": dict(base),
            "gamma2": dict(base, variant="T"),
            "dgamma1": {"variant": "S", "drop": ["0,0,0"], "extra": [vec(x) for x in ["v1", "v3", "v4", "v5"]], "directed": True},
            "dgamma2": {"variant": "T", "drop": ["0,0,0"], "extra": [vec(x) for x in ["v1", "v3", "v4", "v5"]], "directed": True},
        },
        "maps": {
            "psi": {"terms": [{"exp": list(e), "target": vec(t)} for e, t in PSI]},
            "identity": {"terms": []},
        },
        "expected": {
            "mutual_counts": [{"vertex": v, "count": c, "provenance": "PAPER"} for v, c in TABLE],
            "outside_bound": {"value": 587, "provenance": "PAPER"},
            "union_size": {"value": 761, "provenance": "DERIVED"},
        },
        "lemma_chain": {
            "graphs": ["gamma1", "gamma2"],
            "digraphs": ["dgamma1", "dgamma2"],
            "iso_map": "psi",
            "base_block": [0, 0, 0],
            "above_bound": ["v1-v5", "v2+v5", "-v3-v5", "v4+v5", "v5"],
            "fixing_steps": [
                {"pivot": "v5", "pair": ["v4+v5", "-v4-v5"]},
                {"pivot": "-v5", "pair": ["v1-v5", "v5-v1"]},
                {"pivot": "v4", "pair": ["v3-v4+v5", "-v3+v4-v5"]},
                {"pivot": "-v3", "pair": ["v2+v3-v4+v5", "-v2-v3+v4-v5"]},
            ],
            "distinguishers": [
                {"name": "a", "kind": "neighbour_count", "count": 27,
                 "blocks": [[1, 0, 0], [2, 0, 0]], "gating": True},
                {"name": "b", "kind": "translation_closed", "translations": ["v1", "v3", "v4", "v5"],
                 "blocks": [[0, 1, 0], [0, 2, 0]], "gating": True},
                {"name": "c", "kind": "translation_closed", "translations": ["v2", "v3", "v4", "v5"],
                 "blocks": [[0, 0, 1], [0, 0, 2]], "gating": True},
                {"name": "d", "kind": "translation_closed", "translations": ["v1", "v2", "v3", "v4"],
                 "blocks": [[1, 1, 1], [2, 2, 2]], "gating": False,
                 "note": "as originally stated; S_{1,1,1} is not closed under translation by v1..v4, so no block qualifies"},
                {"name": "d'", "kind": "translation_closed", "translations": ["v1-v5", "v2-v5", "v3+v5", "v4+v5"],
                 "blocks": [[1, 1, 1], [2, 2, 2]], "gating": True,
                 "note": "stabilizer of S_{1,1,1} (and T_{1,1,1}) inside <v1..v5>; replaces d for the block argument"},
            ],
            "search_family": {
                "fixed": ["v1", "v2", "v3", "v4", "v5"],
                "free": [{"generator": w, "span": ["v1", "v2", "v3", "v4", "v5"]} for w in ["w1", "w2", "w3"]],
            },
        },
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="fail if the shipped file differs")
    args = ap.parse_args(argv)
    text = json.dumps(build(), indent=1) + "\n"
    if args.check:
        if OUT.read_text() != text:
            print(f"{OUT} is stale", file=sys.stderr)
            return 1
        print("preset up to date")
        return 0
    OUT.write_text(text)
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
