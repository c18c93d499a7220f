"""Print the common-neighbour fingerprints of the shipped graphs.

    python scripts/reproduce_table.py [--preset P] [--json out.json]
"""
import argparse
import json
from dataclasses import asdict, dataclass

from cayley_ci import fingerprints as fp
from cayley_ci.preset import Preset


@dataclass
class Config:
    preset: str | None = None
    graphs: tuple[str, str] = ("gamma1", "gamma2")
    json: str | None = None


def run(cfg: Config) -> dict:
    preset = Preset.load(cfg.preset)
    graphs = [preset.graph(n) for n in cfg.graphs]
    expected = [(r["vertex"], r["count"]) for r in preset.expected["mutual_counts"]]
    rows = fp.mutual_table(graphs, expected, strict=False)
    report = fp.FingerprintReport(
        table=rows,
        max_outside=[fp.max_mutual_outside_b0(g) for g in graphs],
        claims=fp.block_distinguishers(
            graphs, [fp.DistinguisherClaim.from_json(c) for c in preset.chain.get("distinguishers", [])]
        ),
    )
    report.b0_equal, report.b0_witness = fp.verify_b0_count_equality(*graphs)

    print(f"{'vertex':>14}  {'expected':>8}  " + "  ".join(f"{n:>7}" for n in cfg.graphs))
    for r in rows:
        flag = "" if r.ok else "  <-- deviates"
        print(f"{r.vertex:>14}  {r.expected:>8}  " + "  ".join(f"{c:>7}" for c in r.counts) + flag)
    bound = preset.expected["outside_bound"]["value"]
    for name, (value, witness) in zip(cfg.graphs, report.max_outside):
        print(f"{name}: max count outside the base block {value} at {witness} (bound {bound})")
    print(f"base block counts equal across graphs: {report.b0_equal}")
    for c in report.claims:
        tag = "gating" if c.gating else "informational"
        print(f"claim {c.name} ({tag}): {'holds' if c.holds else 'fails'}; qualifying {c.qualifying[0]}")
    out = {"config": asdict(cfg), **report.to_json()}
    if cfg.json:
        with open(cfg.json, "w") as fh:
            json.dump(out, fh, indent=2)
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset")
    ap.add_argument("--json")
    args = ap.parse_args()
    run(Config(preset=args.preset, json=args.json))
