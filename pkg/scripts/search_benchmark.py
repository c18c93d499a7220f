"""Time the constrained automorphism search for a few source/target pairs.

    python scripts/search_benchmark.py [--threads 1 2 4] [--chunk 59049]
"""
import argparse
from dataclasses import dataclass, field

from cayley_ci.preset import Preset
from cayley_ci.search import CHUNK, LinearAutomorphism, SearchFamily, search_constrained


@dataclass
class Config:
    preset: str | None = None
    threads: list[int] = field(default_factory=lambda: [1])
    chunk: int = CHUNK
    pairs: tuple[tuple[str, str], ...] = (("gamma1", "gamma2"), ("gamma1", "gamma1"))


def run(cfg: Config) -> list[dict]:
    preset = Preset.load(cfg.preset)
    family = SearchFamily.from_json(preset.spec, preset.chain["search_family"])
    ident = LinearAutomorphism.identity(preset.spec)
    rows = []
    for src_name, dst_name in cfg.pairs:
        src, dst = preset.connection(src_name), preset.connection(dst_name)
        for threads in cfg.threads:
            res = search_constrained(family, src, dst, threads=threads, chunk=cfg.chunk)
            rows.append({
                "pair": f"{src_name}->{dst_name}",
                "threads": threads,
                "seconds": round(res.seconds, 2),
                "solutions": len(res.solutions),
                "identity_found": ident in res.solutions,
                "rejections_by_depth": res.rejections_by_depth[:8],
            })
            print(rows[-1])
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset")
    ap.add_argument("--threads", type=int, nargs="+", default=[1])
    ap.add_argument("--chunk", type=int, default=CHUNK)
    args = ap.parse_args()
    run(Config(args.preset, args.threads, args.chunk))
