"""Run the staged certificate and write it as JSON.

    python scripts/run_certificate.py [--preset P] [--threads N] [--output cert.json] [--checkpoint ck.json]
"""
import argparse
import logging
import time
from dataclasses import dataclass

from cayley_ci.certificate import verify_lemma_chain
from cayley_ci.preset import Preset


@dataclass
class Config:
    preset: str | None = None
    threads: int = 1
    output: str = "certificate.json"
    checkpoint: str | None = None


def run(cfg: Config):
    t0 = time.perf_counter()
    cert = verify_lemma_chain(Preset.load(cfg.preset), threads=cfg.threads, checkpoint=cfg.checkpoint)
    cert.write(cfg.output)
    for s in cert.stages:
        line = f"stage {s.index} {s.name:22s} {'pass' if s.passed else 'FAIL'}"
        print(line + (f"  ({s.message})" if s.message else ""))
    search = cert.search
    print(f"search: {search['enumerated']} of {search['candidates']} candidates, "
          f"{len(search['solutions'])} solutions, {search['seconds']}s")
    print(f"conclusion: {cert.conclusion}  [{time.perf_counter() - t0:.1f}s, written to {cfg.output}]")
    return cert


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--output", default="certificate.json")
    ap.add_argument("--checkpoint")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    run(Config(args.preset, args.threads, args.output, args.checkpoint))
