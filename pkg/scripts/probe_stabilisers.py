"""For each block, the translations in <v1..v5> that preserve S and T there.

This is the data behind the block distinguishers: a block is pinned by the
subgroup of v-translations under which the neighbours of e in it are closed.
Also reports how the w-inversion acts on S.

    python scripts/probe_stabilisers.py [--preset P]
"""
import argparse
from dataclasses import dataclass

import numpy as np

from cayley_ci.fingerprints import span_codes
from cayley_ci.group import format_element
from cayley_ci.preset import Preset
from cayley_ci.search import LinearAutomorphism


@dataclass
class Config:
    preset: str | None = None


def stabiliser(spec, members: np.ndarray) -> list:
    """All v-translations t with members + t == members."""
    have = set(members.tolist())
    out = []
    for t in spec.v_subspace_codes():
        if set(spec.add_codes(members, int(t)).tolist()) == have:
            out.append(spec.from_code(int(t)))
    return out


def basis(spec, elems):
    """A greedy basis of the subgroup formed by ``elems``."""
    chosen = []
    span = {0}
    for g in sorted(elems, key=lambda g: (sum(1 for x in g.coords if x), g.code)):
        if g.code not in span:
            chosen.append(g)
            span = set(span_codes(spec, chosen).tolist())
    return chosen


def run(cfg: Config) -> None:
    preset = Preset.load(cfg.preset)
    spec = preset.spec
    s_sets, t_sets = preset.family_sets("S"), preset.family_sets("T")
    for block in preset.blocks:
        row = []
        for sets in (s_sets, t_sets):
            stab = stabiliser(spec, sets[block].array)
            row.append(", ".join(format_element(g) for g in basis(spec, stab)) or "trivial")
        same = "" if s_sets[block].same_elements(t_sets[block]) else "  (S != T here)"
        print(f"block {block}: S stabiliser <{row[0]}>; T stabiliser <{row[1]}>{same}")

    sigma_w = LinearAutomorphism.negate_w(spec)
    s = preset.union("S")
    image = sigma_w.apply_to_set(s)
    neg = set(spec.neg_codes(s.array).tolist())
    print(f"sigma_W(S) == S: {image.same_elements(s)}; "
          f"elements of sigma_W(S) in S^-1: {len(image.codes & neg)} of {len(s)}")
    closed = preset.connection("gamma1")
    print(f"sigma_W(S u S^-1) == S u S^-1: {sigma_w.apply_to_set(closed).same_elements(closed)}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset")
    run(Config(ap.parse_args().preset))
