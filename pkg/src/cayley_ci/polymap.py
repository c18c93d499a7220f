"""Polynomial vertex maps ``g -> g + sum(monomial(w-coords of g) * target)``.

Because each monomial only reads the w-coordinates and each target lies in the
v-subspace, such a map moves every block onto itself by a translation.  That
makes it a bijection, and makes the within-block edges easy to reason about.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .connection import BlockIndex, all_blocks, block_members
from .errors import SpecMismatchError
from .graph import CayleyGraph
from .group import GroupElement, GroupSpec


@dataclass(frozen=True)
class Term:
    exp: tuple[int, ...]
    target: GroupElement


@dataclass(frozen=True)
class PolynomialMap:
    spec: GroupSpec
    terms: tuple[Term, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if len(t.exp) != self.spec.w_count:
                raise ValueError(f"exponent {t.exp} needs {self.spec.w_count} entries")
            if any(not 0 <= e < self.spec.p for e in t.exp):
                raise ValueError(f"exponents must lie in [0, {self.spec.p}) (x^p = x on Z_p)")
            if t.target.spec != self.spec:
                raise SpecMismatchError("term target from another group")
            if any(t.target.block):
                raise ValueError(f"target {t.target} leaves the v-subspace")

    @classmethod
    def identity(cls, spec: GroupSpec) -> "PolynomialMap":
        return cls(spec, (), "identity")

    @classmethod
    def from_json(cls, spec: GroupSpec, obj: dict, name: str = "") -> "PolynomialMap":
        terms = tuple(Term(tuple(int(e) for e in t["exp"]), spec.element(t["target"])) for t in obj["terms"])
        return cls(spec, terms, name)

    def to_json(self) -> dict:
        return {"terms": [{"exp": list(t.exp), "target": t.target.to_json()} for t in self.terms]}

    def translation_at(self, w: Sequence[int]) -> GroupElement:
        """The v-vector added to every element whose w-part is ``w``."""
        p = self.spec.p
        out = self.spec.zero
        for t in self.terms:
            value = 1
            for x, e in zip(w, t.exp):
                value = value * pow(int(x), e, p) % p  # pow(0, 0) == 1
            if value:
                out = out + value * t.target
        return out

    def apply(self, g: GroupElement) -> GroupElement:
        if g.spec != self.spec:
            raise SpecMismatchError("element from another group")
        return g + self.translation_at(g.block)

    __call__ = apply

    @cached_property
    def block_translations(self) -> np.ndarray:
        """Code of the translation for each block code."""
        return np.array(
            [self.translation_at(b).code for b in all_blocks(self.spec)], dtype=np.int64
        )

    @cached_property
    def table(self) -> np.ndarray:
        """``table[c]`` is the code of the image of the element with code ``c``."""
        spec = self.spec
        codes = np.arange(spec.order, dtype=np.int64)
        return spec.add_codes(codes, self.block_translations[spec.block_codes(codes)])


def apply(psi: PolynomialMap, g: GroupElement) -> GroupElement:
    return psi.apply(g)


def is_bijection(psi: PolynomialMap) -> bool:
    t = psi.table
    return len(np.unique(t)) == len(t)


def block_translation(psi: PolynomialMap, block: BlockIndex) -> GroupElement:
    """The unique ``t`` with ``psi(g) = g + t`` on the whole block.

    Checked elementwise over the block rather than read off the formula.
    """
    spec = psi.spec
    members = block_members(spec, block)
    diffs = np.unique(spec.sub_codes(psi.table[members], members))
    if len(diffs) != 1:
        raise AssertionError(f"map is not a translation on block {block}")
    return spec.from_code(int(diffs[0]))


@dataclass
class IsoReport:
    checked: int
    mismatch_count: int
    mismatches: list[tuple[GroupElement, GroupElement]]
    bijective: bool
    edge_counts: tuple[int, int]

    @property
    def is_isomorphism(self) -> bool:
        return self.bijective and self.mismatch_count == 0 and self.edge_counts[0] == self.edge_counts[1]

    @property
    def status(self) -> str:
        return "iso" if self.is_isomorphism else "not-iso"

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "mismatch_count": self.mismatch_count,
            "mismatches": [[g.to_json(), h.to_json()] for g, h in self.mismatches],
            "bijective": self.bijective,
            "edge_counts": list(self.edge_counts),
            "status": self.status,
        }


def _mismatch_chunk(spec, table, src, dst_mask, lo, hi):
    g = np.arange(lo, hi, dtype=np.int64)
    h = spec.add_codes(g[:, None], src[None, :])
    delta = spec.sub_codes(table[h], table[g][:, None])
    bad = ~dst_mask[delta]
    rows, cols = np.nonzero(bad)
    return g[rows], h[rows, cols]


def verify_isomorphism(
    psi: PolynomialMap,
    src: CayleyGraph,
    dst: CayleyGraph,
    threads: int = 1,
    keep: int = 100,
) -> IsoReport:
    """Check that ``psi`` carries every arc of ``src`` to an arc of ``dst``.

    Every ordered pair ``(g, g + s)`` with ``s`` in the source connection set is
    tested.  Together with bijectivity and equal arc counts this proves that
    ``psi`` is an isomorphism.  Mismatches are sorted; only the first ``keep``
    are stored.
    """
    spec = psi.spec
    if src.spec != spec or dst.spec != spec:
        raise SpecMismatchError("map and graphs live in different groups")
    if src.directed != dst.directed:
        raise ValueError("cannot compare a graph with a digraph")
    bijective = is_bijection(psi)
    if not bijective:
        raise ValueError("map is not a bijection")
    table = psi.table
    n = spec.order
    step = max(1, (1 << 20) // max(1, src.degree))
    bounds = [(lo, min(n, lo + step)) for lo in range(0, n, step)]
    args = (spec, table, src.conn.array, dst.conn.mask)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda b: _mismatch_chunk(*args, *b), bounds))
    else:
        parts = [_mismatch_chunk(*args, *b) for b in bounds]
    gs = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, np.int64)
    hs = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0, np.int64)
    order = np.lexsort((hs, gs))
    mismatches = [
        (spec.from_code(int(gs[i])), spec.from_code(int(hs[i]))) for i in order[:keep]
    ]
    return IsoReport(
        checked=n * src.degree,
        mismatch_count=int(len(gs)),
        mismatches=mismatches,
        bijective=bijective,
        edge_counts=(n * src.degree, n * dst.degree),
    )
