"""Isomorphism invariants of vertex pairs and blocks.

Everything here is an exact integer computation built on
:attr:`CayleyGraph.mutual_counts_from_identity`.  Because both graphs are
Cayley graphs, counts against ``e`` determine counts for every pair:
``count(g, h) = count(e, h - g)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .connection import BlockIndex, all_blocks
from .errors import TableDeviationError
from .graph import CayleyGraph
from .group import GroupElement, GroupSpec


@dataclass
class TableRow:
    vertex: str
    expected: int
    counts: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return all(c == self.expected for c in self.counts)


@dataclass
class ClaimResult:
    name: str
    kind: str
    expected_blocks: list[BlockIndex]
    qualifying: list[list[BlockIndex]]  # one list per graph
    gating: bool = True
    note: str = ""

    @property
    def holds(self) -> bool:
        want = sorted(self.expected_blocks)
        return all(sorted(q) == want for q in self.qualifying)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "expected_blocks": [list(b) for b in self.expected_blocks],
            "qualifying": [[list(b) for b in q] for q in self.qualifying],
            "holds": self.holds,
            "gating": self.gating,
            "note": self.note,
        }


@dataclass
class FingerprintReport:
    table: list[TableRow] = field(default_factory=list)
    max_outside: list[tuple[int, GroupElement]] = field(default_factory=list)
    b0_equal: bool | None = None
    b0_witness: GroupElement | None = None
    claims: list[ClaimResult] = field(default_factory=list)

    @property
    def table_ok(self) -> bool:
        return all(r.ok for r in self.table)

    def to_json(self) -> dict:
        return {
            "table": [{"vertex": r.vertex, "expected": r.expected, "counts": list(r.counts), "ok": r.ok} for r in self.table],
            "table_check": "pass" if self.table_ok else "fail",
            "max_outside": [
                {"value": v, "witness": str(w), "block": list(w.block)} for v, w in self.max_outside
            ],
            "b0_equal": self.b0_equal,
            "b0_witness": None if self.b0_witness is None else str(self.b0_witness),
            "block_criteria": [c.to_json() for c in self.claims],
        }


def mutual_table(
    graphs: Sequence[CayleyGraph],
    expected: Sequence[tuple[str, int]],
    strict: bool = True,
) -> list[TableRow]:
    """Count common neighbours of ``e`` and each listed vertex in every graph.

    With ``strict`` a :class:`TableDeviationError` is raised listing every entry
    that disagrees with its expected value in any graph.
    """
    spec = graphs[0].spec
    rows = []
    for expr, want in expected:
        g = spec.parse(expr)
        rows.append(TableRow(expr, int(want), tuple(gr.mutual_count_with_identity(g) for gr in graphs)))
    if strict:
        bad = [(r.vertex, r.expected, r.counts) for r in rows if not r.ok]
        if bad:
            raise TableDeviationError(bad)
    return rows


def verify_b0_count_equality(g1: CayleyGraph, g2: CayleyGraph, block: BlockIndex | None = None):
    """``(True, None)`` if counts with ``e`` agree on the whole block, else ``(False, witness)``."""
    spec = g1.spec
    block = block or (0,) * spec.w_count
    start = spec.block_from_index(block) * spec.block_size
    sl = slice(start, start + spec.block_size)
    diff = np.nonzero(g1.mutual_counts_from_identity[sl] != g2.mutual_counts_from_identity[sl])[0]
    if len(diff):
        return False, spec.from_code(start + int(diff[0]))
    return True, None


def max_mutual_outside_b0(g: CayleyGraph, block: BlockIndex | None = None) -> tuple[int, GroupElement]:
    """Largest count with ``e`` over vertices outside the base block.

    Ties go to the smallest code (lexicographically least coordinates).
    """
    spec = g.spec
    block = block or (0,) * spec.w_count
    counts = g.mutual_counts_from_identity.copy()
    start = spec.block_from_index(block) * spec.block_size
    counts[start : start + spec.block_size] = -1
    best = int(np.argmax(counts))  # argmax returns the first maximal index
    return int(counts[best]), spec.from_code(best)


def vertices_with_count(g: CayleyGraph, count: int) -> np.ndarray:
    return np.nonzero(g.mutual_counts_from_identity == count)[0]


# -- block distinguishers -------------------------------------------------

def blocks_with_neighbour_count(g: CayleyGraph, count: int) -> list[BlockIndex]:
    profile = g.neighbour_block_profile(g.spec.zero)
    return sorted(b for b, c in profile.items() if c == count)


def span_codes(spec: GroupSpec, gens: Sequence[GroupElement]) -> np.ndarray:
    """All codes of the subgroup generated by ``gens``."""
    codes = np.array([0], dtype=np.int64)
    for gen in gens:
        multiples = [codes]
        for k in range(1, spec.p):
            multiples.append(spec.add_codes(codes, np.full(len(codes), (k * gen).code)))
        codes = np.unique(np.concatenate(multiples))
    return codes


def blocks_translation_closed(g: CayleyGraph, translations: Sequence[GroupElement]) -> list[BlockIndex]:
    """Blocks in which ``e`` has neighbours, all of which are adjacent to every element of ``H``.

    ``H`` is the subgroup generated by ``translations``.  Blocks where ``e``
    has no neighbours are excluded; they would qualify vacuously.
    """
    spec = g.spec
    h = span_codes(spec, translations)
    conn = g.conn.array
    blocks = spec.block_codes(conn)
    out = []
    for b in all_blocks(spec):
        nb = conn[blocks == spec.block_from_index(b)]
        if not len(nb):
            continue
        # n adjacent to x  <=>  n - x in C
        shifted = spec.sub_codes(nb[:, None], h[None, :])
        if g.conn.mask[shifted].all():
            out.append(b)
    return sorted(out)


@dataclass(frozen=True)
class DistinguisherClaim:
    name: str
    kind: str  # "neighbour_count" | "translation_closed"
    blocks: tuple[BlockIndex, ...]
    count: int | None = None
    translations: tuple[str, ...] = ()
    gating: bool = True
    note: str = ""

    @classmethod
    def from_json(cls, obj: dict) -> "DistinguisherClaim":
        return cls(
            name=obj["name"],
            kind=obj["kind"],
            blocks=tuple(tuple(b) for b in obj["blocks"]),
            count=obj.get("count"),
            translations=tuple(obj.get("translations", ())),
            gating=obj.get("gating", True),
            note=obj.get("note", ""),
        )

    def qualifying(self, g: CayleyGraph) -> list[BlockIndex]:
        if self.kind == "neighbour_count":
            return blocks_with_neighbour_count(g, int(self.count))
        if self.kind == "translation_closed":
            return blocks_translation_closed(g, [g.spec.parse(t) for t in self.translations])
        raise ValueError(f"unknown distinguisher kind {self.kind!r}")


def block_distinguishers(
    graphs: Sequence[CayleyGraph], claims: Sequence[DistinguisherClaim]
) -> list[ClaimResult]:
    """Evaluate each claim: the qualifying blocks must be exactly the claimed ones in every graph."""
    return [
        ClaimResult(c.name, c.kind, list(c.blocks), [c.qualifying(g) for g in graphs], c.gating, c.note)
        for c in claims
    ]
