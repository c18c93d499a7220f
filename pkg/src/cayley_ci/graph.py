"""Cayley (di)graphs with implicit adjacency.

``g -> h`` is an arc iff ``h - g`` lies in the connection set.  Nothing is
materialized unless asked: adjacency is a mask lookup and mutual-neighbour
counts are ``|C ∩ (C + (h - g))|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .connection import BlockIndex, ConnectionSet, all_blocks
from .errors import SpecMismatchError
from .group import GroupElement, GroupSpec


@dataclass(frozen=True)
class CayleyGraph:
    conn: ConnectionSet
    directed: bool = False
    name: str = ""

    def __post_init__(self):
        if not self.directed and not self.conn.is_inverse_closed():
            raise ValueError(f"{self.name or 'graph'}: undirected Cayley graph needs an inverse-closed set")

    @property
    def spec(self) -> GroupSpec:
        return self.conn.spec

    @property
    def order(self) -> int:
        return self.spec.order

    @property
    def degree(self) -> int:
        return len(self.conn)

    def _check(self, *gs: GroupElement) -> None:
        for g in gs:
            if g.spec != self.spec:
                raise SpecMismatchError("vertex from another group")

    def are_adjacent(self, g: GroupElement, h: GroupElement) -> bool:
        self._check(g, h)
        if g == h:
            return False
        return (h - g).code in self.conn.codes

    def neighbours(self, g: GroupElement) -> set[GroupElement]:
        self._check(g)
        return {self.spec.from_code(c) for c in self.neighbour_codes(g.code)}

    def neighbour_codes(self, code: int) -> np.ndarray:
        return self.spec.add_codes(np.full(self.degree, code), self.conn.array)

    def mutual_neighbour_count(self, g: GroupElement, h: GroupElement) -> int:
        """``|N(g) ∩ N(h)|`` via ``|C ∩ (C + (h - g))|``; ``count(g, g)`` is the degree."""
        self._check(g, h)
        delta = (h - g).code
        if delta == 0:
            return self.degree
        shifted = self.spec.add_codes(self.conn.array, np.full(self.degree, delta))
        return int(self.conn.mask[shifted].sum())

    @cached_property
    def mutual_counts_from_identity(self) -> np.ndarray:
        """``counts[c]`` = number of common neighbours of ``e`` and the vertex with code ``c``.

        Common neighbours of e and g are the h with h in C and h - g in C, so
        the count is the number of ordered pairs (a, b) in C x C with a - b = g.
        """
        spec = self.spec
        coords = spec.coords_table[self.conn.array]
        counts = np.zeros(spec.order, dtype=np.int64)
        step = max(1, (1 << 21) // max(1, self.degree))
        for start in range(0, self.degree, step):
            diff = coords[start : start + step, None, :] - coords[None, :, :]
            counts += np.bincount(spec.encode_array(diff).ravel(), minlength=spec.order)
        return counts

    def mutual_count_with_identity(self, g: GroupElement) -> int:
        self._check(g)
        return int(self.mutual_counts_from_identity[g.code])

    def neighbour_block_profile(self, g: GroupElement) -> dict[BlockIndex, int]:
        self._check(g)
        blocks = self.spec.block_codes(self.neighbour_codes(g.code))
        tally = np.bincount(blocks, minlength=self.spec.block_count)
        return {b: int(tally[self.spec.block_from_index(b)]) for b in all_blocks(self.spec)}

    # -- materialized views (oracles and export) ------------------------
    def adjacency_matrix(self) -> np.ndarray:
        """Dense boolean adjacency; only sensible for small groups."""
        n = self.order
        a = np.zeros((n, n), dtype=bool)
        for g in range(n):
            a[g, self.neighbour_codes(g)] = True
        return a

    def arcs(self) -> np.ndarray:
        """All arcs ``(u, v)`` as a ``(order * degree, 2)`` array, sorted lexicographically."""
        n = self.order
        heads = self.spec.add_codes(np.arange(n)[:, None], self.conn.array[None, :])
        heads.sort(axis=1)
        tails = np.repeat(np.arange(n, dtype=np.int64), self.degree)
        return np.stack([tails, heads.ravel()], axis=1)

    def edges(self) -> np.ndarray:
        """Undirected edges ``u < v`` (each once) for graphs, arcs for digraphs."""
        arcs = self.arcs()
        if self.directed:
            return arcs
        return arcs[arcs[:, 0] < arcs[:, 1]]
