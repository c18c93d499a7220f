"""Connection sets: affine families, explicit lists, unions, inverse closure, blocks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateFamilyError, SpecMismatchError
from .group import GroupElement, GroupSpec, LinearMap

BlockIndex = tuple[int, ...]


@dataclass(frozen=True)
class ConnectionSet:
    """A finite subset of G stored as sorted integer codes.

    ``directed`` records intent: a directed set is used as-is for arcs, an
    undirected one must be inverse-closed.
    """

    spec: GroupSpec
    codes: frozenset[int]
    directed: bool = True
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "codes", frozenset(int(c) for c in self.codes))
        if 0 in self.codes:
            raise ValueError(f"connection set {self.label or '?'} contains the identity")
        if not self.directed and not self.is_inverse_closed():
            raise ValueError(f"undirected connection set {self.label or '?'} is not inverse-closed")

    @classmethod
    def from_elements(cls, spec: GroupSpec, elements: Iterable[GroupElement], directed=True, label=""):
        elements = list(elements)
        for g in elements:
            if g.spec != spec:
                raise SpecMismatchError("element from another group")
        return cls(spec, frozenset(g.code for g in elements), directed, label)

    def __len__(self) -> int:
        return len(self.codes)

    def __contains__(self, g: GroupElement) -> bool:
        if g.spec != self.spec:
            raise SpecMismatchError("element from another group")
        return g.code in self.codes

    def __iter__(self):
        for c in self.array:
            yield self.spec.from_code(int(c))

    @property
    def elements(self) -> set[GroupElement]:
        return set(self)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(sorted(self.codes), dtype=np.int64)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.spec.order, dtype=bool)
        m[self.array] = True
        return m

    def is_inverse_closed(self) -> bool:
        if not self.codes:
            return True
        return set(self.spec.neg_codes(self.array).tolist()) == self.codes

    def shifted(self, t: GroupElement, label: str = "") -> "ConnectionSet":
        """The translate ``self + t`` (same directed flag)."""
        codes = self.spec.add_codes(self.array, np.full(len(self), t.code)) if len(self) else []
        return ConnectionSet(self.spec, frozenset(np.asarray(codes).tolist()), True, label)

    def in_block(self, block: BlockIndex) -> "ConnectionSet":
        b = self.spec.block_from_index(block)
        keep = self.array[self.spec.block_codes(self.array) == b]
        return ConnectionSet(self.spec, frozenset(keep.tolist()), True, self.label)

    def with_label(self, label: str) -> "ConnectionSet":
        return ConnectionSet(self.spec, self.codes, self.directed, label)

    def same_elements(self, other: "ConnectionSet") -> bool:
        return self.spec == other.spec and self.codes == other.codes


@dataclass(frozen=True)
class AffineFamily:
    """``{offset + param_map(q) : q in Z_p^k}``, kept symbolic until expanded."""

    label: str
    offset: GroupElement
    param_map: LinearMap

    @property
    def spec(self) -> GroupSpec:
        return self.offset.spec

    @property
    def params(self) -> int:
        return self.param_map.k

    def element_at(self, q: Sequence[int]) -> GroupElement:
        return self.offset + self.param_map(q)

    def expand(self) -> ConnectionSet:
        return expand(self)

    def shifted(self, t: GroupElement, label: str) -> "AffineFamily":
        return AffineFamily(label, self.offset + t, self.param_map)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "offset": self.offset.to_json(),
            "params": self.params,
            "matrix": [list(r) for r in self.param_map.matrix],
        }

    @classmethod
    def from_json(cls, spec: GroupSpec, obj: dict) -> "AffineFamily":
        matrix = obj["matrix"]
        k = int(obj["params"])
        if any(len(row) != k for row in matrix):
            raise ValueError(f"family {obj.get('label')}: matrix width differs from params={k}")
        return cls(obj["label"], spec.element(obj["offset"]), LinearMap(spec, tuple(map(tuple, matrix))))


@dataclass(frozen=True)
class ExplicitFamily:
    """A family given as a literal list of elements."""

    label: str
    members: tuple[GroupElement, ...] = field(default=())

    def expand(self) -> ConnectionSet:
        codes = [g.code for g in self.members]
        if len(set(codes)) != len(codes):
            raise DegenerateFamilyError(f"{self.label}: repeated element in explicit list")
        spec = self.members[0].spec
        return ConnectionSet(spec, frozenset(codes), True, self.label)

    def shifted(self, t: GroupElement, label: str) -> "ExplicitFamily":
        return ExplicitFamily(label, tuple(g + t for g in self.members))


_EXPAND_CACHE: dict[AffineFamily, ConnectionSet] = {}


def expand(f: AffineFamily) -> ConnectionSet:
    """Expand an affine family, refusing non-injective parameterizations."""
    cached = _EXPAND_CACHE.get(f)
    if cached is not None:
        return cached
    spec = f.spec
    k = f.params
    q = np.array(list(itertools.product(range(spec.p), repeat=k)), dtype=np.int64).reshape(-1, k)
    coords = np.array(f.offset.coords, dtype=np.int64)[None, :] + q @ f.param_map.as_array().T
    codes = spec.encode_array(coords)
    uniq = np.unique(codes)
    if len(uniq) < spec.p**k:
        raise DegenerateFamilyError(
            f"{f.label}: {spec.p}^{k} parameter tuples give only {len(uniq)} distinct elements"
        )
    out = ConnectionSet(spec, frozenset(uniq.tolist()), True, f.label)
    _EXPAND_CACHE[f] = out
    return out


def union_all(sets: Iterable[ConnectionSet], directed: bool = True, label: str = "") -> ConnectionSet:
    sets = list(sets)
    if not sets:
        raise ValueError("union of no sets")
    spec = sets[0].spec
    codes: set[int] = set()
    for s in sets:
        if s.spec != spec:
            raise SpecMismatchError("union across different groups")
        codes |= s.codes
    return ConnectionSet(spec, frozenset(codes), directed, label)


def overlaps(sets: Sequence[ConnectionSet]) -> list[tuple[str, str, int]]:
    """Pairs of sets that share elements, as ``(label_a, label_b, shared)``."""
    out = []
    for a, b in itertools.combinations(sets, 2):
        shared = len(a.codes & b.codes)
        if shared:
            out.append((a.label, b.label, shared))
    return out


def inverse_closure(c: ConnectionSet, label: str = "") -> ConnectionSet:
    if not len(c):
        return ConnectionSet(c.spec, frozenset(), False, label or c.label)
    negs = c.spec.neg_codes(c.array).tolist()
    return ConnectionSet(c.spec, c.codes | frozenset(negs), False, label or c.label)


def block_of(g: GroupElement) -> BlockIndex:
    return g.block


def all_blocks(spec: GroupSpec) -> list[BlockIndex]:
    return list(itertools.product(range(spec.p), repeat=spec.w_count))


def block_members(spec: GroupSpec, block: BlockIndex) -> np.ndarray:
    """Codes of every element in the given block."""
    start = spec.block_from_index(block) * spec.block_size
    return np.arange(start, start + spec.block_size, dtype=np.int64)
