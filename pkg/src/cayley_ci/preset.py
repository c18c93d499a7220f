"""Preset bundles: group, families, variants, graph recipes, maps, expectations.

A preset is a JSON document; see ``data/z3_8_spiga.json`` for the shipped one
and ``scripts/make_preset.py`` for how it is produced.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

from .connection import (
    AffineFamily,
    BlockIndex,
    ConnectionSet,
    ExplicitFamily,
    inverse_closure,
    overlaps,
    union_all,
)
from .errors import CayleyCIError, PresetError
from .graph import CayleyGraph
from .group import GroupElement, GroupSpec
from .polymap import PolynomialMap

PAPER_PRESET = "z3_8_spiga.json"


def default_preset_path() -> Path:
    return Path(str(resources.files("cayley_ci") / "data" / PAPER_PRESET))


def _block_key(block) -> BlockIndex:
    if isinstance(block, str):
        return tuple(int(x) for x in block.split(","))
    return tuple(int(x) for x in block)


def block_label(prefix: str, block: BlockIndex) -> str:
    return f"{prefix}_{{{','.join(map(str, block))}}}"


@dataclass
class Preset:
    data: dict
    source: str = "<memory>"

    def __post_init__(self):
        try:
            self.spec = GroupSpec.from_json(self.data["group"])
            self._families = {}
            for f in self.data["families"]:
                block = _block_key(f["block"])
                if "elements" in f:
                    fam = ExplicitFamily(f["label"], tuple(self.spec.element(x) for x in f["elements"]))
                else:
                    fam = AffineFamily.from_json(self.spec, f)
                if block in self._families:
                    raise PresetError(f"two families for block {block}")
                self._families[block] = fam
            for name in self.data.get("variants", {}):
                self.family_sets(name)
            for name in self.data.get("graphs", {}):
                self.connection(name)
            for name in self.data.get("maps", {}):
                self.polymap(name)
        except PresetError:
            raise
        except (KeyError, TypeError, ValueError, CayleyCIError) as exc:
            raise PresetError(f"{self.source}: {type(exc).__name__}: {exc}") from exc

    # -- loading -----------------------------------------------------------
    @classmethod
    def load(cls, path=None) -> "Preset":
        path = Path(path) if path is not None else default_preset_path()
        try:
            text = path.read_text()
        except OSError as exc:
            raise PresetError(f"cannot read preset {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PresetError(f"{path}: malformed JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise PresetError(f"{path}: top level must be an object")
        return cls(data, str(path))

    @classmethod
    def paper(cls) -> "Preset":
        return _paper_preset()

    def mutated(self, fn) -> "Preset":
        """A copy of this preset with ``fn`` applied to a deep copy of its data."""
        data = copy.deepcopy(self.data)
        fn(data)
        return Preset(data, self.source + " (mutated)")

    @cached_property
    def content_hash(self) -> str:
        canon = json.dumps(self.data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    @property
    def name(self) -> str:
        return self.data.get("name", Path(self.source).stem)

    # -- sets --------------------------------------------------------------
    @property
    def blocks(self) -> list[BlockIndex]:
        return list(self._families)

    def family(self, block: BlockIndex):
        return self._families[_block_key(block)]

    def family_sets(self, variant: str = "S") -> dict[BlockIndex, ConnectionSet]:
        """Expanded families of a variant, keyed by block.

        A variant shifts selected families by fixed vectors (T = S + m v5 blockwise).
        """
        try:
            v = self.data["variants"][variant]
        except KeyError:
            raise PresetError(f"unknown variant {variant!r}") from None
        prefix = v.get("prefix", variant)
        shifts = {_block_key(k): self.spec.element(t) for k, t in v.get("shifts", {}).items()}
        unknown = set(shifts) - set(self._families)
        if unknown:
            raise PresetError(f"variant {variant}: shifts for unknown blocks {sorted(unknown)}")
        out = {}
        for block, fam in self._families.items():
            lab = block_label(prefix, block)
            if block in shifts:
                fam = fam.shifted(shifts[block], lab)
            expanded = fam.expand().with_label(lab)
            bad = [g for g in expanded if g.block != block]
            if bad:
                raise PresetError(f"{lab}: element {bad[0]} lies outside block {block}")
            out[block] = expanded
        clash = overlaps(list(out.values()))
        if clash:
            raise PresetError(f"variant {variant}: overlapping families {clash}")
        return out

    def union(self, variant: str = "S") -> ConnectionSet:
        return union_all(self.family_sets(variant).values(), label=variant)

    def connection(self, graph: str) -> ConnectionSet:
        try:
            recipe = self.data["graphs"][graph]
        except KeyError:
            raise PresetError(f"unknown graph {graph!r}") from None
        sets = self.family_sets(recipe.get("variant", "S"))
        drop = {_block_key(b) for b in recipe.get("drop", [])}
        parts = [c for b, c in sets.items() if b not in drop]
        extra = [self.spec.element(x) for x in recipe.get("extra", [])]
        if extra:
            parts.append(ConnectionSet.from_elements(self.spec, extra, label="extra"))
        base = union_all(parts, label=graph)
        if recipe.get("directed", False):
            return base
        return inverse_closure(base, label=graph)

    def graph(self, name: str) -> CayleyGraph:
        return _graph_cache(self, name)

    def is_directed(self, name: str) -> bool:
        return bool(self.data["graphs"][name].get("directed", False))

    @property
    def graph_names(self) -> list[str]:
        return list(self.data.get("graphs", {}))

    # -- maps and expectations --------------------------------------------
    def polymap(self, name: str) -> PolynomialMap:
        try:
            obj = self.data["maps"][name]
        except KeyError:
            raise PresetError(f"unknown map {name!r}") from None
        return PolynomialMap.from_json(self.spec, obj, name)

    @property
    def map_names(self) -> list[str]:
        return list(self.data.get("maps", {}))

    def vertex(self, expr: str) -> GroupElement:
        return self.spec.parse(expr)

    @property
    def expected(self) -> dict:
        return self.data.get("expected", {})

    @property
    def chain(self) -> dict:
        return self.data.get("lemma_chain", {})


_GRAPHS: dict[tuple[str, str], CayleyGraph] = {}


def _graph_cache(preset: Preset, name: str) -> CayleyGraph:
    key = (preset.content_hash, name)
    g = _GRAPHS.get(key)
    if g is None:
        g = CayleyGraph(preset.connection(name), preset.is_directed(name), name)
        _GRAPHS[key] = g
    return g


_PAPER: list[Preset] = []


def _paper_preset() -> Preset:
    if not _PAPER:
        _PAPER.append(Preset.load())
    return _PAPER[0]


def build_paper_sets(variant: str = "S", preset: Preset | None = None) -> dict[BlockIndex, ConnectionSet]:
    """The eleven families of the preset for variant ``"S"`` or ``"T"``."""
    return (preset or Preset.paper()).family_sets(variant)


def build_digraph_sets(variant: str = "S", preset: Preset | None = None) -> ConnectionSet:
    """``(S minus S_{0,0,0}) ∪ {v1, v3, v4, v5}`` (resp. with T), as a directed set."""
    preset = preset or Preset.paper()
    return preset.connection({"S": "dgamma1", "T": "dgamma2"}[variant])
