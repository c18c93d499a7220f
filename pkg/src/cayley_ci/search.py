"""Group automorphisms of Z_p^n and exhaustive searches for ones mapping S to T.

Automorphisms of Z_p^n are exactly the invertible n x n matrices over Z_p.
Column ``j`` holds the image of generator ``j``.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .connection import ConnectionSet
from .errors import CapacityError, CheckpointError, SpecMismatchError
from .graph import CayleyGraph
from .group import GroupElement, GroupSpec

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9
CHUNK = 3**10


def det_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Determinant over Z_p by Gaussian elimination."""
    a = [[int(x) % p for x in r] for r in rows]
    n = len(a)
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det = det * a[col][col] % p
        inv = pow(a[col][col], p - 2, p)
        for r in range(col + 1, n):
            f = a[r][col] * inv % p
            if f:
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[col])]
    return det % p


@dataclass(frozen=True)
class LinearAutomorphism:
    spec: GroupSpec
    matrix: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(x) % self.spec.p for x in r) for r in self.matrix)
        if len(rows) != self.spec.n or any(len(r) != self.spec.n for r in rows):
            raise ValueError(f"automorphism needs an {self.spec.n}x{self.spec.n} matrix")
        object.__setattr__(self, "matrix", rows)
        if det_mod_p(rows, self.spec.p) == 0:
            raise ValueError("matrix is singular mod p, not an automorphism")

    @classmethod
    def from_images(cls, spec: GroupSpec, images: Sequence[GroupElement], name="") -> "LinearAutomorphism":
        rows = tuple(tuple(img.coords[i] for img in images) for i in range(spec.n))
        return cls(spec, rows, name)

    @classmethod
    def identity(cls, spec: GroupSpec) -> "LinearAutomorphism":
        return cls.from_images(spec, [spec.basis(i) for i in range(spec.n)], "identity")

    @classmethod
    def negation(cls, spec: GroupSpec) -> "LinearAutomorphism":
        """The map inverting every element."""
        return cls.from_images(spec, [-spec.basis(i) for i in range(spec.n)], "sigma")

    @classmethod
    def negate_w(cls, spec: GroupSpec) -> "LinearAutomorphism":
        """Invert the w-generators, fix the v-generators."""
        images = [-spec.basis(i) if i < spec.w_count else spec.basis(i) for i in range(spec.n)]
        return cls.from_images(spec, images, "sigma_w")

    def image_of_generator(self, i: int) -> GroupElement:
        return GroupElement(self.spec, tuple(r[i] for r in self.matrix))

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    def apply_to_element(self, g: GroupElement) -> GroupElement:
        if g.spec != self.spec:
            raise SpecMismatchError("element from another group")
        p = self.spec.p
        return GroupElement(self.spec, tuple(sum(a * x for a, x in zip(r, g.coords)) % p for r in self.matrix))

    __call__ = apply_to_element

    def apply_codes(self, codes) -> np.ndarray:
        spec = self.spec
        return spec.encode_array(spec.coords_table[np.asarray(codes)] @ self.as_array().T)

    def apply_to_set(self, c: ConnectionSet) -> ConnectionSet:
        if c.spec != self.spec:
            raise SpecMismatchError("set from another group")
        image = self.apply_codes(c.array) if len(c) else []
        return ConnectionSet(self.spec, frozenset(np.asarray(image).tolist()), c.directed, c.label)

    def to_json(self) -> dict:
        return {
            "matrix": [list(r) for r in self.matrix],
            "images": {n: str(self.image_of_generator(i)) for i, n in enumerate(self.spec.names)},
        }

    def describe(self) -> str:
        return ", ".join(f"{n} -> {self.image_of_generator(i)}" for i, n in enumerate(self.spec.names))


def compose(first: LinearAutomorphism, second: LinearAutomorphism) -> LinearAutomorphism:
    """``g -> second(first(g))``."""
    m = (second.as_array() @ first.as_array()) % first.spec.p
    return LinearAutomorphism(first.spec, tuple(map(tuple, m.tolist())))


def apply_to_element(a: LinearAutomorphism, g: GroupElement) -> GroupElement:
    return a.apply_to_element(g)


def apply_to_set(a: LinearAutomorphism, c: ConnectionSet) -> ConnectionSet:
    return a.apply_to_set(c)


# -- constrained search ---------------------------------------------------

@dataclass(frozen=True)
class FreeGenerator:
    index: int
    base: GroupElement
    span: tuple[GroupElement, ...]


@dataclass(frozen=True)
class SearchFamily:
    """Candidate automorphisms: fixed generators map to themselves, each free
    generator maps to ``base + (element of span)``."""

    spec: GroupSpec
    fixed: tuple[int, ...]
    free: tuple[FreeGenerator, ...]

    def __post_init__(self):
        idx = list(self.fixed) + [f.index for f in self.free]
        if sorted(idx) != list(range(self.spec.n)):
            raise ValueError("every generator must be either fixed or free, exactly once")
        for f in self.free:
            if len(f.span) and _rank([s.coords for s in f.span], self.spec.p) != len(f.span):
                raise ValueError(f"span for generator {self.spec.names[f.index]} is not independent")

    @classmethod
    def block_preserving(cls, spec: GroupSpec) -> "SearchFamily":
        """v-generators fixed, ``w_i -> w_i + (element of <v_1..v_m>)``."""
        vs = tuple(spec.basis(spec.w_count + j) for j in range(spec.v_count))
        return cls(
            spec,
            tuple(range(spec.w_count, spec.n)),
            tuple(FreeGenerator(i, spec.basis(i), vs) for i in range(spec.w_count)),
        )

    @classmethod
    def everything(cls, spec: GroupSpec) -> "SearchFamily":
        """Every n x n matrix (singular ones are discarded during the search)."""
        full = tuple(spec.basis(i) for i in range(spec.n))
        return cls(spec, (), tuple(FreeGenerator(i, spec.zero, full) for i in range(spec.n)))

    @classmethod
    def from_json(cls, spec: GroupSpec, obj: dict) -> "SearchFamily":
        fixed = tuple(spec.names.index(n) for n in obj["fixed"])
        free = []
        for f in obj["free"]:
            i = spec.names.index(f["generator"])
            base = spec.parse(f.get("base", f["generator"]))
            free.append(FreeGenerator(i, base, tuple(spec.parse(s) for s in f["span"])))
        return cls(spec, fixed, tuple(free))

    def to_json(self) -> dict:
        n = self.spec.names
        return {
            "fixed": [n[i] for i in self.fixed],
            "free": [
                {"generator": n[f.index], "base": str(f.base), "span": [str(s) for s in f.span]}
                for f in self.free
            ],
        }

    @property
    def digits(self) -> int:
        return sum(len(f.span) for f in self.free)

    @property
    def size(self) -> int:
        return self.spec.p**self.digits

    def base_matrix(self) -> np.ndarray:
        m = np.zeros((self.spec.n, self.spec.n), dtype=np.int64)
        for i in self.fixed:
            m[i, i] = 1
        for f in self.free:
            m[:, f.index] = f.base.coords
        return m

    def candidate(self, index: int) -> np.ndarray:
        """Matrix of the candidate with the given lexicographic index."""
        return _candidate_matrices(self, np.array([index], dtype=np.int64))[0]


def _rank(rows, p) -> int:
    a = [[int(x) % p for x in r] for r in rows]
    rank, ncols = 0, len(a[0]) if a else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(a)) if a[r][col]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        inv = pow(a[rank][col], p - 2, p)
        for r in range(len(a)):
            if r != rank and a[r][col]:
                f = a[r][col] * inv % p
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


@lru_cache(maxsize=32)
def _offset_tables(family: SearchFamily) -> tuple[tuple[np.ndarray, int, int], ...]:
    """Per free generator: (all p^d offsets, digit count d, digits after this group)."""
    p = family.spec.p
    out, after = [], family.digits
    for f in family.free:
        d = len(f.span)
        after -= d
        digits = np.array(list(itertools.product(range(p), repeat=d)), dtype=np.int64).reshape(-1, d)
        span = np.array([s.coords for s in f.span], dtype=np.int64).reshape(d, family.spec.n)
        out.append((((digits @ span) % p).astype(np.int16), d, after))
    return tuple(out)


def _offsets(family: SearchFamily, idx: np.ndarray) -> np.ndarray:
    """``(M, F, n)`` array: offset added to each free generator's base image."""
    p = family.spec.p
    out = np.zeros((len(idx), len(family.free), family.spec.n), dtype=np.int16)
    for k, (table, d, after) in enumerate(_offset_tables(family)):
        out[:, k, :] = table[(idx // p**after) % p**d]
    return out


def _constant_groups(family: SearchFamily, lo: int, hi: int) -> np.ndarray:
    """Which free generators have the same offset for every index in ``lo..hi-1``."""
    p = family.spec.p
    return np.array(
        [lo // p**after == (hi - 1) // p**after for _, _, after in _offset_tables(family)]
    )


def _candidate_matrices(family: SearchFamily, idx: np.ndarray) -> np.ndarray:
    mats = np.repeat(family.base_matrix()[None], len(idx), axis=0)
    offs = _offsets(family, idx)
    for k, f in enumerate(family.free):
        mats[:, :, f.index] += offs[:, k, :]
    return mats % family.spec.p


@dataclass
class _Problem:
    """Picklable search data shared by workers."""

    family: SearchFamily
    base_images: np.ndarray  # (|S|, n) image of each source element under the base matrix
    coeffs: np.ndarray  # (|S|, F) coordinate of each source element on each free generator
    target_mask: np.ndarray


_WORKER: dict = {}


def _init_worker(problem):
    _WORKER["problem"] = problem


def _scan(lo: int, hi: int, problem: _Problem | None = None):
    """Check candidates ``lo..hi-1``; return surviving indices and rejections per depth.

    An element whose image only involves generators with chunk-constant offsets
    has the same image for every candidate in the chunk, so it is evaluated once.
    """
    problem = problem or _WORKER["problem"]
    spec = problem.family.spec
    p, powers = spec.p, spec.powers
    idx = np.arange(lo, hi, dtype=np.int64)
    cur = _offsets(problem.family, idx)
    constant = _constant_groups(problem.family, lo, hi)
    depth_hist = np.zeros(len(problem.base_images) + 1, dtype=np.int64)
    alive = np.arange(len(idx))
    for depth, (base, coef) in enumerate(zip(problem.base_images, problem.coeffs)):
        used = np.nonzero(coef)[0]
        rows = cur[:1] if constant[used].all() else cur
        img = np.broadcast_to(base.astype(np.int16), (len(rows), spec.n))
        for k in used:
            img = img + int(coef[k]) * rows[:, k, :]
        ok = problem.target_mask[(img % p) @ powers]
        if len(rows) == 1:
            if ok[0]:
                continue
            depth_hist[depth] += len(alive)
            alive = alive[:0]
            break
        bad = len(ok) - int(np.count_nonzero(ok))
        if bad:
            depth_hist[depth] += bad
            alive = alive[ok]
            cur = cur[ok]
            if not len(alive):
                break
    return idx[alive], depth_hist


@dataclass
class SearchResult:
    solutions: list[LinearAutomorphism]
    candidates: int
    enumerated: int
    rejected: int
    singular: int
    rejections_by_depth: list[int]
    complete: bool
    seconds: float
    resumed_from: int = 0

    @property
    def found(self) -> bool:
        return bool(self.solutions)

    def to_json(self) -> dict:
        return {
            "candidates": self.candidates,
            "enumerated": self.enumerated,
            "rejected": self.rejected,
            "singular": self.singular,
            "solutions": [a.to_json() for a in self.solutions],
            "rejections_by_depth": self.rejections_by_depth,
            "complete": self.complete,
            "resumed_from": self.resumed_from,
            "seconds": round(self.seconds, 3),
        }


def problem_hash(family: SearchFamily, source: ConnectionSet, target: ConnectionSet) -> str:
    blob = json.dumps(
        {
            "group": family.spec.to_json(),
            "family": family.to_json(),
            "source": source.array.tolist(),
            "target": target.array.tolist(),
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def _read_checkpoint(path: Path, key: str, preset_hash: str | None):
    if not path.exists():
        return 0, []
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"checkpoint {path} is not valid JSON: {exc}") from None
    if obj.get("problem_sha256") != key or obj.get("preset_sha256") != preset_hash:
        raise CheckpointError(f"checkpoint {path} belongs to a different preset or search problem")
    return int(obj["index"]), [int(i) for i in obj.get("solutions", [])]


def _write_checkpoint(path: Path, index, key, preset_hash, solutions):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps({
        "index": int(index),
        "preset_sha256": preset_hash,
        "problem_sha256": key,
        "solutions": [int(s) for s in solutions],
    }))
    os.replace(tmp, path)


def search_constrained(
    family: SearchFamily,
    source: ConnectionSet,
    target: ConnectionSet,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
    checkpoint: str | Path | None = None,
    preset_hash: str | None = None,
    stop_at: int | None = None,
    chunk: int = CHUNK,
) -> SearchResult:
    """Every automorphism in ``family`` that maps ``source`` onto ``target``.

    Candidates are enumerated in lexicographic order of their parameter digits.
    Each one is rejected as soon as the image of some source element misses
    ``target``; source elements whose images depend on fewer free generators
    are tried first.  Survivors are checked for invertibility and then
    re-verified from scratch with :meth:`LinearAutomorphism.apply_to_set`.

    ``stop_at`` ends the scan early (for resumable runs); the result is then
    marked incomplete and is not evidence of anything.
    """
    t0 = time.perf_counter()
    spec = family.spec
    if source.spec != spec or target.spec != spec:
        raise SpecMismatchError("family and sets live in different groups")
    total = family.size
    if total > budget:
        raise CapacityError(f"{total} candidates exceed the budget of {budget}")
    if len(source) != len(target):
        return SearchResult([], total, 0, 0, 0, [], True, time.perf_counter() - t0)

    coords = spec.coords_table[source.array].astype(np.int64)
    coeffs = coords[:, [f.index for f in family.free]]
    base_images = (coords @ family.base_matrix().T) % spec.p
    # fewest free dependencies first, then the most significant generators first
    nz = (coeffs != 0)
    last_dep = np.where(nz.any(axis=1), len(family.free) - 1 - np.argmax(nz[:, ::-1], axis=1), -1)
    order = np.lexsort((source.array, last_dep, nz.sum(axis=1)))
    const = order[~nz[order].any(axis=1)]
    varying = order[nz[order].any(axis=1)]
    problem = _Problem(family, base_images[varying], coeffs[varying], target.mask)
    # images of candidate-independent elements are the same for every candidate
    const_ok = target.mask[spec.encode_array(base_images[const])]

    key = problem_hash(family, source, target)
    ckpt = Path(checkpoint) if checkpoint else None
    start, sol_idx = _read_checkpoint(ckpt, key, preset_hash) if ckpt else (0, [])
    end = total if stop_at is None else min(total, stop_at)
    bounds = [(lo, min(end, lo + chunk)) for lo in range(start, end, chunk)]

    hist = np.zeros(len(source) + 1, dtype=np.int64)
    enumerated = 0
    if not const_ok.all():
        hist[int(np.argmin(const_ok))] = end - start
        enumerated = end - start
        bounds = []

    def consume(results):
        nonlocal hist, enumerated
        for (lo, hi), (alive, h) in zip(bounds, results):
            sol_idx.extend(int(i) for i in alive)
            hist[len(const) : len(const) + len(h)] += h
            enumerated += hi - lo
            if ckpt:
                _write_checkpoint(ckpt, hi, key, preset_hash, sol_idx)

    if threads > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker, initargs=(problem,)) as ex:
            consume(ex.map(_scan, [b[0] for b in bounds], [b[1] for b in bounds], chunksize=4))
    else:
        consume(_scan(lo, hi, problem) for lo, hi in bounds)

    solutions, singular = [], 0
    for i in sorted(set(sol_idx)):
        m = family.candidate(i)
        try:
            a = LinearAutomorphism(spec, tuple(map(tuple, m.tolist())))
        except ValueError:
            singular += 1
            continue
        # independent of the pruned path
        if not a.apply_to_set(source).same_elements(target):
            raise AssertionError(f"candidate {i} survived pruning but does not map source onto target")
        solutions.append(a)
    complete = end == total
    rejected = int(hist.sum())
    log.info("searched %d candidates in %.1fs, %d solutions", enumerated, time.perf_counter() - t0, len(solutions))
    return SearchResult(
        solutions=solutions,
        candidates=total,
        enumerated=enumerated,
        rejected=rejected,
        singular=singular,
        rejections_by_depth=[int(x) for x in np.trim_zeros(hist, "b")],
        complete=complete,
        seconds=time.perf_counter() - t0,
        resumed_from=start,
    )


# -- fingerprint-guided search over all generators --------------------------

@dataclass
class GeneralSearchResult:
    solutions: list[LinearAutomorphism]
    nodes: int
    complete: bool
    class_sizes: dict[str, int]

    def to_json(self) -> dict:
        return {
            "solutions": [a.to_json() for a in self.solutions],
            "nodes": self.nodes,
            "complete": self.complete,
            "certificate": self.complete,
            "class_sizes": self.class_sizes,
        }


def general_search_with_pruning(
    g1: CayleyGraph, g2: CayleyGraph, budget: int = 10**6
) -> GeneralSearchResult:
    """Backtracking over images of all generators, constrained by invariants.

    A generator may only go to a vertex with the same count of common
    neighbours with ``e``.  After each assignment every element of the span
    of the assigned generators is checked: its image must be nonzero, must
    have the same count with ``e``, and must lie in the target connection set
    exactly when the element lies in the source set.  ``budget`` caps the
    number of search nodes; an exhausted budget gives ``complete=False``,
    which is a partial report and not a certificate.
    """
    spec = g1.spec
    if g2.spec != spec:
        raise SpecMismatchError("graphs live in different groups")
    c1, c2 = g1.mutual_counts_from_identity, g2.mutual_counts_from_identity
    m1, m2 = g1.conn.mask, g2.conn.mask
    candidates = {i: np.nonzero(c2 == c1[spec.basis(i).code])[0] for i in range(spec.n)}
    gen_order = sorted(range(spec.n), key=lambda i: (len(candidates[i]), i))
    sizes = {spec.names[i]: int(len(candidates[i])) for i in gen_order}

    solutions: list[LinearAutomorphism] = []
    nodes = 0
    images = np.zeros((spec.n, spec.n), dtype=np.int64)  # column i = image of generator i

    def viable(src_span, img_span, gen, cands):
        """Candidates for ``gen`` consistent with the span assigned so far."""
        keep = np.ones(len(cands), dtype=bool)
        step = max(1, (1 << 20) // max(1, len(src_span)))
        for lo in range(0, len(cands), step):
            c = cands[lo : lo + step]
            ok = np.ones(len(c), dtype=bool)
            for k in range(1, spec.p):
                src = spec.add_codes(src_span, (k * spec.basis(gen)).code)
                kc = spec.encode_array((k * spec.coords_table[c].astype(np.int64)) % spec.p)
                img = spec.add_codes(img_span[None, :], kc[:, None])
                ok &= (img != 0).all(axis=1)
                ok &= (c2[img] == c1[src][None, :]).all(axis=1)
                ok &= (m2[img] == m1[src][None, :]).all(axis=1)
            keep[lo : lo + step] = ok
        return cands[keep]

    def extend(src_span, img_span, gen, img_code):
        src_parts, img_parts = [src_span], [img_span]
        for k in range(1, spec.p):
            kg = (k * spec.basis(gen)).code
            ki = (k * spec.from_code(int(img_code))).code
            src_parts.append(spec.add_codes(src_span, kg))
            img_parts.append(spec.add_codes(img_span, ki))
        return np.concatenate(src_parts), np.concatenate(img_parts)

    def recurse(depth, src_span, img_span):
        nonlocal nodes
        if depth == spec.n:
            cols = [spec.from_code(int(spec.encode_array(images[:, i]))) for i in range(spec.n)]
            a = LinearAutomorphism.from_images(spec, cols)
            if a.apply_to_set(g1.conn).same_elements(g2.conn):
                solutions.append(a)
            return True
        gen = gen_order[depth]
        cands = candidates[gen]
        if nodes + len(cands) > budget:
            nodes = budget
            return False
        nodes += len(cands)
        for cand in viable(src_span, img_span, gen, cands):
            s, im = extend(src_span, img_span, gen, cand)
            images[:, gen] = spec.coords_table[int(cand)]
            if not recurse(depth + 1, s, im):
                return False
        return True

    zero = np.array([0], dtype=np.int64)
    complete = recurse(0, zero, zero)
    return GeneralSearchResult(solutions, nodes, complete, sizes)
