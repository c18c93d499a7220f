"""Elements of the elementary abelian group Z_p^n and linear maps on them.

Elements carry a coordinate tuple ``(x_1..x_w, y_1..y_v)``: the leading
``w_count`` coordinates are the "w" part (which selects a block) and the
trailing ``v_count`` coordinates are the "v" part.  Every element also has an
integer *code*, the base-p number whose most significant digit is the first
coordinate.  Codes enumerate the group lexicographically, and the block of an
element is simply ``code // p**v_count``.

The heavy kernels elsewhere in the package work on numpy arrays of codes; the
:class:`GroupElement` wrapper is the convenient scalar interface.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError, ExpressionError, SpecMismatchError

# Largest group we are prepared to tabulate (coordinate table + lookup masks).
MAX_ORDER = 1 << 24


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class GroupSpec:
    """The ambient group Z_p^n with named generators."""

    p: int
    n: int
    w_count: int
    v_count: int
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.names:
            names = tuple(f"w{i + 1}" for i in range(self.w_count)) + tuple(
                f"v{j + 1}" for j in range(self.v_count)
            )
            object.__setattr__(self, "names", names)
        else:
            object.__setattr__(self, "names", tuple(self.names))
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.n < 1 or self.n != self.w_count + self.v_count:
            raise ValueError("need n >= 1 and n == w_count + v_count")
        if len(self.names) != self.n or len(set(self.names)) != self.n:
            raise ValueError("generator names must be n distinct labels")
        for name in self.names:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name) or name == "e":
                raise ValueError(f"bad generator name {name!r}")

    @classmethod
    def paper(cls) -> "GroupSpec":
        """Z_3^8 with generators w1, w2, w3, v1, ..., v5."""
        return cls(p=3, n=8, w_count=3, v_count=5)

    # -- JSON ------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "w_count": self.w_count,
            "v_count": self.v_count,
            "names": list(self.names),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GroupSpec":
        return cls(
            p=int(obj["p"]),
            n=int(obj["n"]),
            w_count=int(obj["w_count"]),
            v_count=int(obj["v_count"]),
            names=tuple(obj.get("names", ())),
        )

    # -- sizes -----------------------------------------------------------
    @property
    def order(self) -> int:
        return self.p**self.n

    @property
    def block_size(self) -> int:
        return self.p**self.v_count

    @property
    def block_count(self) -> int:
        return self.p**self.w_count

    def check_capacity(self) -> None:
        if self.order > MAX_ORDER:
            raise CapacityError(f"|G| = {self.p}^{self.n} exceeds {MAX_ORDER}")

    # -- scalar constructors ---------------------------------------------
    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(int(c) % self.p for c in coords))

    @property
    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.n)

    def gen(self, name: str) -> "GroupElement":
        try:
            i = self.names.index(name)
        except ValueError:
            raise ExpressionError(f"unknown generator {name!r}") from None
        return self.basis(i)

    def basis(self, i: int) -> "GroupElement":
        coords = [0] * self.n
        coords[i] = 1
        return GroupElement(self, tuple(coords))

    def from_code(self, code: int) -> "GroupElement":
        return GroupElement(self, self.decode(int(code)))

    def parse(self, expr: str) -> "GroupElement":
        """Parse a linear combination such as ``"v2+v3-v4+v5"`` or ``"2w1 - v5"``."""
        return parse_element(self, expr)

    # -- codes -----------------------------------------------------------
    @cached_property
    def powers(self) -> np.ndarray:
        return self.p ** np.arange(self.n - 1, -1, -1, dtype=np.int64)

    def encode(self, coords: Sequence[int]) -> int:
        code = 0
        for c in coords:
            code = code * self.p + (int(c) % self.p)
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        if not 0 <= code < self.order:
            raise ValueError(f"code {code} out of range for order {self.order}")
        out = []
        for _ in range(self.n):
            code, r = divmod(code, self.p)
            out.append(r)
        return tuple(reversed(out))

    @cached_property
    def coords_table(self) -> np.ndarray:
        """``(order, n)`` array; row ``c`` holds the coordinates of code ``c``."""
        self.check_capacity()
        codes = np.arange(self.order, dtype=np.int64)
        return ((codes[:, None] // self.powers[None, :]) % self.p).astype(np.int16)

    def encode_array(self, coords: np.ndarray) -> np.ndarray:
        """Encode an array of shape ``(..., n)``; entries are reduced mod p first."""
        return (np.asarray(coords, dtype=np.int64) % self.p) @ self.powers

    def add_codes(self, a, b) -> np.ndarray:
        t = self.coords_table
        return self.encode_array(t[np.asarray(a)] + t[np.asarray(b)])

    def sub_codes(self, a, b) -> np.ndarray:
        t = self.coords_table
        return self.encode_array(t[np.asarray(a)] - t[np.asarray(b)])

    def neg_codes(self, a) -> np.ndarray:
        return self.encode_array(-self.coords_table[np.asarray(a)])

    def block_codes(self, codes) -> np.ndarray:
        return np.asarray(codes) // self.block_size

    def block_from_index(self, index: Sequence[int]) -> int:
        """Block code for a w-part ``(i, j, k, ...)``."""
        if len(index) != self.w_count:
            raise ValueError(f"block index needs {self.w_count} entries")
        code = 0
        for c in index:
            code = code * self.p + (int(c) % self.p)
        return code

    def block_index(self, block_code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.w_count):
            block_code, r = divmod(int(block_code), self.p)
            out.append(r)
        return tuple(reversed(out))

    def v_subspace_codes(self) -> np.ndarray:
        """Codes of the subgroup generated by the v-generators (block 0)."""
        return np.arange(self.block_size, dtype=np.int64)


@dataclass(frozen=True)
class GroupElement:
    """A vector of residues mod p; the vertex type of every Cayley graph here."""

    spec: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.spec.n:
            raise ValueError(f"expected {self.spec.n} coordinates, got {len(self.coords)}")
        if any(not 0 <= c < self.spec.p for c in self.coords):
            raise ValueError(f"coordinates must lie in [0, {self.spec.p})")

    def _check(self, other: "GroupElement") -> None:
        if not isinstance(other, GroupElement):
            raise TypeError(f"cannot combine GroupElement with {type(other).__name__}")
        if other.spec != self.spec:
            raise SpecMismatchError("elements belong to different groups")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        p = self.spec.p
        return GroupElement(self.spec, tuple((a + b) % p for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __neg__(self) -> "GroupElement":
        p = self.spec.p
        return GroupElement(self.spec, tuple((-a) % p for a in self.coords))

    def __mul__(self, k: int) -> "GroupElement":
        p = self.spec.p
        return GroupElement(self.spec, tuple((k * a) % p for a in self.coords))

    __rmul__ = __mul__

    @property
    def code(self) -> int:
        return self.spec.encode(self.coords)

    @property
    def block(self) -> tuple[int, ...]:
        return self.coords[: self.spec.w_count]

    @property
    def v_part(self) -> tuple[int, ...]:
        return self.coords[self.spec.w_count :]

    def is_identity(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> list[int]:
        return list(self.coords)

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"GroupElement({format_element(self)})"


def add(a: GroupElement, b: GroupElement) -> GroupElement:
    return a + b


def neg(a: GroupElement) -> GroupElement:
    return -a


@dataclass(frozen=True)
class LinearMap:
    """An ``n x k`` residue matrix sending parameter vectors in Z_p^k to elements."""

    spec: GroupSpec
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(rows) != self.spec.n:
            raise ValueError(f"matrix needs {self.spec.n} rows, got {len(rows)}")
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        if any(not 0 <= x < self.spec.p for r in rows for x in r):
            raise ValueError(f"matrix entries must lie in [0, {self.spec.p})")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def from_columns(cls, spec: GroupSpec, columns: Sequence[GroupElement]) -> "LinearMap":
        rows = tuple(tuple(col.coords[i] for col in columns) for i in range(spec.n))
        return cls(spec, rows)

    @property
    def k(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    @property
    def columns(self) -> list[GroupElement]:
        return [GroupElement(self.spec, tuple(r[j] for r in self.matrix)) for j in range(self.k)]

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.spec.n, self.k)

    def __call__(self, params: Sequence[int]) -> GroupElement:
        return apply_linear(self, params)


def apply_linear(m: LinearMap, params: Sequence[int]) -> GroupElement:
    if len(params) != m.k:
        raise ValueError(f"expected {m.k} parameters, got {len(params)}")
    p = m.spec.p
    coords = tuple(sum(a * q for a, q in zip(row, params)) % p for row in m.matrix)
    return GroupElement(m.spec, coords)


def enumerate_group(spec: GroupSpec) -> Iterator[GroupElement]:
    """Yield every element once, lexicographically by coordinates (= by code)."""
    spec.check_capacity()
    for code in range(spec.order):
        yield GroupElement(spec, spec.decode(code))


# -- vertex expressions --------------------------------------------------

_TERM = re.compile(r"([+-])?(\d+)?\*?([A-Za-z][A-Za-z0-9_]*)?")


def parse_element(spec: GroupSpec, expr: str) -> GroupElement:
    s = re.sub(r"\s+", "", expr)
    if s in ("e", "0"):
        return spec.zero
    if not s:
        raise ExpressionError("empty vertex expression")
    coords = [0] * spec.n
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, name = m.groups()
        if m.end() == pos or name is None or (pos > 0 and sign is None):
            raise ExpressionError(f"cannot parse {expr!r} at position {pos}")
        if name not in spec.names:
            raise ExpressionError(f"unknown generator {name!r} in {expr!r}")
        coef = int(num) if num else 1
        if sign == "-":
            coef = -coef
        i = spec.names.index(name)
        coords[i] = (coords[i] + coef) % spec.p
        pos = m.end()
    return GroupElement(spec, tuple(coords))


def format_element(g: GroupElement) -> str:
    """Inverse of :func:`parse_element`, using signed residues (2 -> -1 for p=3)."""
    p = g.spec.p
    parts = []
    for name, c in zip(g.spec.names, g.coords):
        if c == 0:
            continue
        c = c - p if c > p // 2 else c
        mag = abs(c)
        term = name if mag == 1 else f"{mag}{name}"
        parts.append(("-" if c < 0 else "+") + term)
    if not parts:
        return "e"
    out = "".join(parts)
    return out[1:] if out[0] == "+" else out
